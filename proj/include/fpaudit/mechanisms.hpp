#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpaudit/distributions.hpp"
#include "fpaudit/linalg.hpp"
#include "fpaudit/rng.hpp"

namespace fpaudit {

struct PrivacyParams {
  double epsilon;
  double delta;

  PrivacyParams(double eps, double del);
};

// A covariance estimator under attack: (Dataset, Rng) -> SymMatrix, with its
// declared privacy (nullopt = non-private) and, for DP mechanisms, the
// replace-one-sample Frobenius sensitivity used by the structural tests.
struct Mechanism {
  std::string id;
  std::optional<PrivacyParams> privacy;
  double sensitivity = 0.0;
  std::function<SymMatrix(const Dataset&, Rng&)> run;
};

struct Estimate {
  SymMatrix value;
  std::string mechanism_id;
  std::optional<PrivacyParams> claimed_privacy;
};

// (1/n) sum X_i X_i^T.
SymMatrix empirical_second_moment(const Dataset& x);

// (1/n) sum X_i X_i^T - mu_hat mu_hat^T.
SymMatrix empirical_covariance_centered(const Dataset& x);

// Scale every sample by 1/R; samples with ||X_i|| > R become the zero vector.
Dataset clip_dataset(const Dataset& x, double radius);

// Classical Gaussian-mechanism noise scale sigma = sens sqrt(2 ln(1.25/delta)) / eps.
double gaussian_sigma(double sensitivity, const PrivacyParams& p);

// Clip to radius R, rescale into the unit ball, take the second moment, add
// symmetrized Gaussian noise calibrated to the 2/n Frobenius sensitivity of
// the normalized statistic, and scale back by R^2.
Estimate dp_covariance_mechanism(const Dataset& x, const PrivacyParams& p,
                                 double radius, Rng& rng);

// Same construction for the mean: clip-and-noise with sensitivity 2R/n.
Vector dp_mean_mechanism(const Dataset& x, const PrivacyParams& p,
                         double radius, Rng& rng);

// Entrywise (lower) median of the estimates, zeroed when its Frobenius norm
// exceeds frob_cap.
SymMatrix median_boost(const std::vector<SymMatrix>& estimates, double frob_cap);

// Symmetric matrix of i.i.d. N(0, sigma^2) entries, symmetrized: diagonal
// variance sigma^2, off-diagonal variance sigma^2/2. An L2 (Frobenius)
// sensitivity Delta with per-entry scale sigma = gaussian_sigma(Delta, p)
// yields (eps, delta)-DP for this shape.
SymMatrix symmetric_gaussian_noise(int dim, double sigma, Rng& rng);

// Registry keyed by string id, for CLI selection. Recognized ids:
//   "empirical"                      second moment, non-private
//   "empirical-centered"             centered covariance, non-private
//   "constant-prior-mean"            data-independent prior mean
//   "dp-gauss-cov"                   DP covariance (needs eps, delta, R)
//   "dp-gauss-cov-shrunk"            same release, post-processed by shrinking
//                                    toward the prior mean with the
//                                    noise-adaptive weight S / (S + N(eps));
//                                    needs a calibrated signal power S
//   "median-boost(dp-gauss-cov,L)"   L-batch boosted DP covariance with
//                                    Frobenius cap 20 sqrt(d)
struct MechanismParams {
  double epsilon = 1.0;
  double delta = 1e-6;
  double radius = 0.0;  // 0 = choose 20 sqrt(d) at run time
  int batches = 1;      // L for median-boost
  double signal_power = 0.0;  // S for dp-gauss-cov-shrunk (from calibration)
};

Mechanism make_mechanism(const std::string& id, int d,
                         const MechanismParams& params = {});

std::vector<std::string> mechanism_ids();

}  // namespace fpaudit
