#pragma once

#include <vector>

#include "fpaudit/linalg.hpp"
#include "fpaudit/rng.hpp"
#include "fpaudit/stats.hpp"

namespace fpaudit {

// Ordered collection of n vectors in R^d, stored as the columns of a d x n
// matrix.
class Dataset {
 public:
  explicit Dataset(Eigen::MatrixXd columns);

  int dim() const { return static_cast<int>(cols_.rows()); }
  int size() const { return static_cast<int>(cols_.cols()); }
  Vector sample(int i) const { return cols_.col(i); }
  const Eigen::MatrixXd& columns() const { return cols_; }
  Eigen::MatrixXd& columns() { return cols_; }

  // Copy with sample i replaced.
  Dataset with_replaced(int i, const Vector& x) const;

  bool operator==(const Dataset& o) const { return cols_ == o.cols_; }

 private:
  Eigen::MatrixXd cols_;
};

// Inverse-Wishart prior parameters in the standard density parametrization:
// density proportional to det(S)^{-(m+d+1)/2} exp(-tr(V S^{-1})/2).
struct PriorSpec {
  SymMatrix scale;  // V, positive definite
  int dof;          // m >= dim + 2 so the mean V/(m-d-1) exists

  PriorSpec(SymMatrix v, int m);
  int dim() const { return scale.dim(); }
  SymMatrix mean() const;
};

// Mixture with bounded kth moment: with probability beta^{k/(k-1)} a draw is
// N(beta^{-1/(k-1)} mu, beta^{-2/(k-1)} I), otherwise the zero vector.
struct HeavyTailSpec {
  int k;        // moment order, >= 2
  double beta;  // in (0, 1]
  Vector mu;    // ||mu||_2 <= 1

  HeavyTailSpec(int k_, double beta_, Vector mu_);
  int dim() const { return static_cast<int>(mu.size()); }
  double atom_rate() const;     // beta^{k/(k-1)}
  double gaussian_scale() const;  // beta^{-1/(k-1)}
  Vector mean() const { return beta * mu; }
};

// n i.i.d. draws of mean + sqrt_psd(cov) z, z standard normal.
Dataset sample_gaussian(const Vector& mean, const SymMatrix& cov, int n,
                        Rng& rng);

// Single multivariate normal draw given a precomputed PSD square root.
Vector gaussian_draw(const Vector& mean, const SymMatrix& cov_sqrt, Rng& rng);

// W_d(V, m): sum of m outer products of N(0, V) draws. V positive definite.
SymMatrix sample_wishart(const SymMatrix& v, int m, Rng& rng);

// W_d^{-1}(V, m) in the standard density scale: draw W ~ W_d(V^{-1}, m) and
// invert. Numerically singular draws are retried up to 3 times.
SymMatrix sample_inverse_wishart(const SymMatrix& v, int m, Rng& rng);

// Unnormalized log density -((m+d+1)/2) log det S - tr(V S^{-1})/2; with
// normalized = true adds the exact log normalizer (any d, used in tests only
// for d <= 2 quadrature oracles).
double log_density_inverse_wishart(const SymMatrix& sigma, const SymMatrix& v,
                                   int m, bool normalized = false);

// The covariance prior: standard-scale inverse Wishart with V = m I, m = 2d.
// Equivalently m * M with M ~ W_d^{-1}(I, m).
PriorSpec prior_spec(int d);
SymMatrix sample_prior(int d, Rng& rng);

Dataset sample_heavy_tailed(const HeavyTailSpec& spec, int n, Rng& rng);

// Monte-Carlo estimate of E|<D_mu - E D_mu, v>|^k for unit v.
MeanSE kth_moment_estimate(const HeavyTailSpec& spec, const Vector& v,
                           int trials, Rng& rng);

// One grid point of the Hanson-Wright tail check.
struct TailCheckPoint {
  double t = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool violated = false;  // empirical > bound + 4 SE
};

struct HansonWrightReport {
  double c1 = 0.0;
  std::vector<TailCheckPoint> points;
  bool any_violation = false;
};

// Empirical tails of |  ||X||^2 - tr(Sigma) | for X ~ N(0, Sigma) against
// 2 exp(-c1 min(t^2/||Sigma||_F^2, t/||Sigma||_op)) on a grid of t.
HansonWrightReport hanson_wright_check(const SymMatrix& sigma, int trials,
                                       double c1, Rng& rng,
                                       const std::vector<double>& t_grid);

}  // namespace fpaudit
