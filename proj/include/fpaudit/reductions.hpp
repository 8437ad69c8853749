#pragma once

#include "fpaudit/distributions.hpp"
#include "fpaudit/mechanisms.hpp"

namespace fpaudit {

// Bernoulli-padding reduction from Gaussian samples to the heavy-tailed
// mixture: n_outer = ceil(m_inner / (100 beta^{k/(k-1)})) slots, each filled
// with the next unconsumed Gaussian sample when its Bernoulli fires.
struct ReductionConfig {
  int k;
  double beta;
  int m_inner;   // Gaussian samples available
  int n_outer;   // mixture slots
  double radius; // clip radius R for the rescale reduction
  double scale;  // output rescale factor (radius^2)

  ReductionConfig(int k_, double beta_, int m_inner_, double radius_);
  double pad_rate() const;  // beta^{k/(k-1)}
};

// Consume Gaussian samples in order where z_i = 1; emit zero vectors where
// z_i = 0 or the supply is exhausted.
Dataset pad_to_heavy_tailed(const Dataset& x, const ReductionConfig& cfg,
                            Rng& rng);

// Exact P(Bin(n_outer, beta^{k/(k-1)}) > m_inner).
double exhaustion_probability(const ReductionConfig& cfg);

// Wrap a unit-ball covariance mechanism: X -> scale * mech(clip(X, radius)).
// Inherits the declared privacy of mech (per-sample deterministic preprocessing).
Mechanism rescale_reduction_wrap(const Mechanism& mech, int d,
                                 double radius = 0.0);

// d/alpha^2 + d^{3/2}/(alpha eps); constants and log factors omitted.
double predicted_sample_complexity_covariance(int d, double alpha,
                                              double epsilon);

// d/alpha^2 + d/(alpha^{k/(k-1)} eps).
double predicted_sample_complexity_heavy_tailed(int d, double alpha,
                                                double epsilon, int k);

// Piecewise error floor at eps = 1: d/n for d <= n^{2/3}, n^{-1/3} for
// n^{2/3} <= d <= n^{4/3}, sqrt(d)/n above.
double empirical_cov_error_floor(double d, double n);

}  // namespace fpaudit
