#include "fpaudit/reductions.hpp"

#include <cmath>
#include <stdexcept>

namespace fpaudit {

ReductionConfig::ReductionConfig(int k_, double beta_, int m_inner_,
                                 double radius_)
    : k(k_), beta(beta_), m_inner(m_inner_), radius(radius_) {
  if (k < 2) throw std::invalid_argument("ReductionConfig: k >= 2");
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument(
        "ReductionConfig: need 0 < beta <= 1 (beta = alpha*T > 1 means "
        "alpha > 1/T, outside the padding construction's range)");
  }
  if (m_inner < 1) throw std::invalid_argument("ReductionConfig: m_inner >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("ReductionConfig: radius > 0");
  // Round up: the conservative direction for the exhaustion bound.
  n_outer = static_cast<int>(
      std::ceil(static_cast<double>(m_inner) / (100.0 * pad_rate())));
  scale = radius * radius;
}

double ReductionConfig::pad_rate() const {
  return std::pow(beta, static_cast<double>(k) / static_cast<double>(k - 1));
}

Dataset pad_to_heavy_tailed(const Dataset& x, const ReductionConfig& cfg,
                            Rng& rng) {
  if (x.size() < cfg.m_inner) {
    throw std::invalid_argument("pad_to_heavy_tailed: too few input samples");
  }
  const double rate = cfg.pad_rate();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.dim(), cfg.n_outer);
  int consumed = 0;
  for (int i = 0; i < cfg.n_outer; ++i) {
    bool fire = rng.bernoulli(rate);  // draw regardless, to keep the stream
                                      // aligned under adjacency coupling
    if (fire && consumed < cfg.m_inner) {
      out.col(i) = x.sample(consumed);
      ++consumed;
    }
  }
  return Dataset(std::move(out));
}

double exhaustion_probability(const ReductionConfig& cfg) {
  return binomial_tail_above(static_cast<std::uint64_t>(cfg.n_outer),
                             cfg.pad_rate(),
                             static_cast<std::uint64_t>(cfg.m_inner));
}

Mechanism rescale_reduction_wrap(const Mechanism& mech, int d, double radius) {
  const double r = radius > 0.0 ? radius : 20.0 * std::sqrt(static_cast<double>(d));
  Mechanism wrapped;
  wrapped.id = "rescale(" + mech.id + ")";
  wrapped.privacy = mech.privacy;
  wrapped.sensitivity = mech.sensitivity;
  auto inner = mech.run;
  wrapped.run = [inner, r](const Dataset& x, Rng& rng) {
    Dataset y = clip_dataset(x, r);
    return inner(y, rng) * (r * r);
  };
  return wrapped;
}

double predicted_sample_complexity_covariance(int d, double alpha,
                                              double epsilon) {
  if (!(alpha > 0.0 && alpha <= 1.0 && epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("predicted_sample_complexity: alpha, eps in (0, 1]");
  }
  const double dd = static_cast<double>(d);
  return dd / (alpha * alpha) + std::pow(dd, 1.5) / (alpha * epsilon);
}

double predicted_sample_complexity_heavy_tailed(int d, double alpha,
                                                double epsilon, int k) {
  if (k < 2) throw std::invalid_argument("predicted_sample_complexity: k >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0 && epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("predicted_sample_complexity: alpha, eps in (0, 1]");
  }
  const double dd = static_cast<double>(d);
  const double expo = static_cast<double>(k) / static_cast<double>(k - 1);
  return dd / (alpha * alpha) + dd / (std::pow(alpha, expo) * epsilon);
}

double empirical_cov_error_floor(double d, double n) {
  if (!(d >= 1.0 && n >= 1.0)) {
    throw std::invalid_argument("empirical_cov_error_floor: d, n >= 1");
  }
  const double lo = std::pow(n, 2.0 / 3.0);
  const double hi = std::pow(n, 4.0 / 3.0);
  if (d <= lo) return d / n;
  if (d <= hi) return std::pow(n, -1.0 / 3.0);
  return std::sqrt(d) / n;
}

}  // namespace fpaudit
