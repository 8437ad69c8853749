#include "fpaudit/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpaudit {

PrivacyParams::PrivacyParams(double eps, double del) : epsilon(eps), delta(del) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("PrivacyParams: epsilon > 0");
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("PrivacyParams: delta in [0, 1)");
  }
}

SymMatrix empirical_second_moment(const Dataset& x) {
  const double n = static_cast<double>(x.size());
  return symmetrize(x.columns() * x.columns().transpose() / n);
}

SymMatrix empirical_covariance_centered(const Dataset& x) {
  Vector mu = x.columns().rowwise().mean();
  SymMatrix second = empirical_second_moment(x);
  return second - outer(mu);
}

Dataset clip_dataset(const Dataset& x, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("clip_dataset: radius > 0");
  Eigen::MatrixXd cols = x.columns();
  for (int j = 0; j < cols.cols(); ++j) {
    if (cols.col(j).norm() > radius) {
      cols.col(j).setZero();
    } else {
      cols.col(j) /= radius;
    }
  }
  return Dataset(std::move(cols));
}

double gaussian_sigma(double sensitivity, const PrivacyParams& p) {
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("gaussian_sigma: sensitivity > 0");
  }
  if (p.delta <= 0.0) {
    throw std::invalid_argument(
        "gaussian_sigma: delta must be positive (approximate-DP mechanism)");
  }
  if (!(p.epsilon <= 1.0)) {
    throw std::invalid_argument("gaussian_sigma: calibration assumes eps <= 1");
  }
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / p.delta)) / p.epsilon;
}

SymMatrix symmetric_gaussian_noise(int dim, double sigma, Rng& rng) {
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = sigma * rng.normal();
  }
  return symmetrize(g);
}

Estimate dp_covariance_mechanism(const Dataset& x, const PrivacyParams& p,
                                 double radius, Rng& rng) {
  const double n = static_cast<double>(x.size());
  Dataset y = clip_dataset(x, radius);
  SymMatrix stat = empirical_second_moment(y);
  // Replacing one unit-ball sample moves the normalized second moment by at
  // most 2/n in Frobenius norm.
  const double sigma = gaussian_sigma(2.0 / n, p);
  SymMatrix noisy = stat + symmetric_gaussian_noise(x.dim(), sigma, rng);
  return Estimate{noisy * (radius * radius), "dp-gauss-cov", p};
}

Vector dp_mean_mechanism(const Dataset& x, const PrivacyParams& p,
                         double radius, Rng& rng) {
  const double n = static_cast<double>(x.size());
  Dataset y = clip_dataset(x, radius);
  Vector mean = y.columns().rowwise().mean();
  const double sigma = gaussian_sigma(2.0 / n, p);
  for (int i = 0; i < mean.size(); ++i) mean(i) += sigma * rng.normal();
  return radius * mean;
}

SymMatrix median_boost(const std::vector<SymMatrix>& estimates,
                       double frob_cap) {
  if (estimates.empty()) {
    throw std::invalid_argument("median_boost: need at least one estimate");
  }
  const int d = estimates.front().dim();
  for (const auto& e : estimates) {
    if (e.dim() != d) throw std::invalid_argument("median_boost: dim mismatch");
  }
  const std::size_t mid = (estimates.size() - 1) / 2;  // lower median
  Eigen::MatrixXd med(d, d);
  std::vector<double> vals(estimates.size());
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      for (std::size_t l = 0; l < estimates.size(); ++l) vals[l] = estimates[l](i, j);
      std::nth_element(vals.begin(), vals.begin() + static_cast<long>(mid),
                       vals.end());
      med(i, j) = vals[mid];
      med(j, i) = med(i, j);
    }
  }
  SymMatrix out{std::move(med)};
  if (frobenius_norm(out) > frob_cap) return SymMatrix::zero(d);
  return out;
}

namespace {
double default_radius(int d, const MechanismParams& params) {
  return params.radius > 0.0 ? params.radius : 20.0 * std::sqrt(static_cast<double>(d));
}
}  // namespace

Mechanism make_mechanism(const std::string& id, int d,
                         const MechanismParams& params) {
  Mechanism m;
  m.id = id;
  if (id == "empirical") {
    m.run = [](const Dataset& x, Rng&) { return empirical_second_moment(x); };
    return m;
  }
  if (id == "empirical-centered") {
    m.run = [](const Dataset& x, Rng&) {
      return empirical_covariance_centered(x);
    };
    return m;
  }
  if (id == "constant-prior-mean") {
    SymMatrix mean = prior_spec(d).mean();
    m.run = [mean](const Dataset&, Rng&) { return mean; };
    return m;
  }
  PrivacyParams p(params.epsilon, params.delta);
  const double radius = default_radius(d, params);
  if (id == "dp-gauss-cov") {
    m.privacy = p;
    m.sensitivity = 2.0 * radius * radius;  // divide by n for a given dataset
    m.run = [p, radius](const Dataset& x, Rng& rng) {
      return dp_covariance_mechanism(x, p, radius, rng).value;
    };
    return m;
  }
  if (id == "dp-gauss-cov-shrunk") {
    if (!(params.signal_power > 0.0)) {
      throw std::invalid_argument(
          "dp-gauss-cov-shrunk: needs a calibrated signal_power > 0");
    }
    SymMatrix prior_mean = prior_spec(d).mean();
    const double s = params.signal_power;
    m.privacy = p;
    m.sensitivity = 2.0 * radius * radius;
    m.run = [p, radius, s, prior_mean](const Dataset& x, Rng& rng) {
      SymMatrix raw = dp_covariance_mechanism(x, p, radius, rng).value;
      const double d_ = static_cast<double>(x.dim());
      const double sigma = gaussian_sigma(2.0 / static_cast<double>(x.size()), p);
      // Expected squared Frobenius norm of the rescaled noise.
      const double noise_power = std::pow(radius, 4.0) * sigma * sigma *
                                 d_ * (d_ + 1.0) / 2.0;
      // Data-independent shrinkage toward the prior mean; post-processing, so
      // the privacy of the raw release carries over.
      const double lambda = s / (s + noise_power);
      return prior_mean + (raw - prior_mean) * lambda;
    };
    return m;
  }
  if (id.rfind("median-boost(dp-gauss-cov", 0) == 0) {
    int batches = params.batches;
    auto comma = id.find(',');
    if (comma != std::string::npos) {
      batches = std::stoi(id.substr(comma + 1));
    }
    if (batches < 1) throw std::invalid_argument("median-boost: L >= 1");
    const double cap = 20.0 * std::sqrt(static_cast<double>(d));
    m.privacy = p;  // disjoint batches: parallel composition
    m.run = [p, radius, batches, cap](const Dataset& x, Rng& rng) {
      const int n = x.size();
      const int per = n / batches;
      if (per < 1) throw std::invalid_argument("median-boost: n < L");
      std::vector<SymMatrix> ests;
      ests.reserve(static_cast<std::size_t>(batches));
      for (int b = 0; b < batches; ++b) {
        const int lo = b * per;
        const int len = (b == batches - 1) ? n - lo : per;
        Dataset batch(x.columns().middleCols(lo, len));
        ests.push_back(dp_covariance_mechanism(batch, p, radius, rng).value);
      }
      return median_boost(ests, cap);
    };
    return m;
  }
  throw std::invalid_argument("unknown mechanism id: " + id);
}

std::vector<std::string> mechanism_ids() {
  return {"empirical",    "empirical-centered",
          "constant-prior-mean", "dp-gauss-cov",
          "dp-gauss-cov-shrunk", "median-boost(dp-gauss-cov,L)"};
}

}  // namespace fpaudit
