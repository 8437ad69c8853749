#include "fpaudit/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace fpaudit {

Dataset::Dataset(Eigen::MatrixXd columns) : cols_(std::move(columns)) {
  if (cols_.rows() < 1 || cols_.cols() < 1) {
    throw std::invalid_argument("Dataset: need dim >= 1 and n >= 1");
  }
}

Dataset Dataset::with_replaced(int i, const Vector& x) const {
  if (x.size() != cols_.rows()) {
    throw std::invalid_argument("Dataset: replacement dim mismatch");
  }
  Eigen::MatrixXd c = cols_;
  c.col(i) = x;
  return Dataset(std::move(c));
}

PriorSpec::PriorSpec(SymMatrix v, int m) : scale(std::move(v)), dof(m) {
  if (dof < scale.dim() + 2) {
    throw std::invalid_argument("PriorSpec: need dof >= dim + 2");
  }
  if (eigen_extremes(scale).first <= 0.0) {
    throw std::invalid_argument("PriorSpec: scale must be positive definite");
  }
}

SymMatrix PriorSpec::mean() const {
  return scale * (1.0 / static_cast<double>(dof - dim() - 1));
}

HeavyTailSpec::HeavyTailSpec(int k_, double beta_, Vector mu_)
    : k(k_), beta(beta_), mu(std::move(mu_)) {
  if (k < 2) throw std::invalid_argument("HeavyTailSpec: need k >= 2");
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("HeavyTailSpec: need 0 < beta <= 1");
  }
  if (mu.norm() > 1.0 + 1e-12) {
    throw std::invalid_argument("HeavyTailSpec: need ||mu|| <= 1");
  }
}

double HeavyTailSpec::atom_rate() const {
  return std::pow(beta, static_cast<double>(k) / static_cast<double>(k - 1));
}

double HeavyTailSpec::gaussian_scale() const {
  return std::pow(beta, -1.0 / static_cast<double>(k - 1));
}

Vector gaussian_draw(const Vector& mean, const SymMatrix& cov_sqrt, Rng& rng) {
  Vector z(mean.size());
  for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + cov_sqrt.mat() * z;
}

Dataset sample_gaussian(const Vector& mean, const SymMatrix& cov, int n,
                        Rng& rng) {
  if (mean.size() != cov.dim()) {
    throw std::invalid_argument("sample_gaussian: dim mismatch");
  }
  SymMatrix root = sqrt_psd(cov);  // throws on non-PSD input
  const int d = cov.dim();
  Eigen::MatrixXd z(d, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) z(i, j) = rng.normal();
  }
  Eigen::MatrixXd cols = root.mat() * z;
  cols.colwise() += mean;
  return Dataset(std::move(cols));
}

SymMatrix sample_wishart(const SymMatrix& v, int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_wishart: need m >= 1");
  if (eigen_extremes(v).first <= 0.0) {
    throw std::invalid_argument("sample_wishart: scale must be positive definite");
  }
  const int d = v.dim();
  SymMatrix root = sqrt_psd(v);
  Eigen::MatrixXd g(d, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  }
  Eigen::MatrixXd cols = root.mat() * g;
  return symmetrize(cols * cols.transpose());
}

SymMatrix sample_inverse_wishart(const SymMatrix& v, int m, Rng& rng) {
  const int d = v.dim();
  // m >= d keeps the Wishart draw invertible almost surely; the mean only
  // exists for m >= d + 2, which samplers do not need.
  if (m < d) {
    throw std::invalid_argument("sample_inverse_wishart: need m >= d");
  }
  SymMatrix v_inv = symmetrize(v.mat().inverse());
  for (int attempt = 0; attempt < 3; ++attempt) {
    SymMatrix w = sample_wishart(v_inv, m, rng);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(w.mat());
    if (!lu.isInvertible()) continue;  // probability-zero event at float precision
    SymMatrix out = symmetrize(lu.inverse());
    if (eigen_extremes(out).first > 0.0) return out;
  }
  throw std::runtime_error("sample_inverse_wishart: repeated singular draws");
}

double log_density_inverse_wishart(const SymMatrix& sigma, const SymMatrix& v,
                                   int m, bool normalized) {
  const int d = sigma.dim();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma.mat());
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("log_density_inverse_wishart: Sigma not PD");
  }
  double log_det = 0.0;
  for (int i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  Eigen::MatrixXd sigma_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  double tr = (v.mat() * sigma_inv).trace();
  double out = -0.5 * (m + d + 1) * log_det - 0.5 * tr;
  if (normalized) {
    Eigen::LLT<Eigen::MatrixXd> lltv(v.mat());
    double log_det_v = 0.0;
    for (int i = 0; i < d; ++i) log_det_v += 2.0 * std::log(lltv.matrixL()(i, i));
    out += 0.5 * m * log_det_v - 0.5 * m * d * std::log(2.0) -
           log_multigamma(d, 0.5 * m);
  }
  return out;
}

PriorSpec prior_spec(int d) {
  const int m = 2 * d;
  return PriorSpec(SymMatrix::identity(d) * static_cast<double>(m), m);
}

SymMatrix sample_prior(int d, Rng& rng) {
  PriorSpec p = prior_spec(d);
  return sample_inverse_wishart(p.scale, p.dof, rng);
}

Dataset sample_heavy_tailed(const HeavyTailSpec& spec, int n, Rng& rng) {
  const int d = spec.dim();
  const double rate = spec.atom_rate();
  const double s = spec.gaussian_scale();
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(d, n);
  for (int j = 0; j < n; ++j) {
    if (rng.bernoulli(rate)) {
      for (int i = 0; i < d; ++i) cols(i, j) = s * spec.mu(i) + s * rng.normal();
    }
    // else: exact zero vector (the atom component)
  }
  return Dataset(std::move(cols));
}

MeanSE kth_moment_estimate(const HeavyTailSpec& spec, const Vector& v,
                           int trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("kth_moment_estimate: trials >= 1");
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("kth_moment_estimate: v must be a unit vector");
  }
  const double rate = spec.atom_rate();
  const double s = spec.gaussian_scale();
  const double center = spec.mean().dot(v);
  const double proj_mu = s * spec.mu.dot(v);
  std::vector<double> vals(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    // Only the projection onto v is needed per draw.
    double x = rng.bernoulli(rate) ? proj_mu + s * rng.normal() : 0.0;
    vals[static_cast<std::size_t>(t)] =
        std::pow(std::abs(x - center), static_cast<double>(spec.k));
  }
  return mean_se(vals);
}

HansonWrightReport hanson_wright_check(const SymMatrix& sigma, int trials,
                                       double c1, Rng& rng,
                                       const std::vector<double>& t_grid) {
  HansonWrightReport report;
  report.c1 = c1;
  const double fro = frobenius_norm(sigma);
  const double op = operator_norm(sigma);
  const double tr = sigma.trace();
  SymMatrix root = sqrt_psd(sigma);
  const int d = sigma.dim();
  std::vector<double> dev(static_cast<std::size_t>(trials));
  Vector zero = Vector::Zero(d);
  for (int t = 0; t < trials; ++t) {
    Vector x = gaussian_draw(zero, root, rng);
    dev[static_cast<std::size_t>(t)] = std::abs(x.squaredNorm() - tr);
  }
  for (double t : t_grid) {
    TailCheckPoint pt;
    pt.t = t;
    std::size_t hits = 0;
    for (double v : dev) {
      if (v >= t) ++hits;
    }
    pt.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    pt.se = std::sqrt(pt.empirical * (1.0 - pt.empirical) /
                      static_cast<double>(trials));
    if (fro == 0.0) {
      // Degenerate Sigma: ||X||^2 is identically tr(Sigma).
      pt.bound = (t > 0.0) ? 0.0 : 2.0;
    } else {
      pt.bound = 2.0 * std::exp(-c1 * std::min(t * t / (fro * fro), t / op));
    }
    pt.violated = pt.empirical > pt.bound + 4.0 * pt.se;
    report.any_violation = report.any_violation || pt.violated;
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace fpaudit
