#include "fpaudit/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fpaudit/parallel.hpp"

namespace fpaudit {

double z_statistic(const SymMatrix& m_out, const SymMatrix& sigma,
                   const Vector& x) {
  if (m_out.dim() != sigma.dim() || x.size() != sigma.dim()) {
    throw std::invalid_argument("z_statistic: dimension mismatch");
  }
  // <M - Sigma, x x^T - Sigma> = x^T (M - Sigma) x - <M - Sigma, Sigma>.
  Eigen::MatrixXd diff = m_out.mat() - sigma.mat();
  return x.dot(diff * x) - diff.cwiseProduct(sigma.mat()).sum();
}

AttackTrialRecord attack_trial(const Mechanism& mech, int d, int n, Rng rng,
                               const AttackOptions& opts) {
  if (n < 1) throw std::invalid_argument("attack_trial: n >= 1");
  AttackTrialRecord rec{SymMatrix::zero(d), SymMatrix::zero(d),
                        SymMatrix::zero(d)};
  rec.seed = rng.seed();

  Rng rng_sigma = rng.child(0);
  Rng rng_x = rng.child(1);
  Rng rng_xprime = rng.child(2);
  Rng rng_mech = rng.child(3);
  Rng rng_subset = rng.child(4);

  rec.sigma = sample_prior(d, rng_sigma);
  Vector zero = Vector::Zero(d);
  Dataset x = sample_gaussian(zero, rec.sigma, n, rng_x);
  Dataset x_prime = sample_gaussian(zero, rec.sigma, n, rng_xprime);
  rec.sigma_hat = empirical_second_moment(x);

  Rng rng_run = rng_mech.child(0);
  rec.m_out = mech.run(x, rng_run);

  rec.z.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rec.z[static_cast<std::size_t>(i)] =
        z_statistic(rec.m_out, rec.sigma, x.sample(i));
  }

  // Swapped-index runs use fresh mechanism randomness: the DP closeness of
  // Z_i and Z_i' is a distributional statement, not a coupled one.
  std::vector<int> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), 0);
  if (!opts.full_zprime && n > opts.zprime_subset) {
    for (int i = 0; i < opts.zprime_subset; ++i) {
      int j = i + static_cast<int>(rng_subset.below(
                      static_cast<std::uint64_t>(n - i)));
      std::swap(indices[static_cast<std::size_t>(i)],
                indices[static_cast<std::size_t>(j)]);
    }
    indices.resize(static_cast<std::size_t>(opts.zprime_subset));
    std::sort(indices.begin(), indices.end());
  }
  rec.z_prime.assign(static_cast<std::size_t>(n),
                     std::numeric_limits<double>::quiet_NaN());
  rec.z_prime_indices = indices;
  for (std::size_t s = 0; s < indices.size(); ++s) {
    int i = indices[s];
    Dataset swapped = x.with_replaced(i, x_prime.sample(i));
    Rng rng_i = rng_mech.child(static_cast<std::uint64_t>(i) + 1);
    SymMatrix m_swapped = mech.run(swapped, rng_i);
    rec.z_prime[static_cast<std::size_t>(i)] =
        z_statistic(m_swapped, rec.sigma, x.sample(i));
  }

  rec.err_frob = frobenius_norm(rec.m_out - rec.sigma);
  rec.err_emp = frobenius_norm(rec.m_out - rec.sigma_hat);
  rec.posterior_gap = posterior_gap(rec.sigma_hat, n, 2 * d);
  return rec;
}

double decomposition_residual(const AttackTrialRecord& rec) {
  const double n = static_cast<double>(rec.z.size());
  double lhs = std::accumulate(rec.z.begin(), rec.z.end(), 0.0) / n;
  double cross = inner_product(rec.m_out - rec.sigma_hat,
                               rec.sigma_hat - rec.sigma);
  double sq = frobenius_norm(rec.sigma_hat - rec.sigma);
  double rhs = cross + sq * sq;
  double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  return std::abs(lhs - rhs) / scale;
}

SymMatrix posterior_mean(const SymMatrix& sigma_hat, int n, int m) {
  const int d = sigma_hat.dim();
  if (m + n < d + 2) {
    throw std::invalid_argument("posterior_mean: need m + n >= d + 2");
  }
  double denom = static_cast<double>(m + n - d - 1);
  return (SymMatrix::identity(d) * static_cast<double>(m) +
          sigma_hat * static_cast<double>(n)) *
         (1.0 / denom);
}

SymMatrix posterior_sample(const SymMatrix& sigma_hat, int n, int m,
                           Rng& rng) {
  const int d = sigma_hat.dim();
  SymMatrix scale = SymMatrix::identity(d) * static_cast<double>(m) +
                    sigma_hat * static_cast<double>(n);
  return sample_inverse_wishart(scale, m + n, rng);
}

double posterior_gap(const SymMatrix& sigma_hat, int n, int m) {
  const int d = sigma_hat.dim();
  if (m + n < d + 2) {
    throw std::invalid_argument("posterior_gap: need m + n >= d + 2");
  }
  double denom = static_cast<double>(m + n - d - 1);
  SymMatrix gap = SymMatrix::identity(d) * (static_cast<double>(m) / denom) -
                  sigma_hat * (static_cast<double>(m - d - 1) / denom);
  return frobenius_norm(gap);
}

DiscreteDist::DiscreteDist(std::vector<double> support_,
                           std::vector<double> probs_)
    : support(std::move(support_)), probs(std::move(probs_)) {
  if (support.size() != probs.size() || support.empty()) {
    throw std::invalid_argument("DiscreteDist: support/probs mismatch");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("DiscreteDist: negative mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteDist: probabilities must sum to 1");
  }
}

double DiscreteDist::mass(double x) const {
  double out = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == x) out += probs[i];
  }
  return out;
}

double DiscreteDist::mean() const {
  double out = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) out += support[i] * probs[i];
  return out;
}

double DiscreteDist::mean_abs() const {
  double out = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    out += std::abs(support[i]) * probs[i];
  }
  return out;
}

double DiscreteDist::second_moment() const {
  double out = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    out += support[i] * support[i] * probs[i];
  }
  return out;
}

double hockey_stick_divergence(const DiscreteDist& p, const DiscreteDist& q,
                               double epsilon) {
  std::map<double, std::pair<double, double>> aligned;
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    aligned[p.support[i]].first += p.probs[i];
  }
  for (std::size_t i = 0; i < q.support.size(); ++i) {
    aligned[q.support[i]].second += q.probs[i];
  }
  const double e = std::exp(epsilon);
  double div = 0.0;
  for (const auto& [x, pq] : aligned) {
    div += std::max(pq.second - e * pq.first, 0.0);
  }
  return std::max(div, 0.0);
}

GapCheckReport expectation_gap_check(const DiscreteDist& p,
                                     const DiscreteDist& q, double epsilon,
                                     double delta) {
  GapCheckReport report;
  // Two-sided closeness: q <= e^eps p + delta eventwise and
  // q >= e^{-eps} p - delta eventwise (the latter is sum max(e^{-eps} p - q, 0)).
  double upper = hockey_stick_divergence(p, q, epsilon);
  std::map<double, std::pair<double, double>> aligned;
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    aligned[p.support[i]].first += p.probs[i];
  }
  for (std::size_t i = 0; i < q.support.size(); ++i) {
    aligned[q.support[i]].second += q.probs[i];
  }
  double lower = 0.0;
  const double einv = std::exp(-epsilon);
  for (const auto& [x, pq] : aligned) {
    lower += std::max(einv * pq.first - pq.second, 0.0);
  }
  const double tol = 1e-12;
  report.precondition_ok = upper <= delta + tol && lower <= delta + tol;
  if (!report.precondition_ok) return report;
  report.lhs = std::abs(p.mean() - q.mean());
  report.rhs = 2.0 * epsilon * p.mean_abs() +
               2.0 * std::sqrt(delta * (p.second_moment() + q.second_moment()));
  report.holds = report.lhs <= report.rhs + tol;
  return report;
}

double variance_oracle_zprime(const Eigen::MatrixXd& p,
                              const SymMatrix& sigma) {
  SymMatrix p_sym = symmetrize(p);
  SymMatrix root = sqrt_psd(sigma);  // throws on non-PSD
  Eigen::MatrixXd q = root.mat() * p_sym.mat() * root.mat();
  return 2.0 * q.squaredNorm();
}

AttackReport run_attack(const Mechanism& mech, int d, int n, int trials,
                        Rng rng, const RunOptions& opts) {
  if (trials < 30) throw std::invalid_argument("run_attack: trials >= 30");
  AttackReport report;
  report.mechanism_id = mech.id;
  report.d = d;
  report.n = n;
  report.trials = trials;
  report.rows.resize(static_cast<std::size_t>(trials));

  std::vector<std::vector<double>> zprime_per_trial(
      static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), opts.workers,
               [&](std::size_t t) {
                 Rng child = rng.child(t);
                 AttackTrialRecord rec =
                     attack_trial(mech, d, n, child, opts.attack);
                 TrialRow row;
                 row.seed = rec.seed;
                 row.z_bar =
                     std::accumulate(rec.z.begin(), rec.z.end(), 0.0) /
                     static_cast<double>(n);
                 std::vector<double> zp;
                 for (int i : rec.z_prime_indices) {
                   zp.push_back(rec.z_prime[static_cast<std::size_t>(i)]);
                 }
                 row.z_prime_mean = mean_se(zp).mean;
                 row.err_frob = rec.err_frob;
                 row.err_emp = rec.err_emp;
                 double fe = frobenius_norm(rec.sigma_hat - rec.sigma);
                 row.sq_err_floor = fe * fe;
                 double tr = rec.sigma.trace();
                 double tr2 = rec.sigma.mat().squaredNorm();
                 row.mse_oracle = (tr * tr + tr2) / static_cast<double>(n);
                 row.posterior_gap = rec.posterior_gap;
                 row.residual = decomposition_residual(rec);
                 report.rows[t] = row;
                 zprime_per_trial[t] = std::move(zp);
               });

  std::vector<double> zbars, floors, oracles, errs, zprimes;
  for (const auto& row : report.rows) {
    zbars.push_back(row.z_bar);
    floors.push_back(row.sq_err_floor);
    oracles.push_back(row.mse_oracle);
    errs.push_back(row.err_frob);
    report.max_residual = std::max(report.max_residual, row.residual);
  }
  for (const auto& zp : zprime_per_trial) {
    zprimes.insert(zprimes.end(), zp.begin(), zp.end());
  }
  report.z_bar = mean_se(zbars);
  report.z_prime = mean_se(zprimes);
  report.floor = mean_se(floors);
  report.mse_oracle = mean_se(oracles);
  report.gamma_median = quantile(errs, 0.5);
  report.gamma_q23 = quantile(errs, 2.0 / 3.0);
  if (opts.ceiling_constant > 0.0 && mech.privacy.has_value()) {
    report.dp_ceiling = opts.ceiling_constant * report.gamma_q23 *
                        mech.privacy->epsilon;
    report.tension =
        report.z_bar.mean > report.dp_ceiling + 4.0 * report.z_bar.se;
  }
  return report;
}

}  // namespace fpaudit
