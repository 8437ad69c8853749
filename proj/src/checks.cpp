#include "fpaudit/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

#include "fpaudit/distributions.hpp"
#include "fpaudit/fingerprint.hpp"
#include "fpaudit/mechanisms.hpp"
#include "fpaudit/parallel.hpp"
#include "fpaudit/reductions.hpp"
#include "fpaudit/rng.hpp"
#include "fpaudit/stats.hpp"

namespace fpaudit {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

SymMatrix random_pd(int d, double ridge, Rng& rng) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  Eigen::MatrixXd m = a * a.transpose() / static_cast<double>(d) +
                      ridge * Eigen::MatrixXd::Identity(d, d);
  return symmetrize(m);
}

double max_abs_z(const std::vector<MeanSE>& ests,
                 const std::vector<double>& targets) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ests.size(); ++i) {
    double se = ests[i].se > 0.0 ? ests[i].se
                                 : std::numeric_limits<double>::min();
    worst = std::max(worst, std::abs(ests[i].mean - targets[i]) / se);
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> check_decomposition(std::uint64_t seed,
                                             int trials_total, int workers) {
  std::vector<CheckResult> out;
  const int d = 8, n = 64;
  const std::vector<std::string> ids = {"empirical", "constant-prior-mean",
                                        "dp-gauss-cov"};
  const int per = std::max(30, trials_total / static_cast<int>(ids.size()));
  Rng root(seed);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    MechanismParams mp;
    mp.radius = 12.0;
    Mechanism mech = make_mechanism(ids[i], d, mp);
    RunOptions ro;
    ro.workers = workers;
    ro.attack.zprime_subset = 0;
    AttackReport rep = run_attack(mech, d, n, per, root.child(i), ro);
    out.push_back({"decomposition-identity-" + ids[i],
                   rep.max_residual <= 1e-9, rep.max_residual, 1e-9, 0.0,
                   "max relative residual over " + std::to_string(per) +
                       " trials"});
  }
  return out;
}

std::vector<CheckResult> check_zprime_unbiased(std::uint64_t seed,
                                               int indices_per_mech,
                                               int workers) {
  std::vector<CheckResult> out;
  const int d = 8, n = 64, subset = 16;
  const int trials = std::max(30, (indices_per_mech + subset - 1) / subset);
  const std::vector<std::string> ids = {"empirical", "constant-prior-mean",
                                        "dp-gauss-cov"};
  Rng root(seed);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    MechanismParams mp;
    mp.radius = 12.0;
    Mechanism mech = make_mechanism(ids[i], d, mp);
    RunOptions ro;
    ro.workers = workers;
    ro.attack.zprime_subset = subset;
    AttackReport rep = run_attack(mech, d, n, trials, root.child(i), ro);
    out.push_back({"zprime-mean-zero-" + ids[i], within_4se(rep.z_prime, 0.0),
                   rep.z_prime.mean, 0.0, rep.z_prime.se,
                   std::to_string(rep.z_prime.n) + " swapped-index samples"});
  }
  return out;
}

std::vector<CheckResult> check_variance_oracle(std::uint64_t seed, int pairs,
                                               int draws_per_pair,
                                               int workers) {
  const int d = 4;
  Rng root(seed);
  std::vector<double> zmatch(static_cast<std::size_t>(pairs));
  std::vector<double> zbound(static_cast<std::size_t>(pairs));
  parallel_for(static_cast<std::size_t>(pairs), workers, [&](std::size_t t) {
    Rng rng = root.child(t);
    Eigen::MatrixXd pmat(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) pmat(i, j) = 2.0 * rng.uniform() - 1.0;
    }
    SymMatrix sigma = random_pd(d, 0.25, rng);
    SymMatrix sig_root = sqrt_psd(sigma);
    const double offset = pmat.cwiseProduct(sigma.mat()).sum();
    std::vector<double> w(static_cast<std::size_t>(draws_per_pair));
    Vector z(d), x(d);
    for (int k = 0; k < draws_per_pair; ++k) {
      for (int i = 0; i < d; ++i) z(i) = rng.normal();
      x = sig_root.mat() * z;
      w[static_cast<std::size_t>(k)] = x.dot(pmat * x) - offset;
    }
    MeanSE ms = mean_se(w);
    double m2 = 0.0, m4 = 0.0;
    for (double v : w) {
      double dev = v - ms.mean;
      m2 += dev * dev;
      m4 += dev * dev * dev * dev;
    }
    const double nn = static_cast<double>(draws_per_pair);
    double var = m2 / (nn - 1.0);
    m4 /= nn;
    double se_var = std::sqrt(std::max(m4 - var * var, 0.0) / nn);
    double oracle = variance_oracle_zprime(pmat, sigma);
    double bound = 2.0 * operator_norm(sigma) * operator_norm(sigma) *
                   pmat.squaredNorm();
    zmatch[t] = std::abs(var - oracle) / se_var;
    zbound[t] = (var - bound) / se_var;
  });
  double worst_match = *std::max_element(zmatch.begin(), zmatch.end());
  double worst_bound = *std::max_element(zbound.begin(), zbound.end());
  return {
      {"quadratic-form-variance-exact", worst_match <= 4.0, worst_match, 4.0,
       0.0,
       "max |z|-score vs 2||Sigma^{1/2} sym(P) Sigma^{1/2}||_F^2 over " +
           std::to_string(pairs) + " (P, Sigma) pairs"},
      {"quadratic-form-variance-bound", worst_bound <= 4.0, worst_bound, 4.0,
       0.0, "signed z-score vs 2||Sigma||_op^2 ||P||_F^2 (should be << 0)"},
  };
}

std::vector<CheckResult> check_conjugacy(std::uint64_t seed, int quad_draws,
                                         int joint_draws, int workers) {
  std::vector<CheckResult> out;
  Rng root(seed);

  {
    // d = 1: sampled posterior against direct quadrature of prior x
    // likelihood. The oracle never uses the conjugate-update formula.
    const int m = 2, n = 16;
    Rng rng = root.child(0);
    SymMatrix v1 = SymMatrix::identity(1) * 2.0;
    SymMatrix s2 = sample_inverse_wishart(v1, m, rng);
    Dataset x = sample_gaussian(Vector::Zero(1), s2, n, rng);
    const double ss = x.columns().squaredNorm();
    SymMatrix sigma_hat = empirical_second_moment(x);

    std::vector<double> draws(static_cast<std::size_t>(quad_draws));
    parallel_for(draws.size(), workers, [&](std::size_t t) {
      Rng child = root.child(1000 + t);
      draws[t] = posterior_sample(sigma_hat, n, m, child)(0, 0);
    });

    const double b = 0.5 * (2.0 + ss);  // (V + sum x_i^2) / 2
    const double expo = 0.5 * (m + n + 2.0);
    const int grid_n = 50000;
    const double lo = std::log(b / 400.0), hi = std::log(4.0 * b);
    std::vector<double> gs(grid_n), cdf(grid_n);
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> logf(grid_n);
    for (int i = 0; i < grid_n; ++i) {
      double u = lo + (hi - lo) * i / (grid_n - 1.0);
      double s = std::exp(u);
      gs[static_cast<std::size_t>(i)] = s;
      // integrand in log-s coordinates: g(s) * s
      logf[static_cast<std::size_t>(i)] = -expo * u - b / s + u;
      peak = std::max(peak, logf[static_cast<std::size_t>(i)]);
    }
    double acc = 0.0;
    double prev = std::exp(logf[0] - peak);
    cdf[0] = 0.0;
    const double du = (hi - lo) / (grid_n - 1.0);
    for (int i = 1; i < grid_n; ++i) {
      double cur = std::exp(logf[static_cast<std::size_t>(i)] - peak);
      acc += 0.5 * (prev + cur) * du;
      cdf[static_cast<std::size_t>(i)] = acc;
      prev = cur;
    }
    for (double& c : cdf) c /= acc;
    auto oracle_cdf = [&](double s) {
      if (s <= gs.front()) return 0.0;
      if (s >= gs.back()) return 1.0;
      auto it = std::upper_bound(gs.begin(), gs.end(), s);
      std::size_t i = static_cast<std::size_t>(it - gs.begin());
      double frac = (s - gs[i - 1]) / (gs[i] - gs[i - 1]);
      return cdf[i - 1] + frac * (cdf[i] - cdf[i - 1]);
    };
    double ks = ks_statistic_cdf(draws, oracle_cdf);
    out.push_back({"posterior-quadrature-ks", ks <= 0.01, ks, 0.01, 0.0,
                   "d=1, n=16, " + std::to_string(quad_draws) +
                       " posterior draws vs numeric Bayes-rule CDF"});
  }

  {
    // Tower property: E over (Sigma, X) of the posterior mean is the prior
    // mean, entrywise.
    const int d = 4, n = 32, m = 2 * d;
    std::vector<std::vector<double>> entries(
        static_cast<std::size_t>(d * (d + 1) / 2),
        std::vector<double>(static_cast<std::size_t>(joint_draws)));
    Rng sub = root.child(1);
    parallel_for(static_cast<std::size_t>(joint_draws), workers,
                 [&](std::size_t t) {
                   Rng rng = sub.child(t);
                   SymMatrix sigma = sample_prior(d, rng);
                   Dataset x = sample_gaussian(Vector::Zero(d), sigma, n, rng);
                   SymMatrix pm =
                       posterior_mean(empirical_second_moment(x), n, m);
                   std::size_t e = 0;
                   for (int i = 0; i < d; ++i) {
                     for (int j = i; j < d; ++j) entries[e++][t] = pm(i, j);
                   }
                 });
    SymMatrix prior_mean = prior_spec(d).mean();
    std::vector<MeanSE> ests;
    std::vector<double> targets;
    std::size_t e = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        ests.push_back(mean_se(entries[e++]));
        targets.push_back(prior_mean(i, j));
      }
    }
    double worst = max_abs_z(ests, targets);
    out.push_back({"posterior-mean-tower-property", worst <= 4.0, worst, 4.0,
                   0.0,
                   "max entrywise |z|-score of E[posterior mean] vs prior "
                   "mean, d=4, n=32"});
  }

  {
    // Mean squared posterior gap should decay like n^{-2}.
    const int d = 8, m = 16;
    const std::vector<int> ns = {64, 128, 256};
    const int per_n = std::max(200, joint_draws / 4);
    std::vector<double> lx, ly;
    Rng sub = root.child(2);
    for (std::size_t gi = 0; gi < ns.size(); ++gi) {
      int n = ns[gi];
      std::vector<double> sq(static_cast<std::size_t>(per_n));
      Rng level = sub.child(gi);
      parallel_for(sq.size(), workers, [&](std::size_t t) {
        Rng rng = level.child(t);
        SymMatrix sigma = sample_prior(d, rng);
        Dataset x = sample_gaussian(Vector::Zero(d), sigma, n, rng);
        double g = posterior_gap(empirical_second_moment(x), n, m);
        sq[t] = g * g;
      });
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(mean_se(sq).mean));
    }
    double slope = fit_slope(lx, ly);
    out.push_back({"posterior-gap-squared-slope", std::abs(slope + 2.0) <= 0.3,
                   slope, -2.0, 0.0,
                   "log-log slope of mean squared gap in n, tolerance 0.3"});
  }

  return out;
}

std::vector<CheckResult> check_matrix_distribution_facts(std::uint64_t seed,
                                                         int trials,
                                                         int workers) {
  std::vector<CheckResult> out;
  Rng root(seed);

  {
    const int d = 3, m = 7;
    Rng setup = root.child(0);
    SymMatrix v = random_pd(d, 0.5, setup);
    std::vector<std::vector<double>> entries(
        static_cast<std::size_t>(d * (d + 1) / 2),
        std::vector<double>(static_cast<std::size_t>(trials)));
    parallel_for(static_cast<std::size_t>(trials), workers,
                 [&](std::size_t t) {
                   Rng rng = setup.child(t + 1);
                   SymMatrix w = sample_wishart(v, m, rng);
                   std::size_t e = 0;
                   for (int i = 0; i < d; ++i) {
                     for (int j = i; j < d; ++j) entries[e++][t] = w(i, j);
                   }
                 });
    std::vector<MeanSE> ests;
    std::vector<double> targets;
    std::size_t e = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        ests.push_back(mean_se(entries[e++]));
        targets.push_back(static_cast<double>(m) * v(i, j));
      }
    }
    double worst = max_abs_z(ests, targets);
    out.push_back({"wishart-mean-closed-form", worst <= 4.0, worst, 4.0, 0.0,
                   "max entrywise |z|-score vs m V at d=3, m=7"});
  }

  {
    const int d = 3, m = 9;
    Rng setup = root.child(1);
    SymMatrix v = random_pd(d, 0.5, setup);
    std::vector<std::vector<double>> entries(
        static_cast<std::size_t>(d * (d + 1) / 2),
        std::vector<double>(static_cast<std::size_t>(trials)));
    parallel_for(static_cast<std::size_t>(trials), workers,
                 [&](std::size_t t) {
                   Rng rng = setup.child(t + 1);
                   SymMatrix w = sample_inverse_wishart(v, m, rng);
                   std::size_t e = 0;
                   for (int i = 0; i < d; ++i) {
                     for (int j = i; j < d; ++j) entries[e++][t] = w(i, j);
                   }
                 });
    std::vector<MeanSE> ests;
    std::vector<double> targets;
    std::size_t e = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        ests.push_back(mean_se(entries[e++]));
        targets.push_back(v(i, j) / static_cast<double>(m - d - 1));
      }
    }
    double worst = max_abs_z(ests, targets);
    out.push_back({"inverse-wishart-mean-closed-form", worst <= 4.0, worst,
                   4.0, 0.0,
                   "max entrywise |z|-score vs V/(m-d-1) at d=3, m=9"});
  }

  {
    const int d = 10;
    Rng sub = root.child(2);
    std::vector<double> ops(static_cast<std::size_t>(trials));
    parallel_for(ops.size(), workers, [&](std::size_t t) {
      Rng rng = sub.child(t);
      ops[t] = operator_norm(sample_prior(d, rng));
    });
    const int m = 2 * d;
    for (int e = 3; e <= 4; ++e) {
      const double x = std::exp(static_cast<double>(e));
      std::size_t hits = 0;
      for (double v : ops) {
        if (v >= x) ++hits;
      }
      double freq = static_cast<double>(hits) / static_cast<double>(trials);
      double se =
          std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials));
      // The simplified tail constant (e^2/x)^{d/2} claimed for this prior.
      // Its derivation bounds (m/sqrt(x))^{m-d+1}/(m-d+1)! by
      // (e/sqrt(x))^{m-d+1}, which would need m <= m-d+1; at m = 2d the
      // constant is wrong and Monte Carlo refutes it. Reported honestly.
      const double claimed = std::pow(std::exp(2.0) / x, 0.5 * d);
      out.push_back({"prior-opnorm-tail-claimed-x-e" + std::to_string(e),
                     freq <= claimed + 4.0 * se, freq, claimed, se,
                     "P(||Sigma||_op >= e^" + std::to_string(e) +
                         ") vs the claimed (e^2/x)^{d/2} at d=10; expected "
                         "to fail, the claimed constant is too small (see "
                         "README, known discrepancies)"});
      // The exact bound the same derivation starts from:
      // (m/sqrt(x))^{m-d+1} / (m-d+1)! for the smallest Wishart eigenvalue.
      const double exact =
          std::exp((m - d + 1) * std::log(m / std::sqrt(x)) -
                   log_gamma(static_cast<double>(m - d + 2)));
      out.push_back({"prior-opnorm-tail-exact-x-e" + std::to_string(e),
                     freq <= exact + 4.0 * se, freq, exact, se,
                     "same frequency vs the unsimplified factorial-form "
                     "bound, which does hold"});
    }
  }

  return out;
}

std::vector<CheckResult> check_empirical_mse(std::uint64_t seed,
                                             int trials_per_point,
                                             int workers) {
  struct Point {
    int d;
    int n;
    SymMatrix sigma;
  };
  std::vector<Point> grid;
  grid.push_back({2, 16, SymMatrix::identity(2)});
  {
    Vector dg(3);
    dg << 1.0, 2.0, 3.0;
    grid.push_back({3, 24, SymMatrix::diagonal(dg)});
  }
  {
    Eigen::MatrixXd t(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) t(i, j) = std::pow(0.5, std::abs(i - j));
    }
    grid.push_back({4, 32, symmetrize(t)});
  }
  grid.push_back({8, 64, SymMatrix::identity(8) * 0.5});
  {
    Vector dg(6);
    for (int i = 0; i < 6; ++i) dg(i) = 0.1 * (i + 1.0);
    grid.push_back({6, 48, SymMatrix::diagonal(dg)});
  }
  grid.push_back({16, 128, SymMatrix::identity(16)});

  Rng root(seed);
  std::vector<MeanSE> ests;
  std::vector<double> targets;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const Point& pt = grid[gi];
    Rng level = root.child(gi);
    std::vector<double> sq(static_cast<std::size_t>(trials_per_point));
    parallel_for(sq.size(), workers, [&](std::size_t t) {
      Rng rng = level.child(t);
      Dataset x = sample_gaussian(Vector::Zero(pt.d), pt.sigma, pt.n, rng);
      double e = frobenius_norm(empirical_second_moment(x) - pt.sigma);
      sq[t] = e * e;
    });
    ests.push_back(mean_se(sq));
    double tr = pt.sigma.trace();
    double tr2 = pt.sigma.mat().squaredNorm();
    targets.push_back((tr * tr + tr2) / static_cast<double>(pt.n));
  }
  double worst = max_abs_z(ests, targets);
  return {{"empirical-mse-exact-formula", worst <= 4.0, worst, 4.0, 0.0,
           "max |z|-score over a 6-point (d, n, Sigma) grid; the oracle is "
           "the exact constant (Tr(Sigma)^2 + Tr(Sigma^2))/n, not the looser "
           "2-3 Tr(Sigma)^2/n constants often quoted, which are mutually "
           "inconsistent at d=1"}};
}

std::vector<CheckResult> check_heavy_tailed(std::uint64_t seed, int workers) {
  (void)workers;
  std::vector<CheckResult> out;
  Rng root(seed);

  Vector mu3(3);
  mu3 << 0.5, 0.3, -0.2;
  HeavyTailSpec spec2(2, 0.3, mu3);

  {
    Rng rng = root.child(0);
    const int n = 200000;
    Dataset x = sample_heavy_tailed(spec2, n, rng);
    Vector target = spec2.mean();
    std::vector<MeanSE> ests;
    std::vector<double> targets;
    for (int i = 0; i < 3; ++i) {
      std::vector<double> row(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] =
          x.columns()(i, j);
      ests.push_back(mean_se(row));
      targets.push_back(target(i));
    }
    double worst = max_abs_z(ests, targets);
    out.push_back({"heavy-tailed-mean", worst <= 4.0, worst, 4.0, 0.0,
                   "max coordinate |z|-score of the sample mean vs beta mu"});
  }

  {
    // 2^k C0(k) + 1 with C0(k) = 2^{k-1} (k-1)!!: 9 for k=2, 385 for k=4.
    struct MomentCase {
      HeavyTailSpec spec;
      double bound;
    };
    Vector mu4(3);
    mu4 << 0.6, 0.0, -0.3;
    std::vector<MomentCase> cases = {{spec2, 9.0},
                                     {HeavyTailSpec(4, 0.4, mu4), 385.0}};
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      Rng rng = root.child(1 + ci);
      Vector v = Vector::Constant(3, 1.0 / std::sqrt(3.0));
      MeanSE est = kth_moment_estimate(cases[ci].spec, v, 1000000, rng);
      out.push_back({"heavy-tailed-moment-k" +
                         std::to_string(cases[ci].spec.k),
                     est.mean <= cases[ci].bound + 4.0 * est.se, est.mean,
                     cases[ci].bound, est.se,
                     "kth directional moment must stay below the bound"});
    }
  }

  {
    // Coupled adjacency: padding two datasets that differ in one sample with
    // the same randomness must give padded datasets differing in at most one
    // slot.
    ReductionConfig cfg(2, 0.5, 40, 1.0);
    Rng rng = root.child(3);
    int violations = 0;
    const int pairs = 1000;
    for (int p = 0; p < pairs; ++p) {
      Eigen::MatrixXd cols(2, cfg.m_inner);
      for (int j = 0; j < cfg.m_inner; ++j) {
        cols(0, j) = 0.5 * rng.normal();
        cols(1, j) = 0.5 * rng.normal();
      }
      Dataset x(cols);
      int idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.m_inner)));
      Vector repl(2);
      repl << rng.normal() * 3.0, rng.normal() * 3.0;
      Dataset xp = x.with_replaced(idx, repl);
      Rng pad_rng = rng.child(static_cast<std::uint64_t>(p));
      Rng pad_rng2 = pad_rng;
      Dataset a = pad_to_heavy_tailed(x, cfg, pad_rng);
      Dataset b = pad_to_heavy_tailed(xp, cfg, pad_rng2);
      int diff = 0;
      for (int j = 0; j < a.size(); ++j) {
        if (a.sample(j) != b.sample(j)) ++diff;
      }
      if (diff > 1) ++violations;
    }
    out.push_back({"padding-adjacency-preserved", violations == 0,
                   static_cast<double>(violations), 0.0, 0.0,
                   std::to_string(pairs) + " coupled adjacent pairs"});
  }

  {
    // d = 1: padding Gaussian component draws must reproduce the mixture law.
    Vector mu1(1);
    mu1 << 0.6;
    HeavyTailSpec spec1(2, 0.5, mu1);
    ReductionConfig cfg(2, 0.5, 25000, 1.0);
    Rng rng = root.child(4);
    const double s = spec1.gaussian_scale();
    Eigen::MatrixXd cols(1, cfg.m_inner);
    for (int j = 0; j < cfg.m_inner; ++j) {
      cols(0, j) = s * mu1(0) + s * rng.normal();
    }
    Dataset inner(cols);
    Dataset padded = pad_to_heavy_tailed(inner, cfg, rng);
    Dataset direct = sample_heavy_tailed(spec1, padded.size(), rng);
    std::vector<double> a, b;
    for (int j = 0; j < padded.size(); ++j) {
      a.push_back(padded.columns()(0, j));
      b.push_back(direct.columns()(0, j));
    }
    double ks = ks_statistic(a, b);
    double p = ks_pvalue(ks, a.size(), b.size());
    out.push_back({"padding-distribution-ks", p > 0.001, p, 0.001, 0.0,
                   "two-sample KS p-value, padded vs direct mixture draws at "
                   "d=1 (reject below target)"});
  }

  {
    // Exhaustion probability: the 100x slot headroom makes it exactly zero
    // for any valid config with n_outer * rate << m_inner.
    ReductionConfig cfg(2, 0.9, 3, 1.0);
    double exact = exhaustion_probability(cfg);
    Rng rng = root.child(5);
    const int mc = 20000;
    int hits = 0;
    for (int t = 0; t < mc; ++t) {
      int fired = 0;
      for (int j = 0; j < cfg.n_outer; ++j) {
        if (rng.bernoulli(cfg.pad_rate())) ++fired;
      }
      if (fired > cfg.m_inner) ++hits;
    }
    double freq = static_cast<double>(hits) / mc;
    double se = std::sqrt(freq * (1.0 - freq) / mc) +
                std::numeric_limits<double>::min();
    out.push_back({"exhaustion-probability-mc", std::abs(freq - exact) <=
                                                    4.0 * se + 1e-12,
                   freq, exact, se, "config-level exhaustion, exact vs MC"});

    // Sharper exercise of the same tail formula away from the degenerate
    // regime.
    const std::uint64_t bn = 50, bm = 18;
    const double bp = 0.3;
    double bexact = binomial_tail_above(bn, bp, bm);
    int bhits = 0;
    const int bmc = 100000;
    for (int t = 0; t < bmc; ++t) {
      int fired = 0;
      for (std::uint64_t j = 0; j < bn; ++j) {
        if (rng.bernoulli(bp)) ++fired;
      }
      if (static_cast<std::uint64_t>(fired) > bm) ++bhits;
    }
    double bfreq = static_cast<double>(bhits) / bmc;
    double bse = std::sqrt(bfreq * (1.0 - bfreq) / bmc);
    out.push_back({"binomial-tail-exact-vs-mc",
                   std::abs(bfreq - bexact) <= 4.0 * bse, bfreq, bexact, bse,
                   "P(Bin(50, 0.3) > 18)"});
  }

  return out;
}

std::vector<CheckResult> check_privacy_structure(std::uint64_t seed,
                                                 int sensitivity_pairs,
                                                 int discrete_pairs) {
  std::vector<CheckResult> out;
  Rng root(seed);
  const int d = 4, n = 50;
  const double radius = 5.0;
  PrivacyParams p(1.0, 1e-6);

  {
    // Coupled noise: the additive-noise releases are Lipschitz in the
    // dataset with the declared replace-one sensitivity.
    Rng rng = root.child(0);
    double worst_cov = 0.0, worst_shrunk = 0.0, worst_mean = 0.0;
    MechanismParams mp;
    mp.radius = radius;
    mp.signal_power = 1.0;
    Mechanism shrunk = make_mechanism("dp-gauss-cov-shrunk", d, mp);
    for (int t = 0; t < sensitivity_pairs; ++t) {
      Eigen::MatrixXd cols(d, n);
      for (int j = 0; j < n; ++j) {
        double scale = (rng.uniform() < 0.2) ? 8.0 : 2.0;
        for (int i = 0; i < d; ++i) cols(i, j) = scale * rng.normal();
      }
      Dataset x(cols);
      int idx = static_cast<int>(rng.below(n));
      Vector repl(d);
      double rscale = (rng.uniform() < 0.3) ? 30.0 : 2.0;
      for (int i = 0; i < d; ++i) repl(i) = rscale * rng.normal();
      Dataset xp = x.with_replaced(idx, repl);

      Rng noise = rng.child(static_cast<std::uint64_t>(t));
      Rng noise_b = noise;
      double diff_cov = frobenius_norm(
          dp_covariance_mechanism(x, p, radius, noise).value -
          dp_covariance_mechanism(xp, p, radius, noise_b).value);
      worst_cov = std::max(worst_cov,
                           diff_cov / (radius * radius * 2.0 / n));

      Rng noise_c = noise;  // reuse the same stream for the shrunk release
      Rng noise_d = noise;
      double diff_shrunk = frobenius_norm(shrunk.run(x, noise_c) -
                                          shrunk.run(xp, noise_d));
      worst_shrunk = std::max(worst_shrunk,
                              diff_shrunk / (radius * radius * 2.0 / n));

      Rng noise_e = noise;
      Rng noise_f = noise;
      double diff_mean = (dp_mean_mechanism(x, p, radius, noise_e) -
                          dp_mean_mechanism(xp, p, radius, noise_f))
                             .norm();
      worst_mean = std::max(worst_mean, diff_mean / (radius * 2.0 / n));
    }
    const double tol = 1.0 + 1e-9;
    out.push_back({"coupled-sensitivity-dp-cov", worst_cov <= tol, worst_cov,
                   1.0, 0.0, "max ||diff||_F / (2 R^2 / n) over " +
                                 std::to_string(sensitivity_pairs) +
                                 " adjacent pairs"});
    out.push_back({"coupled-sensitivity-dp-cov-shrunk", worst_shrunk <= tol,
                   worst_shrunk, 1.0, 0.0,
                   "shrinkage can only contract the coupled difference"});
    out.push_back({"coupled-sensitivity-dp-mean", worst_mean <= tol,
                   worst_mean, 1.0, 0.0, "max ||diff|| / (2 R / n)"});
  }

  {
    // Exact expectation-gap inequality on random discrete pairs whose
    // two-sided closeness is computed, not assumed.
    Rng rng = root.child(1);
    int counterexamples = 0, precondition_failures = 0;
    for (int t = 0; t < discrete_pairs; ++t) {
      int k = 2 + static_cast<int>(rng.below(6));
      std::vector<double> support(static_cast<std::size_t>(k));
      std::vector<double> pp(static_cast<std::size_t>(k)),
          qq(static_cast<std::size_t>(k));
      double sp = 0.0, sq = 0.0;
      for (int i = 0; i < k; ++i) {
        support[static_cast<std::size_t>(i)] = 4.0 * rng.uniform() - 2.0;
        pp[static_cast<std::size_t>(i)] = rng.uniform() + 1e-3;
        qq[static_cast<std::size_t>(i)] = rng.uniform() + 1e-3;
        sp += pp[static_cast<std::size_t>(i)];
        sq += qq[static_cast<std::size_t>(i)];
      }
      double accp = 0.0, accq = 0.0;
      for (int i = 0; i < k; ++i) {
        pp[static_cast<std::size_t>(i)] /= sp;
        qq[static_cast<std::size_t>(i)] /= sq;
        accp += pp[static_cast<std::size_t>(i)];
        accq += qq[static_cast<std::size_t>(i)];
      }
      // Force an exact sum of 1 despite rounding.
      pp.back() += 1.0 - accp;
      qq.back() += 1.0 - accq;
      DiscreteDist dp(support, pp), dq(support, qq);
      double eps = 0.05 + 0.95 * rng.uniform();
      double delta = std::max(hockey_stick_divergence(dp, dq, eps),
                              std::exp(-eps) *
                                  hockey_stick_divergence(dq, dp, eps));
      GapCheckReport rep = expectation_gap_check(dp, dq, eps, delta);
      if (!rep.precondition_ok) {
        ++precondition_failures;
      } else if (!rep.holds) {
        ++counterexamples;
      }
    }
    out.push_back({"expectation-gap-inequality",
                   counterexamples == 0 && precondition_failures == 0,
                   static_cast<double>(counterexamples), 0.0, 0.0,
                   std::to_string(discrete_pairs) + " random discrete pairs; " +
                       std::to_string(precondition_failures) +
                       " precondition failures"});
  }

  return out;
}

std::vector<CheckResult> check_tension(const Calibration& cal,
                                       std::uint64_t seed,
                                       int trials_per_point, int workers) {
  std::vector<CheckResult> out;
  const int d = cal.shrunk.d, n = cal.shrunk.n;
  Rng root(seed);
  RunOptions ro;
  ro.workers = workers;
  ro.attack.zprime_subset = 0;
  ro.ceiling_constant = cal.attack_ceiling_c;

  AttackReport base = run_attack(make_mechanism("empirical", d), d, n,
                                 trials_per_point, root.child(0), ro);
  std::vector<double> diffs;
  for (const auto& row : base.rows) diffs.push_back(row.z_bar - row.mse_oracle);
  MeanSE paired = mean_se(diffs);
  bool base_ok =
      within_4se(paired, 0.0) && base.z_bar.mean > 4.0 * base.z_bar.se;
  out.push_back({"tension-baseline-at-mse-floor", base_ok, paired.mean, 0.0,
                 paired.se,
                 "paired per-trial z_bar minus exact MSE oracle; baseline "
                 "mean must also be positive (d=" +
                     std::to_string(d) + ", n=" + std::to_string(n) + ")"});

  MechanismParams mp;
  mp.delta = cal.shrunk.delta;
  mp.radius = cal.shrunk.radius;
  mp.signal_power = cal.shrunk.signal_power;
  const std::vector<double> eps = {0.25, 0.5, 1.0};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    mp.epsilon = eps[i];
    AttackReport rep =
        run_attack(make_mechanism("dp-gauss-cov-shrunk", d, mp), d, n,
                   trials_per_point, root.child(1 + i), ro);
    for (const auto& row : rep.rows) {
      xs.push_back(eps[i]);
      ys.push_back(row.z_bar);
    }
    double gap_se =
        std::sqrt(rep.z_bar.se * rep.z_bar.se + base.z_bar.se * base.z_bar.se);
    bool below = rep.z_bar.mean <= base.z_bar.mean - 4.0 * gap_se;
    out.push_back({"tension-dp-below-floor-eps-" + num(eps[i]), below,
                   rep.z_bar.mean, base.z_bar.mean, gap_se,
                   "DP per-sample mean must sit > 4 combined SEs below the "
                   "non-private floor"});
    if (cal.attack_ceiling_c > 0.0) {
      out.push_back({"tension-dp-ceiling-eps-" + num(eps[i]), !rep.tension,
                     rep.z_bar.mean, rep.dp_ceiling, rep.z_bar.se,
                     "mean must stay below the calibrated C gamma eps"});
    }
  }
  SpearmanResult sr = spearman(xs, ys);
  out.push_back({"tension-monotone-in-eps",
                 sr.rho > 0.0 && sr.p_one_sided < 0.01, sr.p_one_sided, 0.01,
                 0.0, "one-sided Spearman p over pooled per-trial (eps, "
                      "z_bar) pairs; rho=" +
                          num(sr.rho)});
  return out;
}

std::vector<CheckResult> check_hanson_wright(const Calibration& cal,
                                             std::uint64_t seed, int trials) {
  std::vector<CheckResult> out;
  Rng root(seed);
  struct Case {
    std::string name;
    SymMatrix sigma;
  };
  Rng setup = root.child(0);
  Vector dg(4);
  dg << 1.0, 2.0, 3.0, 4.0;
  std::vector<Case> cases;
  cases.push_back({"prior-draw", sample_prior(6, setup)});
  cases.push_back({"diagonal", SymMatrix::diagonal(dg)});
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    double fro = frobenius_norm(cases[ci].sigma);
    std::vector<double> grid;
    for (double f : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) grid.push_back(f * fro);
    Rng rng = root.child(1 + ci);
    HansonWrightReport rep = hanson_wright_check(cases[ci].sigma, trials,
                                                 cal.hanson_wright_c1, rng,
                                                 grid);
    int violated = 0;
    for (const auto& pt : rep.points) {
      if (pt.violated) ++violated;
    }
    out.push_back({"hanson-wright-tail-" + cases[ci].name, !rep.any_violation,
                   static_cast<double>(violated), 0.0, 0.0,
                   "violated grid points at c1=" + num(cal.hanson_wright_c1)});
  }
  return out;
}

std::vector<CheckResult> check_prior_lambda_min(const Calibration& cal,
                                                std::uint64_t seed,
                                                int trials) {
  Rng root(seed);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.child(static_cast<std::uint64_t>(t));
    if (eigen_extremes(sample_prior(cal.prior_lambda_min_d, rng)).first >=
        cal.prior_lambda_min_c) {
      ++hits;
    }
  }
  double freq = static_cast<double>(hits) / trials;
  double se = std::sqrt(freq * (1.0 - freq) / trials);
  return {{"prior-lambda-min-floor", freq >= 2.0 / 3.0 - 4.0 * se, freq,
           2.0 / 3.0, se,
           "P(lambda_min >= " + num(cal.prior_lambda_min_c) + ") at d=" +
               std::to_string(cal.prior_lambda_min_d)}};
}

std::vector<CheckResult> check_error_floor(std::uint64_t seed,
                                           int trials_per_point, int workers) {
  std::vector<CheckResult> out;

  double spot = empirical_cov_error_floor(1000.0, 1000000.0);
  out.push_back({"error-floor-spot-value", std::abs(spot - 1e-3) <= 1e-15,
                 spot, 1e-3, 0.0, "d=1e3, n=1e6"});

  double left = 100.0 / 1000.0;
  double right = std::pow(1000.0, -1.0 / 3.0);
  double bdry = std::abs(empirical_cov_error_floor(100.0, 1000.0) - left) +
                std::abs(left - right);
  out.push_back({"error-floor-branch-continuity", bdry <= 1e-12, bdry, 0.0,
                 0.0, "both branches agree at d = n^{2/3}"});

  double worst_increase = 0.0;
  double prev = empirical_cov_error_floor(50.0, 10.0);
  for (double n = 12.0; n <= 100000.0; n *= 1.2) {
    double cur = empirical_cov_error_floor(50.0, n);
    worst_increase = std::max(worst_increase, cur - prev);
    prev = cur;
  }
  out.push_back({"error-floor-monotone-in-n", worst_increase <= 0.0,
                 worst_increase, 0.0, 0.0, "fixed d=50, increasing n"});

  {
    const int d = 4;
    const std::vector<int> ns = {32, 64, 128, 256};
    Rng root(seed);
    std::vector<double> lx, ly;
    RunOptions ro;
    ro.workers = workers;
    ro.attack.zprime_subset = 0;
    Mechanism mech = make_mechanism("empirical", d);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      AttackReport rep = run_attack(mech, d, ns[i], trials_per_point,
                                    root.child(i), ro);
      lx.push_back(std::log(static_cast<double>(ns[i])));
      ly.push_back(std::log(rep.floor.mean));
    }
    double slope = fit_slope(lx, ly);
    out.push_back({"floor-scaling-slope", std::abs(slope + 1.0) <= 0.2, slope,
                   -1.0, 0.0,
                   "log-log slope of E||Sigma_hat - Sigma||_F^2 in n, "
                   "tolerance 0.2"});
  }

  return out;
}

std::vector<CheckResult> run_validation_suite(const Calibration& cal,
                                              const SuiteOptions& opts) {
  const bool f = opts.full;
  std::vector<CheckResult> out;
  auto add = [&](std::vector<CheckResult> v) {
    for (auto& r : v) out.push_back(std::move(r));
  };
  Rng root(opts.seed);
  add(check_decomposition(root.child(0).seed(), f ? 10000 : 1500,
                          opts.workers));
  add(check_zprime_unbiased(root.child(1).seed(), f ? 10000 : 2000,
                            opts.workers));
  add(check_variance_oracle(root.child(2).seed(), f ? 20 : 6,
                            f ? 1000000 : 200000, opts.workers));
  add(check_conjugacy(root.child(3).seed(), f ? 100000 : 20000,
                      f ? 10000 : 2000, opts.workers));
  add(check_matrix_distribution_facts(root.child(4).seed(), f ? 50000 : 20000,
                                      opts.workers));
  add(check_empirical_mse(root.child(5).seed(), f ? 20000 : 4000,
                          opts.workers));
  add(check_heavy_tailed(root.child(6).seed(), opts.workers));
  add(check_privacy_structure(root.child(7).seed(), f ? 1000 : 300,
                              f ? 10000 : 2000));
  add(check_tension(cal, root.child(8).seed(), f ? 30000 : 20000,
                    opts.workers));
  add(check_hanson_wright(cal, root.child(9).seed(), f ? 200000 : 50000));
  add(check_prior_lambda_min(cal, root.child(10).seed(), f ? 20000 : 5000));
  add(check_error_floor(root.child(11).seed(), f ? 4000 : 1000,
                        opts.workers));
  return out;
}

}  // namespace fpaudit
