#include <doctest.h>

#include <cmath>
#include <vector>

#include "fpaudit/fingerprint.hpp"
#include "fpaudit/report.hpp"

using namespace fpaudit;

TEST_SUITE("fingerprint") {

TEST_CASE("z statistic equals the direct double sum") {
  Rng rng(51);
  Eigen::MatrixXd a(3, 3), b(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = rng.normal();
      b(i, j) = rng.normal();
    }
  SymMatrix m_out = symmetrize(a), sigma = symmetrize(b);
  Vector x(3);
  x << 1, -2, 0.5;
  double direct = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      direct += (m_out(i, j) - sigma(i, j)) * (x(i) * x(j) - sigma(i, j));
  CHECK(z_statistic(m_out, sigma, x) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("attack trial satisfies the decomposition identity") {
  Mechanism mech = make_mechanism("empirical", 4);
  for (int rep = 0; rep < 20; ++rep) {
    AttackTrialRecord rec = attack_trial(mech, 4, 32, Rng(600 + rep));
    CHECK(decomposition_residual(rec) <= 1e-9);
    CHECK(rec.z.size() == 32);
  }
}

TEST_CASE("attack trial is deterministic and honors the z-prime subset") {
  Mechanism mech = make_mechanism("empirical", 3);
  AttackOptions opts;
  opts.zprime_subset = 5;
  AttackTrialRecord a = attack_trial(mech, 3, 20, Rng(61), opts);
  AttackTrialRecord b = attack_trial(mech, 3, 20, Rng(61), opts);
  CHECK(a.z == b.z);
  CHECK(a.z_prime_indices == b.z_prime_indices);
  CHECK(frobenius_norm(a.m_out - b.m_out) == 0.0);
  CHECK(a.z_prime_indices.size() == 5);
  int evaluated = 0;
  for (double v : a.z_prime) {
    if (!std::isnan(v)) ++evaluated;
  }
  CHECK(evaluated == 5);

  opts.full_zprime = true;
  AttackTrialRecord c = attack_trial(mech, 3, 20, Rng(61), opts);
  for (double v : c.z_prime) CHECK(!std::isnan(v));
}

TEST_CASE("posterior mean and gap closed forms") {
  Rng rng(62);
  Eigen::MatrixXd s(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s(i, j) = rng.normal();
  SymMatrix sigma_hat = symmetrize(s * s.transpose());  // random PSD-ish
  const int n = 40, m = 6, d = 3;
  SymMatrix expect =
      (SymMatrix::identity(d) * static_cast<double>(m) + sigma_hat * n) *
      (1.0 / (m + n - d - 1));
  CHECK(frobenius_norm(posterior_mean(sigma_hat, n, m) - expect) <= 1e-12);
  CHECK(posterior_gap(sigma_hat, n, m) ==
        doctest::Approx(frobenius_norm(expect - sigma_hat)).epsilon(1e-10));
}

TEST_CASE("posterior sampler mean matches the closed form at d = 1") {
  SymMatrix sigma_hat = SymMatrix::identity(1) * 2.0;
  const int n = 20, m = 4;
  const int trials = 40000;
  Rng rng(63);
  std::vector<double> draws(trials);
  for (int t = 0; t < trials; ++t) {
    Rng r = rng.child(t);
    draws[t] = posterior_sample(sigma_hat, n, m, r)(0, 0);
  }
  CHECK(within_4se(mean_se(draws), posterior_mean(sigma_hat, n, m)(0, 0)));
}

TEST_CASE("discrete distribution moments") {
  DiscreteDist p({-1, 0, 2}, {0.2, 0.3, 0.5});
  CHECK(p.mass(0) == doctest::Approx(0.3));
  CHECK(p.mass(7) == doctest::Approx(0.0));
  CHECK(p.mean() == doctest::Approx(-0.2 + 1.0));
  CHECK(p.mean_abs() == doctest::Approx(0.2 + 1.0));
  CHECK(p.second_moment() == doctest::Approx(0.2 + 2.0));
  CHECK_THROWS(DiscreteDist({0, 1}, {0.5}));
  CHECK_THROWS(DiscreteDist({0, 1}, {0.7, 0.7}));
}

TEST_CASE("hockey stick divergence on hand-computed pairs") {
  DiscreteDist p({0, 1}, {0.5, 0.5});
  DiscreteDist q({0, 1}, {0.8, 0.2});
  CHECK(hockey_stick_divergence(p, q, 0.0) == doctest::Approx(0.3));
  CHECK(hockey_stick_divergence(p, p, 0.0) == doctest::Approx(0.0));
  // At eps = ln(1.6), e^eps * p dominates q entirely.
  CHECK(hockey_stick_divergence(p, q, std::log(1.6)) == doctest::Approx(0.0));
  // Partial overshoot: q(0) - e^eps p(0) = 0.8 - 1.2 * 0.5 = 0.2.
  CHECK(hockey_stick_divergence(p, q, std::log(1.2)) == doctest::Approx(0.2));
}

TEST_CASE("expectation gap inequality on simple pairs") {
  DiscreteDist p({-1, 1}, {0.5, 0.5});
  GapCheckReport same = expectation_gap_check(p, p, 0.1, 0.0);
  CHECK(same.precondition_ok);
  CHECK(same.lhs == doctest::Approx(0.0));
  CHECK(same.holds);

  DiscreteDist q({-1, 1}, {0.4, 0.6});
  double eps = 0.3;
  double delta = std::max(hockey_stick_divergence(p, q, eps),
                          hockey_stick_divergence(q, p, eps));
  GapCheckReport rep = expectation_gap_check(p, q, eps, delta);
  CHECK(rep.precondition_ok);
  CHECK(rep.lhs == doctest::Approx(0.2));
  CHECK(rep.holds);
}

TEST_CASE("variance oracle matches monte carlo at d = 2") {
  Rng rng(64);
  Eigen::MatrixXd pm(2, 2);
  pm << 0.7, -0.2, 0.4, 1.1;  // deliberately asymmetric
  Eigen::MatrixXd c(2, 2);
  c << 2, 1, 1, 2;
  SymMatrix sigma{c};
  double oracle = variance_oracle_zprime(pm, sigma);
  SymMatrix root = sqrt_psd(sigma);
  const int trials = 200000;
  std::vector<double> sq(trials);
  SymMatrix psym = symmetrize(pm);
  for (int t = 0; t < trials; ++t) {
    Rng r = rng.child(t);
    Vector x = gaussian_draw(Vector::Zero(2), root, r);
    double z = inner_product(psym, outer(x) - sigma);
    sq[t] = z * z;
  }
  CHECK(within_4se(mean_se(sq), oracle));
  // Never above the operator-norm bound.
  double opb = 2.0 * operator_norm(sigma) * operator_norm(sigma) *
               frobenius_norm(psym) * frobenius_norm(psym);
  CHECK(oracle <= opb + 1e-12);
}

TEST_CASE("run attack is reproducible and worker-invariant") {
  MechanismParams mp;
  mp.radius = 10.0;
  Mechanism mech = make_mechanism("dp-gauss-cov", 4, mp);
  RunOptions one, four;
  one.workers = 1;
  four.workers = 4;
  AttackReport a = run_attack(mech, 4, 24, 50, Rng(65), one);
  AttackReport b = run_attack(mech, 4, 24, 50, Rng(65), four);
  AttackReport c = run_attack(mech, 4, 24, 50, Rng(65), one);
  CHECK(attack_report_json(a) == attack_report_json(b));
  CHECK(attack_report_json(a) == attack_report_json(c));
  CHECK(a.rows.size() == 50);
  CHECK(a.trials == 50);
  CHECK(a.max_residual <= 1e-9);

  // Aggregates agree with per-row recomputation.
  std::vector<double> zb;
  for (const auto& row : a.rows) zb.push_back(row.z_bar);
  CHECK(mean_se(zb).mean == doctest::Approx(a.z_bar.mean).epsilon(1e-12));
  for (const auto& row : a.rows) {
    CHECK(row.residual <= 1e-9);
  }
  // Ceiling disabled by default.
  CHECK(a.dp_ceiling == 0.0);
  CHECK(!a.tension);
}

TEST_CASE("swapped statistic matches the original in law for a constant mechanism") {
  // A data-independent release makes Z and Z' identically distributed; the
  // two-sample KS test should not reject.
  Mechanism mech = make_mechanism("constant-prior-mean", 3);
  AttackOptions opts;
  opts.zprime_subset = 1;
  Rng rng(66);
  const int trials = 10000;
  std::vector<double> z, zp;
  for (int t = 0; t < trials; ++t) {
    AttackTrialRecord rec = attack_trial(mech, 3, 8, rng.child(t), opts);
    z.push_back(rec.z[0]);
    zp.push_back(rec.z_prime[rec.z_prime_indices[0]]);
  }
  double d = ks_statistic(z, zp);
  CHECK(ks_pvalue(d, trials, trials) > 0.001);
}

}  // TEST_SUITE
