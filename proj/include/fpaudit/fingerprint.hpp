#pragma once

#include <cstdint>
#include <vector>

#include "fpaudit/distributions.hpp"
#include "fpaudit/linalg.hpp"
#include "fpaudit/mechanisms.hpp"
#include "fpaudit/rng.hpp"
#include "fpaudit/stats.hpp"

namespace fpaudit {

// Z = <m_out - sigma, x x^T - sigma>.
double z_statistic(const SymMatrix& m_out, const SymMatrix& sigma,
                   const Vector& x);

// One Monte-Carlo attack trial: Sigma ~ prior, X and X' ~ N(0, Sigma)^n, one
// mechanism run on X and one fresh run per swapped index.
struct AttackTrialRecord {
  SymMatrix sigma;
  SymMatrix sigma_hat;
  SymMatrix m_out;
  std::vector<double> z;        // length n
  std::vector<double> z_prime;  // length n; NaN at indices not evaluated
  std::vector<int> z_prime_indices;
  double err_frob = 0.0;       // ||M(X) - Sigma||_F
  double err_emp = 0.0;        // ||M(X) - Sigma_hat||_F
  double posterior_gap = 0.0;  // ||E[Sigma|X] - Sigma_hat||_F
  std::uint64_t seed = 0;
};

struct AttackOptions {
  // Z_i' is evaluated for a uniform random subset of min(n, zprime_subset)
  // indices unless full_zprime is set; each evaluation costs one extra
  // mechanism run.
  bool full_zprime = false;
  int zprime_subset = 16;
};

AttackTrialRecord attack_trial(const Mechanism& mech, int d, int n, Rng rng,
                               const AttackOptions& opts = {});

// Relative residual of the per-trial identity
// (1/n) sum Z_i = <M - Sigma_hat, Sigma_hat - Sigma> + ||Sigma_hat - Sigma||_F^2.
double decomposition_residual(const AttackTrialRecord& rec);

// Posterior under the standard-scale inverse-Wishart prior V = m I:
// Sigma | X ~ W^{-1}(m I + n Sigma_hat, m + n).
SymMatrix posterior_mean(const SymMatrix& sigma_hat, int n, int m);
SymMatrix posterior_sample(const SymMatrix& sigma_hat, int n, int m, Rng& rng);

// ||E[Sigma|X] - Sigma_hat||_F, in closed form.
double posterior_gap(const SymMatrix& sigma_hat, int n, int m);

// Finite real-valued distribution with explicit support.
struct DiscreteDist {
  std::vector<double> support;
  std::vector<double> probs;

  DiscreteDist(std::vector<double> support_, std::vector<double> probs_);
  double mass(double x) const;
  double mean() const;
  double mean_abs() const;
  double second_moment() const;
};

// Tightest delta for which q(S) <= e^eps p(S) + delta over all events:
// max(0, sum_x max(q(x) - e^eps p(x), 0)).
double hockey_stick_divergence(const DiscreteDist& p, const DiscreteDist& q,
                               double epsilon);

// Exact verification of |E[X - Y]| <= 2 eps E|X| + 2 sqrt(delta E[X^2 + Y^2])
// for X ~ p, Y ~ q, under the two-sided (eps, delta)-closeness precondition.
struct GapCheckReport {
  bool precondition_ok = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
GapCheckReport expectation_gap_check(const DiscreteDist& p,
                                     const DiscreteDist& q, double epsilon,
                                     double delta);

// Exact variance 2 ||Sigma^{1/2} sym(P) Sigma^{1/2}||_F^2 of <P, XX^T - Sigma>
// for X ~ N(0, Sigma).
double variance_oracle_zprime(const Eigen::MatrixXd& p, const SymMatrix& sigma);

// Aggregates across trials; every Monte-Carlo estimate carries a standard error.
struct TrialRow {
  std::uint64_t seed = 0;
  double z_bar = 0.0;           // (1/n) sum Z_i
  double z_prime_mean = 0.0;    // mean over evaluated indices
  double err_frob = 0.0;
  double err_emp = 0.0;
  double sq_err_floor = 0.0;    // ||Sigma_hat - Sigma||_F^2
  double mse_oracle = 0.0;      // (tr(Sigma)^2 + tr(Sigma^2)) / n
  double posterior_gap = 0.0;
  double residual = 0.0;
};

struct AttackReport {
  std::string mechanism_id;
  int d = 0;
  int n = 0;
  int trials = 0;
  MeanSE z_bar;
  MeanSE z_prime;       // pooled over all evaluated indices
  MeanSE floor;         // E ||Sigma_hat - Sigma||_F^2
  MeanSE mse_oracle;    // exact-formula oracle, averaged over the prior draws
  double gamma_median = 0.0;   // median of err_frob
  double gamma_q23 = 0.0;      // 2/3 quantile of err_frob
  double max_residual = 0.0;
  double dp_ceiling = 0.0;     // C * gamma * eps, 0 when not applicable
  bool tension = false;        // z_bar mean exceeds dp_ceiling by > 4 SE
  std::vector<TrialRow> rows;
};

struct RunOptions {
  AttackOptions attack;
  int workers = 1;
  // Calibrated constant for the DP-implied ceiling C * gamma * eps; <= 0
  // disables the tension flag.
  double ceiling_constant = 0.0;
};

AttackReport run_attack(const Mechanism& mech, int d, int n, int trials,
                        Rng rng, const RunOptions& opts = {});

}  // namespace fpaudit
