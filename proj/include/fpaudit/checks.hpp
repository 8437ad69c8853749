#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpaudit/calibration.hpp"

namespace fpaudit {

// One named statistical or algebraic check. `estimate` vs `target` is the
// headline comparison; `se` is nonzero for Monte-Carlo estimates, and the
// repo-wide pass rule for those is |estimate - target| <= 4 se unless the
// note says otherwise.
struct CheckResult {
  std::string name;
  bool pass = false;
  double estimate = 0.0;
  double target = 0.0;
  double se = 0.0;
  std::string note;
};

// Per-trial identity (1/n) sum Z_i = <M - Sigma_hat, Sigma_hat - Sigma> +
// ||Sigma_hat - Sigma||_F^2: max relative residual over random attack trials
// across three mechanisms.
std::vector<CheckResult> check_decomposition(std::uint64_t seed,
                                             int trials_total, int workers);

// E[Z_i'] = 0: pooled swapped-index statistics per mechanism.
std::vector<CheckResult> check_zprime_unbiased(std::uint64_t seed,
                                               int indices_per_mech,
                                               int workers);

// MC variance of <P, XX^T - Sigma> against the exact closed form and the
// operator-norm upper bound, over random (P, Sigma) pairs at d = 4.
std::vector<CheckResult> check_variance_oracle(std::uint64_t seed, int pairs,
                                               int draws_per_pair, int workers);

// Conjugate-posterior checks: d = 1 sampled posterior vs a quadrature oracle
// for the prior x likelihood density; tower property at d = 4; mean squared
// posterior-gap slope in n at d = 8.
std::vector<CheckResult> check_conjugacy(std::uint64_t seed, int quad_draws,
                                         int joint_draws, int workers);

// Wishart / inverse-Wishart closed-form means and the prior operator-norm
// tail bound (e^2/x)^{d/2} at d = 10.
std::vector<CheckResult> check_matrix_distribution_facts(std::uint64_t seed,
                                                         int trials,
                                                         int workers);

// E||Sigma_hat - Sigma||_F^2 = (Tr(Sigma)^2 + Tr(Sigma^2))/n on a 6-point
// (d, n, Sigma) grid.
std::vector<CheckResult> check_empirical_mse(std::uint64_t seed,
                                             int trials_per_point, int workers);

// Heavy-tailed mixture: mean, kth-moment bounds for k in {2, 4}, padding
// adjacency and d = 1 distributional match, exhaustion probability.
std::vector<CheckResult> check_heavy_tailed(std::uint64_t seed, int workers);

// Coupled-sensitivity Lipschitz tests for the additive-noise mechanisms and
// exact verification of the expectation-gap inequality on random discrete
// pairs satisfying the two-sided closeness precondition.
std::vector<CheckResult> check_privacy_structure(std::uint64_t seed,
                                                 int sensitivity_pairs,
                                                 int discrete_pairs);

// The tradeoff demonstration: non-private baseline at the exact-MSE floor,
// shrinkage-calibrated DP mechanism strictly below it and monotone in eps.
std::vector<CheckResult> check_tension(const Calibration& cal,
                                       std::uint64_t seed, int trials_per_point,
                                       int workers);

// Concentration tail bound with the calibrated constant.
std::vector<CheckResult> check_hanson_wright(const Calibration& cal,
                                             std::uint64_t seed, int trials);

// P(lambda_min(Sigma) >= c) >= 2/3 at the calibrated (d, c).
std::vector<CheckResult> check_prior_lambda_min(const Calibration& cal,
                                                std::uint64_t seed, int trials);

// Error-floor table: spot value, branch continuity, monotonicity, and the
// 1/n scaling of the non-private floor (log-log slope -1 +- 0.2).
std::vector<CheckResult> check_error_floor(std::uint64_t seed,
                                           int trials_per_point, int workers);

struct SuiteOptions {
  std::uint64_t seed = 42;
  int workers = 1;
  bool full = false;  // full = acceptance-scale trial counts
};

// The whole validation suite, in a fixed order.
std::vector<CheckResult> run_validation_suite(const Calibration& cal,
                                              const SuiteOptions& opts);

}  // namespace fpaudit
