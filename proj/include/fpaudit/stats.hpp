#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fpaudit {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Compensated (Kahan) mean and standard error of the mean. Order-independent
// up to the summation order of `values`, which callers keep fixed by indexing
// results per trial.
MeanSE mean_se(std::span<const double> values);

// Repo-wide Monte-Carlo pass rule: |estimate - target| <= 4 standard errors.
bool within_4se(const MeanSE& est, double target);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// One-sample KS statistic against a CDF.
double ks_statistic_cdf(std::vector<double> a,
                        const std::function<double(double)>& cdf);

// Asymptotic two-sided KS p-value for a two-sample statistic.
double ks_pvalue(double statistic, std::size_t n1, std::size_t n2);

// Spearman rank correlation of paired samples, with a t-approximation
// p-value against the null of no monotone association (one-sided, rho > 0).
struct SpearmanResult {
  double rho = 0.0;
  double p_one_sided = 1.0;
};
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

// Exact upper binomial tail P(Bin(n, p) > m), computed in log space.
double binomial_tail_above(std::uint64_t n, double p, std::uint64_t m);

// Adaptive Simpson quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

// Empirical quantile (linear interpolation) of a sample.
double quantile(std::vector<double> values, double q);

double log_gamma(double x);

// Log multivariate gamma function log Gamma_d(a).
double log_multigamma(int d, double a);

}  // namespace fpaudit
