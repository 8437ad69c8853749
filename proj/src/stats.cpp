#include "fpaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fpaudit {

MeanSE mean_se(std::span<const double> values) {
  MeanSE out;
  out.n = values.size();
  if (out.n == 0) return out;
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0, cc = 0.0;
  for (double v : values) {
    double dev = v - out.mean;
    double y = dev * dev - cc;
    double t = ss + y;
    cc = (t - ss) - y;
    ss = t;
  }
  double var = ss / static_cast<double>(out.n - 1);
  out.se = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

bool within_4se(const MeanSE& est, double target) {
  return std::abs(est.mean - target) <= 4.0 * est.se;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

double ks_statistic_cdf(std::vector<double> a,
                        const std::function<double(double)>& cdf) {
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double f = cdf(a[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n1, std::size_t n2) {
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    static_cast<double>(n1 + n2);
  const double lam =
      (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * statistic;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                  std::exp(-2.0 * j * j * lam * lam);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

namespace {
std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

// Regularized incomplete beta via continued fraction; used for the
// Student-t tail in the Spearman p-value.
double betacf(double a, double b, double x) {
  const int maxit = 200;
  const double eps = 3e-12, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= maxit; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

double incbeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lbeta = log_gamma(a) + log_gamma(b) - log_gamma(a + b);
  double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double nu) {
  // P(T > t) for Student-t with nu degrees of freedom.
  double x = nu / (nu + t * t);
  double p = 0.5 * incbeta(0.5 * nu, 0.5, x);
  return (t >= 0.0) ? p : 1.0 - p;
}
}  // namespace

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("spearman: need >= 3 paired samples");
  }
  auto rx = ranks(x);
  auto ry = ranks(y);
  MeanSE mx = mean_se(rx), my = mean_se(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    double dx = rx[i] - mx.mean, dy = ry[i] - my.mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  SpearmanResult out;
  if (sxx <= 0.0 || syy <= 0.0) return out;
  out.rho = sxy / std::sqrt(sxx * syy);
  const double n = static_cast<double>(rx.size());
  double rr = std::clamp(out.rho, -0.999999999, 0.999999999);
  double t = rr * std::sqrt((n - 2.0) / (1.0 - rr * rr));
  out.p_one_sided = student_t_sf(t, n - 2.0);
  return out;
}

double binomial_tail_above(std::uint64_t n, double p, std::uint64_t m) {
  if (p <= 0.0 || m >= n) return 0.0;
  if (p >= 1.0) return 1.0;
  // Sum P(K = k) for k = m+1..n in log space, from the dominant end.
  double lp = std::log(p), lq = std::log1p(-p);
  double ln = static_cast<double>(n);
  double total = 0.0;
  for (std::uint64_t k = m + 1; k <= n; ++k) {
    double kk = static_cast<double>(k);
    double lpk = log_gamma(ln + 1.0) - log_gamma(kk + 1.0) -
                 log_gamma(ln - kk + 1.0) + kk * lp + (ln - kk) * lq;
    total += std::exp(lpk);
    if (lpk < std::log(std::max(total, 1e-300)) - 40.0 && kk > ln * p) break;
  }
  return std::min(total, 1.0);
}

namespace {
double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double fa, double fm, double fb, double whole, double tol,
                int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, m, fa, flm, fm);
  double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = simpson(f, a, b, fa, fm, fb);
  return adaptive(f, a, b, fa, fm, fb, whole, tol, 48);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_slope: need >= 2 points");
  }
  MeanSE mx = mean_se(x), my = mean_se(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx.mean) * (y[i] - my.mean);
    sxx += (x[i] - mx.mean) * (x[i] - mx.mean);
  }
  return sxy / sxx;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double log_gamma(double x) { return std::lgamma(x); }

double log_multigamma(int d, double a) {
  double out = 0.25 * d * (d - 1) * std::log(3.141592653589793238462643383279502884);
  for (int j = 1; j <= d; ++j) {
    out += log_gamma(a + 0.5 * (1.0 - j));
  }
  return out;
}

}  // namespace fpaudit
