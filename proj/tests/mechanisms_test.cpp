#include <doctest.h>

#include <cmath>
#include <vector>

#include "fpaudit/mechanisms.hpp"
#include "fpaudit/stats.hpp"

using namespace fpaudit;

namespace {

Dataset random_dataset(int d, int n, double scale, Rng& rng) {
  Eigen::MatrixXd cols(d, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) cols(i, j) = scale * rng.normal();
  return Dataset(std::move(cols));
}

}  // namespace

TEST_SUITE("mechanisms") {

TEST_CASE("privacy params validate their ranges") {
  CHECK_THROWS(PrivacyParams(0.0, 1e-6));
  CHECK_THROWS(PrivacyParams(1.0, 1.0));
  CHECK_NOTHROW(PrivacyParams(0.5, 0.0));
}

TEST_CASE("second moment and centered covariance against direct loops") {
  Rng rng(31);
  Dataset x = random_dataset(3, 17, 1.0, rng);
  SymMatrix second = empirical_second_moment(x);
  SymMatrix centered = empirical_covariance_centered(x);
  Vector mu = Vector::Zero(3);
  for (int t = 0; t < 17; ++t) mu += x.sample(t);
  mu /= 17.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int t = 0; t < 17; ++t) s += x.sample(t)(i) * x.sample(t)(j);
      s /= 17.0;
      CHECK(second(i, j) == doctest::Approx(s).epsilon(1e-12));
      CHECK(centered(i, j) == doctest::Approx(s - mu(i) * mu(j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("clipping zeroes large samples and rescales the rest") {
  Eigen::MatrixXd cols(2, 2);
  cols << 3, 0.6, 4, 0.8;  // norms 5 and 1
  Dataset y = clip_dataset(Dataset(cols), 2.0);
  CHECK(y.sample(0).norm() == 0.0);
  CHECK(y.sample(1)(0) == doctest::Approx(0.3));
  CHECK(y.sample(1)(1) == doctest::Approx(0.4));
  CHECK_THROWS(clip_dataset(Dataset(cols), 0.0));
}

TEST_CASE("gaussian sigma formula and guards") {
  PrivacyParams p(0.5, 1e-6);
  CHECK(gaussian_sigma(0.1, p) ==
        doctest::Approx(0.1 * std::sqrt(2.0 * std::log(1.25e6)) / 0.5));
  CHECK_THROWS(gaussian_sigma(0.0, p));
  CHECK_THROWS(gaussian_sigma(0.1, PrivacyParams(0.5, 0.0)));
  CHECK_THROWS(gaussian_sigma(0.1, PrivacyParams(2.0, 1e-6)));
}

TEST_CASE("symmetric noise shape and variances") {
  Rng rng(32);
  const double sigma = 0.7;
  const int trials = 40000;
  std::vector<double> diag(trials), off(trials);
  for (int t = 0; t < trials; ++t) {
    Rng r = rng.child(t);
    SymMatrix g = symmetric_gaussian_noise(3, sigma, r);
    CHECK(g(0, 1) == g(1, 0));
    diag[t] = g(1, 1) * g(1, 1);
    off[t] = g(0, 2) * g(0, 2);
  }
  CHECK(within_4se(mean_se(diag), sigma * sigma));
  CHECK(within_4se(mean_se(off), sigma * sigma / 2.0));
}

TEST_CASE("dp covariance release is clipped statistic plus scaled noise") {
  Rng rng(33);
  Dataset x = random_dataset(3, 40, 2.0, rng);
  PrivacyParams p(1.0, 1e-6);
  const double r = 4.0;
  Rng mech_rng = rng.child(7), noise_rng = rng.child(7);
  Estimate est = dp_covariance_mechanism(x, p, r, mech_rng);
  SymMatrix stat = empirical_second_moment(clip_dataset(x, r));
  SymMatrix noise =
      symmetric_gaussian_noise(3, gaussian_sigma(2.0 / 40.0, p), noise_rng);
  CHECK(frobenius_norm(est.value - (stat + noise) * (r * r)) <= 1e-12);
  CHECK(est.mechanism_id == "dp-gauss-cov");
  REQUIRE(est.claimed_privacy.has_value());
  CHECK(est.claimed_privacy->epsilon == 1.0);
}

TEST_CASE("coupled adjacent runs move less than the declared sensitivity") {
  Rng rng(34);
  const int d = 3, n = 30;
  const double r = 4.0;
  PrivacyParams p(1.0, 1e-6);
  for (int rep = 0; rep < 50; ++rep) {
    Rng sub = rng.child(rep);
    Dataset x = random_dataset(d, n, 2.0, sub);
    Vector swap(d);
    for (int i = 0; i < d; ++i) swap(i) = 2.0 * sub.normal();
    Dataset x2 = x.with_replaced(static_cast<int>(sub.below(n)), swap);
    Rng a = sub.child(1), b = sub.child(1);  // identical noise
    SymMatrix ca = dp_covariance_mechanism(x, p, r, a).value;
    SymMatrix cb = dp_covariance_mechanism(x2, p, r, b).value;
    CHECK(frobenius_norm(ca - cb) <= 2.0 * r * r / n + 1e-12);
    Rng c = sub.child(2), e = sub.child(2);
    Vector ma = dp_mean_mechanism(x, p, r, c);
    Vector mb = dp_mean_mechanism(x2, p, r, e);
    CHECK((ma - mb).norm() <= 2.0 * r / n + 1e-12);
  }
}

TEST_CASE("median boost takes the entrywise lower median and caps") {
  std::vector<SymMatrix> ests = {SymMatrix::identity(2) * 1.0,
                                 SymMatrix::identity(2) * 5.0,
                                 SymMatrix::identity(2) * 3.0};
  SymMatrix med = median_boost(ests, 100.0);
  CHECK(med(0, 0) == doctest::Approx(3.0));
  CHECK(med(0, 1) == doctest::Approx(0.0));
  // Even count: lower median.
  ests.push_back(SymMatrix::identity(2) * 7.0);
  CHECK(median_boost(ests, 100.0)(1, 1) == doctest::Approx(3.0));
  // Cap exceeded: zero matrix.
  CHECK(frobenius_norm(median_boost(ests, 1.0)) == 0.0);
  CHECK_THROWS(median_boost({}, 1.0));
}

TEST_CASE("registry constructs and runs every mechanism") {
  Rng rng(35);
  Dataset x = random_dataset(4, 24, 1.0, rng);
  MechanismParams mp;
  mp.radius = 8.0;
  mp.signal_power = 50.0;
  const std::vector<std::string> ids = {
      "empirical",    "empirical-centered",  "constant-prior-mean",
      "dp-gauss-cov", "dp-gauss-cov-shrunk", "median-boost(dp-gauss-cov,3)"};
  for (const std::string& id : ids) {
    Mechanism m = make_mechanism(id, 4, mp);
    Rng r = rng.child(1);
    SymMatrix out = m.run(x, r);
    CHECK(out.dim() == 4);
    bool dp = id.rfind("dp-", 0) == 0 || id.rfind("median-boost", 0) == 0;
    CHECK(m.privacy.has_value() == dp);
  }
  CHECK_THROWS(make_mechanism("no-such-mechanism", 4));
  MechanismParams no_power;
  CHECK_THROWS(make_mechanism("dp-gauss-cov-shrunk", 4, no_power));
}

TEST_CASE("shrunk release interpolates raw toward the prior mean") {
  Rng rng(36);
  Dataset x = random_dataset(4, 32, 1.0, rng);
  MechanismParams mp;
  mp.radius = 8.0;
  mp.signal_power = 50.0;
  Mechanism shrunk = make_mechanism("dp-gauss-cov-shrunk", 4, mp);
  Rng a = rng.child(2), b = rng.child(2);
  SymMatrix out = shrunk.run(x, a);
  SymMatrix raw =
      dp_covariance_mechanism(x, PrivacyParams(mp.epsilon, mp.delta),
                              mp.radius, b)
          .value;
  SymMatrix prior_mean = prior_spec(4).mean();
  double sigma = gaussian_sigma(2.0 / 32.0, PrivacyParams(mp.epsilon, mp.delta));
  double noise_power = std::pow(mp.radius, 4.0) * sigma * sigma * 4.0 * 5.0 / 2.0;
  double lambda = mp.signal_power / (mp.signal_power + noise_power);
  CHECK(frobenius_norm(out - (prior_mean + (raw - prior_mean) * lambda)) <=
        1e-12);
  CHECK(lambda > 0.0);
  CHECK(lambda < 1.0);
}

}  // TEST_SUITE
