#include <doctest.h>

#include <cmath>

#include "fpaudit/mechanisms.hpp"
#include "fpaudit/reductions.hpp"
#include "fpaudit/stats.hpp"

using namespace fpaudit;

TEST_SUITE("reductions") {

TEST_CASE("config derived quantities") {
  ReductionConfig cfg(2, 0.5, 100, 3.0);
  CHECK(cfg.pad_rate() == doctest::Approx(0.25));
  CHECK(cfg.n_outer == 4);  // ceil(100 / (100 * 0.25))
  CHECK(cfg.scale == doctest::Approx(9.0));
  CHECK_THROWS(ReductionConfig(1, 0.5, 100, 3.0));
  CHECK_THROWS(ReductionConfig(2, 0.0, 100, 3.0));
  CHECK_THROWS(ReductionConfig(2, 1.5, 100, 3.0));
  CHECK_THROWS(ReductionConfig(2, 0.5, 0, 3.0));
  CHECK_THROWS(ReductionConfig(2, 0.5, 100, 0.0));
}

TEST_CASE("padding consumes samples in order and zero-fills the rest") {
  ReductionConfig cfg(2, 0.9, 200, 1.0);
  Rng rng(41);
  Eigen::MatrixXd cols(2, 200);
  for (int j = 0; j < 200; ++j) {
    cols(0, j) = j + 1;
    cols(1, j) = -(j + 1);
  }
  Dataset x(cols);
  Rng a = rng.child(0), b = rng.child(0);
  Dataset out = pad_to_heavy_tailed(x, cfg, a);
  CHECK(out.size() == cfg.n_outer);
  // Replay the slot coin flips with a coupled generator; the expected output
  // fills firing slots with the next unconsumed sample.
  int consumed = 0;
  for (int i = 0; i < cfg.n_outer; ++i) {
    bool fire = b.bernoulli(cfg.pad_rate());
    if (fire && consumed < cfg.m_inner) {
      ++consumed;
      CHECK(out.sample(i)(0) == doctest::Approx(consumed));
    } else {
      CHECK(out.sample(i).norm() == 0.0);
    }
  }
  CHECK_THROWS(pad_to_heavy_tailed(Dataset(cols.leftCols(10)), cfg, a));
}

TEST_CASE("adjacent inputs stay adjacent under coupled padding") {
  ReductionConfig cfg(2, 0.6, 50, 1.0);
  Rng rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    Rng sub = rng.child(rep);
    Eigen::MatrixXd cols(3, 50);
    for (int j = 0; j < 50; ++j)
      for (int i = 0; i < 3; ++i) cols(i, j) = sub.normal();
    Dataset x(cols);
    Vector v(3);
    for (int i = 0; i < 3; ++i) v(i) = sub.normal();
    Dataset x2 = x.with_replaced(static_cast<int>(sub.below(50)), v);
    Rng a = sub.child(1), b = sub.child(1);
    Dataset pa = pad_to_heavy_tailed(x, cfg, a);
    Dataset pb = pad_to_heavy_tailed(x2, cfg, b);
    int diffs = 0;
    for (int i = 0; i < pa.size(); ++i) {
      if (pa.sample(i) != pb.sample(i)) ++diffs;
    }
    CHECK(diffs <= 1);
  }
}

TEST_CASE("exhaustion probability equals the direct binomial sum") {
  ReductionConfig cfg(2, 0.9, 10, 1.0);  // n_outer = ceil(10/81) = 1... enlarge
  // Use a config where exhaustion is actually possible: n_outer > m_inner
  // requires rate < 1/100, i.e. beta small.
  ReductionConfig tight(4, 0.02, 3, 1.0);
  CHECK(tight.n_outer > tight.m_inner);
  double p = tight.pad_rate();
  int n = tight.n_outer, m = tight.m_inner;
  double direct = 0.0;
  for (int j = m + 1; j <= n; ++j) {
    direct += std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                       std::lgamma(n - j + 1.0) + j * std::log(p) +
                       (n - j) * std::log1p(-p));
  }
  CHECK(exhaustion_probability(tight) ==
        doctest::Approx(direct).epsilon(1e-9));
  CHECK(exhaustion_probability(cfg) == doctest::Approx(0.0));
}

TEST_CASE("rescale wrap composes clip, inner mechanism, and scale") {
  Rng rng(43);
  Eigen::MatrixXd cols(2, 20);
  for (int j = 0; j < 20; ++j)
    for (int i = 0; i < 2; ++i) cols(i, j) = 3.0 * rng.normal();
  Dataset x(cols);
  Mechanism inner = make_mechanism("empirical", 2);
  Mechanism wrapped = rescale_reduction_wrap(inner, 2, 5.0);
  CHECK(wrapped.id == "rescale(empirical)");
  Rng a = rng.child(0);
  SymMatrix got = wrapped.run(x, a);
  SymMatrix expect = empirical_second_moment(clip_dataset(x, 5.0)) * 25.0;
  CHECK(frobenius_norm(got - expect) <= 1e-12);
}

TEST_CASE("rescale wrap inherits the declared privacy") {
  MechanismParams mp;
  mp.epsilon = 0.7;
  mp.radius = 5.0;
  Mechanism dp = make_mechanism("dp-gauss-cov", 3, mp);
  Mechanism wrapped = rescale_reduction_wrap(dp, 3, 5.0);
  REQUIRE(wrapped.privacy.has_value());
  CHECK(wrapped.privacy->epsilon == doctest::Approx(0.7));
  CHECK(wrapped.sensitivity == doctest::Approx(dp.sensitivity));
}

TEST_CASE("sample complexity predictors") {
  CHECK(predicted_sample_complexity_covariance(16, 0.5, 0.25) ==
        doctest::Approx(16.0 / 0.25 + 64.0 / (0.5 * 0.25)));
  CHECK(predicted_sample_complexity_heavy_tailed(9, 0.5, 0.5, 2) ==
        doctest::Approx(9.0 / 0.25 + 9.0 / (0.25 * 0.5)));
  CHECK_THROWS(predicted_sample_complexity_covariance(4, 0.0, 0.5));
  CHECK_THROWS(predicted_sample_complexity_heavy_tailed(4, 0.5, 0.5, 1));
}

TEST_CASE("error floor branches and continuity") {
  CHECK(empirical_cov_error_floor(4, 100) == doctest::Approx(0.04));
  CHECK(empirical_cov_error_floor(32, 64) ==
        doctest::Approx(std::pow(64.0, -1.0 / 3.0)));
  CHECK(empirical_cov_error_floor(64, 8) == doctest::Approx(1.0));
  // Continuity at both branch boundaries.
  const double n = 1000.0;
  double lo = std::pow(n, 2.0 / 3.0), hi = std::pow(n, 4.0 / 3.0);
  CHECK(empirical_cov_error_floor(lo - 1e-9, n) ==
        doctest::Approx(empirical_cov_error_floor(lo + 1e-9, n)).epsilon(1e-6));
  CHECK(empirical_cov_error_floor(hi - 1e-9, n) ==
        doctest::Approx(empirical_cov_error_floor(hi + 1e-9, n)).epsilon(1e-6));
  CHECK_THROWS(empirical_cov_error_floor(0.5, 10));
}

}  // TEST_SUITE
