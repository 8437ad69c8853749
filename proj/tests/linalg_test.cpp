#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fpaudit/linalg.hpp"
#include "fpaudit/rng.hpp"

using namespace fpaudit;

namespace {

SymMatrix random_sym(int d, Rng& rng) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  return symmetrize(m);
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("constructor rejects asymmetric input") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4;
  CHECK_THROWS_AS(SymMatrix{m}, std::invalid_argument);
  m(1, 0) = 2;
  CHECK_NOTHROW(SymMatrix{m});
}

TEST_CASE("factories") {
  SymMatrix i3 = SymMatrix::identity(3);
  CHECK(i3.dim() == 3);
  CHECK(i3(0, 0) == 1.0);
  CHECK(i3(0, 1) == 0.0);
  CHECK(SymMatrix::zero(2)(1, 1) == 0.0);
  Vector d(2);
  d << 3, -1;
  SymMatrix dm = SymMatrix::diagonal(d);
  CHECK(dm(0, 0) == 3.0);
  CHECK(dm(1, 1) == -1.0);
  CHECK(dm(0, 1) == 0.0);
}

TEST_CASE("inner product equals trace of the product") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    SymMatrix a = random_sym(4, rng), b = random_sym(4, rng);
    double direct = (a.mat() * b.mat()).trace();
    CHECK(inner_product(a, b) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("cauchy-schwarz over random pairs") {
  Rng rng(12);
  for (int rep = 0; rep < 100; ++rep) {
    SymMatrix a = random_sym(5, rng), b = random_sym(5, rng);
    CHECK(std::abs(inner_product(a, b)) <=
          frobenius_norm(a) * frobenius_norm(b) + 1e-12);
  }
}

TEST_CASE("frobenius norm matches entrywise sum") {
  Rng rng(13);
  SymMatrix a = random_sym(4, rng);
  double sq = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sq += a(i, j) * a(i, j);
  CHECK(frobenius_norm(a) == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
}

TEST_CASE("operator norm on diagonal and bounds") {
  Vector d(3);
  d << -5, 2, 4;
  CHECK(operator_norm(SymMatrix::diagonal(d)) == doctest::Approx(5.0));
  Rng rng(14);
  for (int rep = 0; rep < 20; ++rep) {
    SymMatrix a = random_sym(4, rng);
    double op = operator_norm(a);
    CHECK(op <= frobenius_norm(a) + 1e-12);
    // Rayleigh quotient on random directions never exceeds the norm.
    for (int k = 0; k < 10; ++k) {
      Vector v(4);
      for (int i = 0; i < 4; ++i) v(i) = rng.normal();
      v.normalize();
      CHECK(std::abs(v.dot(a.mat() * v)) <= op + 1e-10);
    }
  }
}

TEST_CASE("eigen extremes on a known matrix") {
  Vector d(3);
  d << -2, 1, 7;
  auto [lo, hi] = eigen_extremes(SymMatrix::diagonal(d));
  CHECK(lo == doctest::Approx(-2.0));
  CHECK(hi == doctest::Approx(7.0));
}

TEST_CASE("psd square root squares back") {
  Rng rng(15);
  for (int rep = 0; rep < 10; ++rep) {
    SymMatrix b = random_sym(4, rng);
    SymMatrix a = SymMatrix(b.mat() * b.mat().transpose());  // PSD
    SymMatrix r = sqrt_psd(a);
    CHECK((r.mat() * r.mat() - a.mat()).norm() <=
          1e-9 * (1.0 + a.mat().norm()));
    CHECK(eigen_extremes(r).first >= -1e-10);
  }
}

TEST_CASE("psd square root rejects negative definite input") {
  Vector d(2);
  d << 1, -1;
  CHECK_THROWS(sqrt_psd(SymMatrix::diagonal(d)));
}

TEST_CASE("symmetrize and outer") {
  Eigen::MatrixXd p(2, 2);
  p << 1, 4, 2, 3;
  SymMatrix s = symmetrize(p);
  CHECK(s(0, 1) == doctest::Approx(3.0));
  CHECK(s(0, 0) == doctest::Approx(1.0));

  Vector x(2);
  x << 2, -1;
  SymMatrix o = outer(x);
  CHECK(o(0, 0) == doctest::Approx(4.0));
  CHECK(o(0, 1) == doctest::Approx(-2.0));
  CHECK(o(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("arithmetic operators keep symmetry and values") {
  Rng rng(16);
  SymMatrix a = random_sym(3, rng), b = random_sym(3, rng);
  SymMatrix c = a + b * 2.0 - a * 0.5;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(c(i, j) ==
            doctest::Approx(a(i, j) + 2 * b(i, j) - 0.5 * a(i, j)));
  CHECK((2.0 * a)(1, 2) == doctest::Approx(2 * a(1, 2)));
  CHECK(a.trace() == doctest::Approx(a(0, 0) + a(1, 1) + a(2, 2)));
}

}  // TEST_SUITE
