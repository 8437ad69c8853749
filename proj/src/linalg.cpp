#include "fpaudit/linalg.hpp"

namespace fpaudit {

namespace {
constexpr double kPsdRelTol = 1e-8;

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve_eigen(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver did not converge");
  }
  return es;
}
}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 1) {
    throw std::invalid_argument("SymMatrix: matrix must be square, dim >= 1");
  }
  if (mat_ != mat_.transpose().eval()) {
    throw std::invalid_argument("SymMatrix: matrix is not exactly symmetric");
  }
}

SymMatrix SymMatrix::identity(int dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::zero(int dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SymMatrix SymMatrix::diagonal(const Vector& diag) {
  return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

double inner_product(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("inner_product: dimension mismatch");
  }
  return a.mat().cwiseProduct(b.mat()).sum();
}

double frobenius_norm(const SymMatrix& a) { return a.mat().norm(); }

double operator_norm(const SymMatrix& a) {
  auto [lo, hi] = eigen_extremes(a);
  return std::max(std::abs(lo), std::abs(hi));
}

std::pair<double, double> eigen_extremes(const SymMatrix& a) {
  auto es = solve_eigen(a);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

SymMatrix sqrt_psd(const SymMatrix& a) {
  auto es = solve_eigen(a);
  Eigen::VectorXd ev = es.eigenvalues();
  const double tol = kPsdRelTol * std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  if (ev(0) < -tol) {
    throw std::invalid_argument("sqrt_psd: matrix is not positive semidefinite");
  }
  Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd r =
      es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return symmetrize(r);
}

SymMatrix symmetrize(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols()) {
    throw std::invalid_argument("symmetrize: matrix must be square");
  }
  Eigen::MatrixXd s = 0.5 * (p + p.transpose().eval());
  // Force bit-exact symmetry; (a+b)/2 can differ from (b+a)/2 only by
  // evaluation order, which Eigen may vectorize differently per triangle.
  for (int i = 0; i < s.rows(); ++i) {
    for (int j = i + 1; j < s.cols(); ++j) {
      s(j, i) = s(i, j);
    }
  }
  return SymMatrix(std::move(s));
}

SymMatrix outer(const Vector& x) {
  return symmetrize(x * x.transpose());
}

}  // namespace fpaudit
