#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace fpaudit {

using Vector = Eigen::VectorXd;

// Dense symmetric d x d matrix. Symmetry is enforced exactly at construction:
// the stored matrix always satisfies mat(i,j) == mat(j,i).
class SymMatrix {
 public:
  // Requires an exactly symmetric input; throws otherwise. Use symmetrize()
  // for inputs that are only symmetric up to float noise.
  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim);
  static SymMatrix diagonal(const Vector& diag);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  double operator()(int i, int j) const { return mat_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(mat_ + o.mat_); }
  SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(mat_ - o.mat_); }
  SymMatrix operator*(double c) const { return SymMatrix(c * mat_); }

  double trace() const { return mat_.trace(); }

 private:
  Eigen::MatrixXd mat_;
};

inline SymMatrix operator*(double c, const SymMatrix& a) { return a * c; }

// <A, B> = sum_ij A_ij B_ij = trace(A * B) for symmetric matrices.
double inner_product(const SymMatrix& a, const SymMatrix& b);

double frobenius_norm(const SymMatrix& a);

// Largest absolute eigenvalue.
double operator_norm(const SymMatrix& a);

// (lambda_min, lambda_max).
std::pair<double, double> eigen_extremes(const SymMatrix& a);

// Symmetric PSD square root. Throws if lambda_min < -tol with
// tol = 1e-8 * operator_norm(a). Small negative eigenvalues are clamped to 0.
SymMatrix sqrt_psd(const SymMatrix& a);

// (P + P^T) / 2 for a general square matrix.
SymMatrix symmetrize(const Eigen::MatrixXd& p);

// rank-one x x^T.
SymMatrix outer(const Vector& x);

}  // namespace fpaudit
