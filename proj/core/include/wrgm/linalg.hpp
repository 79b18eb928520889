#pragma once

#include <Eigen/Dense>

namespace wrgm {

/// Symmetric positive definite matrix with cached Cholesky factorization.
///
/// The input is symmetrized as (A + A^T)/2 on construction and positive
/// definiteness is checked through Cholesky success. The lower factor and
/// log-determinant are cached since nearly every consumer needs them.
class SpdMatrix {
 public:
  /// Throws std::invalid_argument on non-square input and NumericError
  /// when the (symmetrized) matrix is not positive definite.
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  static SpdMatrix identity(int dim);
  static SpdMatrix diagonal(const Eigen::VectorXd& diag);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  /// Lower Cholesky factor L with L L^T = mat().
  const Eigen::MatrixXd& chol() const { return chol_; }
  /// log det(mat()), equal to 2 * sum(log(diag(chol()))).
  double log_det() const { return log_det_; }

  /// Eigenvalues in increasing order (computed on demand, not cached).
  Eigen::VectorXd eigenvalues() const;

  double operator()(int i, int j) const { return mat_(i, j); }

 private:
  Eigen::MatrixXd mat_;
  Eigen::MatrixXd chol_;
  double log_det_;
};

/// Symmetric PSD square root via eigendecomposition: B with B*B = A.
/// Eigenvalues in [-1e-9 * lambda_max, 0) are treated as round-off and
/// clamped to zero; anything more negative raises NumericError carrying
/// the offending matrix.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a);
SpdMatrix spd_sqrt(const SpdMatrix& a);

}  // namespace wrgm
