#include "wrgm/linalg.hpp"

#include <cmath>
#include <sstream>

#include "wrgm/errors.hpp"

namespace wrgm {

namespace {

std::string dump_matrix(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("SpdMatrix: matrix must be square and non-empty");
  }
  mat_ = 0.5 * (m + m.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(mat_);
  if (llt.info() != Eigen::Success) {
    throw NumericError("SpdMatrix: matrix is not positive definite:\n" + dump_matrix(mat_));
  }
  chol_ = llt.matrixL();
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

SpdMatrix SpdMatrix::identity(int dim) {
  return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SpdMatrix SpdMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SpdMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

Eigen::VectorXd SpdMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (sym.rows() <= 3) {
    es.computeDirect(sym);
  } else {
    es.compute(sym);
  }
  if (es.info() != Eigen::Success) {
    throw NumericError("spd_sqrt: eigen-solver did not converge on:\n" + dump_matrix(sym));
  }
  Eigen::VectorXd evals = es.eigenvalues();
  const double lambda_max = evals.cwiseAbs().maxCoeff();
  for (int i = 0; i < evals.size(); ++i) {
    if (evals[i] < 0.0) {
      if (evals[i] >= -1e-9 * lambda_max) {
        evals[i] = 0.0;  // round-off
      } else {
        throw NumericError("spd_sqrt: matrix is indefinite:\n" + dump_matrix(sym));
      }
    }
  }
  Eigen::MatrixXd root = es.eigenvectors() *
                         evals.cwiseSqrt().asDiagonal() *
                         es.eigenvectors().transpose();
  return 0.5 * (root + root.transpose());
}

SpdMatrix spd_sqrt(const SpdMatrix& a) {
  return SpdMatrix(spd_sqrt(a.mat()));
}

}  // namespace wrgm
