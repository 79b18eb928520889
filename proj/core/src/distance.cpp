#include "wrgm/distance.hpp"

#include <cmath>

#include "wrgm/errors.hpp"

namespace wrgm {

namespace {

// tr((S B S)^{1/2}) with S = A^{1/2}; the shared core of W2 and Bures.
double trace_cross_sqrt(const Eigen::MatrixXd& sqrt_a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd inner = sqrt_a * b * sqrt_a;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (inner.rows() <= 3) {
    es.computeDirect(inner);
  } else {
    es.compute(inner);
  }
  if (es.info() != Eigen::Success) {
    throw NumericError("trace_cross_sqrt: eigen-solver did not converge");
  }
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

double clamp_metric(double d2) {
  if (std::signbit(d2)) {
    if (d2 > -1e-9) return 0.0;
    throw NumericError("squared distance is negative beyond round-off tolerance");
  }
  return d2;
}

}  // namespace

double w2_squared(const GaussianComponent& a, const GaussianComponent& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("w2_squared: dimension mismatch");
  }
  const double mean_part = (a.mean() - b.mean()).squaredNorm();
  const double trace_part = a.cov().mat().trace() + b.cov().mat().trace() -
                            2.0 * trace_cross_sqrt(a.sqrt_cov(), b.cov().mat());
  return clamp_metric(mean_part + trace_part);
}

double bures_squared(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("bures_squared: dimension mismatch");
  }
  const double trace_part =
      a.mat().trace() + b.mat().trace() - 2.0 * trace_cross_sqrt(spd_sqrt(a.mat()), b.mat());
  return clamp_metric(trace_part);
}

double hellinger_squared(const GaussianComponent& a, const GaussianComponent& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("hellinger_squared: dimension mismatch");
  }
  const SpdMatrix avg(0.5 * (a.cov().mat() + b.cov().mat()));
  const Eigen::VectorXd dm = a.mean() - b.mean();
  const Eigen::VectorXd z = avg.chol().triangularView<Eigen::Lower>().solve(dm);
  const double log_bc = 0.25 * a.log_det() + 0.25 * b.log_det() -
                        0.5 * avg.log_det() - 0.125 * z.squaredNorm();
  const double h2 = -std::expm1(log_bc);
  return std::clamp(h2, 0.0, 1.0) + 0.0;  // normalizes -0
}

}  // namespace wrgm
