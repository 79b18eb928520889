#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wrgm/linalg.hpp"

namespace wrgm {

/// One mixture atom (m_k, Sigma_k). Immutable after construction; the
/// Cholesky factor, log-determinant and symmetric square root of the
/// covariance are cached so density and transport-distance evaluations
/// stay cheap in the sampler's inner loops.
class GaussianComponent {
 public:
  GaussianComponent(Eigen::VectorXd mean, SpdMatrix cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const SpdMatrix& cov() const { return cov_; }
  const Eigen::MatrixXd& chol() const { return cov_.chol(); }
  double log_det() const { return cov_.log_det(); }
  /// Symmetric square root of the covariance.
  const Eigen::MatrixXd& sqrt_cov() const { return sqrt_cov_; }

 private:
  Eigen::VectorXd mean_;
  SpdMatrix cov_;
  Eigen::MatrixXd sqrt_cov_;
};

/// Gaussian log-density log phi(y | m, Sigma).
double log_pdf(const GaussianComponent& c, const Eigen::VectorXd& y);

/// sum_k w_k phi(y | m_k, Sigma_k) for a discrete mixing measure.
double mixture_density(const Eigen::VectorXd& weights,
                       std::span<const GaussianComponent> components,
                       const Eigen::VectorXd& y);

}  // namespace wrgm
