#include "wrgm/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace wrgm {

GaussianComponent::GaussianComponent(Eigen::VectorXd mean, SpdMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)), sqrt_cov_(spd_sqrt(cov_.mat())) {
  if (mean_.size() != cov_.dim()) {
    throw std::invalid_argument("GaussianComponent: mean/covariance dimension mismatch");
  }
}

double log_pdf(const GaussianComponent& c, const Eigen::VectorXd& y) {
  if (y.size() != c.dim()) {
    throw std::invalid_argument("log_pdf: point dimension does not match component");
  }
  static constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
  const Eigen::VectorXd z =
      c.chol().triangularView<Eigen::Lower>().solve(y - c.mean());
  return -0.5 * c.dim() * kLog2Pi - 0.5 * c.log_det() - 0.5 * z.squaredNorm();
}

double mixture_density(const Eigen::VectorXd& weights,
                       std::span<const GaussianComponent> components,
                       const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(weights.size()) != components.size()) {
    throw std::invalid_argument("mixture_density: weights/components size mismatch");
  }
  double density = 0.0;
  for (std::size_t k = 0; k < components.size(); ++k) {
    density += weights[static_cast<int>(k)] * std::exp(log_pdf(components[k], y));
  }
  return density;
}

}  // namespace wrgm
