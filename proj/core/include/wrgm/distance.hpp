#pragma once

#include "wrgm/gaussian.hpp"
#include "wrgm/linalg.hpp"

namespace wrgm {

/// Squared 2-Wasserstein distance between N(m_a, A) and N(m_b, B):
///   ||m_b - m_a||^2 + tr(A + B - 2 (A^{1/2} B A^{1/2})^{1/2}).
/// The inner product is symmetrized before its square root; results in
/// (-1e-9, 0) from round-off are clamped to zero.
double w2_squared(const GaussianComponent& a, const GaussianComponent& b);

/// Squared Bures-Wasserstein distance between covariance matrices,
/// i.e. w2_squared between the zero-mean Gaussians N(0, A), N(0, B).
double bures_squared(const SpdMatrix& a, const SpdMatrix& b);

/// Squared Hellinger distance between two Gaussians, in [0, 1]:
///   1 - det(A)^{1/4} det(B)^{1/4} / det((A+B)/2)^{1/2}
///     * exp(-1/8 (m_a-m_b)^T ((A+B)/2)^{-1} (m_a-m_b)).
double hellinger_squared(const GaussianComponent& a, const GaussianComponent& b);

}  // namespace wrgm
