#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "wrgm/linalg.hpp"

namespace wrgm {

/// Deterministic, splittable random stream (xoshiro256++ seeded through
/// SplitMix64). All variate transforms are implemented here rather than
/// delegated to std::<distribution>, so a given seed produces the same
/// sequence regardless of standard library.
///
/// Streams are single-owner. split(key) derives a child stream from the
/// parent's identity and the key only — not from the parent's draw
/// position — so the same key always yields the same child.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream split(std::uint64_t key) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform01();
  /// Standard normal via the Marsaglia polar method (spare cached).
  double normal();
  /// Gamma(shape, 1), shape > 0, Marsaglia-Tsang.
  double gamma(double shape);
  double chi_squared(double dof);
  /// Poisson(lambda) by Knuth's product method.
  int poisson(double lambda);

 private:
  std::uint64_t state_[4];
  std::uint64_t id_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// mean + chol * z with z i.i.d. standard normal.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& chol_lower, RngStream& rng);

/// Symmetric Dirichlet(beta, ..., beta) on the K-simplex via normalized gammas.
Eigen::VectorXd sample_dirichlet(double beta, int k, RngStream& rng);

/// General Dirichlet(alpha_1, ..., alpha_K).
Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RngStream& rng);

/// Zero-truncated Poisson via rejection of zeros.
int sample_ztpois(double lambda, RngStream& rng);

/// Index draw from unnormalized log-weights (Gumbel-max; exact in
/// distribution, -inf entries never win). Throws NumericError when every
/// weight is -inf.
int sample_categorical(std::span<const double> log_weights, RngStream& rng);

/// Bartlett-decomposition inverse-Wishart sampler with the scale matrix
/// factorization precomputed; draw() returns a raw (already symmetrized)
/// covariance draw without any eigenvalue truncation.
class InvWishartSampler {
 public:
  InvWishartSampler(const SpdMatrix& psi, double nu);
  Eigen::MatrixXd draw(RngStream& rng) const;

  double nu() const { return nu_; }
  int dim() const { return static_cast<int>(chol_psi_inv_.rows()); }

 private:
  Eigen::MatrixXd chol_psi_inv_;  // lower factor of Psi^{-1}
  double nu_;
};

/// Inverse-Wishart(psi, nu) restricted to eigenvalues in [eig_lo, eig_hi],
/// by rejection. Throws NumericError after max_rejects consecutive
/// rejections, naming the bounds.
SpdMatrix sample_trunc_inv_wishart(const SpdMatrix& psi, double nu,
                                   double eig_lo, double eig_hi,
                                   int max_rejects, RngStream& rng);

}  // namespace wrgm
