#pragma once

#include <span>
#include <vector>

#include "wrgm/distance.hpp"
#include "wrgm/gaussian.hpp"
#include "wrgm/rng.hpp"

namespace wrgm {

enum class RepulsionKind { kMin, kGeometricMean };

/// Which squared distance feeds the repulsion function: the Wasserstein
/// model (WRGM) uses W2^2 between components, the mean-repulsive model
/// (RGM) uses ||m_k - m_k'||^2, and kNone disables repulsion entirely
/// (plain mixture of finite mixtures).
enum class RepulsionMetric { kWasserstein, kMeanEuclidean, kNone };

enum class CovarianceShape { kFull, kDiagonal };

/// Every hyperparameter of the hierarchical model plus the variant
/// switches. The inverse-Wishart scale fixes the dimension.
struct PriorHyperparams {
  double dirichlet_beta = 1.0;   // Dirichlet concentration, in (0, 1]
  double mean_scale = 100.0;     // tau; mean prior is N(0, tau^2 I)
  SpdMatrix iw_scale;            // Psi
  double iw_dof = 3.0;           // nu > p - 1
  double eig_lo = 1e-12;         // covariance eigenvalue truncation
  double eig_hi = 1e12;
  double poisson_lambda = 1.0;   // zero-truncated Poisson prior on K
  double g0 = 5.0;               // g(x) = x / (g0 + x)
  RepulsionKind repulsion_kind = RepulsionKind::kMin;
  RepulsionMetric repulsion_metric = RepulsionMetric::kWasserstein;
  CovarianceShape covariance_shape = CovarianceShape::kFull;

  explicit PriorHyperparams(int dim) : iw_scale(SpdMatrix::identity(dim)) {}
  PriorHyperparams(const SpdMatrix& psi) : iw_scale(psi) {}

  int dim() const { return iw_scale.dim(); }
  /// Throws std::invalid_argument with a field-level message.
  void validate() const;
};

/// The monotone repulsion link g(x) = x / (g0 + x); strictly increasing,
/// g(0) = 0, limit 1.
double g_repulse(double x, double g0);
/// log g(x); -inf at x = 0.
double log_g_repulse(double x, double g0);

/// Squared distance between two components under the active metric.
double pair_distance_squared(const GaussianComponent& a,
                             const GaussianComponent& b,
                             RepulsionMetric metric);

/// log h_K of a component tuple: min over pairs of log g(d^2) for kMin,
/// (1/K) sum over pairs for kGeometricMean; 0 for a single component or
/// when the metric is kNone. -inf exactly when two components coincide
/// under the active metric.
double log_repulsion(std::span<const GaussianComponent> components,
                     const PriorHyperparams& h);
/// exp(log_repulsion), in [0, 1].
double repulsion(std::span<const GaussianComponent> components,
                 const PriorHyperparams& h);

/// log p_m(m) + log p_Sigma(Sigma), up to the constant truncation
/// normalizer of p_Sigma (omitted; it cancels in every sampler ratio).
/// Returns -inf when any covariance eigenvalue falls outside
/// [eig_lo, eig_hi]. The diagonal variant scores the induced independent
/// inverse-gamma marginals instead of the full inverse-Wishart.
double log_base_prior(const GaussianComponent& c, const PriorHyperparams& h);

/// sum of log_base_prior over the tuple plus log h_K; Z_K excluded.
double log_repulsive_prior_unnorm(std::span<const GaussianComponent> components,
                                  const PriorHyperparams& h);

/// Monte-Carlo diagnostic for the omitted truncation normalizer of
/// p_Sigma: estimates P(all eigenvalues in bounds) under the
/// untruncated covariance prior.
double estimate_eig_truncation_prob(const PriorHyperparams& h, int n_draws,
                                    RngStream& rng);

struct LogZEstimate {
  double estimate;   // log Z_K
  double std_error;  // delta-method standard error of the log
};

/// Plain Monte Carlo estimate of log Z_K: average h_K over n_draws i.i.d.
/// K-tuples from the base priors. Exact (0, 0) for K = 1 and for
/// repulsion metric kNone, where h is identically 1. Throws NumericError
/// if every draw yields h = 0.
LogZEstimate estimate_log_ZK(int k, const PriorHyperparams& h, int n_draws,
                             RngStream& rng);

/// log pmf of the zero-truncated Poisson prior on K, k >= 1.
double ztpois_log_pmf(int k, double lambda);

/// log V_n(t) of the exchangeable-partition representation:
///   V_n(t) = sum_{k >= t} p_K(k) k_(t) / (beta k)^(n)
/// with falling factorial k_(t) and ascending factorial (beta k)^(n),
/// accumulated in log space and truncated when the tail term drops below
/// 1e-12 of the running sum (hard cap 1e5 terms).
double mfm_log_Vn(int n, int t, const PriorHyperparams& h);

/// One draw of (m, Sigma) from the base priors p_m x p_Sigma (with the
/// eigenvalue truncation, by rejection).
GaussianComponent sample_base_component(const PriorHyperparams& h,
                                        int max_rejects, RngStream& rng);

/// Base-prior sampler with the inverse-Wishart factorization precomputed;
/// equivalent to sample_base_component but cheap to call in inner loops.
class BasePriorSampler {
 public:
  explicit BasePriorSampler(const PriorHyperparams& h);
  GaussianComponent draw(int max_rejects, RngStream& rng) const;

 private:
  double tau_;
  double eig_lo_, eig_hi_;
  CovarianceShape shape_;
  int dim_;
  InvWishartSampler iw_;                // used for kFull
  double inv_gamma_shape_;              // used for kDiagonal
  Eigen::VectorXd inv_gamma_scale_;
};

}  // namespace wrgm
