#include "wrgm/prior.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wrgm/errors.hpp"

namespace wrgm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLogPi = 1.1447298858494001741;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double multivariate_lgamma(double a, int p) {
  double result = 0.25 * p * (p - 1) * kLogPi;
  for (int j = 1; j <= p; ++j) {
    result += std::lgamma(a + 0.5 * (1.0 - j));
  }
  return result;
}

// log N(m; 0, tau^2 I)
double log_mean_prior(const Eigen::VectorXd& m, double tau) {
  const int p = static_cast<int>(m.size());
  return -0.5 * p * kLog2Pi - p * std::log(tau) - 0.5 * m.squaredNorm() / (tau * tau);
}

// log IW(Sigma; Psi, nu), using the component's cached factorization.
double log_inv_wishart(const GaussianComponent& c, const SpdMatrix& psi, double nu) {
  const int p = c.dim();
  // tr(Psi Sigma^{-1}) = ||L_Sigma^{-1} L_Psi||_F^2
  const Eigen::MatrixXd a =
      c.chol().triangularView<Eigen::Lower>().solve(psi.chol());
  const double trace_term = a.squaredNorm();
  return 0.5 * nu * psi.log_det() - 0.5 * nu * p * std::numbers::ln2 -
         multivariate_lgamma(0.5 * nu, p) -
         0.5 * (nu + p + 1) * c.log_det() - 0.5 * trace_term;
}

double log_inv_gamma(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - scale / x;
}

}  // namespace

void PriorHyperparams::validate() const {
  const int p = dim();
  if (!(dirichlet_beta > 0.0 && dirichlet_beta <= 1.0)) {
    throw std::invalid_argument("prior.dirichlet_beta: must be in (0, 1]");
  }
  if (!(mean_scale > 0.0)) {
    throw std::invalid_argument("prior.mean_scale: must be positive");
  }
  if (!(iw_dof > p - 1)) {
    throw std::invalid_argument("prior.iw_dof: must exceed dim - 1");
  }
  if (!(eig_lo > 0.0)) {
    throw std::invalid_argument("prior.eig_lo: must be positive");
  }
  if (!(eig_hi > eig_lo)) {
    throw std::invalid_argument("prior.eig_hi: must exceed eig_lo");
  }
  if (!(poisson_lambda > 0.0)) {
    throw std::invalid_argument("prior.poisson_lambda: must be positive");
  }
  if (!(g0 > 0.0)) {
    throw std::invalid_argument("prior.g0: must be positive");
  }
}

double g_repulse(double x, double g0) {
  if (x < 0.0) throw std::invalid_argument("g_repulse: x must be non-negative");
  if (!(g0 > 0.0)) throw std::invalid_argument("g_repulse: g0 must be positive");
  return x / (g0 + x);
}

double log_g_repulse(double x, double g0) {
  if (x < 0.0) throw std::invalid_argument("log_g_repulse: x must be non-negative");
  if (!(g0 > 0.0)) throw std::invalid_argument("log_g_repulse: g0 must be positive");
  if (x == 0.0) return -kInf;
  return std::log(x) - std::log(g0 + x);
}

double pair_distance_squared(const GaussianComponent& a,
                             const GaussianComponent& b,
                             RepulsionMetric metric) {
  switch (metric) {
    case RepulsionMetric::kWasserstein:
      return w2_squared(a, b);
    case RepulsionMetric::kMeanEuclidean:
      return (a.mean() - b.mean()).squaredNorm();
    case RepulsionMetric::kNone:
      throw std::invalid_argument("pair_distance_squared: no metric is active");
  }
  throw std::invalid_argument("pair_distance_squared: unknown metric");
}

double log_repulsion(std::span<const GaussianComponent> components,
                     const PriorHyperparams& h) {
  if (components.empty()) {
    throw std::invalid_argument("log_repulsion: empty component list");
  }
  const std::size_t k = components.size();
  if (k == 1 || h.repulsion_metric == RepulsionMetric::kNone) return 0.0;

  double min_log_g = kInf;
  double sum_log_g = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d2 = pair_distance_squared(components[i], components[j],
                                              h.repulsion_metric);
      const double lg = log_g_repulse(d2, h.g0);
      min_log_g = std::min(min_log_g, lg);
      sum_log_g += lg;
    }
  }
  if (h.repulsion_kind == RepulsionKind::kMin) return min_log_g;
  return sum_log_g / static_cast<double>(k);
}

double repulsion(std::span<const GaussianComponent> components,
                 const PriorHyperparams& h) {
  return std::exp(log_repulsion(components, h));
}

double log_base_prior(const GaussianComponent& c, const PriorHyperparams& h) {
  if (c.dim() != h.dim()) {
    throw std::invalid_argument("log_base_prior: component/prior dimension mismatch");
  }
  const Eigen::VectorXd evals = c.cov().eigenvalues();
  if (evals.minCoeff() < h.eig_lo || evals.maxCoeff() > h.eig_hi) {
    return -kInf;
  }
  double log_cov_prior;
  if (h.covariance_shape == CovarianceShape::kFull) {
    log_cov_prior = log_inv_wishart(c, h.iw_scale, h.iw_dof);
  } else {
    const int p = h.dim();
    const double shape = 0.5 * (h.iw_dof + p - 1);
    log_cov_prior = 0.0;
    for (int j = 0; j < p; ++j) {
      log_cov_prior += log_inv_gamma(c.cov()(j, j), shape, 0.5 * h.iw_scale(j, j));
    }
  }
  return log_mean_prior(c.mean(), h.mean_scale) + log_cov_prior;
}

double log_repulsive_prior_unnorm(std::span<const GaussianComponent> components,
                                  const PriorHyperparams& h) {
  double total = log_repulsion(components, h);
  for (const auto& c : components) {
    total += log_base_prior(c, h);
  }
  return total;
}

double estimate_eig_truncation_prob(const PriorHyperparams& h, int n_draws,
                                    RngStream& rng) {
  if (n_draws < 1) throw std::invalid_argument("estimate_eig_truncation_prob: n_draws >= 1");
  PriorHyperparams untruncated = h;
  untruncated.eig_lo = std::numeric_limits<double>::min();
  untruncated.eig_hi = kInf;
  const BasePriorSampler base(untruncated);
  int in_bounds = 0;
  for (int i = 0; i < n_draws; ++i) {
    const GaussianComponent c = base.draw(1, rng);
    const Eigen::VectorXd evals = c.cov().eigenvalues();
    if (evals.minCoeff() >= h.eig_lo && evals.maxCoeff() <= h.eig_hi) ++in_bounds;
  }
  return static_cast<double>(in_bounds) / n_draws;
}

LogZEstimate estimate_log_ZK(int k, const PriorHyperparams& h, int n_draws,
                             RngStream& rng) {
  if (k < 1) throw std::invalid_argument("estimate_log_ZK: K must be >= 1");
  if (n_draws < 100) throw std::invalid_argument("estimate_log_ZK: n_draws must be >= 100");
  // h_K is identically 1 for a single component and without a metric, so
  // Z_K = 1 exactly; no draws are consumed.
  if (k == 1 || h.repulsion_metric == RepulsionMetric::kNone) return {0.0, 0.0};

  constexpr int kMaxRejects = 10000;
  const BasePriorSampler base(h);
  std::vector<GaussianComponent> tuple;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    tuple.clear();
    for (int j = 0; j < k; ++j) tuple.push_back(base.draw(kMaxRejects, rng));
    const double value = repulsion(tuple, h);
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum / n_draws;
  if (mean <= 0.0) {
    throw NumericError("estimate_log_ZK: all Monte Carlo draws gave h = 0");
  }
  const double var = std::max(0.0, (sum_sq - n_draws * mean * mean) / (n_draws - 1.0));
  const double se_mean = std::sqrt(var / n_draws);
  return {std::log(mean), se_mean / mean};
}

double ztpois_log_pmf(int k, double lambda) {
  if (k < 1) throw std::invalid_argument("ztpois_log_pmf: k must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("ztpois_log_pmf: lambda must be positive");
  return k * std::log(lambda) - lambda - std::lgamma(k + 1.0) -
         std::log(-std::expm1(-lambda));
}

double mfm_log_Vn(int n, int t, const PriorHyperparams& h) {
  if (t < 1) throw std::invalid_argument("mfm_log_Vn: t must be >= 1");
  if (t > n) throw std::invalid_argument("mfm_log_Vn: t must not exceed n");
  constexpr int kMaxTerms = 100000;
  const double beta = h.dirichlet_beta;
  double log_sum = -kInf;
  for (int i = 0; i < kMaxTerms; ++i) {
    const int k = t + i;
    // p_K(k) * k_(t) / (beta k)^(n), all in logs
    const double log_term = ztpois_log_pmf(k, h.poisson_lambda) +
                            std::lgamma(k + 1.0) - std::lgamma(k - t + 1.0) +
                            std::lgamma(beta * k) - std::lgamma(beta * k + n);
    log_sum = log_add(log_sum, log_term);
    if (log_term < log_sum + std::log(1e-12)) break;
  }
  return log_sum;
}

GaussianComponent sample_base_component(const PriorHyperparams& h,
                                        int max_rejects, RngStream& rng) {
  const BasePriorSampler base(h);
  return base.draw(max_rejects, rng);
}

BasePriorSampler::BasePriorSampler(const PriorHyperparams& h)
    : tau_(h.mean_scale),
      eig_lo_(h.eig_lo),
      eig_hi_(h.eig_hi),
      shape_(h.covariance_shape),
      dim_(h.dim()),
      iw_(h.iw_scale, h.iw_dof),
      inv_gamma_shape_(0.5 * (h.iw_dof + h.dim() - 1)),
      inv_gamma_scale_(0.5 * h.iw_scale.mat().diagonal()) {}

GaussianComponent BasePriorSampler::draw(int max_rejects, RngStream& rng) const {
  SpdMatrix cov = [&] {
    if (shape_ == CovarianceShape::kFull) {
      for (int attempt = 0; attempt < max_rejects; ++attempt) {
        const Eigen::MatrixXd sigma = iw_.draw(rng);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() >= eig_lo_ &&
            es.eigenvalues().maxCoeff() <= eig_hi_) {
          return SpdMatrix(sigma);
        }
      }
    } else {
      Eigen::VectorXd diag(dim_);
      bool ok = true;
      for (int j = 0; j < dim_; ++j) {
        double value = 0.0;
        int attempt = 0;
        do {
          value = inv_gamma_scale_[j] / rng.gamma(inv_gamma_shape_);
        } while ((value < eig_lo_ || value > eig_hi_) && ++attempt < max_rejects);
        if (value < eig_lo_ || value > eig_hi_) {
          ok = false;
          break;
        }
        diag[j] = value;
      }
      if (ok) return SpdMatrix::diagonal(diag);
    }
    throw NumericError("BasePriorSampler: exhausted rejection budget for eigenvalue bounds [" +
                       std::to_string(eig_lo_) + ", " + std::to_string(eig_hi_) + "]");
  }();
  Eigen::VectorXd mean(dim_);
  for (int j = 0; j < dim_; ++j) mean[j] = tau_ * rng.normal();
  return GaussianComponent(std::move(mean), std::move(cov));
}

}  // namespace wrgm
