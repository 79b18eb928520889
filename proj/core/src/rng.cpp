#include "wrgm/rng.hpp"

#include <cmath>
#include <string>

#include "wrgm/errors.hpp"

namespace wrgm {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
  id_ = splitmix64(sm);
}

RngStream RngStream::split(std::uint64_t key) const {
  std::uint64_t sm = id_ ^ (0x9e3779b97f4a7c15ULL + key);
  std::uint64_t child_seed = splitmix64(sm) ^ splitmix64(sm);
  return RngStream(child_seed);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("gamma: shape must be positive");
  }
  if (shape < 1.0) {
    // boost: Gamma(a) = Gamma(a+1) * U^{1/a}
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::chi_squared(double dof) {
  return 2.0 * gamma(0.5 * dof);
}

int RngStream::poisson(double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("poisson: lambda must be positive");
  }
  const double limit = std::exp(-lambda);
  int k = 0;
  double prod = uniform01();
  while (prod > limit) {
    ++k;
    prod *= uniform01();
  }
  return k;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& chol_lower, RngStream& rng) {
  if (mean.size() != chol_lower.rows() || chol_lower.rows() != chol_lower.cols()) {
    throw std::invalid_argument("sample_mvn: dimension mismatch");
  }
  Eigen::VectorXd z(mean.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + chol_lower.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_dirichlet(double beta, int k, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("sample_dirichlet: K must be >= 1");
  Eigen::VectorXd w(k);
  for (int i = 0; i < k; ++i) w[i] = rng.gamma(beta);
  return w / w.sum();
}

Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RngStream& rng) {
  if (alpha.size() < 1) throw std::invalid_argument("sample_dirichlet: empty alpha");
  Eigen::VectorXd w(alpha.size());
  for (int i = 0; i < alpha.size(); ++i) w[i] = rng.gamma(alpha[i]);
  return w / w.sum();
}

int sample_ztpois(double lambda, RngStream& rng) {
  for (;;) {
    const int k = rng.poisson(lambda);
    if (k > 0) return k;
  }
}

int sample_categorical(std::span<const double> log_weights, RngStream& rng) {
  if (log_weights.empty()) {
    throw std::invalid_argument("sample_categorical: empty weight vector");
  }
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (std::isinf(log_weights[i]) && log_weights[i] < 0) continue;
    const double gumbel = -std::log(-std::log(rng.uniform01()));
    const double score = log_weights[i] + gumbel;
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    throw NumericError("sample_categorical: all log-weights are -inf");
  }
  return best;
}

InvWishartSampler::InvWishartSampler(const SpdMatrix& psi, double nu) : nu_(nu) {
  const int p = psi.dim();
  if (!(nu > p - 1)) {
    throw std::invalid_argument("InvWishartSampler: need nu > p - 1");
  }
  // Sigma ~ IW(Psi, nu)  <=>  Sigma^{-1} ~ Wishart(Psi^{-1}, nu)
  const Eigen::MatrixXd psi_inv =
      psi.chol().triangularView<Eigen::Lower>().solve(
          Eigen::MatrixXd::Identity(p, p));
  // psi_inv here is L^{-1}; Psi^{-1} = L^{-T} L^{-1}
  const Eigen::MatrixXd full_inv = psi_inv.transpose() * psi_inv;
  chol_psi_inv_ = Eigen::LLT<Eigen::MatrixXd>(full_inv).matrixL();
}

Eigen::MatrixXd InvWishartSampler::draw(RngStream& rng) const {
  const int p = dim();
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_squared(nu_ - i));
    for (int j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  // W = (L A)(L A)^T ~ Wishart(Psi^{-1}, nu); Sigma = W^{-1} = T^{-T} T^{-1}
  const Eigen::MatrixXd t = chol_psi_inv_ * bartlett;
  const Eigen::MatrixXd t_inv =
      t.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd sigma = t_inv.transpose() * t_inv;
  return 0.5 * (sigma + sigma.transpose());
}

SpdMatrix sample_trunc_inv_wishart(const SpdMatrix& psi, double nu,
                                   double eig_lo, double eig_hi,
                                   int max_rejects, RngStream& rng) {
  if (!(eig_lo > 0.0) || !(eig_hi > eig_lo)) {
    throw std::invalid_argument("sample_trunc_inv_wishart: need 0 < eig_lo < eig_hi");
  }
  const InvWishartSampler sampler(psi, nu);
  for (int attempt = 0; attempt < max_rejects; ++attempt) {
    const Eigen::MatrixXd sigma = sampler.draw(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo >= eig_lo && hi <= eig_hi) {
      return SpdMatrix(sigma);
    }
  }
  throw NumericError("sample_trunc_inv_wishart: exhausted " + std::to_string(max_rejects) +
                     " rejections for eigenvalue bounds [" + std::to_string(eig_lo) +
                     ", " + std::to_string(eig_hi) + "]");
}

}  // namespace wrgm
