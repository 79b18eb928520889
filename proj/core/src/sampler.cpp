#include "wrgm/sampler.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "wrgm/errors.hpp"

namespace wrgm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kZkStreamKey = 0x7a6b5a4b3c2d1e0fULL;

}  // namespace

void SamplerConfig::validate() const {
  if (n_iter < 1) throw std::invalid_argument("sampler.n_iter: must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter) {
    throw std::invalid_argument("sampler.burn_in: must satisfy 0 <= burn_in < n_iter");
  }
  if (thinning < 1) throw std::invalid_argument("sampler.thinning: must be >= 1");
  if (n_aux < 1) throw std::invalid_argument("sampler.n_aux: must be >= 1");
  if (zk_draws < 100) throw std::invalid_argument("sampler.zk_draws: must be >= 100");
  if (max_rejects < 1) throw std::invalid_argument("sampler.max_rejects: must be >= 1");
  prior.validate();
}

double log_joint(const MixtureState& state, const Eigen::MatrixXd& points,
                 const SamplerConfig& cfg,
                 const std::map<int, ZkEntry>& zk_table) {
  const int n = static_cast<int>(points.rows());
  const int t = state.t();
  const auto zk_it = zk_table.find(t);
  if (zk_it == zk_table.end()) {
    throw NumericError("log_joint: missing log Z_K cache entry for t = " + std::to_string(t));
  }

  double loglik = 0.0;
  for (int i = 0; i < n; ++i) {
    loglik += log_pdf(state.components[state.assignments[i]], points.row(i).transpose());
  }

  const double beta = cfg.prior.dirichlet_beta;
  double log_partition = mfm_log_Vn(n, t, cfg.prior);
  for (const int count : state.counts) {
    log_partition += std::lgamma(beta + count) - std::lgamma(beta);
  }

  const double log_prior = log_repulsive_prior_unnorm(state.components, cfg.prior);
  return loglik + log_partition + log_prior - zk_it->second.log_zk;
}

GibbsSampler::GibbsSampler(const Dataset& data, SamplerConfig cfg, RngStream rng)
    : points_(data.points),
      cfg_(std::move(cfg)),
      rng_(rng),
      zk_rng_root_(rng.split(kZkStreamKey)),
      base_(cfg_.prior) {
  cfg_.validate();
  const int n = static_cast<int>(points_.rows());
  if (n < 1) throw std::invalid_argument("GibbsSampler: empty data");
  if (points_.cols() != cfg_.prior.dim()) {
    throw std::invalid_argument("GibbsSampler: data/prior dimension mismatch");
  }

  // Initialize with all points in one cluster and a component drawn from
  // the conditionally conjugate posterior given all data, ignoring
  // repulsion; the covariance draw conditions on the sample mean.
  std::vector<int> all_rows(n);
  for (int i = 0; i < n; ++i) all_rows[i] = i;
  const Eigen::VectorXd ybar = points_.colwise().mean().transpose();
  bool exhausted = false;
  SpdMatrix cov = draw_cov_conditional(all_rows, ybar, exhausted);
  if (exhausted) {
    throw NumericError("GibbsSampler: covariance initialization exhausted the "
                       "eigenvalue-truncation rejection budget");
  }
  Eigen::VectorXd mean = draw_mean_conditional(all_rows, cov);

  state_.assignments.assign(n, 0);
  state_.counts = {n};
  state_.components.emplace_back(std::move(mean), std::move(cov));
  state_.log_repulsion = 0.0;
  state_.sweep_index = 0;
  pair_log_g_ = Eigen::MatrixXd::Zero(1, 1);
}

std::vector<int> GibbsSampler::cluster_rows(int k) const {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(state_.assignments.size()); ++i) {
    if (state_.assignments[i] == k) rows.push_back(i);
  }
  return rows;
}

double GibbsSampler::log_vn(int t) {
  const auto it = vn_cache_.find(t);
  if (it != vn_cache_.end()) return it->second;
  const double value = mfm_log_Vn(static_cast<int>(points_.rows()), t, cfg_.prior);
  vn_cache_.emplace(t, value);
  return value;
}

ZkEntry GibbsSampler::log_zk(int t) {
  const auto it = zk_cache_.find(t);
  if (it != zk_cache_.end()) return it->second;
  // Keyed split: the estimate for a given t is identical no matter when
  // the sampler first reaches that t.
  RngStream stream = zk_rng_root_.split(static_cast<std::uint64_t>(t));
  const LogZEstimate est = estimate_log_ZK(t, cfg_.prior, cfg_.zk_draws, stream);
  const ZkEntry entry{est.estimate, est.std_error};
  zk_cache_.emplace(t, entry);
  return entry;
}

double GibbsSampler::log_joint_current() {
  log_zk(state_.t());
  return wrgm::log_joint(state_, points_, cfg_, zk_cache_);
}

double GibbsSampler::log_repulsion_from_cache() const {
  const int t = state_.t();
  if (t <= 1 || cfg_.prior.repulsion_metric == RepulsionMetric::kNone) return 0.0;
  if (cfg_.prior.repulsion_kind == RepulsionKind::kMin) {
    double min_lg = kInf;
    for (int i = 0; i + 1 < t; ++i) {
      for (int j = i + 1; j < t; ++j) min_lg = std::min(min_lg, pair_log_g_(i, j));
    }
    return min_lg;
  }
  double sum = 0.0;
  for (int i = 0; i + 1 < t; ++i) {
    for (int j = i + 1; j < t; ++j) sum += pair_log_g_(i, j);
  }
  return sum / t;
}

double GibbsSampler::log_repulsion_with_extra(const Eigen::VectorXd& extra_col) const {
  const int t = state_.t();
  if (cfg_.prior.repulsion_kind == RepulsionKind::kMin) {
    double min_lg = (t >= 2) ? log_repulsion_from_cache() : kInf;
    min_lg = std::min(min_lg, extra_col.minCoeff());
    return min_lg;
  }
  double sum = 0.0;
  for (int i = 0; i + 1 < t; ++i) {
    for (int j = i + 1; j < t; ++j) sum += pair_log_g_(i, j);
  }
  sum += extra_col.sum();
  return sum / (t + 1);
}

Eigen::VectorXd GibbsSampler::pair_log_g_against(const GaussianComponent& c,
                                                 int skip_index) const {
  const int t = state_.t();
  Eigen::VectorXd col(skip_index >= 0 ? t - 1 : t);
  int out = 0;
  for (int j = 0; j < t; ++j) {
    if (j == skip_index) continue;
    const double d2 =
        pair_distance_squared(c, state_.components[j], cfg_.prior.repulsion_metric);
    col[out++] = log_g_repulse(d2, cfg_.prior.g0);
  }
  return col;
}

double GibbsSampler::repulsion_log_accept(int k, const GaussianComponent& candidate) const {
  const int t = state_.t();
  if (t <= 1 || cfg_.prior.repulsion_metric == RepulsionMetric::kNone) return 0.0;
  const Eigen::VectorXd col = pair_log_g_against(candidate, k);

  double new_log_h;
  if (cfg_.prior.repulsion_kind == RepulsionKind::kMin) {
    double min_lg = col.minCoeff();
    for (int i = 0; i + 1 < t; ++i) {
      for (int j = i + 1; j < t; ++j) {
        if (i == k || j == k) continue;
        min_lg = std::min(min_lg, pair_log_g_(i, j));
      }
    }
    new_log_h = min_lg;
  } else {
    double sum = col.sum();
    for (int i = 0; i + 1 < t; ++i) {
      for (int j = i + 1; j < t; ++j) {
        if (i == k || j == k) continue;
        sum += pair_log_g_(i, j);
      }
    }
    new_log_h = sum / t;
  }

  if (std::isinf(new_log_h) && new_log_h < 0) return -kInf;
  if (std::isinf(state_.log_repulsion) && state_.log_repulsion < 0) return kInf;
  return new_log_h - state_.log_repulsion;
}

void GibbsSampler::delete_cluster(int k) {
  const int t = state_.t();
  state_.components.erase(state_.components.begin() + k);
  state_.counts.erase(state_.counts.begin() + k);
  for (auto& z : state_.assignments) {
    if (z > k) --z;
  }
  if (cfg_.prior.repulsion_metric != RepulsionMetric::kNone) {
    Eigen::MatrixXd shrunk(t - 1, t - 1);
    int oi = 0;
    for (int i = 0; i < t; ++i) {
      if (i == k) continue;
      int oj = 0;
      for (int j = 0; j < t; ++j) {
        if (j == k) continue;
        shrunk(oi, oj) = pair_log_g_(i, j);
        ++oj;
      }
      ++oi;
    }
    pair_log_g_ = std::move(shrunk);
    state_.log_repulsion = log_repulsion_from_cache();
  }
}

void GibbsSampler::append_component(const GaussianComponent& c,
                                    const Eigen::VectorXd& pair_log_g_col) {
  const int t = state_.t();
  state_.components.push_back(c);
  if (cfg_.prior.repulsion_metric != RepulsionMetric::kNone) {
    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(t + 1, t + 1);
    grown.topLeftCorner(t, t) = pair_log_g_;
    for (int j = 0; j < t; ++j) {
      grown(j, t) = pair_log_g_col[j];
      grown(t, j) = pair_log_g_col[j];
    }
    pair_log_g_ = std::move(grown);
  }
}

void GibbsSampler::replace_component(int k, const GaussianComponent& c) {
  state_.components[k] = c;
  if (cfg_.prior.repulsion_metric != RepulsionMetric::kNone && state_.t() > 1) {
    const Eigen::VectorXd col = pair_log_g_against(c, k);
    int out = 0;
    for (int j = 0; j < state_.t(); ++j) {
      if (j == k) continue;
      pair_log_g_(k, j) = col[out];
      pair_log_g_(j, k) = col[out];
      ++out;
    }
    state_.log_repulsion = log_repulsion_from_cache();
  }
}

void GibbsSampler::remove_point(int i, std::vector<GaussianComponent>& reuse_pool) {
  const int k = state_.assignments[i];
  state_.assignments[i] = -1;
  if (--state_.counts[k] == 0) {
    // Neal Algorithm 8: a removed singleton's parameter becomes one of the
    // auxiliary components; discarding it would break invariance.
    reuse_pool.push_back(state_.components[k]);
    delete_cluster(k);
  }
}

std::vector<double> GibbsSampler::assignment_weights_after_removal(
    int i, std::span<const GaussianComponent> aux,
    std::vector<double>* aux_log_h) const {
  const Eigen::VectorXd y = points_.row(i).transpose();
  const int t_minus = state_.t();
  const double beta = cfg_.prior.dirichlet_beta;
  const bool repulsive = cfg_.prior.repulsion_metric != RepulsionMetric::kNone;

  std::vector<double> logw(t_minus + aux.size());
  for (int k = 0; k < t_minus; ++k) {
    logw[k] = std::log(state_.counts[k] + beta) + log_pdf(state_.components[k], y);
  }

  if (aux_log_h) aux_log_h->assign(aux.size(), 0.0);
  if (t_minus == 0) {
    // No occupied clusters remain: every option opens the same new cluster
    // and all partition/repulsion constants cancel in the normalization.
    for (std::size_t j = 0; j < aux.size(); ++j) {
      logw[j] = log_pdf(aux[j], y);
    }
    return logw;
  }

  // const_cast confined to the memoized lookups; the caches are
  // value-semantically transparent.
  auto* self = const_cast<GibbsSampler*>(this);
  const double vn_ratio = self->log_vn(t_minus + 1) - self->log_vn(t_minus);
  const double zk_ratio =
      repulsive ? self->log_zk(t_minus).log_zk - self->log_zk(t_minus + 1).log_zk : 0.0;
  const double create_const =
      std::log(beta) - std::log(static_cast<double>(aux.size())) + vn_ratio + zk_ratio;

  for (std::size_t j = 0; j < aux.size(); ++j) {
    double delta_log_h = 0.0;
    if (repulsive) {
      const Eigen::VectorXd col = pair_log_g_against(aux[j], -1);
      const double new_log_h = log_repulsion_with_extra(col);
      if (aux_log_h) (*aux_log_h)[j] = new_log_h;
      delta_log_h = (std::isinf(new_log_h) && new_log_h < 0)
                        ? -kInf
                        : new_log_h - state_.log_repulsion;
    }
    logw[t_minus + j] = create_const + delta_log_h + log_pdf(aux[j], y);
  }
  return logw;
}

void GibbsSampler::update_assignment(int i) {
  std::vector<GaussianComponent> pool;
  pool.reserve(cfg_.n_aux);
  remove_point(i, pool);
  const int t_minus = state_.t();

  while (static_cast<int>(pool.size()) < cfg_.n_aux) {
    pool.push_back(base_.draw(cfg_.max_rejects, rng_));
  }

  std::vector<double> pool_log_h;
  const std::vector<double> logw =
      assignment_weights_after_removal(i, pool, &pool_log_h);
  const int choice = sample_categorical(logw, rng_);

  if (choice < t_minus) {
    state_.assignments[i] = choice;
    ++state_.counts[choice];
    return;
  }

  const int j = choice - t_minus;
  const bool repulsive = cfg_.prior.repulsion_metric != RepulsionMetric::kNone;
  Eigen::VectorXd col;
  if (repulsive && t_minus > 0) {
    col = pair_log_g_against(pool[j], -1);
  } else {
    col = Eigen::VectorXd::Zero(t_minus);
  }
  append_component(pool[j], col);
  state_.counts.push_back(1);
  state_.assignments[i] = t_minus;
  state_.log_repulsion = (repulsive && t_minus > 0) ? pool_log_h[j] : 0.0;
}

std::vector<double> GibbsSampler::peek_assignment_log_weights(
    int i, std::span<const GaussianComponent> aux) const {
  GibbsSampler scratch(*this);
  std::vector<GaussianComponent> ignored;
  scratch.remove_point(i, ignored);
  return scratch.assignment_weights_after_removal(i, aux, nullptr);
}

SpdMatrix GibbsSampler::draw_cov_conditional(const std::vector<int>& rows,
                                             const Eigen::VectorXd& cond_mean,
                                             bool& exhausted) {
  exhausted = false;
  const auto& prior = cfg_.prior;
  const int p = prior.dim();
  const int n_k = static_cast<int>(rows.size());

  if (prior.covariance_shape == CovarianceShape::kFull) {
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
    for (const int i : rows) {
      const Eigen::VectorXd d = points_.row(i).transpose() - cond_mean;
      scatter.noalias() += d * d.transpose();
    }
    const SpdMatrix psi_post(prior.iw_scale.mat() + scatter);
    const InvWishartSampler iw(psi_post, prior.iw_dof + n_k);
    for (int attempt = 0; attempt < cfg_.max_rejects; ++attempt) {
      const Eigen::MatrixXd sigma = iw.draw(rng_);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() >= prior.eig_lo &&
          es.eigenvalues().maxCoeff() <= prior.eig_hi) {
        return SpdMatrix(sigma);
      }
    }
    exhausted = true;
    return psi_post;  // ignored by callers when exhausted
  }

  const double shape = 0.5 * (prior.iw_dof + p - 1) + 0.5 * n_k;
  Eigen::VectorXd diag(p);
  for (int j = 0; j < p; ++j) {
    double ss = 0.0;
    for (const int i : rows) {
      const double d = points_(i, j) - cond_mean[j];
      ss += d * d;
    }
    const double scale = 0.5 * prior.iw_scale(j, j) + 0.5 * ss;
    double value = 0.0;
    int attempt = 0;
    do {
      value = scale / rng_.gamma(shape);
    } while ((value < prior.eig_lo || value > prior.eig_hi) &&
             ++attempt < cfg_.max_rejects);
    if (value < prior.eig_lo || value > prior.eig_hi) {
      exhausted = true;
      return prior.iw_scale;  // ignored by callers when exhausted
    }
    diag[j] = value;
  }
  return SpdMatrix::diagonal(diag);
}

Eigen::VectorXd GibbsSampler::draw_mean_conditional(const std::vector<int>& rows,
                                                    const SpdMatrix& cov) {
  const auto& prior = cfg_.prior;
  const int p = prior.dim();
  const double tau2 = prior.mean_scale * prior.mean_scale;

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
  for (const int i : rows) sum += points_.row(i).transpose();

  const Eigen::MatrixXd l_inv =
      cov.chol().triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_inv = l_inv.transpose() * l_inv;
  const Eigen::MatrixXd precision =
      static_cast<double>(rows.size()) * cov_inv +
      Eigen::MatrixXd::Identity(p, p) / tau2;
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  const Eigen::VectorXd mu = llt.solve(cov_inv * sum);
  // posterior covariance V = precision^{-1}; sample via V^{1/2} z using
  // the triangular solve of the precision factor
  const Eigen::MatrixXd prec_chol = llt.matrixL();
  Eigen::VectorXd z(p);
  for (int j = 0; j < p; ++j) z[j] = rng_.normal();
  const Eigen::VectorXd shift =
      prec_chol.transpose().triangularView<Eigen::Upper>().solve(z);
  return mu + shift;
}

void GibbsSampler::update_component_params(int k) {
  if (k < 0 || k >= state_.t()) {
    throw std::invalid_argument("update_component_params: cluster index out of range");
  }
  const std::vector<int> rows = cluster_rows(k);

  // Covariance stage: conjugate truncated proposal given the current mean,
  // accepted with the repulsion ratio (everything else cancels).
  ++accepts_.cov_proposed;
  bool exhausted = false;
  const SpdMatrix cov_star =
      draw_cov_conditional(rows, state_.components[k].mean(), exhausted);
  if (exhausted) {
    ++accepts_.cov_draw_failures;
  } else {
    const GaussianComponent candidate(state_.components[k].mean(), cov_star);
    const double log_acc = repulsion_log_accept(k, candidate);
    if (log_acc >= 0.0 || std::log(rng_.uniform01()) < log_acc) {
      replace_component(k, candidate);
      ++accepts_.cov_accepted;
    }
  }

  // Mean stage: exact Gaussian conditional given the (possibly updated)
  // covariance, same acceptance structure.
  ++accepts_.mean_proposed;
  const Eigen::VectorXd mean_star = draw_mean_conditional(rows, state_.components[k].cov());
  const GaussianComponent candidate(mean_star, state_.components[k].cov());
  const double log_acc = repulsion_log_accept(k, candidate);
  if (log_acc >= 0.0 || std::log(rng_.uniform01()) < log_acc) {
    replace_component(k, candidate);
    ++accepts_.mean_accepted;
  }
}

void GibbsSampler::sweep() {
  const int n = static_cast<int>(points_.rows());
  for (int i = 0; i < n; ++i) update_assignment(i);
  for (int k = 0; k < state_.t(); ++k) update_component_params(k);
  ++state_.sweep_index;
}

Chain GibbsSampler::run() {
  const auto start = std::chrono::steady_clock::now();
  Chain chain{{}, ChainMeta(cfg_)};
  chain.meta.n = static_cast<int>(points_.rows());
  chain.meta.dim = static_cast<int>(points_.cols());

  const int expected =
      (cfg_.n_iter - cfg_.burn_in) / cfg_.thinning;
  chain.samples.reserve(std::max(0, expected));

  for (int it = 1; it <= cfg_.n_iter; ++it) {
    sweep();
    if (it > cfg_.burn_in && (it - cfg_.burn_in) % cfg_.thinning == 0) {
      ChainSample sample;
      sample.sweep_index = it;
      sample.assignments = state_.assignments;
      sample.components = state_.components;
      Eigen::VectorXd alpha(state_.t());
      for (int k = 0; k < state_.t(); ++k) {
        alpha[k] = cfg_.prior.dirichlet_beta + state_.counts[k];
      }
      sample.weights = sample_dirichlet(alpha, rng_);
      sample.log_joint = log_joint_current();
      chain.samples.push_back(std::move(sample));
    }
  }

  chain.meta.accepts = accepts_;
  chain.meta.zk_table = zk_cache_;
  chain.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return chain;
}

void GibbsSampler::set_state(MixtureState state) {
  const int n = static_cast<int>(points_.rows());
  const int t = state.t();
  if (static_cast<int>(state.assignments.size()) != n) {
    throw std::invalid_argument("set_state: assignment length does not match data");
  }
  if (static_cast<int>(state.counts.size()) != t || t < 1) {
    throw std::invalid_argument("set_state: counts/components mismatch");
  }
  std::vector<int> histogram(t, 0);
  for (const int z : state.assignments) {
    if (z < 0 || z >= t) throw std::invalid_argument("set_state: assignment out of range");
    ++histogram[z];
  }
  if (histogram != state.counts) {
    throw std::invalid_argument("set_state: counts disagree with assignments");
  }
  for (const auto& c : state.components) {
    if (c.dim() != points_.cols()) {
      throw std::invalid_argument("set_state: component dimension mismatch");
    }
  }
  state_ = std::move(state);
  if (cfg_.prior.repulsion_metric != RepulsionMetric::kNone) {
    pair_log_g_ = Eigen::MatrixXd::Zero(t, t);
    for (int i = 0; i + 1 < t; ++i) {
      for (int j = i + 1; j < t; ++j) {
        const double d2 = pair_distance_squared(
            state_.components[i], state_.components[j], cfg_.prior.repulsion_metric);
        pair_log_g_(i, j) = pair_log_g_(j, i) = log_g_repulse(d2, cfg_.prior.g0);
      }
    }
  } else {
    pair_log_g_ = Eigen::MatrixXd::Zero(std::max(1, t), std::max(1, t));
  }
  state_.log_repulsion = log_repulsion_from_cache();
}

void GibbsSampler::resample_data(RngStream& rng) {
  for (int i = 0; i < points_.rows(); ++i) {
    const auto& c = state_.components[state_.assignments[i]];
    points_.row(i) = sample_mvn(c.mean(), c.chol(), rng).transpose();
  }
}

double GibbsSampler::recompute_log_repulsion() const {
  return log_repulsion(state_.components, cfg_.prior);
}

void GibbsSampler::check_invariants() const {
  const int n = static_cast<int>(points_.rows());
  const int t = state_.t();
  if (static_cast<int>(state_.counts.size()) != t) {
    throw std::logic_error("invariant: counts size != number of components");
  }
  std::vector<int> histogram(t, 0);
  for (int i = 0; i < n; ++i) {
    const int z = state_.assignments[i];
    if (z < 0 || z >= t) throw std::logic_error("invariant: assignment out of range");
    ++histogram[z];
  }
  for (int k = 0; k < t; ++k) {
    if (histogram[k] != state_.counts[k]) {
      throw std::logic_error("invariant: counts[k] != #{i : z_i = k}");
    }
    if (state_.counts[k] == 0) {
      throw std::logic_error("invariant: empty occupied component persisted");
    }
  }
  const double fresh = recompute_log_repulsion();
  const bool both_ninf = std::isinf(fresh) && std::isinf(state_.log_repulsion);
  if (!both_ninf && std::abs(fresh - state_.log_repulsion) > 1e-9) {
    throw std::logic_error("invariant: cached log_repulsion drifted from recomputation");
  }
}

Chain run_chain(const Dataset& data, const SamplerConfig& cfg, RngStream rng) {
  GibbsSampler sampler(data, cfg, rng);
  return sampler.run();
}

}  // namespace wrgm
