#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "wrgm/datagen.hpp"
#include "wrgm/gaussian.hpp"
#include "wrgm/prior.hpp"
#include "wrgm/rng.hpp"

namespace wrgm {

struct SamplerConfig {
  int n_iter = 15000;
  int burn_in = 10000;
  int thinning = 2;
  int n_aux = 3;          // auxiliary components per assignment step
  int zk_draws = 20000;   // Monte Carlo draws per log Z_K cache entry
  int max_rejects = 100;  // truncated covariance proposal budget
  std::uint64_t seed = 0;
  PriorHyperparams prior;

  explicit SamplerConfig(PriorHyperparams p) : prior(std::move(p)) {}
  void validate() const;
};

/// Full sampler state. Weights are collapsed out; occupied components are
/// stored in creation order. log_repulsion caches log h of the current
/// component list.
struct MixtureState {
  std::vector<int> assignments;
  std::vector<GaussianComponent> components;
  std::vector<int> counts;
  double log_repulsion = 0.0;
  int sweep_index = 0;

  int t() const { return static_cast<int>(components.size()); }
};

/// One retained post-burn-in draw, with weights rematerialized from
/// Dirichlet(beta + counts) and the joint log score attached.
struct ChainSample {
  int sweep_index = 0;
  std::vector<int> assignments;
  std::vector<GaussianComponent> components;
  Eigen::VectorXd weights;
  double log_joint = 0.0;

  int t() const { return static_cast<int>(components.size()); }
};

struct ZkEntry {
  double log_zk = 0.0;
  double std_error = 0.0;
};

struct AcceptanceStats {
  long long cov_proposed = 0;
  long long cov_accepted = 0;
  long long mean_proposed = 0;
  long long mean_accepted = 0;
  long long cov_draw_failures = 0;  // exhausted truncation budgets, old value kept
};

struct ChainMeta {
  explicit ChainMeta(SamplerConfig cfg) : config(std::move(cfg)) {}

  SamplerConfig config;
  int n = 0;
  int dim = 0;
  AcceptanceStats accepts;
  std::map<int, ZkEntry> zk_table;
  double wall_seconds = 0.0;
};

struct Chain {
  std::vector<ChainSample> samples;
  ChainMeta meta;
};

/// Joint log score of a state: data log-likelihood, exchangeable-partition
/// log prior (V_n(t) plus ascending-factorial terms), unnormalized
/// repulsive prior of the components, minus the cached log Z_t. Throws
/// NumericError when the table lacks the entry for the state's t.
double log_joint(const MixtureState& state, const Eigen::MatrixXd& points,
                 const SamplerConfig& cfg,
                 const std::map<int, ZkEntry>& zk_table);

/// Blocked-collapsed Gibbs sampler. Assignment updates use Neal's
/// Algorithm-8 auxiliary augmentation with exchangeable-partition weights;
/// a removed singleton's parameter re-enters the auxiliary pool, which is
/// what makes the augmentation exact. Component parameters move by
/// independence-proposal Metropolis-Hastings from the conjugate full
/// conditionals (covariance stage, then mean stage), each accepted with a
/// pure repulsion ratio. The log Z_t table is estimated lazily per t from
/// a dedicated split stream, so values do not depend on when a given t is
/// first reached.
class GibbsSampler {
 public:
  GibbsSampler(const Dataset& data, SamplerConfig cfg, RngStream rng);

  const MixtureState& state() const { return state_; }
  const Eigen::MatrixXd& points() const { return points_; }
  const SamplerConfig& config() const { return cfg_; }
  const AcceptanceStats& acceptance() const { return accepts_; }
  const std::map<int, ZkEntry>& zk_table() const { return zk_cache_; }

  void update_assignment(int i);
  void update_component_params(int k);
  /// One pass of assignment updates over all i, then parameter updates
  /// over all occupied clusters.
  void sweep();
  /// Full schedule: burn-in discarded, every thinning-th sweep retained.
  Chain run();

  double log_vn(int t);
  ZkEntry log_zk(int t);
  double log_joint_current();

  /// Assignment log-weights for data point i against an explicit auxiliary
  /// pool, as if y_i were removed: t_minus existing-cluster entries
  /// followed by one entry per pool component. Does not mutate the state.
  std::vector<double> peek_assignment_log_weights(
      int i, std::span<const GaussianComponent> aux) const;

  /// Log of the Metropolis-Hastings acceptance ratio for replacing
  /// component k with the candidate: log h(new list) - log h(current).
  double repulsion_log_accept(int k, const GaussianComponent& candidate) const;

  /// Replaces every observation by a fresh draw from its assigned
  /// component (used by prior-predictive checks).
  void resample_data(RngStream& rng);

  /// Installs an externally constructed state (harness support, e.g.
  /// starting a successive-conditional chain from an exact prior draw).
  /// Validates consistency against the data and rebuilds the caches.
  void set_state(MixtureState state);

  double recompute_log_repulsion() const;
  /// Verifies counts/assignments consistency and repulsion-cache drift;
  /// throws std::logic_error on violation.
  void check_invariants() const;

 private:
  void remove_point(int i, std::vector<GaussianComponent>& reuse_pool);
  void delete_cluster(int k);
  void append_component(const GaussianComponent& c,
                        const Eigen::VectorXd& pair_log_g_col);
  void replace_component(int k, const GaussianComponent& c);
  Eigen::VectorXd pair_log_g_against(const GaussianComponent& c,
                                     int skip_index) const;
  double log_repulsion_from_cache() const;
  double log_repulsion_with_extra(const Eigen::VectorXd& extra_col) const;
  SpdMatrix draw_cov_conditional(const std::vector<int>& rows,
                                 const Eigen::VectorXd& cond_mean,
                                 bool& exhausted);
  Eigen::VectorXd draw_mean_conditional(const std::vector<int>& rows,
                                        const SpdMatrix& cov);
  std::vector<int> cluster_rows(int k) const;
  std::vector<double> assignment_weights_after_removal(
      int i, std::span<const GaussianComponent> aux,
      std::vector<double>* aux_log_h) const;

  Eigen::MatrixXd points_;
  SamplerConfig cfg_;
  RngStream rng_;
  RngStream zk_rng_root_;
  BasePriorSampler base_;
  MixtureState state_;
  Eigen::MatrixXd pair_log_g_;  // t x t, log g(d^2) per unordered pair
  std::map<int, double> vn_cache_;
  std::map<int, ZkEntry> zk_cache_;
  AcceptanceStats accepts_;
};

/// Convenience wrapper: construct, run the schedule, return the chain.
Chain run_chain(const Dataset& data, const SamplerConfig& cfg, RngStream rng);

}  // namespace wrgm
