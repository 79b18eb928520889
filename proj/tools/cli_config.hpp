#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrgm/prior.hpp"
#include "wrgm/sampler.hpp"

namespace wrgm::cli {

enum class Model { kWrgm, kRgm, kMfm };

Model model_from_string(const std::string& name);
std::string to_string(Model model);

/// Effective run configuration: defaults, overlaid by an optional JSON
/// config file, overlaid by command-line flags (flags win).
struct RunConfig {
  Model model = Model::kWrgm;
  CovarianceShape covariance = CovarianceShape::kFull;

  double beta = 1.0;
  double tau = 100.0;
  double nu = 3.0;
  double lambda = 1.0;
  double g0 = 5.0;
  double eig_lo = 1e-12;
  double eig_hi = 1e12;
  std::vector<double> iw_scale_diag;  // config-file only; default identity

  int n_iter = 15000;
  int burn_in = 10000;
  int thinning = 2;
  int n_aux = 3;
  int zk_draws = 20000;
  int max_rejects = 100;
  std::uint64_t seed = 0;
  int chains = 1;

  std::string data;        // csv path or "sim:ks=K,n=N[,seed=S]"
  std::string output_dir = ".";
  std::string chain_file;  // evaluate input
  int grid_res = 128;

  int sim_ks = 3;  // simulate
  int sim_n = 500;

  /// Model choice pins the repulsion metric: wrgm -> Wasserstein,
  /// rgm -> mean-Euclidean, mfm -> none.
  PriorHyperparams prior_hyperparams(int dim) const;
  SamplerConfig sampler_config(int dim) const;
};

/// Overlays values from a JSON config file onto cfg, skipping any key in
/// cli_set (those were given as flags and take precedence). Unknown keys
/// are an error.
void apply_config_file(RunConfig& cfg, const std::string& path,
                       const std::vector<std::string>& cli_set);

}  // namespace wrgm::cli
