#include "cli_config.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace wrgm::cli {

Model model_from_string(const std::string& name) {
  if (name == "wrgm") return Model::kWrgm;
  if (name == "rgm") return Model::kRgm;
  if (name == "mfm") return Model::kMfm;
  throw std::invalid_argument("model: expected wrgm|rgm|mfm, got '" + name + "'");
}

std::string to_string(Model model) {
  switch (model) {
    case Model::kWrgm: return "wrgm";
    case Model::kRgm: return "rgm";
    case Model::kMfm: return "mfm";
  }
  return "?";
}

PriorHyperparams RunConfig::prior_hyperparams(int dim) const {
  SpdMatrix psi = SpdMatrix::identity(dim);
  if (!iw_scale_diag.empty()) {
    if (static_cast<int>(iw_scale_diag.size()) != dim) {
      throw std::invalid_argument("iw-scale-diag: expected " + std::to_string(dim) +
                                  " entries");
    }
    psi = SpdMatrix::diagonal(Eigen::Map<const Eigen::VectorXd>(
        iw_scale_diag.data(), dim));
  }
  PriorHyperparams prior(psi);
  prior.dirichlet_beta = beta;
  prior.mean_scale = tau;
  prior.iw_dof = nu;
  prior.eig_lo = eig_lo;
  prior.eig_hi = eig_hi;
  prior.poisson_lambda = lambda;
  prior.g0 = g0;
  prior.repulsion_kind = RepulsionKind::kMin;
  prior.repulsion_metric = model == Model::kWrgm   ? RepulsionMetric::kWasserstein
                           : model == Model::kRgm ? RepulsionMetric::kMeanEuclidean
                                                  : RepulsionMetric::kNone;
  prior.covariance_shape = covariance;
  return prior;
}

SamplerConfig RunConfig::sampler_config(int dim) const {
  SamplerConfig cfg(prior_hyperparams(dim));
  cfg.n_iter = n_iter;
  cfg.burn_in = burn_in;
  cfg.thinning = thinning;
  cfg.n_aux = n_aux;
  cfg.zk_draws = zk_draws;
  cfg.max_rejects = max_rejects;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void apply_config_file(RunConfig& cfg, const std::string& path,
                       const std::vector<std::string>& cli_set) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("config: '" + path + "' is not valid JSON: " + e.what());
  }
  const auto overridden = [&](const std::string& key) {
    return std::find(cli_set.begin(), cli_set.end(), key) != cli_set.end();
  };
  for (const auto& [key, value] : j.items()) {
    if (overridden(key)) continue;
    try {
      if (key == "model") {
        cfg.model = model_from_string(value.get<std::string>());
      } else if (key == "covariance") {
        const auto s = value.get<std::string>();
        if (s == "full") {
          cfg.covariance = CovarianceShape::kFull;
        } else if (s == "diagonal") {
          cfg.covariance = CovarianceShape::kDiagonal;
        } else {
          throw std::invalid_argument("expected full|diagonal");
        }
      } else if (key == "beta") {
        cfg.beta = value.get<double>();
      } else if (key == "tau") {
        cfg.tau = value.get<double>();
      } else if (key == "nu") {
        cfg.nu = value.get<double>();
      } else if (key == "lambda") {
        cfg.lambda = value.get<double>();
      } else if (key == "g0") {
        cfg.g0 = value.get<double>();
      } else if (key == "eig-lo") {
        cfg.eig_lo = value.get<double>();
      } else if (key == "eig-hi") {
        cfg.eig_hi = value.get<double>();
      } else if (key == "iw-scale-diag") {
        cfg.iw_scale_diag = value.get<std::vector<double>>();
      } else if (key == "n-iter") {
        cfg.n_iter = value.get<int>();
      } else if (key == "burn-in") {
        cfg.burn_in = value.get<int>();
      } else if (key == "thinning") {
        cfg.thinning = value.get<int>();
      } else if (key == "n-aux") {
        cfg.n_aux = value.get<int>();
      } else if (key == "zk-draws") {
        cfg.zk_draws = value.get<int>();
      } else if (key == "max-rejects") {
        cfg.max_rejects = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "chains") {
        cfg.chains = value.get<int>();
      } else if (key == "data") {
        cfg.data = value.get<std::string>();
      } else if (key == "output-dir") {
        cfg.output_dir = value.get<std::string>();
      } else if (key == "chain") {
        cfg.chain_file = value.get<std::string>();
      } else if (key == "grid-res") {
        cfg.grid_res = value.get<int>();
      } else if (key == "ks") {
        cfg.sim_ks = value.get<int>();
      } else if (key == "n") {
        cfg.sim_n = value.get<int>();
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config: key '" + key + "': " + e.what());
    } catch (const std::exception& e) {
      throw std::invalid_argument("config: key '" + key + "' has the wrong type: " +
                                  e.what());
    }
  }
}

}  // namespace wrgm::cli
