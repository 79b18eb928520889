#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_config.hpp"
#include "commands.hpp"
#include "wrgm/errors.hpp"

namespace {

using wrgm::cli::RunConfig;

struct FlagState {
  std::string model = "wrgm";
  std::string covariance = "full";
  std::string config_path;
};

// Options shared by simulate/fit/evaluate; returns the option pointers so
// config-file precedence can be decided per flag.
void add_common_options(CLI::App* cmd, RunConfig& cfg, FlagState& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file (flags override it)");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--model", flags.model, "wrgm|rgm|mfm")
      ->check(CLI::IsMember({"wrgm", "rgm", "mfm"}));
  cmd->add_option("--covariance", flags.covariance, "full|diagonal")
      ->check(CLI::IsMember({"full", "diagonal"}));
  cmd->add_option("--n-iter", cfg.n_iter, "total Gibbs sweeps");
  cmd->add_option("--burn-in", cfg.burn_in, "discarded initial sweeps");
  cmd->add_option("--thinning", cfg.thinning, "retain every k-th sweep");
  cmd->add_option("--g0", cfg.g0, "repulsion scale g0");
  cmd->add_option("--beta", cfg.beta, "Dirichlet concentration");
  cmd->add_option("--tau", cfg.tau, "mean prior scale tau");
  cmd->add_option("--nu", cfg.nu, "inverse-Wishart degrees of freedom");
  cmd->add_option("--lambda", cfg.lambda, "zero-truncated Poisson rate for K");
  cmd->add_option("--eig-lo", cfg.eig_lo, "covariance eigenvalue lower bound");
  cmd->add_option("--eig-hi", cfg.eig_hi, "covariance eigenvalue upper bound");
  cmd->add_option("--n-aux", cfg.n_aux, "auxiliary components per assignment step");
  cmd->add_option("--zk-draws", cfg.zk_draws, "Monte Carlo draws per log Z_K entry");
  cmd->add_option("--max-rejects", cfg.max_rejects, "truncation rejection budget");
  cmd->add_option("--chains", cfg.chains, "independent chains with split seeds");
  cmd->add_option("--output-dir", cfg.output_dir, "output directory");
}

std::vector<std::string> flags_given(const CLI::App* cmd) {
  std::vector<std::string> given;
  for (const auto* opt : cmd->get_options()) {
    if (opt->count() > 0 && !opt->get_lnames().empty()) {
      given.push_back(opt->get_lnames().front());
    }
  }
  return given;
}

void finalize(RunConfig& cfg, const FlagState& flags, const CLI::App* cmd) {
  if (!flags.config_path.empty()) {
    wrgm::cli::apply_config_file(cfg, flags.config_path, flags_given(cmd));
  }
  // enum-ish strings resolve after the config overlay so flags still win
  if (cmd->count("--model") || flags.config_path.empty()) {
    cfg.model = wrgm::cli::model_from_string(flags.model);
  }
  if (cmd->count("--covariance") || flags.config_path.empty()) {
    cfg.covariance = flags.covariance == "diagonal" ? wrgm::CovarianceShape::kDiagonal
                                                    : wrgm::CovarianceShape::kFull;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein repulsive Gaussian mixture models"};
  app.require_subcommand(1);

  RunConfig cfg;
  FlagState flags;
  wrgm::cli::DistanceArgs distance_args;

  CLI::App* simulate = app.add_subcommand("simulate", "generate a simulation scenario");
  add_common_options(simulate, cfg, flags);
  simulate->add_option("--ks", cfg.sim_ks, "number of random components")->required();
  simulate->add_option("--n", cfg.sim_n, "sample size")->required();

  CLI::App* fit = app.add_subcommand("fit", "run the blocked-collapsed Gibbs sampler");
  add_common_options(fit, cfg, flags);
  fit->add_option("--data", cfg.data, "data CSV or sim:ks=K,n=N[,seed=S]");

  CLI::App* evaluate = app.add_subcommand("evaluate", "posterior summaries for a chain");
  add_common_options(evaluate, cfg, flags);
  evaluate->add_option("--chain", cfg.chain_file, "chain file from fit");
  evaluate->add_option("--data", cfg.data, "data CSV the chain was fitted on");
  evaluate->add_option("--grid-res", cfg.grid_res, "density grid resolution per axis");

  CLI::App* distance = app.add_subcommand("distance", "closed-form Gaussian distances");
  distance->add_option("--mean-a", distance_args.mean_a, "comma-separated mean")->required();
  distance->add_option("--cov-a", distance_args.cov_a, "rows ';'-separated, entries ','")
      ->required();
  distance->add_option("--mean-b", distance_args.mean_b, "comma-separated mean")->required();
  distance->add_option("--cov-b", distance_args.cov_b, "rows ';'-separated, entries ','")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "wrgm:error:E_ARGS: %s\n", e.what());
    return 2;
  }

  try {
    if (simulate->parsed()) {
      finalize(cfg, flags, simulate);
      wrgm::cli::cmd_simulate(cfg);
    } else if (fit->parsed()) {
      finalize(cfg, flags, fit);
      wrgm::cli::cmd_fit(cfg);
    } else if (evaluate->parsed()) {
      finalize(cfg, flags, evaluate);
      wrgm::cli::cmd_evaluate(cfg);
    } else if (distance->parsed()) {
      wrgm::cli::cmd_distance(distance_args);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "wrgm:error:E_CONFIG: %s\n", e.what());
    return 3;
  } catch (const wrgm::NumericError& e) {
    std::fprintf(stderr, "wrgm:error:E_NUMERIC: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wrgm:error:E_INTERNAL: %s\n", e.what());
    return 5;
  }
  return 0;
}
