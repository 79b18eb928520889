#pragma once

#include <string>
#include <vector>

#include "cli_config.hpp"

namespace wrgm::cli {

/// Writes data.csv (points + label column) and truth.json under
/// output_dir; byte-identical for identical seeds.
void cmd_simulate(const RunConfig& cfg);

/// Fits cfg.chains independent chains with split seeds (concurrently when
/// chains > 1) and writes chain_<c>.jsonl / meta_<c>.json per chain.
void cmd_fit(const RunConfig& cfg);

/// Reads a chain file plus the data it was fitted on and writes
/// report.json, density_grid.csv (dimension <= 2), map_assignments.csv
/// and min_dist.csv under output_dir.
void cmd_evaluate(const RunConfig& cfg);

struct DistanceArgs {
  std::string mean_a, cov_a, mean_b, cov_b;
};

/// Prints w2_squared, bures_squared and hellinger_squared for two inline
/// Gaussians to stdout with 10 significant digits.
void cmd_distance(const DistanceArgs& args);

/// Resolves "sim:ks=K,n=N[,seed=S]" descriptors or loads a CSV.
Dataset load_fit_data(const RunConfig& cfg);

}  // namespace wrgm::cli
