#pragma once

#include <string>

#include "wrgm/datagen.hpp"
#include "wrgm/evaluation.hpp"
#include "wrgm/sampler.hpp"

namespace wrgm {

/// Canonical float formatting for persisted files: 17 significant digits,
/// enough to round-trip any double exactly.
std::string format_double(double value);

/// Chain files are JSON lines, one record per retained sample with keys in
/// fixed order: sweep, t, weights, means, covs (row-major lower triangle
/// per component), assignments, log_joint. Re-serializing a parsed file is
/// byte-identical.
void write_chain(const std::string& path, const Chain& chain);
Chain read_chain(const std::string& path);

/// Sampler metadata: config echo, acceptance counters, the log Z_K cache
/// with standard errors, wall-clock seconds.
void write_meta(const std::string& path, const ChainMeta& meta);

void write_report(const std::string& path, const EvalReport& report);

void write_density_csv(const std::string& path, const DensityGrid& grid);
void write_assignments_csv(const std::string& path, std::span<const int> assignments);
void write_min_dist_csv(const std::string& path,
                        std::span<const double> min_mean_dist,
                        std::span<const double> min_w2_dist);
void write_truth_json(const std::string& path, const TrueMixture& mix);

}  // namespace wrgm
