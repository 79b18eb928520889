#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrgm/gaussian.hpp"
#include "wrgm/rng.hpp"

namespace wrgm {

/// n x p observation matrix with optional ground-truth labels.
struct Dataset {
  Eigen::MatrixXd points;           // one row per observation
  std::optional<std::vector<int>> labels;
  std::string source;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

/// A known generative mixture: simplex weights plus components.
struct TrueMixture {
  Eigen::VectorXd weights;
  std::vector<GaussianComponent> components;
  std::string provenance;
};

/// Simulation-study truth: two fixed components sharing mean (0,0) with
/// covariances diag(1,100) and diag(100,1), plus k_random components with
/// means from N(0, 25 I) and covariances from IW(10 I, 5) (untruncated),
/// all weighted equally.
TrueMixture build_sim_scenario(int k_random, RngStream& rng);

/// Draw n labeled observations from the mixture; labels are retained.
Dataset sample_mixture(const TrueMixture& mix, int n, RngStream& rng);

/// Density of the generative mixture at y.
double true_density(const TrueMixture& mix, const Eigen::VectorXd& y);

enum class FilterOp { kGreater, kLess, kGreaterEqual, kLessEqual };

struct CsvFilter {
  std::string column;
  FilterOp op;
  double threshold;
};

/// Load a comma-separated file with a header row. At most one threshold
/// filter is applied first, then the column projection. A column named
/// "label" is always routed to Dataset::labels and excluded from the
/// point matrix. Unparseable cells and missing columns raise
/// std::invalid_argument naming the row/column, as does an empty result.
Dataset load_csv(const std::string& path,
                 const std::optional<std::vector<std::string>>& columns = std::nullopt,
                 const std::optional<CsvFilter>& filter = std::nullopt);

/// Write points (and the label column when present) as CSV with header.
void write_data_csv(const std::string& path, const Dataset& data);

}  // namespace wrgm
