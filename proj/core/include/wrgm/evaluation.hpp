#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wrgm/datagen.hpp"
#include "wrgm/sampler.hpp"

namespace wrgm {

/// Posterior-mean density on a rectangular tensor grid. values is
/// row-major over the axes (last axis fastest).
struct DensityGrid {
  std::vector<Eigen::VectorXd> axes;
  std::vector<double> values;
};

struct EvalReport {
  double log_cpo = 0.0;
  int map_sample_index = 0;
  std::vector<double> min_mean_dist;  // per sample; +inf sentinel when t = 1
  std::vector<double> min_w2_dist;
  std::map<int, double> k_posterior;  // histogram of t, masses sum to 1
  std::optional<double> ari;          // MAP assignments vs ground-truth labels
};

/// Mixture density of one recorded sample at y.
double mixture_density(const ChainSample& sample, const Eigen::VectorXd& y);

/// log of mixture_density, evaluated in log space (stable far in the tails).
double mixture_log_density(const ChainSample& sample, const Eigen::VectorXd& y);

/// Average of mixture_density over all recorded samples, per grid point.
DensityGrid posterior_mean_density(const Chain& chain,
                                   const std::vector<Eigen::VectorXd>& axes);

/// log-CPO = -sum_i log( (1/n_mc) sum_j 1 / p(y_i | theta_j) ), computed
/// through log-sum-exp; higher is better. Throws NumericError naming (i, j)
/// when some sample gives a data point zero density.
double log_cpo(const Chain& chain, const Dataset& data);

/// Index of the sample with maximal log_joint; ties break to the smallest.
int map_sample(const Chain& chain);

enum class PairMetric { kMeanEuclidean, kWasserstein };

/// Per-sample minimum pairwise distance between components (the distance,
/// not its square). Samples with a single component yield +inf and are
/// excluded from summary statistics downstream.
std::vector<double> min_pairwise(const Chain& chain, PairMetric metric);

/// Adjusted Rand index between two assignment vectors, by pair counting.
double adjusted_rand(std::span<const int> za, std::span<const int> zb);

/// Full report: log-CPO, MAP index, min-distance traces under both
/// metrics, the posterior over t, and ARI when the data carries labels.
EvalReport evaluate(const Chain& chain, const Dataset& data);

}  // namespace wrgm
