#include "wrgm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "wrgm/distance.hpp"
#include "wrgm/errors.hpp"

namespace wrgm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> values) {
  double m = -kInf;
  for (const double v : values) m = std::max(m, v);
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (const double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

double mixture_density(const ChainSample& sample, const Eigen::VectorXd& y) {
  return wrgm::mixture_density(sample.weights, sample.components, y);
}

double mixture_log_density(const ChainSample& sample, const Eigen::VectorXd& y) {
  std::vector<double> terms(sample.components.size());
  for (std::size_t k = 0; k < sample.components.size(); ++k) {
    terms[k] = std::log(sample.weights[static_cast<int>(k)]) +
               log_pdf(sample.components[k], y);
  }
  return log_sum_exp(terms);
}

DensityGrid posterior_mean_density(const Chain& chain,
                                   const std::vector<Eigen::VectorXd>& axes) {
  if (chain.samples.empty()) {
    throw std::invalid_argument("posterior_mean_density: empty chain");
  }
  if (axes.empty()) {
    throw std::invalid_argument("posterior_mean_density: no grid axes");
  }
  const int dim = static_cast<int>(axes.size());
  std::size_t total = 1;
  for (const auto& axis : axes) {
    if (axis.size() < 1) throw std::invalid_argument("posterior_mean_density: empty axis");
    total *= static_cast<std::size_t>(axis.size());
  }

  DensityGrid grid;
  grid.axes = axes;
  grid.values.assign(total, 0.0);

  const auto eval_range = [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd y(dim);
    for (std::size_t flat = begin; flat < end; ++flat) {
      std::size_t rest = flat;
      for (int d = dim - 1; d >= 0; --d) {
        const std::size_t len = static_cast<std::size_t>(axes[d].size());
        y[d] = axes[d][static_cast<int>(rest % len)];
        rest /= len;
      }
      double sum = 0.0;
      for (const auto& sample : chain.samples) {
        sum += mixture_density(sample, y);
      }
      grid.values[flat] = sum / chain.samples.size();
    }
  };

  const unsigned n_threads =
      std::max(1u, std::min(std::thread::hardware_concurrency(),
                            static_cast<unsigned>(total / 512 + 1)));
  if (n_threads <= 1) {
    eval_range(0, total);
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (total + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(eval_range, begin, end);
    }
    for (auto& worker : workers) worker.join();
  }
  return grid;
}

double log_cpo(const Chain& chain, const Dataset& data) {
  if (chain.samples.empty()) throw std::invalid_argument("log_cpo: empty chain");
  const int n = data.n();
  const int n_mc = static_cast<int>(chain.samples.size());
  const double log_n_mc = std::log(static_cast<double>(n_mc));

  double total = 0.0;
  std::vector<double> neg_log_p(n_mc);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd y = data.points.row(i).transpose();
    for (int j = 0; j < n_mc; ++j) {
      const double lp = mixture_log_density(chain.samples[j], y);
      if (std::isinf(lp) && lp < 0) {
        throw NumericError("log_cpo: zero predictive density at data point " +
                           std::to_string(i) + ", sample " + std::to_string(j));
      }
      neg_log_p[j] = -lp;
    }
    total += log_sum_exp(neg_log_p) - log_n_mc;
  }
  return -total;
}

int map_sample(const Chain& chain) {
  if (chain.samples.empty()) throw std::invalid_argument("map_sample: empty chain");
  int best = 0;
  for (int j = 1; j < static_cast<int>(chain.samples.size()); ++j) {
    if (chain.samples[j].log_joint > chain.samples[best].log_joint) best = j;
  }
  return best;
}

std::vector<double> min_pairwise(const Chain& chain, PairMetric metric) {
  std::vector<double> result;
  result.reserve(chain.samples.size());
  for (const auto& sample : chain.samples) {
    const int t = sample.t();
    if (t < 1) throw std::invalid_argument("min_pairwise: sample without components");
    double best = kInf;
    for (int a = 0; a + 1 < t; ++a) {
      for (int b = a + 1; b < t; ++b) {
        const double d2 =
            metric == PairMetric::kWasserstein
                ? w2_squared(sample.components[a], sample.components[b])
                : (sample.components[a].mean() - sample.components[b].mean())
                      .squaredNorm();
        best = std::min(best, std::sqrt(d2));
      }
    }
    result.push_back(best);
  }
  return result;
}

double adjusted_rand(std::span<const int> za, std::span<const int> zb) {
  if (za.size() != zb.size()) {
    throw std::invalid_argument("adjusted_rand: assignment vectors differ in length");
  }
  const std::size_t n = za.size();
  if (n == 0) throw std::invalid_argument("adjusted_rand: empty partitions");

  std::map<std::pair<int, int>, long long> joint;
  std::map<int, long long> count_a, count_b;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{za[i], zb[i]}];
    ++count_a[za[i]];
    ++count_b[zb[i]];
  }
  const auto choose2 = [](long long m) { return 0.5 * m * (m - 1); };

  double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : joint) sum_joint += choose2(c);
  for (const auto& [key, c] : count_a) sum_a += choose2(c);
  for (const auto& [key, c] : count_b) sum_b += choose2(c);

  const double total_pairs = choose2(static_cast<long long>(n));
  const double expected = sum_a * sum_b / total_pairs;
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) return 1.0;  // both partitions trivial and equal
  return (sum_joint - expected) / (maximum - expected);
}

EvalReport evaluate(const Chain& chain, const Dataset& data) {
  if (!chain.samples.empty() && chain.samples.front().components.front().dim() != data.dim()) {
    throw std::invalid_argument("evaluate: chain/data dimension mismatch");
  }
  EvalReport report;
  report.log_cpo = log_cpo(chain, data);
  report.map_sample_index = map_sample(chain);
  report.min_mean_dist = min_pairwise(chain, PairMetric::kMeanEuclidean);
  report.min_w2_dist = min_pairwise(chain, PairMetric::kWasserstein);

  for (const auto& sample : chain.samples) {
    report.k_posterior[sample.t()] += 1.0;
  }
  for (auto& [t, mass] : report.k_posterior) {
    mass /= static_cast<double>(chain.samples.size());
  }

  if (data.labels) {
    const auto& map_assignments = chain.samples[report.map_sample_index].assignments;
    report.ari = adjusted_rand(map_assignments, *data.labels);
  }
  return report;
}

}  // namespace wrgm
