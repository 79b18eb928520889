#include "wrgm/chain_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "wrgm/errors.hpp"

namespace wrgm {

namespace {

using ordered_json = nlohmann::ordered_json;

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string("serialization: non-finite ") + what);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  return out;
}

void append_double_array(std::string& line, const Eigen::VectorXd& values) {
  line += '[';
  for (int i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_double(values[i]);
  }
  line += ']';
}

Eigen::VectorXd lower_triangle(const Eigen::MatrixXd& m) {
  const int p = static_cast<int>(m.rows());
  Eigen::VectorXd flat(p * (p + 1) / 2);
  int out = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) flat[out++] = m(i, j);
  }
  return flat;
}

Eigen::MatrixXd from_lower_triangle(const std::vector<double>& flat, int p) {
  Eigen::MatrixXd m(p, p);
  int in = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) {
      m(i, j) = flat[in];
      m(j, i) = flat[in];
      ++in;
    }
  }
  return m;
}

int dim_from_triangle(std::size_t triangle_size) {
  int p = 1;
  while (static_cast<std::size_t>(p * (p + 1) / 2) < triangle_size) ++p;
  if (static_cast<std::size_t>(p * (p + 1) / 2) != triangle_size) {
    throw std::invalid_argument("chain record: covariance triangle has invalid length");
  }
  return p;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_chain(const std::string& path, const Chain& chain) {
  std::ofstream out = open_out(path);
  std::string line;
  for (const auto& sample : chain.samples) {
    require_finite(sample.log_joint, "log_joint");
    line.clear();
    line += "{\"sweep\":" + std::to_string(sample.sweep_index);
    line += ",\"t\":" + std::to_string(sample.t());
    line += ",\"weights\":";
    append_double_array(line, sample.weights);
    line += ",\"means\":[";
    for (int k = 0; k < sample.t(); ++k) {
      if (k) line += ',';
      append_double_array(line, sample.components[k].mean());
    }
    line += "],\"covs\":[";
    for (int k = 0; k < sample.t(); ++k) {
      if (k) line += ',';
      append_double_array(line, lower_triangle(sample.components[k].cov().mat()));
    }
    line += "],\"assignments\":[";
    for (std::size_t i = 0; i < sample.assignments.size(); ++i) {
      if (i) line += ',';
      line += std::to_string(sample.assignments[i]);
    }
    line += "],\"log_joint\":" + format_double(sample.log_joint);
    line += "}\n";
    out << line;
  }
}

Chain read_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");

  std::vector<ChainSample> samples;
  int dim = 0;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw std::invalid_argument("chain file '" + path + "' line " +
                                  std::to_string(line_number) + ": " + e.what());
    }
    ChainSample sample;
    sample.sweep_index = record.at("sweep").get<int>();
    const int t = record.at("t").get<int>();
    const auto weights = record.at("weights").get<std::vector<double>>();
    sample.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                       static_cast<int>(weights.size()));
    const auto& means = record.at("means");
    const auto& covs = record.at("covs");
    if (static_cast<int>(means.size()) != t || static_cast<int>(covs.size()) != t) {
      throw std::invalid_argument("chain file '" + path + "' line " +
                                  std::to_string(line_number) +
                                  ": component arrays do not match t");
    }
    for (int k = 0; k < t; ++k) {
      const auto mean = means[k].get<std::vector<double>>();
      const auto tri = covs[k].get<std::vector<double>>();
      const int p = dim_from_triangle(tri.size());
      if (static_cast<int>(mean.size()) != p) {
        throw std::invalid_argument("chain record: mean/covariance dimension mismatch");
      }
      dim = p;
      sample.components.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(mean.data(), p),
          SpdMatrix(from_lower_triangle(tri, p)));
    }
    sample.assignments = record.at("assignments").get<std::vector<int>>();
    sample.log_joint = record.at("log_joint").get<double>();
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) {
    throw std::invalid_argument("chain file '" + path + "' contains no samples");
  }

  Chain chain{std::move(samples), ChainMeta(SamplerConfig(PriorHyperparams(dim)))};
  chain.meta.dim = dim;
  chain.meta.n = static_cast<int>(chain.samples.front().assignments.size());
  return chain;
}

void write_meta(const std::string& path, const ChainMeta& meta) {
  ordered_json j;
  const auto& cfg = meta.config;
  j["n"] = meta.n;
  j["dim"] = meta.dim;
  j["config"] = {
      {"n_iter", cfg.n_iter},
      {"burn_in", cfg.burn_in},
      {"thinning", cfg.thinning},
      {"n_aux", cfg.n_aux},
      {"zk_draws", cfg.zk_draws},
      {"max_rejects", cfg.max_rejects},
      {"seed", cfg.seed},
      {"prior",
       {{"dirichlet_beta", cfg.prior.dirichlet_beta},
        {"mean_scale", cfg.prior.mean_scale},
        {"iw_dof", cfg.prior.iw_dof},
        {"iw_scale_lower_triangle", [&] {
           const Eigen::VectorXd tri = lower_triangle(cfg.prior.iw_scale.mat());
           return std::vector<double>(tri.data(), tri.data() + tri.size());
         }()},
        {"eig_lo", cfg.prior.eig_lo},
        {"eig_hi", cfg.prior.eig_hi},
        {"poisson_lambda", cfg.prior.poisson_lambda},
        {"g0", cfg.prior.g0},
        {"repulsion_kind",
         cfg.prior.repulsion_kind == RepulsionKind::kMin ? "min" : "geometric_mean"},
        {"repulsion_metric",
         cfg.prior.repulsion_metric == RepulsionMetric::kWasserstein ? "wasserstein"
         : cfg.prior.repulsion_metric == RepulsionMetric::kMeanEuclidean
             ? "mean_euclidean"
             : "none"},
        {"covariance_shape",
         cfg.prior.covariance_shape == CovarianceShape::kFull ? "full" : "diagonal"}}}};
  j["acceptance"] = {
      {"cov_proposed", meta.accepts.cov_proposed},
      {"cov_accepted", meta.accepts.cov_accepted},
      {"cov_rate", meta.accepts.cov_proposed
                       ? static_cast<double>(meta.accepts.cov_accepted) /
                             meta.accepts.cov_proposed
                       : 0.0},
      {"mean_proposed", meta.accepts.mean_proposed},
      {"mean_accepted", meta.accepts.mean_accepted},
      {"mean_rate", meta.accepts.mean_proposed
                        ? static_cast<double>(meta.accepts.mean_accepted) /
                              meta.accepts.mean_proposed
                        : 0.0},
      {"cov_draw_failures", meta.accepts.cov_draw_failures}};
  // The per-t log Z table is the sampler's one declared approximation; its
  // Monte Carlo standard errors are recorded so zk_draws sensitivity is
  // visible from the metadata alone.
  ordered_json zk = ordered_json::object();
  for (const auto& [t, entry] : meta.zk_table) {
    zk[std::to_string(t)] = {{"log_zk", entry.log_zk},
                             {"std_error", entry.std_error}};
  }
  j["log_zk_table"] = zk;
  j["wall_seconds"] = meta.wall_seconds;

  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_report(const std::string& path, const EvalReport& report) {
  ordered_json j;
  j["log_cpo"] = report.log_cpo;
  j["map_sample_index"] = report.map_sample_index;
  ordered_json kp = ordered_json::object();
  for (const auto& [t, mass] : report.k_posterior) kp[std::to_string(t)] = mass;
  j["k_posterior"] = kp;
  if (report.ari) {
    j["ari"] = *report.ari;
  } else {
    j["ari"] = nullptr;
  }
  // +inf sentinels (single-component samples) serialize as null
  const auto dist_array = [](std::span<const double> values) {
    ordered_json arr = ordered_json::array();
    for (const double v : values) {
      if (std::isfinite(v)) {
        arr.push_back(v);
      } else {
        arr.push_back(nullptr);
      }
    }
    return arr;
  };
  j["min_mean_dist"] = dist_array(report.min_mean_dist);
  j["min_w2_dist"] = dist_array(report.min_w2_dist);

  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_density_csv(const std::string& path, const DensityGrid& grid) {
  std::ofstream out = open_out(path);
  const int dim = static_cast<int>(grid.axes.size());
  for (int d = 0; d < dim; ++d) out << "x" << d << ",";
  out << "density\n";
  std::vector<int> index(dim, 0);
  for (const double value : grid.values) {
    for (int d = 0; d < dim; ++d) {
      out << format_double(grid.axes[d][index[d]]) << ",";
    }
    out << format_double(value) << "\n";
    for (int d = dim - 1; d >= 0; --d) {
      if (++index[d] < grid.axes[d].size()) break;
      index[d] = 0;
    }
  }
}

void write_assignments_csv(const std::string& path, std::span<const int> assignments) {
  std::ofstream out = open_out(path);
  out << "index,cluster\n";
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    out << i << "," << assignments[i] << "\n";
  }
}

void write_min_dist_csv(const std::string& path,
                        std::span<const double> min_mean_dist,
                        std::span<const double> min_w2_dist) {
  if (min_mean_dist.size() != min_w2_dist.size()) {
    throw std::invalid_argument("write_min_dist_csv: vectors differ in length");
  }
  std::ofstream out = open_out(path);
  out << "sample,min_mean_dist,min_w2_dist\n";
  for (std::size_t i = 0; i < min_mean_dist.size(); ++i) {
    out << i << "," << format_double(min_mean_dist[i]) << ","
        << format_double(min_w2_dist[i]) << "\n";
  }
}

void write_truth_json(const std::string& path, const TrueMixture& mix) {
  ordered_json j;
  j["provenance"] = mix.provenance;
  j["weights"] = std::vector<double>(mix.weights.data(),
                                     mix.weights.data() + mix.weights.size());
  ordered_json comps = ordered_json::array();
  for (const auto& c : mix.components) {
    ordered_json entry;
    entry["mean"] = std::vector<double>(c.mean().data(), c.mean().data() + c.dim());
    const Eigen::VectorXd tri = lower_triangle(c.cov().mat());
    entry["cov_lower_triangle"] =
        std::vector<double>(tri.data(), tri.data() + tri.size());
    comps.push_back(entry);
  }
  j["components"] = comps;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace wrgm
