#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>

#include "wrgm/chain_io.hpp"
#include "wrgm/datagen.hpp"
#include "wrgm/errors.hpp"
#include "wrgm/evaluation.hpp"

namespace wrgm::cli {

namespace {

int log_verbosity() {
  static const int level = [] {
    const char* env = std::getenv("WRGM_LOG");
    if (!env) return 0;
    const std::string value(env);
    if (value == "debug") return 2;
    if (value == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_verbosity() >= 1) std::fprintf(stderr, "wrgm: %s\n", message.c_str());
}

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::invalid_argument("output-dir: cannot create '" + dir + "': " + ec.message());
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::invalid_argument(what + ": unparseable entry '" + cell + "'");
    }
  }
  if (values.empty()) throw std::invalid_argument(what + ": empty vector");
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<int>(values.size()));
}

SpdMatrix parse_cov(const std::string& text, int dim, const std::string& what) {
  std::vector<Eigen::VectorXd> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_vector(row, what));
  if (static_cast<int>(rows.size()) != dim) {
    throw std::invalid_argument(what + ": expected " + std::to_string(dim) + " rows");
  }
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (rows[i].size() != dim) {
      throw std::invalid_argument(what + ": row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " entries");
    }
    m.row(i) = rows[i].transpose();
  }
  try {
    return SpdMatrix(m);
  } catch (const NumericError& e) {
    throw std::invalid_argument(what + ": " + e.what());
  }
}

}  // namespace

Dataset load_fit_data(const RunConfig& cfg) {
  if (cfg.data.empty()) {
    throw std::invalid_argument("data: a CSV path or sim: descriptor is required");
  }
  if (cfg.data.rfind("sim:", 0) == 0) {
    int ks = -1, n = -1;
    std::uint64_t seed = cfg.seed;
    std::stringstream ss(cfg.data.substr(4));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("data: malformed sim descriptor item '" + item + "'");
      }
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      try {
        if (key == "ks") {
          ks = std::stoi(value);
        } else if (key == "n") {
          n = std::stoi(value);
        } else if (key == "seed") {
          seed = std::stoull(value);
        } else {
          throw std::invalid_argument("unknown key");
        }
      } catch (const std::exception&) {
        throw std::invalid_argument("data: malformed sim descriptor item '" + item + "'");
      }
    }
    if (ks < 0 || n < 1) {
      throw std::invalid_argument("data: sim descriptor needs ks>=0 and n>=1");
    }
    RngStream rng(seed);
    const TrueMixture mix = build_sim_scenario(ks, rng);
    return sample_mixture(mix, n, rng);
  }
  return load_csv(cfg.data);
}

void cmd_simulate(const RunConfig& cfg) {
  ensure_output_dir(cfg.output_dir);
  RngStream rng(cfg.seed);
  const TrueMixture mix = build_sim_scenario(cfg.sim_ks, rng);
  const Dataset data = sample_mixture(mix, cfg.sim_n, rng);
  write_data_csv(join_path(cfg.output_dir, "data.csv"), data);
  write_truth_json(join_path(cfg.output_dir, "truth.json"), mix);
  log_info("simulate: wrote " + std::to_string(data.n()) + " rows, " +
           std::to_string(mix.components.size()) + " true components");
}

void cmd_fit(const RunConfig& cfg) {
  ensure_output_dir(cfg.output_dir);
  if (cfg.chains < 1) throw std::invalid_argument("chains: must be >= 1");
  const Dataset data = load_fit_data(cfg);
  const SamplerConfig sampler_cfg = cfg.sampler_config(data.dim());
  log_info("fit: model=" + to_string(cfg.model) + " n=" + std::to_string(data.n()) +
           " dim=" + std::to_string(data.dim()) +
           " chains=" + std::to_string(cfg.chains));

  const RngStream root(cfg.seed);
  std::vector<std::exception_ptr> failures(cfg.chains);
  const auto run_one = [&](int index) {
    try {
      const Chain chain =
          run_chain(data, sampler_cfg, root.split(static_cast<std::uint64_t>(index)));
      const std::string suffix = "_" + std::to_string(index);
      write_chain(join_path(cfg.output_dir, "chain" + suffix + ".jsonl"), chain);
      write_meta(join_path(cfg.output_dir, "meta" + suffix + ".json"), chain.meta);
      log_info("fit: chain " + std::to_string(index) + " done in " +
               std::to_string(chain.meta.wall_seconds) + "s, " +
               std::to_string(chain.samples.size()) + " samples");
    } catch (...) {
      failures[index] = std::current_exception();
    }
  };

  if (cfg.chains == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(cfg.chains);
    for (int c = 0; c < cfg.chains; ++c) workers.emplace_back(run_one, c);
    for (auto& worker : workers) worker.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

void cmd_evaluate(const RunConfig& cfg) {
  if (cfg.chain_file.empty()) {
    throw std::invalid_argument("chain: a chain file is required");
  }
  if (cfg.data.empty()) {
    throw std::invalid_argument("data: the fitted data file is required");
  }
  ensure_output_dir(cfg.output_dir);
  const Chain chain = read_chain(cfg.chain_file);
  const Dataset data = load_fit_data(cfg);
  if (chain.meta.dim != data.dim()) {
    throw std::invalid_argument("evaluate: chain dimension " +
                                std::to_string(chain.meta.dim) +
                                " does not match data dimension " +
                                std::to_string(data.dim()));
  }

  const EvalReport report = evaluate(chain, data);
  write_report(join_path(cfg.output_dir, "report.json"), report);
  write_assignments_csv(join_path(cfg.output_dir, "map_assignments.csv"),
                        chain.samples[report.map_sample_index].assignments);
  write_min_dist_csv(join_path(cfg.output_dir, "min_dist.csv"),
                     report.min_mean_dist, report.min_w2_dist);

  if (data.dim() <= 2) {
    if (cfg.grid_res < 2) throw std::invalid_argument("grid-res: must be >= 2");
    std::vector<Eigen::VectorXd> axes;
    for (int d = 0; d < data.dim(); ++d) {
      const double lo = data.points.col(d).minCoeff();
      const double hi = data.points.col(d).maxCoeff();
      const double pad = 0.1 * std::max(hi - lo, 1e-12);
      axes.push_back(Eigen::VectorXd::LinSpaced(cfg.grid_res, lo - pad, hi + pad));
    }
    const DensityGrid grid = posterior_mean_density(chain, axes);
    write_density_csv(join_path(cfg.output_dir, "density_grid.csv"), grid);
  } else {
    log_info("evaluate: skipping density grid for dimension > 2");
  }
  log_info("evaluate: log_cpo=" + format_double(report.log_cpo));
}

void cmd_distance(const DistanceArgs& args) {
  const Eigen::VectorXd mean_a = parse_vector(args.mean_a, "mean-a");
  const Eigen::VectorXd mean_b = parse_vector(args.mean_b, "mean-b");
  if (mean_a.size() != mean_b.size()) {
    throw std::invalid_argument("distance: mean dimensions differ");
  }
  const int dim = static_cast<int>(mean_a.size());
  const GaussianComponent a(mean_a, parse_cov(args.cov_a, dim, "cov-a"));
  const GaussianComponent b(mean_b, parse_cov(args.cov_b, dim, "cov-b"));
  std::printf("w2_squared %.10g\n", w2_squared(a, b));
  std::printf("bures_squared %.10g\n", bures_squared(a.cov(), b.cov()));
  std::printf("hellinger_squared %.10g\n", hellinger_squared(a, b));
}

}  // namespace wrgm::cli
