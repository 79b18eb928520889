#include "wrgm/datagen.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wrgm/errors.hpp"

namespace wrgm {

TrueMixture build_sim_scenario(int k_random, RngStream& rng) {
  if (k_random < 0) {
    throw std::invalid_argument("build_sim_scenario: k_random must be >= 0");
  }
  TrueMixture mix;
  Eigen::VectorXd shared_mean = Eigen::VectorXd::Zero(2);
  mix.components.emplace_back(shared_mean, SpdMatrix::diagonal(Eigen::Vector2d(1.0, 100.0)));
  mix.components.emplace_back(shared_mean, SpdMatrix::diagonal(Eigen::Vector2d(100.0, 1.0)));

  const Eigen::MatrixXd mean_chol = 5.0 * Eigen::MatrixXd::Identity(2, 2);  // N(0, 25 I)
  const InvWishartSampler iw(SpdMatrix(10.0 * Eigen::MatrixXd::Identity(2, 2)), 5.0);
  for (int k = 0; k < k_random; ++k) {
    Eigen::VectorXd m = sample_mvn(Eigen::VectorXd::Zero(2), mean_chol, rng);
    mix.components.emplace_back(std::move(m), SpdMatrix(iw.draw(rng)));
  }
  const int total = k_random + 2;
  mix.weights = Eigen::VectorXd::Constant(total, 1.0 / total);
  mix.provenance = "sim_scenario(k_random=" + std::to_string(k_random) + ")";
  return mix;
}

Dataset sample_mixture(const TrueMixture& mix, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  const int total = static_cast<int>(mix.components.size());
  std::vector<double> log_w(total);
  for (int k = 0; k < total; ++k) log_w[k] = std::log(mix.weights[k]);

  Dataset data;
  data.points.resize(n, mix.components.front().dim());
  data.labels = std::vector<int>(n);
  for (int i = 0; i < n; ++i) {
    const int label = sample_categorical(log_w, rng);
    (*data.labels)[i] = label;
    const auto& c = mix.components[label];
    data.points.row(i) = sample_mvn(c.mean(), c.chol(), rng).transpose();
  }
  data.source = mix.provenance;
  return data;
}

double true_density(const TrueMixture& mix, const Eigen::VectorXd& y) {
  return mixture_density(mix.weights, mix.components, y);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, int row, const std::string& column) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t' || *begin == '\r')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double value = 0.0;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw std::invalid_argument("load_csv: unparseable numeric cell at row " +
                                std::to_string(row) + ", column '" + column + "'");
  }
  return value;
}

bool passes(double value, FilterOp op, double threshold) {
  switch (op) {
    case FilterOp::kGreater: return value > threshold;
    case FilterOp::kLess: return value < threshold;
    case FilterOp::kGreaterEqual: return value >= threshold;
    case FilterOp::kLessEqual: return value <= threshold;
  }
  return false;
}

}  // namespace

Dataset load_csv(const std::string& path,
                 const std::optional<std::vector<std::string>>& columns,
                 const std::optional<CsvFilter>& filter) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("load_csv: missing header row in '" + path + "'");
  }
  std::vector<std::string> header = split_line(line);
  for (auto& name : header) {
    while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
  }

  auto column_index = [&](const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<int>(j);
    }
    throw std::invalid_argument("load_csv: column '" + name + "' not found in '" + path + "'");
  };

  int filter_col = -1;
  if (filter) filter_col = column_index(filter->column);

  int label_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "label") label_col = static_cast<int>(j);
  }

  std::vector<int> keep;
  if (columns) {
    for (const auto& name : *columns) keep.push_back(column_index(name));
  } else {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (static_cast<int>(j) != label_col) keep.push_back(static_cast<int>(j));
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("load_csv: row " + std::to_string(row_number) +
                                  " has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(header.size()));
    }
    if (filter_col >= 0) {
      const double value = parse_cell(cells[filter_col], row_number, header[filter_col]);
      if (!passes(value, filter->op, filter->threshold)) continue;
    }
    std::vector<double> row;
    row.reserve(keep.size());
    for (const int j : keep) {
      row.push_back(parse_cell(cells[j], row_number, header[j]));
    }
    rows.push_back(std::move(row));
    if (label_col >= 0) {
      labels.push_back(static_cast<int>(
          parse_cell(cells[label_col], row_number, header[label_col])));
    }
  }

  if (rows.empty()) {
    throw std::invalid_argument("load_csv: no rows remain after filtering '" + path + "'");
  }

  Dataset data;
  data.points.resize(static_cast<int>(rows.size()), static_cast<int>(keep.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) {
      data.points(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
  }
  if (label_col >= 0) data.labels = std::move(labels);
  data.source = path;
  return data;
}

void write_data_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_data_csv: cannot open '" + path + "' for writing");
  const bool with_labels = data.labels.has_value();
  for (int j = 0; j < data.dim(); ++j) {
    out << "x" << j;
    if (j + 1 < data.dim() || with_labels) out << ",";
  }
  if (with_labels) out << "label";
  out << "\n";
  char buf[64];
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.points(i, j));
      out << buf;
      if (j + 1 < data.dim() || with_labels) out << ",";
    }
    if (with_labels) out << (*data.labels)[i];
    out << "\n";
  }
}

}  // namespace wrgm
