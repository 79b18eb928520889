#include <benchmark/benchmark.h>

#include <vector>

#include "wrgm/distance.hpp"
#include "wrgm/gaussian.hpp"
#include "wrgm/rng.hpp"

namespace {

std::vector<wrgm::GaussianComponent> random_components(int count, int dim,
                                                       std::uint64_t seed) {
  wrgm::RngStream rng(seed);
  std::vector<wrgm::GaussianComponent> comps;
  comps.reserve(count);
  for (int c = 0; c < count; ++c) {
    Eigen::VectorXd mean(dim);
    for (int i = 0; i < dim; ++i) mean[i] = 3.0 * rng.normal();
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) a(i, j) = rng.normal();
    }
    comps.emplace_back(mean, wrgm::SpdMatrix(a * a.transpose() +
                                             0.5 * Eigen::MatrixXd::Identity(dim, dim)));
  }
  return comps;
}

void BM_W2Squared(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto comps = random_components(64, dim, 1234);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = comps[i % comps.size()];
    const auto& b = comps[(i + 7) % comps.size()];
    benchmark::DoNotOptimize(wrgm::w2_squared(a, b));
    ++i;
  }
}
BENCHMARK(BM_W2Squared)->Arg(2)->Arg(5)->Arg(10);

void BM_HellingerSquared(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto comps = random_components(64, dim, 99);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = comps[i % comps.size()];
    const auto& b = comps[(i + 7) % comps.size()];
    benchmark::DoNotOptimize(wrgm::hellinger_squared(a, b));
    ++i;
  }
}
BENCHMARK(BM_HellingerSquared)->Arg(2)->Arg(5)->Arg(10);

void BM_SpdSqrt(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto comps = random_components(16, dim, 7);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wrgm::spd_sqrt(comps[i % comps.size()].cov().mat()));
    ++i;
  }
}
BENCHMARK(BM_SpdSqrt)->Arg(2)->Arg(5)->Arg(10);

void BM_LogPdf(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto comps = random_components(16, dim, 8);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(dim, 0.3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wrgm::log_pdf(comps[i % comps.size()], y));
    ++i;
  }
}
BENCHMARK(BM_LogPdf)->Arg(2)->Arg(5)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
