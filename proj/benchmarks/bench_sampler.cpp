#include <benchmark/benchmark.h>

#include "wrgm/datagen.hpp"
#include "wrgm/sampler.hpp"

namespace {

wrgm::Dataset scenario_data(int n) {
  wrgm::RngStream rng(2024);
  const wrgm::TrueMixture mix = wrgm::build_sim_scenario(3, rng);
  return wrgm::sample_mixture(mix, n, rng);
}

wrgm::SamplerConfig scenario_config(wrgm::RepulsionMetric metric) {
  wrgm::PriorHyperparams prior(2);
  prior.mean_scale = 100.0;
  prior.iw_dof = 3.0;
  prior.g0 = 5.0;
  prior.repulsion_metric = metric;
  wrgm::SamplerConfig cfg(prior);
  cfg.zk_draws = 2000;
  return cfg;
}

void BM_SweepWasserstein(benchmark::State& state) {
  const auto data = scenario_data(static_cast<int>(state.range(0)));
  wrgm::GibbsSampler sampler(data, scenario_config(wrgm::RepulsionMetric::kWasserstein),
                             wrgm::RngStream(5));
  for (auto _ : state) {
    sampler.sweep();
    benchmark::DoNotOptimize(sampler.state().log_repulsion);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SweepWasserstein)->Arg(100)->Arg(500);

void BM_SweepNoRepulsion(benchmark::State& state) {
  const auto data = scenario_data(static_cast<int>(state.range(0)));
  wrgm::GibbsSampler sampler(data, scenario_config(wrgm::RepulsionMetric::kNone),
                             wrgm::RngStream(5));
  for (auto _ : state) {
    sampler.sweep();
    benchmark::DoNotOptimize(sampler.state().sweep_index);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SweepNoRepulsion)->Arg(100)->Arg(500);

void BM_EstimateLogZk(benchmark::State& state) {
  wrgm::PriorHyperparams prior(2);
  prior.mean_scale = 100.0;
  prior.iw_dof = 3.0;
  prior.g0 = 5.0;
  wrgm::RngStream rng(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        wrgm::estimate_log_ZK(static_cast<int>(state.range(0)), prior, 1000, rng));
  }
}
BENCHMARK(BM_EstimateLogZk)->Arg(2)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
