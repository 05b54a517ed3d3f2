// Serial reference vs OpenMP kernel for the Monte Carlo table, and the
// windowed estimator over a large pair stream.

#include <benchmark/benchmark.h>

#include "pathgauge/estimator.hpp"
#include "pathgauge/ingest.hpp"
#include "pathgauge/parallel.hpp"
#include "pathgauge/simulator.hpp"

using namespace pathgauge;

namespace {

SimConfig bench_config(std::int64_t trials) {
  SimConfig cfg;
  cfg.trials = static_cast<std::uint64_t>(trials);
  return cfg;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto cfg = bench_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulator::simulate_eta_table_serial(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(cfg.n_values.size()));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto cfg = bench_config(state.range(0));
  state.counters["threads"] = max_threads();
  for (auto _ : state) benchmark::DoNotOptimize(simulator::simulate_eta_table(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(cfg.n_values.size()));
}

const std::vector<PacketPairSample>& bench_pairs() {
  static const auto pairs = [] {
    simulator::DatasetSpec spec;
    spec.model.d_min = 0.005;
    spec.pairs = 200000;
    auto groups = ingest::split_by_size(simulator::generate_records(spec));
    return estimator::pair_samples(groups.at(100), groups.at(1100)).pairs;
  }();
  return pairs;
}

void BM_SlidingWindows(benchmark::State& state) {
  const auto& pairs = bench_pairs();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimator::estimate_bandwidth(pairs, {n, 1}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}

void BM_SdVsN(benchmark::State& state) {
  const auto& pairs = bench_pairs();
  for (auto _ : state) benchmark::DoNotOptimize(estimator::sd_vs_n(pairs, estimator::kDefaultNGrid));
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SlidingWindows)->Arg(10)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SdVsN)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
