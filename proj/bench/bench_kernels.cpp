// Serial reference vs OpenMP kernels on synthetic weekly profiles.

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "scd/clustering.hpp"
#include "scd/kernels.hpp"
#include "scd/synth.hpp"

namespace {

std::vector<scd::WeeklyProfile> population(int per_archetype) {
  scd::ObservationPeriod period("bench", std::chrono::year{2014} / 4 / 7);
  std::vector<scd::ArchetypeSpec> specs = {
      {scd::Archetype::Commuter, per_archetype, 0.25, 1},
      {scd::Archetype::OneDayRider, per_archetype, 0.25, 2},
      {scd::Archetype::TwoDayRider, per_archetype, 0.25, 3},
      {scd::Archetype::MultiDayRider, per_archetype, 0.25, 4},
  };
  auto profiles = scd::build_profiles(scd::generate(specs, period).records);
  std::vector<scd::WeeklyProfile> out;
  for (auto& [id, p] : profiles) out.push_back(p);
  return out;
}

void BM_PairwiseMatrix(benchmark::State& state, scd::Execution exec) {
  auto pts = population(static_cast<int>(state.range(0)) / 4);
  scd::TransactionDistanceOracle oracle(pts, {1.0});
  for (auto _ : state) benchmark::DoNotOptimize(scd::pairwise_condensed(oracle, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size() * (pts.size() - 1) / 2));
}

void BM_SsOptics(benchmark::State& state, scd::Execution exec) {
  auto pts = population(static_cast<int>(state.range(0)) / 4);
  scd::TransactionDistanceOracle oracle(pts, {1.0});
  scd::SsOpticsParams params;
  for (auto _ : state) benchmark::DoNotOptimize(scd::ss_optics_order(oracle, params, exec));
}

void BM_DenseDistance(benchmark::State& state) {
  auto pts = population(64);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = pts[i % pts.size()];
    const auto& b = pts[(i * 7 + 3) % pts.size()];
    benchmark::DoNotOptimize(scd::transaction_distance(a.slots, b.slots, {1.0}));
    ++i;
  }
}

void BM_SparseDistance(benchmark::State& state) {
  auto pts = population(64);
  std::vector<scd::SparseProfile> sp;
  for (const auto& p : pts) sp.push_back(scd::SparseProfile::from_profile(p));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scd::transaction_distance(sp[i % sp.size()], sp[(i * 7 + 3) % sp.size()], 1.0));
    ++i;
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_PairwiseMatrix, serial, scd::Execution::Serial)->Arg(1000)->Arg(2000);
BENCHMARK_CAPTURE(BM_PairwiseMatrix, parallel, scd::Execution::Parallel)->Arg(1000)->Arg(2000);
BENCHMARK_CAPTURE(BM_SsOptics, serial, scd::Execution::Serial)->Arg(1000)->Arg(2000);
BENCHMARK_CAPTURE(BM_SsOptics, parallel, scd::Execution::Parallel)->Arg(1000)->Arg(2000);
BENCHMARK(BM_DenseDistance);
BENCHMARK(BM_SparseDistance);

BENCHMARK_MAIN();
