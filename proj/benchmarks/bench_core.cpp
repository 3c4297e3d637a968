#include <benchmark/benchmark.h>

#include <vector>

#include "gqt/canonical.hpp"
#include "gqt/divided_difference.hpp"
#include "gqt/dynamics.hpp"
#include "gqt/sampling.hpp"

namespace {

gqt::HamiltonianSystem ladder(std::size_t d) {
  std::vector<double> e(d);
  for (std::size_t k = 0; k < d; ++k) e[k] = static_cast<double>(k) + 0.1 * static_cast<double>(k * k);
  return gqt::HamiltonianSystem(gqt::HermitianObservable::diagonal(e));
}

void BM_PartitionFunction(benchmark::State& state) {
  const auto sys = ladder(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gqt::partition_function(sys, 2.0));
}
BENCHMARK(BM_PartitionFunction)->DenseRange(2, 10, 2)->Arg(20);

void BM_ExpDividedDifference(benchmark::State& state) {
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = -0.7 * static_cast<double>(k);
  for (auto _ : state) benchmark::DoNotOptimize(gqt::exp_divided_difference(x));
}
BENCHMARK(BM_ExpDividedDifference)->Arg(3)->Arg(8)->Arg(16);

void BM_McPartition(benchmark::State& state) {
  const auto sys = ladder(static_cast<std::size_t>(state.range(0)));
  const gqt::SamplerConfig cfg{1, 100'000, 1};
  for (auto _ : state) benchmark::DoNotOptimize(gqt::mc_partition_estimate(sys, 1.0, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.n_samples));
}
BENCHMARK(BM_McPartition)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SampleCanonical(benchmark::State& state) {
  const auto sys = ladder(2);
  const gqt::SamplerConfig cfg{1, 10'000, 1};
  for (auto _ : state) benchmark::DoNotOptimize(gqt::sample_canonical(sys, 1.0, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.n_samples));
}
BENCHMARK(BM_SampleCanonical)->Unit(benchmark::kMillisecond);

void BM_DrivenWork(benchmark::State& state) {
  const gqt::Protocol p(gqt::HermitianObservable::pauli_sum(0, 0, 1), gqt::HermitianObservable::pauli_sum(1, 0, 0),
                        gqt::Schedule::linear(0.0, 1.0), 1.0, static_cast<std::size_t>(state.range(0)));
  const auto z0 = gqt::ProjectiveState::basis(2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(gqt::driven_work(p, z0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DrivenWork)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
