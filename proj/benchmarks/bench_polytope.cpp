#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "hetbounds/polytope.hpp"
#include "hetbounds/rho_matrix.hpp"

namespace {

using namespace hetbounds;

struct Setup {
  std::vector<SettingEstimate> est;
  std::vector<BiasBound> nus;
  RhoMatrix rho;
};

Setup make(std::size_t k) {
  std::mt19937_64 rng(k);
  std::uniform_real_distribution<double> u(0.05, 0.5);
  std::vector<std::string> labels;
  std::vector<int> positions;
  Setup s;
  for (std::size_t i = 0; i < k; ++i) {
    labels.push_back("s" + std::to_string(i));
    positions.push_back(static_cast<int>(i));
    s.est.push_back({labels.back(), 0.4 + 0.01 * static_cast<double>(i % 7), {}});
    s.nus.push_back({-u(rng), u(rng)});
  }
  s.rho = decay_matrix(labels, positions, 0.95);
  return s;
}

void BM_Build(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build(s.est, s.nus, s.rho, false));
}
BENCHMARK(BM_Build)->RangeMultiplier(2)->Range(4, 256);

void BM_Close(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  const auto g = build(s.est, s.nus, s.rho, false);
  for (auto _ : state) benchmark::DoNotOptimize(close(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Close)->RangeMultiplier(2)->Range(4, 256)->Complexity(benchmark::oNCubed);

void BM_PinFraction(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  const auto solved = close(build(s.est, s.nus, s.rho, false));
  for (auto _ : state) benchmark::DoNotOptimize(pin_at_fraction(solved.graph, "s0", 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PinFraction)->RangeMultiplier(2)->Range(4, 256)->Complexity();

void BM_TransitivityAudit(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(transitivity_audit(s.rho));
}
BENCHMARK(BM_TransitivityAudit)->RangeMultiplier(2)->Range(4, 64);

}  // namespace

BENCHMARK_MAIN();
