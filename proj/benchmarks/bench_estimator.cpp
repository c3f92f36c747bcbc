#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "hetbounds/dataset.hpp"
#include "hetbounds/estimator.hpp"

namespace {

using namespace hetbounds;

Dataset make(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> z;
  std::vector<double> y(n), d(n), x1(n), x2(n), x3(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = z(rng);
    x2[i] = z(rng);
    x3[i] = z(rng);
    d[i] = 0.5 * x2[i] + z(rng);
    y[i] = 2 * d[i] + x1[i] - x2[i] + 0.3 * x3[i] + z(rng);
    w[i] = 1.0 + 0.5 * std::abs(z(rng));
  }
  Dataset data;
  data.add_numeric("y", y);
  data.add_numeric("d", d);
  data.add_numeric("x1", x1);
  data.add_numeric("x2", x2);
  data.add_numeric("x3", x3);
  data.add_numeric("w", w);
  return data;
}

const RegressionSpec kSpec{"y", "d", {"x1", "x3"}, {"x2"}, "w"};

void BM_WolsFit(benchmark::State& state) {
  const auto data = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wols_fit(data, kSpec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WolsFit)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oN);

void BM_ShortSupershort(benchmark::State& state) {
  const auto data = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(short_supershort(data, kSpec));
}
BENCHMARK(BM_ShortSupershort)->RangeMultiplier(10)->Range(100, 100000);

}  // namespace
