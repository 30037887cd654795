#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "dinilab/pde/minimax.hpp"

namespace {

void BM_ChebyshevFit1D(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::vector<double> x, u;
  for (int i = -n; i <= n; ++i) {
    x.push_back(static_cast<double>(i) / n);
    u.push_back(std::pow(std::abs(x.back()), 1.5) + 0.1 * std::sin(7.0 * x.back()));
  }
  for (auto _ : state) benchmark::DoNotOptimize(dinilab::pde::chebyshev_affine_fit(1, x, {}, u));
}
BENCHMARK(BM_ChebyshevFit1D)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMicrosecond);

void BM_ChebyshevFit2D(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::vector<double> x, y, u;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      if (i * i + j * j > n * n) continue;
      x.push_back(static_cast<double>(i) / n);
      y.push_back(static_cast<double>(j) / n);
      u.push_back(std::pow(x.back() * x.back() + y.back() * y.back(), 0.75));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(dinilab::pde::chebyshev_affine_fit(2, x, y, u));
}
BENCHMARK(BM_ChebyshevFit2D)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace
