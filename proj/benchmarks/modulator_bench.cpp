#include <benchmark/benchmark.h>

#include "dinilab/sequences.hpp"

namespace {

void BM_ModulatorGeometric(benchmark::State& state) {
  const auto a = dinilab::SummableSequence::geometric(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(dinilab::dp_modulator(a, 0.5, 0.05));
}
BENCHMARK(BM_ModulatorGeometric);

void BM_ModulatorPower(benchmark::State& state) {
  const auto a = dinilab::SummableSequence::power(1.5);
  for (auto _ : state) benchmark::DoNotOptimize(dinilab::dp_modulator(a, 0.5, 0.05));
}
BENCHMARK(BM_ModulatorPower)->Unit(benchmark::kMicrosecond);

void BM_Adversary(benchmark::State& state) {
  const auto c = dinilab::CoefficientSequence::inverse_log();
  for (auto _ : state) benchmark::DoNotOptimize(dinilab::adversarial_for(c, 1e3));
}
BENCHMARK(BM_Adversary)->Unit(benchmark::kMicrosecond);

}  // namespace
