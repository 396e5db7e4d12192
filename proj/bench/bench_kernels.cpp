/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
// Serial reference kernels vs the chunked OpenMP kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "wvote/rng.hpp"
#include "wvote/rules.hpp"

using namespace wvote;

namespace {

std::vector<double> random_profiles(std::size_t n) {
  SubRng rng(17, RngPurpose::generic, n);
  std::vector<double> out(n);
  for (auto& p : out) p = 0.5 + 0.49 * rng.uniform01();
  return out;
}

void BM_enumerate_serial(benchmark::State& state) {
  const auto profiles = random_profiles(static_cast<std::size_t>(state.range(0)));
  const auto rule = theorem_rule(profiles, WelfareParams{0.5, 1e-2, 12.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::probability_enumerate_serial(profiles, rule, BlockValidity::valid));
  }
}

void BM_enumerate_parallel(benchmark::State& state) {
  const auto profiles = random_profiles(static_cast<std::size_t>(state.range(0)));
  const auto rule = theorem_rule(profiles, WelfareParams{0.5, 1e-2, 12.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::probability_enumerate_parallel(profiles, rule, BlockValidity::valid));
  }
}

void BM_mc_serial(benchmark::State& state) {
  const auto profiles = random_profiles(20);
  const auto rule = theorem_rule(profiles, WelfareParams{0.5, 1e-2, 12.0});
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::mc_hits_serial(profiles, rule, BlockValidity::valid, trials, 1));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(trials) * state.iterations());
}

void BM_mc_parallel(benchmark::State& state) {
  const auto profiles = random_profiles(20);
  const auto rule = theorem_rule(profiles, WelfareParams{0.5, 1e-2, 12.0});
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::mc_hits_parallel(profiles, rule, BlockValidity::valid, trials, 1));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(trials) * state.iterations());
}

}  // namespace

BENCHMARK(BM_enumerate_serial)->Arg(14)->Arg(17)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_enumerate_parallel)->Arg(14)->Arg(17)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_serial)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_parallel)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
