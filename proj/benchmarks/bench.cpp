#include <benchmark/benchmark.h>

#include "reeftip/experiments.hpp"
#include "reeftip/folded.hpp"
#include "reeftip/manifold.hpp"
#include "reeftip/model.hpp"

using namespace reeftip;

namespace {

ModelParams bench_params() {
  ModelParams p;
  p.lambda = 0.2;
  p.beta = 0.2;
  p.d = 0.22;
  p.epsilon = 0.01;
  return p;
}

void BM_threshold_set(benchmark::State& state) {
  ModelParams p = bench_params();
  for (auto _ : state) benchmark::DoNotOptimize(threshold_set(p));
}
BENCHMARK(BM_threshold_set);

void BM_fast_field_with_jacobian(benchmark::State& state) {
  ModelParams p = bench_params();
  State3 y{1.1, 0.3, 0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs_fast(y, 0.4, p));
    benchmark::DoNotOptimize(jac_fast(y, 0.4, p));
  }
}
BENCHMARK(BM_fast_field_with_jacobian);

void BM_folded_singularities(benchmark::State& state) {
  ModelParams p = bench_params();
  for (auto _ : state) benchmark::DoNotOptimize(find_folded_singularities(p, 4e-3));
}
BENCHMARK(BM_folded_singularities);

void BM_tipping_run(benchmark::State& state) {
  ModelParams p = bench_params();
  p.beta = 0.3;
  p.lambda = 0.4;
  RampConfig ramp;
  ramp.r = 4e-3;
  for (auto _ : state) benchmark::DoNotOptimize(run_tipping_experiment(p, ramp));
}
BENCHMARK(BM_tipping_run);

}  // namespace

BENCHMARK_MAIN();
