#include <benchmark/benchmark.h>

#include "bomp/experiments.hpp"
#include "bomp/recovery.hpp"

using namespace bomp;

namespace {

struct Problem {
  BlockDictionary dict;
  Vector y;
};

Problem make_problem(Index m, Index n, Index d, Index k) {
  BlockDictionary dict = gen_dictionary(m, n, d, 11);
  const BlockSparseSignal x = gen_signal(n / d, d, k, 12);
  Vector y = dict.matrix() * x.values() + gen_noise(m, 0.05, 13);
  return {std::move(dict), std::move(y)};
}

void BM_Bomp(benchmark::State& state) {
  const Index k = state.range(0);
  const Problem p = make_problem(40, 400, 4, k);
  for (auto _ : state) benchmark::DoNotOptimize(bomp::bomp(p.y, p.dict, StoppingRule::known_k(k)));
}
BENCHMARK(BM_Bomp)->Arg(1)->Arg(5)->Arg(10);

void BM_Omp(benchmark::State& state) {
  const Index k = state.range(0);
  const Problem p = make_problem(40, 400, 4, k);
  for (auto _ : state) benchmark::DoNotOptimize(bomp::omp(p.y, p.dict, StoppingRule::known_k(k)));
}
BENCHMARK(BM_Omp)->Arg(1)->Arg(5)->Arg(10);

void BM_Trial(benchmark::State& state) {
  TrialSpec spec;
  spec.k = 5;
  spec.sigma_w = 0.05;
  const bool certify = state.range(0) != 0;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(spec, Solver::bomp, ++seed, certify));
}
BENCHMARK(BM_Trial)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
