#include <benchmark/benchmark.h>

#include "bomp/coherence.hpp"
#include "bomp/experiments.hpp"

using namespace bomp;

namespace {

void BM_BlockCoherence(benchmark::State& state) {
  const Index d = state.range(0);
  const BlockDictionary dict = gen_dictionary(40, 400, d, 21);
  for (auto _ : state) benchmark::DoNotOptimize(block_coherence(dict));
}
BENCHMARK(BM_BlockCoherence)->Arg(1)->Arg(4)->Arg(8);

void BM_CoherenceProfile(benchmark::State& state) {
  const BlockDictionary dict = gen_dictionary(40, 400, 4, 22);
  for (auto _ : state) benchmark::DoNotOptimize(coherence_profile(dict));
}
BENCHMARK(BM_CoherenceProfile);

void BM_Orthogonalize(benchmark::State& state) {
  const BlockDictionary dict = gen_dictionary(40, 400, 4, 23);
  for (auto _ : state) benchmark::DoNotOptimize(orthogonalize_blocks(dict));
}
BENCHMARK(BM_Orthogonalize);

}  // namespace
