// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "sasa/attention.hpp"
#include "sasa/verification.hpp"

namespace {

using namespace sasa;

attention::AttentionTensors make_case(std::size_t n, bool dense) {
  Rng rng(n);
  mask::AttentionConfig cfg;
  cfg.n = n;
  auto t = verify::random_attention_case(rng, cfg, 16, 0.01);
  if (dense) t.mask = mask::BlockMask::full(cfg.num_blocks());
  return t;
}

void BM_SparseForward(benchmark::State& state) {
  const auto t = make_case(static_cast<std::size_t>(state.range(0)), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(attention::sparse_attention_forward(t));
  }
  state.counters["selected_blocks"] = static_cast<double>(t.mask.selected_count());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SparseForward)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond)
    ->Complexity();

// Every block selected: the dense cost through the same kernel.
void BM_FullMaskForward(benchmark::State& state) {
  const auto t = make_case(static_cast<std::size_t>(state.range(0)), true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(attention::sparse_attention_forward(t));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FullMaskForward)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_Backward(benchmark::State& state) {
  const auto t = make_case(static_cast<std::size_t>(state.range(0)), false);
  const auto fwd = attention::sparse_attention_forward(t);
  Rng rng(7);
  const Matrix upstream = random_matrix(rng, t.q.rows(), t.v.cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(attention::attention_backward(t, fwd, upstream));
  }
}
BENCHMARK(BM_Backward)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
