// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "sasa/cost.hpp"
#include "sasa/mask.hpp"
#include "sasa/pipeline.hpp"
#include "sasa/verification.hpp"

namespace {

using namespace sasa;

void BM_BuildMask(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(n);
  const auto s = verify::random_structure(rng, n, 0.01);
  mask::AttentionConfig cfg;
  cfg.n = n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mask::build_mask(cfg, s.pair_scores, s.adjacency));
  }
}
BENCHMARK(BM_BuildMask)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMicrosecond);

// Tokenize, parse, align and build the adjacency for one synthetic file.
void BM_PrepareInput(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const std::string src = cost::synthetic_program(ast::Language::Java, n, rng);
  const auto vocab = tokenizer::build_vocabulary(std::vector<std::string>{src}, 5000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prepare_input(src, ast::Language::Java, vocab, nullptr, n));
  }
}
BENCHMARK(BM_PrepareInput)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
