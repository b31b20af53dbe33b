// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "encsim/compare.hpp"
#include "encsim/costs.hpp"
#include "encsim/eval.hpp"
#include "encsim/scenarios.hpp"

namespace encsim {
namespace {

constexpr std::size_t kEll = 512;
constexpr std::size_t kN1 = 23;
constexpr std::size_t kSlots = 1024;

std::vector<double> randomQuery(std::size_t ell) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> q(ell);
  for (auto& x : q) x = u(rng);
  return normalizeL2(q);
}

// Similarity over G synthetic score ciphertexts; counters report the ledger.
void BM_Similarity(benchmark::State& state, Engine engine) {
  const auto G = static_cast<std::size_t>(state.range(0));
  const std::size_t numSlots = engine == Engine::SenderBlockPacked ? 2 * kSlots : kSlots;
  HeContext ctx(SimParams{numSlots, 3});
  const SyntheticDiagonals db(ctx, measurementMeta(engine, kEll, kN1, G, numSlots, 3));
  const RotationKeyRegistry keys = ctx.generateRotationKeys(diagonalKeySet(engine, kEll, kN1));
  const CipherVector q = ctx.encrypt(replicateQuery(randomQuery(kEll), numSlots));
  const EngineConfig cfg{engine, kN1, 1, 0};
  CostLedger per;
  for (auto _ : state) {
    ctx.resetLedger();
    benchmark::DoNotOptimize(computeSimilarity(ctx, cfg, db, q, keys));
    per = ctx.ledger();
  }
  state.counters["rotations"] = static_cast<double>(per.rotations());
  state.counters["ctCtMults"] = static_cast<double>(per.ctCtMults);
  state.counters["vectors"] = static_cast<double>(db.meta().vectorCount);
}

void BM_Comparator(benchmark::State& state) {
  const int kappa = static_cast<int>(state.range(0));
  HeContext ctx(SimParams{kSlots, 12});
  const ChebyshevComparator cmp = ChebyshevComparator::make(kappa, 0.5);
  const CipherVector x = ctx.encrypt(randomQuery(kSlots));
  for (auto _ : state) benchmark::DoNotOptimize(evalChebPS(ctx, x, cmp));
  state.counters["degree"] = cmp.degree;
  state.counters["levels"] = cmp.levelsRequired();
}

void BM_WorkerScaling(benchmark::State& state) {
  const auto workers = static_cast<std::size_t>(state.range(0));
  HeContext ctx(SimParams{kSlots, 3});
  const SyntheticDiagonals db(ctx, measurementMeta(Engine::BsgsDiagonal, kEll, kN1, 8, kSlots, 3));
  const RotationKeyRegistry keys =
      ctx.generateRotationKeys(diagonalKeySet(Engine::BsgsDiagonal, kEll, kN1));
  const CipherVector q = ctx.encrypt(replicateQuery(randomQuery(kEll), kSlots));
  const EngineConfig cfg{Engine::BsgsDiagonal, kN1, workers, 0};
  for (auto _ : state) benchmark::DoNotOptimize(computeSimilarity(ctx, cfg, db, q, keys));
}

BENCHMARK_CAPTURE(BM_Similarity, hydia, Engine::HyDia)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Similarity, bsgs_diagonal, Engine::BsgsDiagonal)
    ->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Similarity, grouped, Engine::GroupedBsgs)
    ->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Similarity, sender, Engine::SenderBlockPacked)
    ->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Comparator)->DenseRange(7, 10)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_WorkerScaling)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace encsim

BENCHMARK_MAIN();
