// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/costs.hpp"

#include <algorithm>
#include <bit>

#include "encsim/dataset.hpp"
#include "encsim/errors.hpp"
#include "encsim/packing.hpp"

namespace encsim {

namespace {

void checkParams(std::size_t ell, std::size_t n1) {
  if (ell == 0 || !std::has_single_bit(ell)) throw Error(Errc::InvalidArgument, "ell must be a power of two");
  if (n1 < 1 || n1 > ell) throw Error(Errc::InvalidArgument, "n1 must lie in [1, ell]");
}

struct SenderShape {
  std::uint64_t validGiants = 0;
  std::uint64_t shiftedGiants = 0;
};

SenderShape senderShape(std::size_t N, std::size_t n1) {
  SenderShape s;
  const auto n1s = static_cast<long long>(n1);
  const auto half = static_cast<long long>(N / 2);
  for (long long j : senderGiantSteps(N, n1)) {
    const long long lo = std::max(0LL, -j * n1s - half);
    const long long hi = std::min(n1s - 1, (static_cast<long long>(N) + 1) / 2 - 1 - j * n1s);
    if (lo > hi) continue;
    ++s.validGiants;
    if (preShift(j, n1, N) != 0) ++s.shiftedGiants;
  }
  return s;
}

}  // namespace

std::set<int> diagonalKeySet(Engine engine, std::size_t ell, std::size_t n1) {
  checkParams(ell, n1);
  std::set<int> keys;
  if (engine == Engine::HyDia) {
    for (std::size_t i = 1; i < ell; ++i) keys.insert(static_cast<int>(i));
    return keys;
  }
  for (std::size_t i = 1; i < n1; ++i) keys.insert(static_cast<int>(i));
  if (engine == Engine::SenderBlockPacked) {
    const std::size_t N = ell;
    const auto n1s = static_cast<long long>(n1);
    const auto half = static_cast<long long>(N / 2);
    for (long long j : senderGiantSteps(N, n1)) {
      const long long lo = std::max(0LL, -j * n1s - half);
      const long long hi = std::min(n1s - 1, (static_cast<long long>(N) + 1) / 2 - 1 - j * n1s);
      const std::size_t s = preShift(j, n1, N);
      if (lo > hi || s == 0) continue;
      keys.insert(static_cast<int>(s));
      keys.insert(static_cast<int>(s) - static_cast<int>(N));
    }
    return keys;
  }
  const std::size_t n2 = (ell + n1 - 1) / n1;
  for (std::size_t j = 1; j < n2; ++j) keys.insert(static_cast<int>(j * n1));
  return keys;
}

std::set<int> evalSumKeys(std::size_t span) {
  std::set<int> keys;
  for (std::size_t s = 1; s < span; s *= 2) keys.insert(static_cast<int>(s));
  return keys;
}

std::set<int> keySetFor(Engine engine, std::size_t ell, std::size_t n1, std::size_t evalSumSpan) {
  auto keys = diagonalKeySet(engine, ell, n1);
  for (int r : evalSumKeys(evalSumSpan)) keys.insert(r);
  return keys;
}

double keyReductionRatio(std::size_t ell, std::size_t n1) {
  const double hydia = static_cast<double>(diagonalKeySet(Engine::HyDia, ell, n1).size());
  const double bsgs = static_cast<double>(diagonalKeySet(Engine::BsgsDiagonal, ell, n1).size());
  return hydia == 0.0 ? 0.0 : 1.0 - bsgs / hydia;
}

std::string describe(const CostScenario& s) {
  return std::string(toString(s.engine)) + " ell=" + std::to_string(s.ell) +
         " n1=" + std::to_string(s.n1) + " n2=" + std::to_string(s.n2) +
         " G=" + std::to_string(s.groups);
}

CostPrediction predictCosts(Engine engine, std::size_t ell, std::size_t n1, std::size_t groups,
                            std::uint64_t bytesPerKey) {
  checkParams(ell, n1);
  const std::uint64_t L = ell;
  const std::uint64_t G = groups;
  const std::uint64_t n2 = (ell + n1 - 1) / n1;
  CostPrediction p;
  p.scenario = {engine, ell, n1, n2, groups};
  p.ctCtMults = G * L;
  switch (engine) {
    case Engine::HyDia:
    case Engine::BsgsDiagonal:
      p.rotations = L - 1;
      p.ctCtAdds = G * (L - 1);
      p.relins = G;
      p.rescales = G;
      break;
    case Engine::GroupedBsgs:
      p.rotations = (n1 - 1) + G * (n2 - 1);
      p.ctCtAdds = G * (L - 1);
      p.relins = G * n2;
      p.rescales = G * n2;
      break;
    case Engine::SenderBlockPacked: {
      const SenderShape s = senderShape(ell, n1);
      p.rotations = (n1 - 1) + G * 2 * s.shiftedGiants;
      p.ctCtAdds = G * ((L - s.validGiants) + s.shiftedGiants + (s.validGiants - 1));
      p.relins = G * s.validGiants;
      p.rescales = G * s.validGiants;
      break;
    }
  }
  p.rotationKeys = diagonalKeySet(engine, ell, n1).size();
  p.keyMemoryBytes = p.rotationKeys * bytesPerKey;
  return p;
}

std::uint64_t streamPoolSize(std::uint64_t sms, std::uint64_t freeBytes, std::uint64_t ctBytes) {
  if (sms == 0 || freeBytes == 0 || ctBytes == 0) {
    throw Error(Errc::InvalidArgument, "stream pool inputs must be positive");
  }
  // floor(0.2 F / (40 C)) == floor(F / (200 C)) in exact arithmetic.
  constexpr std::uint64_t kMax = ~std::uint64_t{0};
  const std::uint64_t memoryTerm = ctBytes > kMax / 200 ? 0 : freeBytes / (ctBytes * 200);
  std::uint64_t s = std::min<std::uint64_t>(sms / 4, 32);
  s = std::min(s, memoryTerm);
  return std::max<std::uint64_t>(s, 2);
}

bool ReconcileReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.match(); });
}

ReconcileReport reconcile(const CostPrediction& prediction, const CostScenario& measured,
                          const CostLedger& ledger) {
  if (!(prediction.scenario == measured)) {
    throw Error(Errc::Configuration, "prediction is for [" + describe(prediction.scenario) +
                                         "], ledger is from [" + describe(measured) + "]");
  }
  ReconcileReport r;
  r.scenario = measured;
  r.entries = {
      {"rotations", prediction.rotations, ledger.rotations()},
      {"ctCtMults", prediction.ctCtMults, ledger.ctCtMults},
      {"ctCtAdds", prediction.ctCtAdds, ledger.ctCtAdds},
      {"relinearizations", prediction.relins, ledger.relinearizations},
      {"rescales", prediction.rescales, ledger.rescales},
      {"rotationKeys", prediction.rotationKeys, ledger.keysRegistered},
  };
  return r;
}

DbMeta measurementMeta(Engine engine, std::size_t ell, std::size_t n1, std::size_t groups,
                       std::size_t numSlots, int level) {
  if (groups == 0) throw Error(Errc::InvalidArgument, "group count must be positive");
  DbMeta m;
  m.layout = {ell, numSlots, n1, nativeLayout(engine)};
  m.layout.validate();
  m.level = level;
  m.cipherCount = groups;
  if (m.layout.layout == Layout::ReplicatedStride2N) {
    m.groupCount = groups * (m.layout.M() / 2);
    m.vectorCount = m.groupCount * m.layout.N();
  } else {
    m.groupCount = groups;
    m.vectorCount = groups * numSlots;
  }
  if (m.layout.layout == Layout::FlatPreRotated) m.preRotation = PreRotation::PlainAtEnroll;
  return m;
}

SyntheticDiagonals::SyntheticDiagonals(const HeContext& ctx, DbMeta meta, std::uint64_t seed)
    : ctx_(ctx), meta_(meta), seed_(seed) {
  if (meta_.layout.numSlots != ctx_.numSlots()) {
    throw Error(Errc::Configuration, "metadata numSlots differs from the backend");
  }
}

CipherVector SyntheticDiagonals::diagonal(std::size_t cipher, std::size_t k) const {
  if (cipher >= meta_.cipherCount || k >= meta_.layout.ell) {
    throw Error(Errc::InvalidArgument, "diagonal index out of range");
  }
  DatasetRng rng(seed_ ^ (cipher * meta_.layout.ell + k + 1) * 0x9e3779b97f4a7c15ull);
  std::vector<double> slots(meta_.layout.numSlots);
  for (auto& x : slots) x = rng.uniformReal(-1.0, 1.0);
  return ctx_.restore(std::move(slots), meta_.level, 1, false);
}

Measurement measureCosts(const EngineConfig& cfg, std::size_t ell, std::size_t groups,
                         std::size_t numSlots) {
  checkParams(ell, cfg.n1);
  HeContext ctx(SimParams{numSlots, 3});
  const SyntheticDiagonals db(ctx, measurementMeta(cfg.engine, ell, cfg.n1, groups, numSlots, 3));
  DatasetRng rng(7);
  std::vector<double> q(ell);
  for (auto& x : q) x = rng.uniformReal(-1.0, 1.0);
  const CipherVector query = ctx.encrypt(replicateQuery(normalizeL2(q), numSlots));
  ctx.resetLedger();
  const RotationKeyRegistry keys = ctx.generateRotationKeys(diagonalKeySet(cfg.engine, ell, cfg.n1));
  computeSimilarity(ctx, cfg, db, query, keys);
  Measurement m;
  m.scenario = {cfg.engine, ell, cfg.n1, (ell + cfg.n1 - 1) / cfg.n1, groups};
  m.ledger = ctx.ledger();
  return m;
}

}  // namespace encsim
