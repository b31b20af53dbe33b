// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Closed-form operation, rotation and key counts per engine, and their
// reconciliation against measured ledgers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "encsim/eval.hpp"
#include "encsim/he_sim.hpp"
#include "encsim/packing.hpp"

namespace encsim {

// Rotation offsets an engine needs for the similarity step. HyDia needs
// 1..ell-1; BSGS engines need the baby set 1..n1-1 and giants j*n1; the
// block-packed sender needs the babies plus s and s-N for each pre-shift s.
std::set<int> diagonalKeySet(Engine engine, std::size_t ell, std::size_t n1);
// Power-of-two offsets 1, 2, ..., span/2 used by evalSum(span).
std::set<int> evalSumKeys(std::size_t span);
std::set<int> keySetFor(Engine engine, std::size_t ell, std::size_t n1,
                        std::size_t evalSumSpan = 1);

// 1 - |BSGS keys| / |HyDia keys|.
double keyReductionRatio(std::size_t ell, std::size_t n1);

struct CostScenario {
  Engine engine = Engine::BsgsDiagonal;
  std::size_t ell = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  // Score ciphertexts: matrix groups for flat layouts, aggregates for the sender.
  std::size_t groups = 0;
  bool operator==(const CostScenario&) const = default;
};

std::string describe(const CostScenario& s);

struct CostPrediction {
  std::uint64_t rotations = 0;
  std::uint64_t ctCtMults = 0;
  std::uint64_t ctCtAdds = 0;
  std::uint64_t relins = 0;
  std::uint64_t rescales = 0;
  std::uint64_t rotationKeys = 0;
  std::uint64_t keyMemoryBytes = 0;
  CostScenario scenario;
};

CostPrediction predictCosts(Engine engine, std::size_t ell, std::size_t n1, std::size_t groups,
                            std::uint64_t bytesPerKey = RotationKeyRegistry::kDefaultBytesPerKey);

// S = max(2, min(floor(SMs/4), floor(0.2 F / (40 C)), 32)).
std::uint64_t streamPoolSize(std::uint64_t sms, std::uint64_t freeBytes, std::uint64_t ctBytes);

struct ReconcileEntry {
  std::string counter;
  std::uint64_t predicted = 0;
  std::uint64_t measured = 0;
  bool match() const { return predicted == measured; }
  long long delta() const {
    return static_cast<long long>(measured) - static_cast<long long>(predicted);
  }
};

struct ReconcileReport {
  CostScenario scenario;
  std::vector<ReconcileEntry> entries;
  bool ok() const;
};

// `measured` describes the run that produced `ledger`; it must equal the
// prediction's scenario. The ledger should cover key generation plus one
// similarity evaluation.
ReconcileReport reconcile(const CostPrediction& prediction, const CostScenario& measured,
                          const CostLedger& ledger);

// Metadata of a database with `groups` score ciphertexts in the engine's
// native layout, every slot holding a vector.
DbMeta measurementMeta(Engine engine, std::size_t ell, std::size_t n1, std::size_t groups,
                       std::size_t numSlots, int level);

// Seeded random diagonals produced on demand, for count measurements at sizes
// that would not fit in memory as a packed database.
class SyntheticDiagonals : public DiagonalSource {
 public:
  SyntheticDiagonals(const HeContext& ctx, DbMeta meta, std::uint64_t seed = 1);
  const DbMeta& meta() const override { return meta_; }
  CipherVector diagonal(std::size_t cipher, std::size_t k) const override;

 private:
  const HeContext& ctx_;
  DbMeta meta_;
  std::uint64_t seed_;
};

struct Measurement {
  CostScenario scenario;
  // Key generation plus one similarity evaluation.
  CostLedger ledger;
};

Measurement measureCosts(const EngineConfig& cfg, std::size_t ell, std::size_t groups,
                         std::size_t numSlots);

}  // namespace encsim
