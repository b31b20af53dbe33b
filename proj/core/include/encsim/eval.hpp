// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Encrypted similarity engines over packed diagonals.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "encsim/he_sim.hpp"
#include "encsim/packing.hpp"

namespace encsim {

enum class Engine { HyDia, BsgsDiagonal, GroupedBsgs, SenderBlockPacked };

const char* toString(Engine engine) noexcept;
Engine parseEngine(std::string_view name);
// Layout each engine consumes natively.
Layout nativeLayout(Engine engine) noexcept;

enum class HoistMode { SingleHoist, DoubleHoist };

struct BsgsParams {
  std::size_t ell = 0;
  std::size_t n1 = 1;
  std::size_t n2 = 0;
  // Signed giant indices for the block-packed sender; empty means the full
  // range covering k_signed in [-N/2, N/2).
  std::vector<long long> giantSteps;

  static BsgsParams make(std::size_t ell, std::size_t n1);
};

std::vector<long long> senderGiantSteps(std::size_t N, std::size_t n1);

struct RotationTable {
  std::vector<CipherVector> entries;
  HoistMode builtWith = HoistMode::DoubleHoist;
};

struct ScoreSet {
  std::vector<CipherVector> perGroup;
  DbMeta meta;

  // Score of every database vector, in vector order.
  std::vector<double> decryptScores(const HeContext& ctx) const;
};

// SingleHoist: ell-1 hoisted rotations of the query (keys 1..ell-1).
// DoubleHoist: n1-1 baby rotations, then one hoist handle per baby entry and
// giant-offset rotations b1*n1 (keys S_baby and S_giant).
RotationTable buildRotationTable(HeContext& ctx, const CipherVector& query,
                                 const BsgsParams& params, const RotationKeyRegistry& keys,
                                 HoistMode mode = HoistMode::DoubleHoist);

ScoreSet hydiaSimilarity(HeContext& ctx, const DiagonalSource& db, const RotationTable& table);

// Splits each group's ell products across `workers` running accumulators and
// merges them with a fixed pairwise tree. One worker reproduces
// hydiaSimilarity bit for bit.
ScoreSet bsgsDiagonalSimilarity(HeContext& ctx, const DiagonalSource& db,
                                const RotationTable& table, std::size_t workers);

ScoreSet groupedBsgsSimilarity(HeContext& ctx, const DiagonalSource& db,
                               const CipherVector& query, const BsgsParams& params,
                               const RotationKeyRegistry& keys);

// Rot_s(x) + Rot_{s-N}(x): a cyclic left shift by s inside every data block
// of a stride-2N layout whose gap blocks are zero.
CipherVector rotateWithinBlock(HeContext& ctx, const CipherVector& x, std::size_t s,
                               std::size_t N, const RotationKeyRegistry& keys);

// chunk = 0 selects n1.
ScoreSet senderBsgsBlockPacked(HeContext& ctx, const DiagonalSource& db,
                               const CipherVector& query, const BsgsParams& params,
                               const RotationKeyRegistry& keys, std::size_t chunk = 0);

struct EngineConfig {
  Engine engine = Engine::BsgsDiagonal;
  std::size_t n1 = 23;
  std::size_t workers = 1;
  std::size_t chunk = 0;
};

// Runs the configured engine end to end from an encrypted, replicated query.
ScoreSet computeSimilarity(HeContext& ctx, const EngineConfig& cfg, const DiagonalSource& db,
                           const CipherVector& query, const RotationKeyRegistry& keys);

}  // namespace encsim
