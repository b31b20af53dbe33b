// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Diagonal packing of a vector database under three layouts:
//  - FlatConcat: numSlots/ell square matrices side by side per ciphertext.
//  - ReplicatedStride2N: ell-vector groups at stride 2N with zero gaps and a
//    per-diagonal pre-shift for the block-packed BSGS sender.
//  - FlatPreRotated: FlatConcat with diagonal jn1+i rotated by -j*n1 so the
//    grouped BSGS engine can apply giant rotations to accumulated sums.

#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "encsim/he_sim.hpp"

namespace encsim {

enum class Layout : std::uint8_t { FlatConcat = 0, ReplicatedStride2N = 1, FlatPreRotated = 2 };
enum class PreRotation : std::uint8_t { None = 0, PlainAtEnroll = 1, HomomorphicAtLoad = 2 };

const char* toString(Layout layout) noexcept;
const char* toString(PreRotation pre) noexcept;

struct LayoutParams {
  std::size_t ell = 512;
  std::size_t numSlots = 1024;
  std::size_t n1 = 23;
  Layout layout = Layout::FlatConcat;

  std::size_t N() const { return ell < numSlots ? ell : numSlots; }
  std::size_t M() const { return numSlots / N(); }
  std::size_t n2() const { return (ell + n1 - 1) / n1; }
  void validate() const;
  bool operator==(const LayoutParams&) const = default;
};

struct DbMeta {
  LayoutParams layout;
  std::size_t vectorCount = 0;
  // FlatConcat/FlatPreRotated: matrix groups of numSlots/ell squares.
  // ReplicatedStride2N: ell-vector groups.
  std::size_t groupCount = 0;
  // Ciphertexts per diagonal index. Equals groupCount for flat layouts; each
  // replicated ciphertext carries M/2 vector groups.
  std::size_t cipherCount = 0;
  PreRotation preRotation = PreRotation::None;
  int level = 0;

  std::size_t diagonalCount() const { return cipherCount * layout.ell; }
  bool operator==(const DbMeta&) const = default;
};

class DiagonalSource {
 public:
  virtual ~DiagonalSource() = default;
  virtual const DbMeta& meta() const = 0;
  virtual CipherVector diagonal(std::size_t cipher, std::size_t k) const = 0;
};

class PackedDatabase : public DiagonalSource {
 public:
  PackedDatabase() = default;
  PackedDatabase(DbMeta meta, std::vector<CipherVector> diagonals);

  const DbMeta& meta() const override { return meta_; }
  CipherVector diagonal(std::size_t cipher, std::size_t k) const override;
  const std::vector<CipherVector>& diagonals() const { return diagonals_; }

  // Metadata can be relabelled by tooling and negative tests.
  DbMeta& mutableMeta() { return meta_; }

 private:
  DbMeta meta_;
  std::vector<CipherVector> diagonals_;
};

// Plaintext diagonal rows before encryption; rows[c * ell + k].
struct PlainDiagonals {
  DbMeta meta;
  std::vector<std::vector<double>> rows;
};

std::vector<double> normalizeL2(std::span<const double> v);
std::vector<std::vector<double>> extractDiagonals(const std::vector<std::vector<double>>& square);

PlainDiagonals buildFlatDiagonals(const std::vector<std::vector<double>>& db,
                                  const LayoutParams& params);
PlainDiagonals buildReplicatedDiagonals(const std::vector<std::vector<double>>& db,
                                        const LayoutParams& params);
// Rotates row jn1+i by -j*n1 over the full slot vector. The query is
// replicated with period ell, so a global rotation of the accumulated baby
// sum by +j*n1 restores each square's alignment.
void preRotateFlat(PlainDiagonals& diags, std::size_t n1);
std::vector<double> rotateLeft(std::span<const double> v, long long r);

PackedDatabase encryptDiagonals(HeContext& ctx, const PlainDiagonals& diags);

PackedDatabase packFlat(HeContext& ctx, const std::vector<std::vector<double>>& db,
                        const LayoutParams& params);
PackedDatabase packReplicated(HeContext& ctx, const std::vector<std::vector<double>>& db,
                              const LayoutParams& params);
PackedDatabase packFlatPreRotated(HeContext& ctx, const std::vector<std::vector<double>>& db,
                                  const LayoutParams& params);
PackedDatabase pack(HeContext& ctx, const std::vector<std::vector<double>>& db,
                    const LayoutParams& params);

// Load-time alternative to preRotateFlat using rotations by -j*n1.
PackedDatabase preRotateHomomorphic(HeContext& ctx, const PackedDatabase& flat,
                                    const RotationKeyRegistry& keys);
std::set<int> preRotationKeys(std::size_t ell, std::size_t n1);

// Signed giant index and pre-shift of diagonal k in the replicated layout.
long long signedDiagonal(std::size_t k, std::size_t N);
long long giantIndex(long long kSigned, std::size_t n1);
std::size_t preShift(long long j, std::size_t n1, std::size_t N);

// The query replicated into every ell-slot block.
std::vector<double> replicateQuery(std::span<const double> q, std::size_t numSlots);

struct ScoreLocation {
  std::size_t cipher = 0;
  std::size_t slot = 0;
  bool operator==(const ScoreLocation&) const = default;
};

ScoreLocation locateScore(const DbMeta& meta, std::size_t v);
// 1 at slots holding a real database vector's score, 0 elsewhere.
std::vector<double> validSlotMask(const DbMeta& meta, std::size_t cipher);
bool hasInvalidSlots(const DbMeta& meta);

}  // namespace encsim
