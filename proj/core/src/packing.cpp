// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/packing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "encsim/errors.hpp"

namespace encsim {

const char* toString(Layout layout) noexcept {
  switch (layout) {
    case Layout::FlatConcat: return "flat";
    case Layout::ReplicatedStride2N: return "replicated";
    case Layout::FlatPreRotated: return "flat-prerotated";
  }
  return "unknown";
}

const char* toString(PreRotation pre) noexcept {
  switch (pre) {
    case PreRotation::None: return "none";
    case PreRotation::PlainAtEnroll: return "plain-at-enroll";
    case PreRotation::HomomorphicAtLoad: return "homomorphic-at-load";
  }
  return "unknown";
}

void LayoutParams::validate() const {
  if (ell == 0 || !std::has_single_bit(ell)) throw Error(Errc::Layout, "ell must be a power of two");
  if (numSlots == 0 || !std::has_single_bit(numSlots)) {
    throw Error(Errc::Layout, "numSlots must be a power of two");
  }
  if (ell > numSlots) {
    throw Error(Errc::Layout, "ell " + std::to_string(ell) + " exceeds numSlots " +
                                  std::to_string(numSlots));
  }
  if (n1 < 1 || n1 > ell) throw Error(Errc::Layout, "n1 must lie in [1, ell]");
  if (layout == Layout::ReplicatedStride2N && M() % 2 != 0) {
    throw Error(Errc::Layout, "replicated layout needs an even block count M, got " +
                                  std::to_string(M()));
  }
}

PackedDatabase::PackedDatabase(DbMeta meta, std::vector<CipherVector> diagonals)
    : meta_(meta), diagonals_(std::move(diagonals)) {
  if (diagonals_.size() != meta_.diagonalCount()) {
    throw Error(Errc::Shape, "diagonal count does not match metadata");
  }
}

CipherVector PackedDatabase::diagonal(std::size_t cipher, std::size_t k) const {
  if (cipher >= meta_.cipherCount || k >= meta_.layout.ell) {
    throw Error(Errc::InvalidArgument, "diagonal (" + std::to_string(cipher) + ", " +
                                           std::to_string(k) + ") out of range");
  }
  return diagonals_[cipher * meta_.layout.ell + k];
}

std::vector<double> normalizeL2(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw Error(Errc::Normalization, "cannot normalize a zero or non-finite vector");
  }
  const double norm = std::sqrt(sq);
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

std::vector<std::vector<double>> extractDiagonals(const std::vector<std::vector<double>>& square) {
  const std::size_t n = square.size();
  for (const auto& row : square) {
    if (row.size() != n) throw Error(Errc::Shape, "extractDiagonals needs a square matrix");
  }
  std::vector<std::vector<double>> diags(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) diags[k][j] = square[j][(j + k) % n];
  }
  return diags;
}

namespace {

void checkDatabase(const std::vector<std::vector<double>>& db, std::size_t ell) {
  if (db.empty()) throw Error(Errc::InvalidArgument, "database is empty");
  for (const auto& v : db) {
    if (v.size() != ell) {
      throw Error(Errc::Shape, "database vector of length " + std::to_string(v.size()) +
                                   ", expected " + std::to_string(ell));
    }
  }
}

double entry(const std::vector<std::vector<double>>& db, std::size_t v, std::size_t col) {
  return v < db.size() ? db[v][col] : 0.0;
}

std::size_t ceilDiv(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

PlainDiagonals buildFlatDiagonals(const std::vector<std::vector<double>>& db,
                                  const LayoutParams& params) {
  LayoutParams p = params;
  p.layout = Layout::FlatConcat;
  p.validate();
  checkDatabase(db, p.ell);
  const std::size_t ell = p.ell;
  const std::size_t squares = p.numSlots / ell;

  PlainDiagonals out;
  out.meta.layout = p;
  out.meta.vectorCount = db.size();
  out.meta.groupCount = ceilDiv(db.size(), p.numSlots);
  out.meta.cipherCount = out.meta.groupCount;
  out.rows.assign(out.meta.diagonalCount(), std::vector<double>(p.numSlots, 0.0));
  for (std::size_t m = 0; m < out.meta.groupCount; ++m) {
    for (std::size_t i = 0; i < ell; ++i) {
      auto& row = out.rows[m * ell + i];
      for (std::size_t b = 0; b < squares; ++b) {
        const std::size_t s = m * squares + b;
        for (std::size_t j = 0; j < ell; ++j) {
          row[b * ell + j] = entry(db, s * ell + j, (j + i) % ell);
        }
      }
    }
  }
  return out;
}

long long signedDiagonal(std::size_t k, std::size_t N) {
  const auto ks = static_cast<long long>(k);
  return ks < static_cast<long long>(N / 2) ? ks : ks - static_cast<long long>(N);
}

long long giantIndex(long long kSigned, std::size_t n1) {
  const auto d = static_cast<long long>(n1);
  long long q = kSigned / d;
  if (kSigned % d != 0 && kSigned < 0) --q;
  return q;
}

std::size_t preShift(long long j, std::size_t n1, std::size_t N) {
  const auto n = static_cast<long long>(N);
  return static_cast<std::size_t>(((static_cast<long long>(n1) * j) % n + n) % n);
}

PlainDiagonals buildReplicatedDiagonals(const std::vector<std::vector<double>>& db,
                                        const LayoutParams& params) {
  LayoutParams p = params;
  p.layout = Layout::ReplicatedStride2N;
  p.validate();
  checkDatabase(db, p.ell);
  const std::size_t N = p.N();
  const std::size_t half = p.M() / 2;

  PlainDiagonals out;
  out.meta.layout = p;
  out.meta.vectorCount = db.size();
  out.meta.groupCount = ceilDiv(db.size(), N);
  out.meta.cipherCount = ceilDiv(out.meta.groupCount, half);
  out.rows.assign(out.meta.diagonalCount(), std::vector<double>(p.numSlots, 0.0));
  for (std::size_t c = 0; c < out.meta.cipherCount; ++c) {
    for (std::size_t k = 0; k < N; ++k) {
      const std::size_t shift = preShift(giantIndex(signedDiagonal(k, N), p.n1), p.n1, N);
      auto& row = out.rows[c * N + k];
      for (std::size_t b = 0; b < half; ++b) {
        const std::size_t g = c * half + b;
        if (g >= out.meta.groupCount) break;
        for (std::size_t t = 0; t < N; ++t) {
          const std::size_t j = (t + N - shift) % N;
          row[b * 2 * N + t] = entry(db, g * N + j, (j + k) % N);
        }
      }
    }
  }
  return out;
}

std::vector<double> rotateLeft(std::span<const double> v, long long r) {
  const auto n = static_cast<long long>(v.size());
  std::vector<double> out(v.size());
  if (n == 0) return out;
  const auto s = static_cast<std::ptrdiff_t>(((r % n) + n) % n);
  std::rotate_copy(v.begin(), v.begin() + s, v.end(), out.begin());
  return out;
}

void preRotateFlat(PlainDiagonals& diags, std::size_t n1) {
  if (diags.meta.layout.layout != Layout::FlatConcat || diags.meta.preRotation != PreRotation::None) {
    throw Error(Errc::Layout, "pre-rotation expects unrotated flat diagonals");
  }
  LayoutParams p = diags.meta.layout;
  p.n1 = n1;
  p.layout = Layout::FlatPreRotated;
  p.validate();
  for (std::size_t c = 0; c < diags.meta.cipherCount; ++c) {
    for (std::size_t k = 0; k < p.ell; ++k) {
      const std::size_t j = k / n1;
      if (j == 0) continue;
      auto& row = diags.rows[c * p.ell + k];
      row = rotateLeft(row, -static_cast<long long>(j * n1));
    }
  }
  diags.meta.layout = p;
  diags.meta.preRotation = PreRotation::PlainAtEnroll;
}

PackedDatabase encryptDiagonals(HeContext& ctx, const PlainDiagonals& diags) {
  if (diags.meta.layout.numSlots != ctx.numSlots()) {
    throw Error(Errc::Configuration, "layout numSlots differs from the backend's");
  }
  DbMeta meta = diags.meta;
  meta.level = ctx.maxLevel();
  std::vector<CipherVector> cts;
  cts.reserve(diags.rows.size());
  for (const auto& row : diags.rows) cts.push_back(ctx.encrypt(row));
  return PackedDatabase(meta, std::move(cts));
}

PackedDatabase packFlat(HeContext& ctx, const std::vector<std::vector<double>>& db,
                        const LayoutParams& params) {
  return encryptDiagonals(ctx, buildFlatDiagonals(db, params));
}

PackedDatabase packReplicated(HeContext& ctx, const std::vector<std::vector<double>>& db,
                              const LayoutParams& params) {
  return encryptDiagonals(ctx, buildReplicatedDiagonals(db, params));
}

PackedDatabase packFlatPreRotated(HeContext& ctx, const std::vector<std::vector<double>>& db,
                                  const LayoutParams& params) {
  auto diags = buildFlatDiagonals(db, params);
  preRotateFlat(diags, params.n1);
  return encryptDiagonals(ctx, diags);
}

PackedDatabase pack(HeContext& ctx, const std::vector<std::vector<double>>& db,
                    const LayoutParams& params) {
  switch (params.layout) {
    case Layout::FlatConcat: return packFlat(ctx, db, params);
    case Layout::ReplicatedStride2N: return packReplicated(ctx, db, params);
    case Layout::FlatPreRotated: return packFlatPreRotated(ctx, db, params);
  }
  throw Error(Errc::Layout, "unknown layout");
}

std::set<int> preRotationKeys(std::size_t ell, std::size_t n1) {
  std::set<int> keys;
  const std::size_t n2 = (ell + n1 - 1) / n1;
  for (std::size_t j = 1; j < n2; ++j) keys.insert(-static_cast<int>(j * n1));
  return keys;
}

PackedDatabase preRotateHomomorphic(HeContext& ctx, const PackedDatabase& flat,
                                    const RotationKeyRegistry& keys) {
  const DbMeta& in = flat.meta();
  if (in.layout.layout != Layout::FlatConcat || in.preRotation != PreRotation::None) {
    throw Error(Errc::Layout, "pre-rotation expects unrotated flat diagonals");
  }
  DbMeta meta = in;
  meta.layout.layout = Layout::FlatPreRotated;
  meta.preRotation = PreRotation::HomomorphicAtLoad;
  const std::size_t ell = in.layout.ell;
  const std::size_t n1 = in.layout.n1;
  std::vector<CipherVector> cts;
  cts.reserve(flat.diagonals().size());
  for (std::size_t c = 0; c < in.cipherCount; ++c) {
    for (std::size_t k = 0; k < ell; ++k) {
      const long long shift = static_cast<long long>((k / n1) * n1);
      cts.push_back(ctx.rotate(flat.diagonal(c, k), -shift, keys));
    }
  }
  return PackedDatabase(meta, std::move(cts));
}

std::vector<double> replicateQuery(std::span<const double> q, std::size_t numSlots) {
  if (q.empty() || numSlots % q.size() != 0) {
    throw Error(Errc::Shape, "query length must divide numSlots");
  }
  std::vector<double> out(numSlots);
  for (std::size_t t = 0; t < numSlots; ++t) out[t] = q[t % q.size()];
  return out;
}

ScoreLocation locateScore(const DbMeta& meta, std::size_t v) {
  if (v >= meta.vectorCount) {
    throw Error(Errc::InvalidArgument, "vector index " + std::to_string(v) + " out of range");
  }
  const LayoutParams& p = meta.layout;
  if (p.layout == Layout::ReplicatedStride2N) {
    const std::size_t N = p.N();
    const std::size_t half = p.M() / 2;
    const std::size_t g = v / N;
    return {g / half, (g % half) * 2 * N + v % N};
  }
  return {v / p.numSlots, v % p.numSlots};
}

std::vector<double> validSlotMask(const DbMeta& meta, std::size_t cipher) {
  if (cipher >= meta.cipherCount) throw Error(Errc::InvalidArgument, "cipher index out of range");
  const LayoutParams& p = meta.layout;
  std::vector<double> mask(p.numSlots, 0.0);
  const std::size_t perCipher =
      p.layout == Layout::ReplicatedStride2N ? (p.M() / 2) * p.N() : p.numSlots;
  const std::size_t first = cipher * perCipher;
  const std::size_t last = std::min(meta.vectorCount, first + perCipher);
  for (std::size_t v = first; v < last; ++v) mask[locateScore(meta, v).slot] = 1.0;
  return mask;
}

bool hasInvalidSlots(const DbMeta& meta) {
  if (meta.layout.layout == Layout::ReplicatedStride2N) return true;
  return meta.vectorCount % meta.layout.numSlots != 0;
}

}  // namespace encsim
