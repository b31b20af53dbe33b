// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// On-disk layout of a packed database: a little-endian header file "db.meta"
// followed by one file per (diagonal, ciphertext) named index{k}_group_{c}.bin.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "encsim/packing.hpp"

namespace encsim {

inline constexpr char kDbMagic[8] = {'E', 'N', 'C', 'S', 'I', 'M', 'D', 'B'};
inline constexpr char kCtMagic[8] = {'E', 'N', 'C', 'S', 'I', 'M', 'C', 'T'};
inline constexpr std::uint32_t kDbFormatVersion = 1;
inline constexpr const char* kDbMetaFile = "db.meta";

std::string diagonalFileName(std::size_t k, std::size_t cipher);

void writeDbMeta(const DbMeta& meta, const std::filesystem::path& dir);
DbMeta readDbMeta(const std::filesystem::path& dir);

void writeCipherFile(const std::filesystem::path& file, const CipherVector& ct);
CipherVector readCipherFile(const HeContext& ctx, const std::filesystem::path& file);

// Writes the header and every diagonal; returns the number of diagonal files.
std::size_t serializeDb(const PackedDatabase& db, const std::filesystem::path& dir);
PackedDatabase deserializeDb(const HeContext& ctx, const std::filesystem::path& dir);

// Reads diagonals on demand; nothing is cached.
class DiskDatabase : public DiagonalSource {
 public:
  DiskDatabase(const HeContext& ctx, std::filesystem::path dir);

  const DbMeta& meta() const override { return meta_; }
  CipherVector diagonal(std::size_t cipher, std::size_t k) const override;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  const HeContext& ctx_;
  std::filesystem::path dir_;
  DbMeta meta_;
};

}  // namespace encsim
