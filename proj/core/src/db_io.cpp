// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/db_io.hpp"

#include <cstring>
#include <vector>

#include "bytes.hpp"
#include "encsim/errors.hpp"

namespace encsim {

namespace fs = std::filesystem;
using detail::ByteReader;
using detail::ByteWriter;
using detail::crcOf;
using detail::readFile;
using detail::writeFile;

namespace {

void checkMagic(ByteReader& r, const char (&magic)[8], const std::string& what) {
  char tag[8];
  r.raw(tag, 8);
  if (std::memcmp(tag, magic, 8) != 0) throw Error(Errc::Checksum, what + ": bad magic");
}

}  // namespace

std::string diagonalFileName(std::size_t k, std::size_t cipher) {
  return "index" + std::to_string(k) + "_group_" + std::to_string(cipher) + ".bin";
}

void writeDbMeta(const DbMeta& meta, const fs::path& dir) {
  ByteWriter block;
  block.u64(meta.layout.ell);
  block.u64(meta.layout.numSlots);
  block.u64(meta.vectorCount);
  block.u64(meta.groupCount);
  block.u64(meta.layout.n1);
  block.u64(meta.cipherCount);
  block.u8(static_cast<std::uint8_t>(meta.layout.layout));
  block.u8(static_cast<std::uint8_t>(meta.preRotation));
  block.u32(static_cast<std::uint32_t>(meta.level));

  ByteWriter w;
  w.raw(kDbMagic, 8);
  w.u32(kDbFormatVersion);
  w.u32(static_cast<std::uint32_t>(block.bytes().size()));
  w.raw(block.bytes().data(), block.bytes().size());
  w.u32(crcOf(block.bytes().data(), block.bytes().size()));
  writeFile(dir / kDbMetaFile, w.bytes());
}

DbMeta readDbMeta(const fs::path& dir) {
  const auto bytes = readFile(dir / kDbMetaFile);
  ByteReader r(bytes, kDbMetaFile);
  checkMagic(r, kDbMagic, kDbMetaFile);
  const std::uint32_t version = r.u32();
  if (version != kDbFormatVersion) {
    throw Error(Errc::Version, "db.meta format version " + std::to_string(version) +
                                   ", expected " + std::to_string(kDbFormatVersion));
  }
  const std::uint32_t length = r.u32();
  const std::size_t start = r.position();
  r.need(length + 4);
  const std::uint32_t expected = crcOf(bytes.data() + start, length);

  DbMeta meta;
  meta.layout.ell = r.u64();
  meta.layout.numSlots = r.u64();
  meta.vectorCount = r.u64();
  meta.groupCount = r.u64();
  meta.layout.n1 = r.u64();
  meta.cipherCount = r.u64();
  const std::uint8_t layout = r.u8();
  const std::uint8_t pre = r.u8();
  meta.level = static_cast<int>(r.u32());
  if (r.position() - start != length) throw Error(Errc::Checksum, "db.meta block length mismatch");
  if (r.u32() != expected) throw Error(Errc::Checksum, "db.meta checksum mismatch");
  if (layout > 2 || pre > 2) throw Error(Errc::Layout, "db.meta has unknown enum codes");
  meta.layout.layout = static_cast<Layout>(layout);
  meta.preRotation = static_cast<PreRotation>(pre);
  meta.layout.validate();
  return meta;
}

void writeCipherFile(const fs::path& file, const CipherVector& ct) {
  const auto slots = ct.rawSlots();
  ByteWriter w;
  w.raw(kCtMagic, 8);
  w.u32(kDbFormatVersion);
  w.u32(static_cast<std::uint32_t>(ct.level()));
  w.u8(static_cast<std::uint8_t>(ct.degree()));
  w.u8(ct.rescalePending() ? 1 : 0);
  w.u64(slots.size());
  for (double v : slots) w.f64(v);
  w.u32(crcOf(w.bytes().data(), w.bytes().size()));
  writeFile(file, w.bytes());
}

CipherVector readCipherFile(const HeContext& ctx, const fs::path& file) {
  const auto bytes = readFile(file);
  const std::string name = file.filename().string();
  ByteReader r(bytes, name);
  checkMagic(r, kCtMagic, name);
  const std::uint32_t version = r.u32();
  if (version != kDbFormatVersion) {
    throw Error(Errc::Version, name + ": format version " + std::to_string(version));
  }
  const int level = static_cast<int>(r.u32());
  const int degree = r.u8();
  const bool pending = r.u8() != 0;
  const std::uint64_t count = r.u64();
  if (count != ctx.numSlots()) {
    throw Error(Errc::Shape, name + ": " + std::to_string(count) + " slots, backend has " +
                                 std::to_string(ctx.numSlots()));
  }
  r.need(count * 8 + 4);
  std::vector<double> slots(count);
  for (auto& v : slots) v = r.f64();
  const std::uint32_t expected = crcOf(bytes.data(), r.position());
  if (r.u32() != expected) throw Error(Errc::Checksum, name + ": checksum mismatch");
  if (r.remaining() != 0) throw Error(Errc::Checksum, name + ": trailing bytes");
  return ctx.restore(std::move(slots), level, degree, pending);
}

std::size_t serializeDb(const PackedDatabase& db, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
  const DbMeta& meta = db.meta();
  writeDbMeta(meta, dir);
  std::size_t files = 0;
  for (std::size_t c = 0; c < meta.cipherCount; ++c) {
    for (std::size_t k = 0; k < meta.layout.ell; ++k) {
      writeCipherFile(dir / diagonalFileName(k, c), db.diagonal(c, k));
      ++files;
    }
  }
  return files;
}

namespace {

void checkCompatible(const HeContext& ctx, const DbMeta& meta) {
  if (meta.layout.numSlots != ctx.numSlots()) {
    throw Error(Errc::Configuration, "database numSlots " + std::to_string(meta.layout.numSlots) +
                                         " differs from backend " + std::to_string(ctx.numSlots()));
  }
  if (meta.level != ctx.maxLevel()) {
    throw Error(Errc::Configuration, "database enrolled at level " + std::to_string(meta.level) +
                                         ", backend maxLevel is " +
                                         std::to_string(ctx.maxLevel()));
  }
}

CipherVector loadDiagonal(const HeContext& ctx, const fs::path& dir, const DbMeta& meta,
                          std::size_t c, std::size_t k) {
  CipherVector ct = readCipherFile(ctx, dir / diagonalFileName(k, c));
  if (ct.level() != meta.level || ct.degree() != 1 || ct.rescalePending()) {
    throw Error(Errc::LevelMismatch, diagonalFileName(k, c) + " is not a fresh ciphertext");
  }
  return ct;
}

}  // namespace

PackedDatabase deserializeDb(const HeContext& ctx, const fs::path& dir) {
  const DbMeta meta = readDbMeta(dir);
  checkCompatible(ctx, meta);
  std::vector<CipherVector> cts;
  cts.reserve(meta.diagonalCount());
  for (std::size_t c = 0; c < meta.cipherCount; ++c) {
    for (std::size_t k = 0; k < meta.layout.ell; ++k) {
      cts.push_back(loadDiagonal(ctx, dir, meta, c, k));
    }
  }
  return PackedDatabase(meta, std::move(cts));
}

DiskDatabase::DiskDatabase(const HeContext& ctx, fs::path dir)
    : ctx_(ctx), dir_(std::move(dir)), meta_(readDbMeta(dir_)) {
  checkCompatible(ctx_, meta_);
}

CipherVector DiskDatabase::diagonal(std::size_t cipher, std::size_t k) const {
  if (cipher >= meta_.cipherCount || k >= meta_.layout.ell) {
    throw Error(Errc::InvalidArgument, "diagonal index out of range");
  }
  return loadDiagonal(ctx_, dir_, meta_, cipher, k);
}

}  // namespace encsim
