// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace encsim {

enum class Errc {
  InvalidArgument,
  Capacity,
  DepthExhausted,
  NothingToRescale,
  PendingRescale,
  LevelMismatch,
  DegreeMismatch,
  MustRelinearize,
  MissingRotationKey,
  Normalization,
  Shape,
  Layout,
  Checksum,
  Version,
  MissingFile,
  Truncated,
  Io,
  Domain,
  UnsupportedDepth,
  EmptyAggregate,
  AmbiguousMatch,
  Configuration,
};

const char* toString(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class MissingRotationKeyError : public Error {
 public:
  explicit MissingRotationKeyError(int offset);
  int offset() const noexcept { return offset_; }

 private:
  int offset_;
};

}  // namespace encsim
