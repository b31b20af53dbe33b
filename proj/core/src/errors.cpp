// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/errors.hpp"

namespace encsim {

const char* toString(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::Capacity: return "capacity";
    case Errc::DepthExhausted: return "depth-exhausted";
    case Errc::NothingToRescale: return "nothing-to-rescale";
    case Errc::PendingRescale: return "pending-rescale";
    case Errc::LevelMismatch: return "level-mismatch";
    case Errc::DegreeMismatch: return "degree-mismatch";
    case Errc::MustRelinearize: return "must-relinearize";
    case Errc::MissingRotationKey: return "missing-rotation-key";
    case Errc::Normalization: return "normalization";
    case Errc::Shape: return "shape";
    case Errc::Layout: return "layout";
    case Errc::Checksum: return "checksum";
    case Errc::Version: return "version";
    case Errc::MissingFile: return "missing-file";
    case Errc::Truncated: return "truncated";
    case Errc::Io: return "io";
    case Errc::Domain: return "domain";
    case Errc::UnsupportedDepth: return "unsupported-depth";
    case Errc::EmptyAggregate: return "empty-aggregate";
    case Errc::AmbiguousMatch: return "ambiguous-match";
    case Errc::Configuration: return "configuration";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(toString(code)) + ": " + what), code_(code) {}

MissingRotationKeyError::MissingRotationKeyError(int offset)
    : Error(Errc::MissingRotationKey,
            "no rotation key registered for offset " + std::to_string(offset)),
      offset_(offset) {}

}  // namespace encsim
