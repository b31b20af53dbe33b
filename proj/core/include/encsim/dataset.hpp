// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic synthetic databases with planted matches.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace encsim {

// mt19937_64 with fixed integer/real mappings, so sequences depend only on
// the seed and not on the standard library's distribution implementations.
class DatasetRng {
 public:
  explicit DatasetRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform integer in [lo, hi].
  long long uniformInt(long long lo, long long hi);
  // Uniform real in [lo, hi).
  double uniformReal(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

struct SyntheticDataset {
  std::size_t ell = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> vectors;
  std::vector<std::vector<double>> queries;
  // planted[q] lists the database indices that are noisy copies of query q.
  std::vector<std::vector<std::size_t>> planted;

  // Sorted union of all planted indices.
  std::vector<std::size_t> plantedIndices() const;
};

inline constexpr int kComponentRange = 99;
inline constexpr double kPlantNoise = 2.0;

// One query; K vectors with integer components in [-99, 99], of which Km at
// uniformly random positions are the query plus uniform noise in [-2, 2].
SyntheticDataset generateSyntheticDataset(std::size_t K, std::size_t Km, std::size_t ell,
                                          std::uint64_t seed);
// `identities` distinct queries, each planted once at a random position.
SyntheticDataset generateIdentityDataset(std::size_t K, std::size_t identities, std::size_t ell,
                                         std::uint64_t seed);

std::vector<std::vector<double>> normalizeAll(const std::vector<std::vector<double>>& vectors);
// Plain cosine score of every database vector against q (both normalized here).
std::vector<double> plainScores(const std::vector<std::vector<double>>& vectors,
                                const std::vector<double>& q);
// Midpoint between the largest non-match score and the smallest match score;
// with no matches the upper end is 1.
double midpointThreshold(const std::vector<double>& scores,
                         const std::vector<std::size_t>& matches);

// Little-endian binary file with a trailing CRC32.
void saveDataset(const SyntheticDataset& ds, const std::filesystem::path& file);
SyntheticDataset loadDataset(const std::filesystem::path& file);

}  // namespace encsim
