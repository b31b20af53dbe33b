// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "bytes.hpp"
#include "encsim/errors.hpp"
#include "encsim/packing.hpp"

namespace encsim {

long long DatasetRng::uniformInt(long long lo, long long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return lo + static_cast<long long>(x % span);
}

double DatasetRng::uniformReal(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::vector<std::size_t> SyntheticDataset::plantedIndices() const {
  std::vector<std::size_t> all;
  for (const auto& p : planted) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

std::vector<double> randomVector(DatasetRng& rng, std::size_t ell) {
  std::vector<double> v(ell);
  do {
    for (auto& x : v) x = static_cast<double>(rng.uniformInt(-kComponentRange, kComponentRange));
  } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
  return v;
}

std::vector<double> noisyCopy(DatasetRng& rng, const std::vector<double>& q) {
  std::vector<double> v(q);
  for (auto& x : v) x += rng.uniformReal(-kPlantNoise, kPlantNoise);
  return v;
}

// First `count` entries of a seeded Fisher-Yates shuffle of [0, K).
std::vector<std::size_t> choosePositions(DatasetRng& rng, std::size_t K, std::size_t count) {
  std::vector<std::size_t> idx(K);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniformInt(static_cast<long long>(i), static_cast<long long>(K - 1)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

SyntheticDataset build(std::size_t K, std::size_t queries, std::size_t perQuery, std::size_t ell,
                       std::uint64_t seed) {
  if (ell == 0) throw Error(Errc::InvalidArgument, "ell must be positive");
  if (queries * perQuery > K) {
    throw Error(Errc::InvalidArgument, "cannot plant " + std::to_string(queries * perQuery) +
                                           " matches in " + std::to_string(K) + " vectors");
  }
  DatasetRng rng(seed);
  SyntheticDataset ds;
  ds.ell = ell;
  ds.seed = seed;
  for (std::size_t q = 0; q < queries; ++q) ds.queries.push_back(randomVector(rng, ell));
  ds.vectors.reserve(K);
  for (std::size_t i = 0; i < K; ++i) ds.vectors.push_back(randomVector(rng, ell));
  const auto positions = choosePositions(rng, K, queries * perQuery);
  ds.planted.resize(queries);
  for (std::size_t q = 0; q < queries; ++q) {
    for (std::size_t m = 0; m < perQuery; ++m) {
      const std::size_t pos = positions[q * perQuery + m];
      ds.vectors[pos] = noisyCopy(rng, ds.queries[q]);
      ds.planted[q].push_back(pos);
    }
    std::sort(ds.planted[q].begin(), ds.planted[q].end());
  }
  return ds;
}

}  // namespace

SyntheticDataset generateSyntheticDataset(std::size_t K, std::size_t Km, std::size_t ell,
                                          std::uint64_t seed) {
  return build(K, 1, Km, ell, seed);
}

SyntheticDataset generateIdentityDataset(std::size_t K, std::size_t identities, std::size_t ell,
                                         std::uint64_t seed) {
  return build(K, identities, 1, ell, seed);
}

std::vector<std::vector<double>> normalizeAll(const std::vector<std::vector<double>>& vectors) {
  std::vector<std::vector<double>> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(normalizeL2(v));
  return out;
}

std::vector<double> plainScores(const std::vector<std::vector<double>>& vectors,
                                const std::vector<double>& q) {
  const auto qn = normalizeL2(q);
  std::vector<double> scores;
  scores.reserve(vectors.size());
  for (const auto& v : vectors) {
    const auto vn = normalizeL2(v);
    double s = 0.0;
    for (std::size_t i = 0; i < vn.size(); ++i) s += vn[i] * qn[i];
    scores.push_back(s);
  }
  return scores;
}

double midpointThreshold(const std::vector<double>& scores,
                         const std::vector<std::size_t>& matches) {
  std::vector<bool> isMatch(scores.size(), false);
  for (std::size_t m : matches) isMatch.at(m) = true;
  double maxNon = -1.0;
  double minMatch = 1.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (isMatch[i]) {
      minMatch = std::min(minMatch, scores[i]);
    } else {
      maxNon = std::max(maxNon, scores[i]);
    }
  }
  if (minMatch <= maxNon) {
    throw Error(Errc::InvalidArgument, "match and non-match scores overlap; no separating threshold");
  }
  return 0.5 * (maxNon + minMatch);
}

namespace {

constexpr char kDatasetMagic[8] = {'E', 'N', 'C', 'S', 'I', 'M', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace

void saveDataset(const SyntheticDataset& ds, const std::filesystem::path& file) {
  detail::ByteWriter w;
  w.raw(kDatasetMagic, 8);
  w.u32(kDatasetVersion);
  w.u64(ds.ell);
  w.u64(ds.seed);
  w.u64(ds.queries.size());
  w.u64(ds.vectors.size());
  for (const auto& q : ds.queries) {
    for (double x : q) w.f64(x);
  }
  for (const auto& v : ds.vectors) {
    for (double x : v) w.f64(x);
  }
  for (const auto& p : ds.planted) {
    w.u64(p.size());
    for (std::size_t i : p) w.u64(i);
  }
  w.u32(detail::crcOf(w.bytes().data(), w.bytes().size()));
  detail::writeFile(file, w.bytes());
}

SyntheticDataset loadDataset(const std::filesystem::path& file) {
  const auto bytes = detail::readFile(file);
  detail::ByteReader r(bytes, file.filename().string());
  char tag[8];
  r.raw(tag, 8);
  if (std::string(tag, 8) != std::string(kDatasetMagic, 8)) {
    throw Error(Errc::Checksum, file.string() + " is not a dataset file");
  }
  if (r.u32() != kDatasetVersion) throw Error(Errc::Version, "unsupported dataset version");
  SyntheticDataset ds;
  ds.ell = r.u64();
  ds.seed = r.u64();
  const std::uint64_t nq = r.u64();
  const std::uint64_t K = r.u64();
  r.need((nq + K) * ds.ell * 8);
  ds.queries.assign(nq, std::vector<double>(ds.ell));
  for (auto& q : ds.queries) {
    for (auto& x : q) x = r.f64();
  }
  ds.vectors.assign(K, std::vector<double>(ds.ell));
  for (auto& v : ds.vectors) {
    for (auto& x : v) x = r.f64();
  }
  ds.planted.resize(nq);
  for (auto& p : ds.planted) {
    const std::uint64_t n = r.u64();
    r.need(n * 8);
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t idx = r.u64();
      if (idx >= K) throw Error(Errc::Shape, "planted index out of range");
      p.push_back(idx);
    }
  }
  const std::uint32_t expected = detail::crcOf(bytes.data(), r.position());
  if (r.u32() != expected) throw Error(Errc::Checksum, file.string() + ": checksum mismatch");
  return ds;
}

}  // namespace encsim
