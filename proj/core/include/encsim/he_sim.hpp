// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Simulated leveled CKKS backend. Slot values are exact doubles; the backend
// tracks level, ciphertext degree and rescale state, enforces rotation keys,
// and records every homomorphic operation in a CostLedger.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace encsim {

struct SimParams {
  std::size_t numSlots = 1024;
  int maxLevel = 9;
  double noiseStdDev = 0.0;
  std::uint64_t noiseSeed = 0x5eed;

  void validate() const;
};

struct CostLedger {
  std::uint64_t rotationsPlain = 0;
  std::uint64_t rotationsHoisted = 0;
  std::uint64_t hoistDecompositions = 0;
  std::uint64_t hoistAccumulations = 0;
  std::uint64_t ctCtMults = 0;
  std::uint64_t ptCtMults = 0;
  std::uint64_t ctCtAdds = 0;
  std::uint64_t ptCtAdds = 0;
  std::uint64_t rescales = 0;
  std::uint64_t relinearizations = 0;
  std::uint64_t keysRegistered = 0;
  std::uint64_t scalarMults = 0;
  std::uint64_t scalarAdds = 0;
  std::uint64_t encryptions = 0;

  std::uint64_t rotations() const { return rotationsPlain + rotationsHoisted; }

  CostLedger& operator+=(const CostLedger& other);
  friend CostLedger operator+(CostLedger a, const CostLedger& b) { return a += b; }
  // Counter-wise difference; `later` must dominate `earlier`.
  friend CostLedger operator-(const CostLedger& later, const CostLedger& earlier);
  bool operator==(const CostLedger&) const = default;

  template <class F>
  void forEach(F&& f) const {
    f("rotationsPlain", rotationsPlain);
    f("rotationsHoisted", rotationsHoisted);
    f("hoistDecompositions", hoistDecompositions);
    f("hoistAccumulations", hoistAccumulations);
    f("ctCtMults", ctCtMults);
    f("ptCtMults", ptCtMults);
    f("ctCtAdds", ctCtAdds);
    f("ptCtAdds", ptCtAdds);
    f("rescales", rescales);
    f("relinearizations", relinearizations);
    f("keysRegistered", keysRegistered);
    f("scalarMults", scalarMults);
    f("scalarAdds", scalarAdds);
    f("encryptions", encryptions);
  }
};

class PlainVector {
 public:
  PlainVector() = default;
  explicit PlainVector(std::vector<double> slots) : slots_(std::move(slots)) {}

  std::size_t size() const { return slots_.size(); }
  double operator[](std::size_t i) const { return slots_[i]; }
  std::span<const double> slots() const { return slots_; }

 private:
  std::vector<double> slots_;
};

class HeContext;

class CipherVector {
 public:
  CipherVector() = default;

  std::size_t size() const { return data_ ? data_->size() : 0; }
  int level() const { return level_; }
  int degree() const { return degree_; }
  bool rescalePending() const { return rescalePending_; }
  bool empty() const { return !data_; }

  // Raw slot view. Only test oracles and serialization should look here; the
  // protocol path goes through HeContext::decrypt.
  std::span<const double> rawSlots() const;

 private:
  friend class HeContext;

  std::shared_ptr<std::vector<double>> data_;
  int level_ = 0;
  int degree_ = 1;
  bool rescalePending_ = false;
  std::shared_ptr<void> liveToken_;
};

// Canonical signed form of a rotation offset: r mod n in [-n/2, n/2).
int canonicalOffset(long long r, std::size_t numSlots);

class RotationKeyRegistry {
 public:
  static constexpr std::uint64_t kDefaultBytesPerKey = 30ull << 20;

  explicit RotationKeyRegistry(std::size_t numSlots,
                               std::uint64_t bytesPerKey = kDefaultBytesPerKey);

  std::size_t numSlots() const { return numSlots_; }
  std::uint64_t bytesPerKey() const { return bytesPerKey_; }

  // Returns true when a new key was added; offsets equivalent to 0 are ignored.
  bool add(long long r);
  bool remove(long long r);
  bool contains(long long r) const;
  std::size_t size() const { return offsets_.size(); }
  std::uint64_t memoryBytes() const { return bytesPerKey_ * offsets_.size(); }
  const std::set<int>& offsets() const { return offsets_; }

 private:
  std::size_t numSlots_;
  std::uint64_t bytesPerKey_;
  std::set<int> offsets_;
};

class HoistHandle {
 public:
  const CipherVector& source() const { return source_; }
  bool charged() const { return charged_; }

 private:
  friend class HeContext;
  CipherVector source_;
  bool charged_ = false;
};

class HeContext {
 public:
  explicit HeContext(SimParams params);
  ~HeContext();
  HeContext(const HeContext&) = delete;
  HeContext& operator=(const HeContext&) = delete;

  const SimParams& params() const { return params_; }
  std::size_t numSlots() const { return params_.numSlots; }
  int maxLevel() const { return params_.maxLevel; }

  // Values shorter than numSlots are zero-padded; longer inputs are rejected.
  PlainVector encode(std::span<const double> values) const;
  CipherVector encrypt(const PlainVector& pt);
  CipherVector encrypt(std::span<const double> values) { return encrypt(encode(values)); }
  std::vector<double> decrypt(const CipherVector& ct) const;

  // Rebuilds a ciphertext from serialized state; validates shape and level.
  CipherVector restore(std::vector<double> slots, int level, int degree,
                       bool rescalePending) const;

  RotationKeyRegistry generateRotationKeys(const std::set<int>& offsets,
                                           std::uint64_t bytesPerKey =
                                               RotationKeyRegistry::kDefaultBytesPerKey);

  CipherVector add(const CipherVector& a, const CipherVector& b);
  CipherVector add(const CipherVector& a, const PlainVector& b);
  CipherVector sub(const CipherVector& a, const CipherVector& b);
  // acc += x; storage is copied only when shared.
  void addInPlace(CipherVector& acc, const CipherVector& x);

  CipherVector multNoRelin(const CipherVector& a, const CipherVector& b);
  CipherVector multNoRelin(const CipherVector& a, const PlainVector& b);
  // acc += a (x) b without materializing the product. Charged as one ct x ct
  // multiplication plus one addition. An empty acc is initialized with the
  // product (no addition charged).
  void multAccumulate(CipherVector& acc, const CipherVector& a, const CipherVector& b);

  CipherVector multScalar(const CipherVector& a, double s);
  CipherVector addScalar(const CipherVector& a, double s);

  CipherVector relinearize(const CipherVector& a);
  CipherVector rescale(const CipherVector& a);
  std::pair<CipherVector, CipherVector> matchLevel(const CipherVector& a,
                                                   const CipherVector& b) const;
  CipherVector dropToLevel(const CipherVector& a, int level) const;

  CipherVector rotate(const CipherVector& a, long long r, const RotationKeyRegistry& keys);
  HoistHandle hoistPrecompute(const CipherVector& a);
  CipherVector hoistedRotate(const HoistHandle& h, long long r,
                             const RotationKeyRegistry& keys);
  // Rotate-and-add tree over offsets 1, 2, 4, ..., span/2. Slot 0 of the result
  // holds the sum of slots [0, span).
  CipherVector evalSum(const CipherVector& a, std::size_t span,
                       const RotationKeyRegistry& keys);

  CostLedger ledger() const;
  void resetLedger();

  std::size_t liveDegree2() const { return live2_->current.load(); }
  std::size_t peakDegree2() const { return live2_->peak.load(); }
  void resetPeakDegree2() { live2_->peak.store(live2_->current.load()); }

 private:
  struct LiveCounter {
    std::atomic<std::size_t> current{0};
    std::atomic<std::size_t> peak{0};
  };
  struct AtomicLedger;

  CipherVector make(std::vector<double> slots, int level, int degree, bool pending) const;
  void retag(CipherVector& ct, int degree) const;
  void checkSize(const CipherVector& a) const;
  void checkRotationKey(long long r, const RotationKeyRegistry& keys) const;
  std::vector<double> permuted(const CipherVector& a, long long r) const;
  void checkMultOperand(const CipherVector& a) const;
  void addNoise(std::vector<double>& v);
  static std::vector<double>& mutableSlots(CipherVector& ct);

  SimParams params_;
  std::unique_ptr<AtomicLedger> ledger_;
  std::shared_ptr<LiveCounter> live2_;
  std::mutex noiseMutex_;
  std::mt19937_64 noiseRng_;
};

}  // namespace encsim
