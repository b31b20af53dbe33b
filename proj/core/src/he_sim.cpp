// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/he_sim.hpp"

#include <algorithm>
#include <bit>

#include "encsim/errors.hpp"

namespace encsim {

void SimParams::validate() const {
  if (numSlots == 0 || !std::has_single_bit(numSlots)) {
    throw Error(Errc::InvalidArgument, "numSlots must be a power of two");
  }
  if (maxLevel < 1) throw Error(Errc::InvalidArgument, "maxLevel must be at least 1");
  if (!(noiseStdDev >= 0.0)) throw Error(Errc::InvalidArgument, "noiseStdDev must be >= 0");
}

CostLedger& CostLedger::operator+=(const CostLedger& o) {
  rotationsPlain += o.rotationsPlain;
  rotationsHoisted += o.rotationsHoisted;
  hoistDecompositions += o.hoistDecompositions;
  hoistAccumulations += o.hoistAccumulations;
  ctCtMults += o.ctCtMults;
  ptCtMults += o.ptCtMults;
  ctCtAdds += o.ctCtAdds;
  ptCtAdds += o.ptCtAdds;
  rescales += o.rescales;
  relinearizations += o.relinearizations;
  keysRegistered += o.keysRegistered;
  scalarMults += o.scalarMults;
  scalarAdds += o.scalarAdds;
  encryptions += o.encryptions;
  return *this;
}

CostLedger operator-(const CostLedger& a, const CostLedger& b) {
  CostLedger d;
  d.rotationsPlain = a.rotationsPlain - b.rotationsPlain;
  d.rotationsHoisted = a.rotationsHoisted - b.rotationsHoisted;
  d.hoistDecompositions = a.hoistDecompositions - b.hoistDecompositions;
  d.hoistAccumulations = a.hoistAccumulations - b.hoistAccumulations;
  d.ctCtMults = a.ctCtMults - b.ctCtMults;
  d.ptCtMults = a.ptCtMults - b.ptCtMults;
  d.ctCtAdds = a.ctCtAdds - b.ctCtAdds;
  d.ptCtAdds = a.ptCtAdds - b.ptCtAdds;
  d.rescales = a.rescales - b.rescales;
  d.relinearizations = a.relinearizations - b.relinearizations;
  d.keysRegistered = a.keysRegistered - b.keysRegistered;
  d.scalarMults = a.scalarMults - b.scalarMults;
  d.scalarAdds = a.scalarAdds - b.scalarAdds;
  d.encryptions = a.encryptions - b.encryptions;
  return d;
}

std::span<const double> CipherVector::rawSlots() const {
  if (!data_) return {};
  return *data_;
}

int canonicalOffset(long long r, std::size_t numSlots) {
  const long long n = static_cast<long long>(numSlots);
  long long m = ((r % n) + n) % n;
  if (m >= n / 2 && n > 1) m -= n;
  return static_cast<int>(m);
}

RotationKeyRegistry::RotationKeyRegistry(std::size_t numSlots, std::uint64_t bytesPerKey)
    : numSlots_(numSlots), bytesPerKey_(bytesPerKey) {
  if (numSlots == 0 || !std::has_single_bit(numSlots)) {
    throw Error(Errc::InvalidArgument, "numSlots must be a power of two");
  }
  if (bytesPerKey == 0) throw Error(Errc::InvalidArgument, "bytesPerKey must be positive");
}

bool RotationKeyRegistry::add(long long r) {
  const int c = canonicalOffset(r, numSlots_);
  if (c == 0) return false;
  return offsets_.insert(c).second;
}

bool RotationKeyRegistry::remove(long long r) {
  return offsets_.erase(canonicalOffset(r, numSlots_)) > 0;
}

bool RotationKeyRegistry::contains(long long r) const {
  const int c = canonicalOffset(r, numSlots_);
  return c == 0 || offsets_.count(c) > 0;
}

struct HeContext::AtomicLedger {
  std::atomic<std::uint64_t> rotationsPlain{0}, rotationsHoisted{0}, hoistDecompositions{0},
      hoistAccumulations{0}, ctCtMults{0}, ptCtMults{0}, ctCtAdds{0}, ptCtAdds{0}, rescales{0},
      relinearizations{0}, keysRegistered{0}, scalarMults{0}, scalarAdds{0}, encryptions{0};
};

HeContext::HeContext(SimParams params)
    : params_(params),
      ledger_(std::make_unique<AtomicLedger>()),
      live2_(std::make_shared<LiveCounter>()),
      noiseRng_(params.noiseSeed) {
  params_.validate();
}

HeContext::~HeContext() = default;

CipherVector HeContext::make(std::vector<double> slots, int level, int degree,
                             bool pending) const {
  CipherVector ct;
  ct.data_ = std::make_shared<std::vector<double>>(std::move(slots));
  ct.level_ = level;
  ct.rescalePending_ = pending;
  ct.degree_ = 1;
  retag(ct, degree);
  return ct;
}

void HeContext::retag(CipherVector& ct, int degree) const {
  ct.degree_ = degree;
  if (degree != 2) {
    ct.liveToken_.reset();
    return;
  }
  auto counter = live2_;
  const std::size_t now = ++counter->current;
  std::size_t peak = counter->peak.load();
  while (now > peak && !counter->peak.compare_exchange_weak(peak, now)) {
  }
  ct.liveToken_ = std::shared_ptr<void>(nullptr, [counter](void*) { --counter->current; });
}

std::vector<double>& HeContext::mutableSlots(CipherVector& ct) {
  if (ct.data_.use_count() != 1) ct.data_ = std::make_shared<std::vector<double>>(*ct.data_);
  return *ct.data_;
}

void HeContext::checkSize(const CipherVector& a) const {
  if (a.empty() || a.size() != params_.numSlots) {
    throw Error(Errc::InvalidArgument, "ciphertext does not belong to this context");
  }
}

PlainVector HeContext::encode(std::span<const double> values) const {
  if (values.size() > params_.numSlots) {
    throw Error(Errc::Capacity, "encode: " + std::to_string(values.size()) +
                                    " values exceed " + std::to_string(params_.numSlots) +
                                    " slots");
  }
  std::vector<double> slots(params_.numSlots, 0.0);
  std::copy(values.begin(), values.end(), slots.begin());
  return PlainVector(std::move(slots));
}

CipherVector HeContext::encrypt(const PlainVector& pt) {
  if (pt.size() != params_.numSlots) {
    throw Error(Errc::Capacity, "plaintext length does not match numSlots");
  }
  ++ledger_->encryptions;
  return make(std::vector<double>(pt.slots().begin(), pt.slots().end()), params_.maxLevel, 1,
              false);
}

std::vector<double> HeContext::decrypt(const CipherVector& ct) const {
  checkSize(ct);
  if (ct.degree() != 1) throw Error(Errc::MustRelinearize, "decrypt requires a degree-1 ciphertext");
  return *ct.data_;
}

CipherVector HeContext::restore(std::vector<double> slots, int level, int degree,
                                bool rescalePending) const {
  if (slots.size() != params_.numSlots) {
    throw Error(Errc::Shape, "restored ciphertext has " + std::to_string(slots.size()) +
                                 " slots, expected " + std::to_string(params_.numSlots));
  }
  if (level < 0 || level > params_.maxLevel) {
    throw Error(Errc::LevelMismatch, "restored level " + std::to_string(level) +
                                         " outside [0, maxLevel]");
  }
  if (degree != 1 && degree != 2) throw Error(Errc::DegreeMismatch, "degree must be 1 or 2");
  return make(std::move(slots), level, degree, rescalePending);
}

RotationKeyRegistry HeContext::generateRotationKeys(const std::set<int>& offsets,
                                                    std::uint64_t bytesPerKey) {
  RotationKeyRegistry keys(params_.numSlots, bytesPerKey);
  for (int r : offsets) {
    if (keys.add(r)) ++ledger_->keysRegistered;
  }
  return keys;
}

namespace {

void checkAddOperands(const CipherVector& a, const CipherVector& b) {
  if (a.level() != b.level()) {
    throw Error(Errc::LevelMismatch, "add: levels " + std::to_string(a.level()) + " and " +
                                         std::to_string(b.level()));
  }
  if (a.degree() != b.degree()) {
    throw Error(Errc::DegreeMismatch, "add: degrees " + std::to_string(a.degree()) + " and " +
                                          std::to_string(b.degree()));
  }
  if (a.rescalePending() != b.rescalePending()) {
    throw Error(Errc::LevelMismatch, "add: operands differ in pending rescale (scale mismatch)");
  }
}

}  // namespace

CipherVector HeContext::add(const CipherVector& a, const CipherVector& b) {
  checkSize(a);
  checkSize(b);
  checkAddOperands(a, b);
  std::vector<double> out(*a.data_);
  const auto& y = *b.data_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  ++ledger_->ctCtAdds;
  return make(std::move(out), a.level(), a.degree(), a.rescalePending());
}

CipherVector HeContext::add(const CipherVector& a, const PlainVector& b) {
  checkSize(a);
  if (b.size() != params_.numSlots) throw Error(Errc::Capacity, "plaintext length mismatch");
  std::vector<double> out(*a.data_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  ++ledger_->ptCtAdds;
  return make(std::move(out), a.level(), a.degree(), a.rescalePending());
}

CipherVector HeContext::sub(const CipherVector& a, const CipherVector& b) {
  checkSize(a);
  checkSize(b);
  checkAddOperands(a, b);
  std::vector<double> out(*a.data_);
  const auto& y = *b.data_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  ++ledger_->ctCtAdds;
  return make(std::move(out), a.level(), a.degree(), a.rescalePending());
}

void HeContext::addInPlace(CipherVector& acc, const CipherVector& x) {
  checkSize(acc);
  checkSize(x);
  checkAddOperands(acc, x);
  auto& out = mutableSlots(acc);
  const auto& y = *x.data_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  ++ledger_->ctCtAdds;
}

void HeContext::checkMultOperand(const CipherVector& a) const {
  checkSize(a);
  if (a.rescalePending()) {
    throw Error(Errc::PendingRescale, "multiplication operand has a pending rescale");
  }
  if (a.degree() != 1) throw Error(Errc::MustRelinearize, "multiplication operand has degree 2");
  if (a.level() < 1) throw Error(Errc::DepthExhausted, "multiplication at level 0");
}

void HeContext::addNoise(std::vector<double>& v) {
  if (params_.noiseStdDev <= 0.0) return;
  std::normal_distribution<double> dist(0.0, params_.noiseStdDev);
  std::lock_guard lock(noiseMutex_);
  for (double& x : v) x += dist(noiseRng_);
}

CipherVector HeContext::multNoRelin(const CipherVector& a, const CipherVector& b) {
  checkMultOperand(a);
  checkMultOperand(b);
  if (a.level() != b.level()) {
    throw Error(Errc::LevelMismatch, "mult: levels " + std::to_string(a.level()) + " and " +
                                         std::to_string(b.level()));
  }
  std::vector<double> out(*a.data_);
  const auto& y = *b.data_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  addNoise(out);
  ++ledger_->ctCtMults;
  return make(std::move(out), a.level(), 2, true);
}

CipherVector HeContext::multNoRelin(const CipherVector& a, const PlainVector& b) {
  checkMultOperand(a);
  if (b.size() != params_.numSlots) throw Error(Errc::Capacity, "plaintext length mismatch");
  std::vector<double> out(*a.data_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  ++ledger_->ptCtMults;
  return make(std::move(out), a.level(), 1, true);
}

void HeContext::multAccumulate(CipherVector& acc, const CipherVector& a, const CipherVector& b) {
  checkMultOperand(a);
  checkMultOperand(b);
  if (a.level() != b.level()) {
    throw Error(Errc::LevelMismatch, "mult: levels " + std::to_string(a.level()) + " and " +
                                         std::to_string(b.level()));
  }
  const auto& x = *a.data_;
  const auto& y = *b.data_;
  const bool noisy = params_.noiseStdDev > 0.0;
  if (acc.empty()) {
    std::vector<double> out(x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
    if (noisy) addNoise(out);
    ++ledger_->ctCtMults;
    acc = make(std::move(out), a.level(), 2, true);
    return;
  }
  checkSize(acc);
  if (acc.level() != a.level() || !acc.rescalePending() || acc.degree() != 2) {
    throw Error(Errc::LevelMismatch, "accumulator does not match the product it absorbs");
  }
  auto& out = mutableSlots(acc);
  if (noisy) {
    std::vector<double> prod(x);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= y[i];
    addNoise(prod);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += prod[i];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double p = x[i] * y[i];
      out[i] += p;
    }
  }
  ++ledger_->ctCtMults;
  ++ledger_->ctCtAdds;
}

CipherVector HeContext::multScalar(const CipherVector& a, double s) {
  checkSize(a);
  std::vector<double> out(*a.data_);
  for (double& v : out) v *= s;
  ++ledger_->scalarMults;
  return make(std::move(out), a.level(), a.degree(), a.rescalePending());
}

CipherVector HeContext::addScalar(const CipherVector& a, double s) {
  checkSize(a);
  std::vector<double> out(*a.data_);
  for (double& v : out) v += s;
  ++ledger_->scalarAdds;
  return make(std::move(out), a.level(), a.degree(), a.rescalePending());
}

CipherVector HeContext::relinearize(const CipherVector& a) {
  checkSize(a);
  if (a.degree() == 1) return a;
  ++ledger_->relinearizations;
  CipherVector out = a;
  retag(out, 1);
  return out;
}

CipherVector HeContext::rescale(const CipherVector& a) {
  checkSize(a);
  if (!a.rescalePending()) throw Error(Errc::NothingToRescale, "no pending rescale");
  if (a.level() < 1) throw Error(Errc::DepthExhausted, "rescale at level 0");
  ++ledger_->rescales;
  CipherVector out = a;
  out.level_ = a.level() - 1;
  out.rescalePending_ = false;
  return out;
}

std::pair<CipherVector, CipherVector> HeContext::matchLevel(const CipherVector& a,
                                                            const CipherVector& b) const {
  checkSize(a);
  checkSize(b);
  if (a.rescalePending() || b.rescalePending()) {
    throw Error(Errc::PendingRescale, "matchLevel on an operand with a pending rescale");
  }
  const int level = std::min(a.level(), b.level());
  return {dropToLevel(a, level), dropToLevel(b, level)};
}

CipherVector HeContext::dropToLevel(const CipherVector& a, int level) const {
  checkSize(a);
  if (level > a.level() || level < 0) {
    throw Error(Errc::LevelMismatch, "cannot raise level " + std::to_string(a.level()) + " to " +
                                         std::to_string(level));
  }
  if (a.rescalePending() && level != a.level()) {
    throw Error(Errc::PendingRescale, "cannot drop level with a pending rescale");
  }
  CipherVector out = a;
  out.level_ = level;
  return out;
}

void HeContext::checkRotationKey(long long r, const RotationKeyRegistry& keys) const {
  if (keys.numSlots() != params_.numSlots) {
    throw Error(Errc::Configuration, "rotation keys were generated for a different numSlots");
  }
  if (!keys.contains(r)) throw MissingRotationKeyError(canonicalOffset(r, params_.numSlots));
}

std::vector<double> HeContext::permuted(const CipherVector& a, long long r) const {
  const auto& x = *a.data_;
  const std::size_t n = x.size();
  const std::size_t s = static_cast<std::size_t>(((r % static_cast<long long>(n)) +
                                                  static_cast<long long>(n)) %
                                                 static_cast<long long>(n));
  std::vector<double> out(n);
  std::rotate_copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(s), x.end(), out.begin());
  return out;
}

CipherVector HeContext::rotate(const CipherVector& a, long long r,
                               const RotationKeyRegistry& keys) {
  checkSize(a);
  if (a.degree() != 1) throw Error(Errc::DegreeMismatch, "rotate requires a degree-1 ciphertext");
  if (canonicalOffset(r, params_.numSlots) == 0) return a;
  checkRotationKey(r, keys);
  ++ledger_->rotationsPlain;
  return make(permuted(a, r), a.level(), 1, a.rescalePending());
}

HoistHandle HeContext::hoistPrecompute(const CipherVector& a) {
  checkSize(a);
  if (a.degree() != 1) throw Error(Errc::DegreeMismatch, "hoisting requires a degree-1 ciphertext");
  HoistHandle h;
  h.source_ = a;
  h.charged_ = true;
  ++ledger_->hoistDecompositions;
  return h;
}

CipherVector HeContext::hoistedRotate(const HoistHandle& h, long long r,
                                      const RotationKeyRegistry& keys) {
  const CipherVector& a = h.source();
  checkSize(a);
  if (canonicalOffset(r, params_.numSlots) == 0) return a;
  checkRotationKey(r, keys);
  ++ledger_->rotationsHoisted;
  ++ledger_->hoistAccumulations;
  return make(permuted(a, r), a.level(), 1, a.rescalePending());
}

CipherVector HeContext::evalSum(const CipherVector& a, std::size_t span,
                                const RotationKeyRegistry& keys) {
  if (span == 0 || !std::has_single_bit(span) || span > params_.numSlots) {
    throw Error(Errc::InvalidArgument, "evalSum span must be a power of two <= numSlots");
  }
  CipherVector acc = a;
  for (std::size_t s = 1; s < span; s *= 2) {
    acc = add(acc, rotate(acc, static_cast<long long>(s), keys));
  }
  return acc;
}

CostLedger HeContext::ledger() const {
  CostLedger l;
  const auto& a = *ledger_;
  l.rotationsPlain = a.rotationsPlain.load();
  l.rotationsHoisted = a.rotationsHoisted.load();
  l.hoistDecompositions = a.hoistDecompositions.load();
  l.hoistAccumulations = a.hoistAccumulations.load();
  l.ctCtMults = a.ctCtMults.load();
  l.ptCtMults = a.ptCtMults.load();
  l.ctCtAdds = a.ctCtAdds.load();
  l.ptCtAdds = a.ptCtAdds.load();
  l.rescales = a.rescales.load();
  l.relinearizations = a.relinearizations.load();
  l.keysRegistered = a.keysRegistered.load();
  l.scalarMults = a.scalarMults.load();
  l.scalarAdds = a.scalarAdds.load();
  l.encryptions = a.encryptions.load();
  return l;
}

void HeContext::resetLedger() {
  auto& a = *ledger_;
  for (auto* c : {&a.rotationsPlain, &a.rotationsHoisted, &a.hoistDecompositions,
                  &a.hoistAccumulations, &a.ctCtMults, &a.ptCtMults, &a.ctCtAdds, &a.ptCtAdds,
                  &a.rescales, &a.relinearizations, &a.keysRegistered, &a.scalarMults,
                  &a.scalarAdds, &a.encryptions}) {
    c->store(0);
  }
}

}  // namespace encsim
