// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks 1-13. Prints one PASS/FAIL line per check and exits
// nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "encsim/compare.hpp"
#include "encsim/costs.hpp"
#include "encsim/dataset.hpp"
#include "encsim/errors.hpp"
#include "encsim/eval.hpp"
#include "encsim/he_sim.hpp"
#include "encsim/packing.hpp"
#include "encsim/scenarios.hpp"

namespace encsim {
namespace {

// Pinned tolerances and limits.
constexpr double kScoreRelTol = 1e-9;
constexpr double kClenshawTol = 1e-9;
constexpr double kDecisionErrorLimit = 0.5;
constexpr double kNegativeControlGap = 1e-6;
constexpr double kKeyCountSeconds = 1.0;
constexpr double kRotationTableSeconds = 60.0;
constexpr std::uint64_t kMultBudget = 1'000'000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool relClose(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(dot / std::sqrt(na * nb));
}

std::vector<std::vector<double>> randomVectors(std::mt19937_64& rng, std::size_t K,
                                               std::size_t ell) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> out(K, std::vector<double>(ell));
  for (auto& v : out) {
    for (auto& x : v) x = u(rng);
  }
  return out;
}

double seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome keyCounts() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t hydia = keySetFor(Engine::HyDia, 512, 23).size();
  const std::size_t bsgs = keySetFor(Engine::BsgsDiagonal, 512, 23).size();
  const double ratio = static_cast<double>(bsgs) / static_cast<double>(hydia);
  const double t = seconds(t0);
  return {hydia == 511 && bsgs == 44 && t < kKeyCountSeconds,
          fmt("HyDia %zu keys, BSGS %zu keys, ratio %zu/%zu = %.4f (reduction %.4f), %.3f s", hydia,
              bsgs, bsgs, hydia, ratio, keyReductionRatio(512, 23), t)};
}

Outcome rotationTable() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t kEll = 512;
  constexpr std::size_t kN1 = 23;
  constexpr std::size_t kSlots = 1024;
  bool ok = true;
  std::uint64_t mults = 0;
  std::ostringstream d;
  d << "grouped rotations";
  for (std::size_t G : {1, 4, 16, 32, 64}) {
    const Measurement m = measureCosts(EngineConfig{Engine::GroupedBsgs, kN1, 1, 0}, kEll, G, kSlots);
    const std::uint64_t want = (kN1 - 1) + G * (23 - 1);
    ok = ok && m.ledger.rotations() == want;
    mults += m.ledger.ctCtMults;
    d << " G=" << G << ":" << m.ledger.rotations() << "/" << want;
  }
  const Measurement table = measureCosts(EngineConfig{Engine::BsgsDiagonal, kN1, 1, 0}, kEll, 1, kSlots);
  mults += table.ledger.ctCtMults;
  ok = ok && table.ledger.rotations() == kEll - 1;
  const double t = seconds(t0);
  ok = ok && mults < kMultBudget && t < kRotationTableSeconds;
  d << "; BSGS-Diagonal table " << table.ledger.rotations() << "/" << kEll - 1 << "; mults "
    << mults << "; " << fmt("%.2f s", t);
  return {ok, d.str()};
}

Outcome engineEquivalence() {
  std::mt19937_64 rng(2026);
  std::size_t checked = 0;
  std::size_t bad = 0;
  std::size_t bitwise = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t ell = std::size_t{4} << (inst % 3);
    const std::size_t numSlots = 64;
    const std::size_t K = 1 + rng() % 64;
    const std::size_t n1 = 1 + rng() % ell;
    const auto db = randomVectors(rng, K, ell);
    const auto q = randomVectors(rng, 1, ell).front();
    std::vector<double> oracle;
    for (const auto& v : db) oracle.push_back(cosine(v, q));
    std::vector<std::vector<double>> normalized;
    for (const auto& v : db) normalized.push_back(normalizeL2(v));

    std::vector<std::vector<double>> hydiaSlots;
    for (Engine e : {Engine::HyDia, Engine::BsgsDiagonal, Engine::GroupedBsgs,
                     Engine::SenderBlockPacked}) {
      HeContext ctx(SimParams{numSlots, 4});
      const PackedDatabase packed = pack(ctx, normalized, {ell, numSlots, n1, nativeLayout(e)});
      const RotationKeyRegistry keys = ctx.generateRotationKeys(diagonalKeySet(e, ell, n1));
      const CipherVector ct = ctx.encrypt(replicateQuery(normalizeL2(q), numSlots));
      const ScoreSet s = computeSimilarity(ctx, EngineConfig{e, n1, 1, 0}, packed, ct, keys);
      const auto got = s.decryptScores(ctx);
      for (std::size_t v = 0; v < K; ++v) {
        ++checked;
        worst = std::max(worst, std::abs(got[v] - oracle[v]) / std::max(1.0, std::abs(oracle[v])));
        if (!relClose(got[v], oracle[v], kScoreRelTol)) ++bad;
      }
      std::vector<std::vector<double>> slots;
      for (const auto& c : s.perGroup) slots.push_back(ctx.decrypt(c));
      if (e == Engine::HyDia) hydiaSlots = slots;
      if (e == Engine::BsgsDiagonal && slots == hydiaSlots) ++bitwise;
    }
  }
  return {bad == 0 && bitwise == 50,
          fmt("50 instances, %zu scores vs cosine oracle, %zu outside %.0e (worst %.2e); "
              "HyDia == BSGS-Diagonal(W=1) bitwise in %zu/50",
              checked, bad, kScoreRelTol, worst, bitwise)};
}

Outcome operationCounts() {
  bool ok = true;
  std::ostringstream d;
  for (Engine e : {Engine::HyDia, Engine::BsgsDiagonal}) {
    d << toString(e) << ":";
    for (std::size_t G : {1, 4, 16, 32, 64}) {
      const Measurement m = measureCosts(EngineConfig{e, 23, 1, 0}, 512, G, 1024);
      const bool hit = m.ledger.ctCtMults == G * 512 && m.ledger.ctCtAdds == G * 511 &&
                       m.ledger.relinearizations == G;
      ok = ok && hit;
      d << " G=" << G << (hit ? "" : "(mismatch)") << " (" << m.ledger.ctCtMults << ","
        << m.ledger.ctCtAdds << "," << m.ledger.relinearizations << ")";
    }
    d << "; ";
  }
  return {ok, d.str() + "expected (G*512, G*511, G)"};
}

Outcome preRotation() {
  constexpr std::size_t kEll = 16;
  constexpr std::size_t kN1 = 4;
  constexpr std::size_t kSlots = 32;
  std::mt19937_64 rng(5);
  const auto raw = randomVectors(rng, 32, kEll);
  std::vector<std::vector<double>> db;
  for (const auto& v : raw) db.push_back(normalizeL2(v));
  const auto q = normalizeL2(randomVectors(rng, 1, kEll).front());

  HeContext ctx(SimParams{kSlots, 4});
  std::set<int> all;
  for (int r = 1; r < static_cast<int>(kEll); ++r) all.insert(r);
  const RotationKeyRegistry keys = ctx.generateRotationKeys(all);
  const PackedDatabase flat = packFlat(ctx, db, {kEll, kSlots, kN1, Layout::FlatConcat});
  const PackedDatabase rotated =
      packFlatPreRotated(ctx, db, {kEll, kSlots, kN1, Layout::FlatPreRotated});
  const CipherVector ct = ctx.encrypt(replicateQuery(q, kSlots));

  std::size_t exact = 0;
  std::size_t controlMismatch = 0;
  std::size_t terms = 0;
  for (std::size_t j = 0; j < kEll / kN1; ++j) {
    for (std::size_t i = 0; i < kN1; ++i) {
      const std::size_t k = j * kN1 + i;
      const auto ref = ctx.decrypt(ctx.rescale(ctx.multNoRelin(
          ctx.rotate(ct, static_cast<long long>(k), keys), ctx.encode(ctx.decrypt(flat.diagonal(0, k))))));
      const CipherVector baby = ctx.rotate(ct, static_cast<long long>(i), keys);
      auto giant = [&](const PackedDatabase& src) {
        const CipherVector term = ctx.rescale(ctx.relinearize(ctx.multNoRelin(baby, src.diagonal(0, k))));
        return ctx.decrypt(ctx.rotate(term, static_cast<long long>(j * kN1), keys));
      };
      ++terms;
      if (giant(rotated) == ref) ++exact;
      if (j > 0 && giant(flat) != ref) ++controlMismatch;
    }
  }

  // Whole-engine negative control: unrotated diagonals labelled as pre-rotated.
  const RotationKeyRegistry bsgsKeys =
      ctx.generateRotationKeys(diagonalKeySet(Engine::GroupedBsgs, kEll, kN1));
  PackedDatabase mislabelled = packFlat(ctx, db, {kEll, kSlots, kN1, Layout::FlatConcat});
  mislabelled.mutableMeta().preRotation = PreRotation::PlainAtEnroll;
  mislabelled.mutableMeta().layout.layout = Layout::FlatPreRotated;
  const BsgsParams p = BsgsParams::make(kEll, kN1);
  const auto good = groupedBsgsSimilarity(ctx, rotated, ct, p, bsgsKeys).decryptScores(ctx);
  const auto wrong = groupedBsgsSimilarity(ctx, mislabelled, ct, p, bsgsKeys).decryptScores(ctx);
  double goodErr = 0.0;
  double wrongGap = 0.0;
  for (std::size_t v = 0; v < db.size(); ++v) {
    const double want = cosine(raw[v], q);
    goodErr = std::max(goodErr, std::abs(good[v] - want));
    wrongGap = std::max(wrongGap, std::abs(wrong[v] - want));
  }
  const std::size_t giantTerms = terms - kN1;
  const bool ok = exact == terms && controlMismatch == giantTerms &&
                  goodErr <= kScoreRelTol && wrongGap > kNegativeControlGap;
  return {ok, fmt("%zu/%zu (j,i) terms exact; unrotated control differs in %zu/%zu giant terms; "
                  "grouped scores max err %.2e, mislabelled max err %.2e",
                  exact, terms, controlMismatch, giantTerms, goodErr, wrongGap)};
}

Outcome rotateWithinBlocks() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t cases = 0;
  std::size_t good = 0;
  for (std::size_t N : {4, 8}) {
    const std::size_t slots = 8 * N;
    HeContext ctx(SimParams{slots, 2});
    std::vector<double> x(slots, 0.0);
    for (std::size_t b = 0; b < slots / N; b += 2) {
      for (std::size_t t = 0; t < N; ++t) x[b * N + t] = u(rng);
    }
    const CipherVector ct = ctx.encrypt(x);
    for (std::size_t s = 0; s < N; ++s) {
      ++cases;
      std::set<int> offs;
      if (s != 0) offs = {static_cast<int>(s), static_cast<int>(s) - static_cast<int>(N)};
      const RotationKeyRegistry keys = ctx.generateRotationKeys(offs);
      ctx.resetLedger();
      const auto r = ctx.decrypt(rotateWithinBlock(ctx, ct, s, N, keys));
      const CostLedger l = ctx.ledger();
      bool ok = s == 0 ? (l.rotations() == 0 && l.ctCtAdds == 0)
                       : (l.rotations() == 2 && l.ctCtAdds == 1);
      for (std::size_t b = 0; b < slots / N; b += 2) {
        for (std::size_t t = 0; t < N; ++t) ok = ok && r[b * N + t] == x[b * N + (t + s) % N];
      }
      if (ok) ++good;
    }
  }
  return {good == cases, fmt("%zu/%zu (N, s) cases shift every data block cyclically with "
                             "2 rotations + 1 add (0 for s = 0)", good, cases)};
}

Outcome psSplitAndDepth() {
  const auto split = psSplit(13);
  const ChebyshevComparator cmp = ChebyshevComparator::make(8, 0.3);
  HeContext ctx(SimParams{1024, 9});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = u(rng);
  const CipherVector ct = ctx.encrypt(xs);
  const int used = ct.level() - evalChebPS(ctx, ct, cmp).level();

  std::size_t bad = 0;
  double worst = 0.0;
  for (int n : {5, 13, 27}) {
    HeContext big(SimParams{1024, 10});
    const auto c = fitSignCoefficients(0.3, n);
    const auto [d1, d2] = psSplit(n);
    const auto got = big.decrypt(evalChebPS(big, big.encrypt(xs), c, d1, d2));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double want = clenshawOracle(xs[i], c);
      worst = std::max(worst, std::abs(got[i] - want));
      if (!relClose(got[i], want, kClenshawTol)) ++bad;
    }
  }
  const bool ok = split == std::make_pair(2, 4) && used <= 7 && used == cmp.levelsRequired() && bad == 0;
  return {ok, fmt("psSplit(13) = (%d, %d); degree-13 evaluation used %d levels (limit 7); "
                  "3000 PS outputs vs Clenshaw: %zu outside %.0e (worst %.2e)",
                  split.first, split.second, used, bad, kClenshawTol, worst)};
}

Outcome depthBudget() {
  constexpr std::size_t kEll = 16;
  constexpr std::size_t kSlots = 64;
  HeContext ctx(SimParams{kSlots, 9});
  const SyntheticDataset ds = generateSyntheticDataset(256, 3, kEll, 8);
  const PackedDatabase db =
      pack(ctx, normalizeAll(ds.vectors), {kEll, kSlots, 4, Layout::FlatConcat});
  const RotationKeyRegistry keys =
      ctx.generateRotationKeys(keySetFor(Engine::BsgsDiagonal, kEll, 4, kSlots));
  const double tau = midpointThreshold(plainScores(ds.vectors, ds.queries[0]), ds.planted[0]);
  const ChebyshevComparator cmp = ChebyshevComparator::make(8, tau);
  try {
    const MembershipResult m =
        membershipQuery(ctx, db, buildSingleQuery(ctx, ds.queries[0]),
                        EngineConfig{Engine::BsgsDiagonal, 4, 1, 0}, cmp, keys);
    return {m.cipher.level() >= 0,
            fmt("maxLevel 9, kappa 8 (degree %d, %d levels): completed with final level %d, "
                "count %lld (planted 3)",
                cmp.degree, cmp.levelsRequired(), m.cipher.level(), m.decodedCount)};
  } catch (const Error& e) {
    return {false, std::string("query failed: ") + e.what()};
  }
}

Outcome scenarioCorrectness() {
  constexpr std::size_t kEll = 16;
  constexpr std::size_t kSlots = 1024;
  constexpr std::size_t kK = 1024;
  std::size_t passed = 0;
  double worst = 0.0;
  const std::size_t plants[] = {0, 1, 3};
  for (std::uint64_t run = 0; run < 20; ++run) {
    const std::size_t Km = plants[run % 3];
    const SyntheticDataset ds = generateSyntheticDataset(kK, Km, kEll, 1000 + run);
    HeContext ctx(SimParams{kSlots, 12});
    const PackedDatabase db =
        pack(ctx, normalizeAll(ds.vectors), {kEll, kSlots, 4, Layout::FlatConcat});
    const RotationKeyRegistry keys =
        ctx.generateRotationKeys(keySetFor(Engine::BsgsDiagonal, kEll, 4, kSlots));
    const auto scores = plainScores(ds.vectors, ds.queries[0]);
    const ChebyshevComparator cmp =
        ChebyshevComparator::make(10, midpointThreshold(scores, ds.planted[0]));
    const EngineConfig ec{Engine::BsgsDiagonal, 4, 1, 0};
    const MembershipResult m =
        membershipQuery(ctx, db, buildSingleQuery(ctx, ds.queries[0]), ec, cmp, keys);
    const IndexResult x = indexQuery(ctx, db, buildSingleQuery(ctx, ds.queries[0]), ec, cmp, keys);
    double err = 0.0;
    for (std::size_t v = 0; v < kK; ++v) {
      const bool truth = std::binary_search(ds.planted[0].begin(), ds.planted[0].end(), v);
      err = std::max(err, std::abs(x.indicators[v] - (truth ? 1.0 : 0.0)));
    }
    worst = std::max(worst, err);
    if (m.decodedCount == static_cast<long long>(Km) && x.matchedIndices == ds.planted[0] &&
        err < kDecisionErrorLimit) {
      ++passed;
    }
  }
  return {passed == 20, fmt("%zu/20 runs (K = 1024, Km in {0, 1, 3}) with exact count and index set; "
                            "max per-slot comparator error %.4f (limit %.1f)",
                            passed, worst, kDecisionErrorLimit)};
}

Outcome orderedIdCheck() {
  constexpr std::size_t kEll = 512;
  constexpr std::size_t kGamma = 4;
  constexpr std::size_t kN1 = 8;
  const SyntheticDataset ds = generateIdentityDataset(256, kGamma * kGamma, kEll, 10);
  HeContext ctx(SimParams{kEll, 12});
  const PackedDatabase db = pack(ctx, normalizeAll(ds.vectors), {kEll, kEll, kN1, Layout::FlatConcat});
  const RotationKeyRegistry keys =
      ctx.generateRotationKeys(keySetFor(Engine::BsgsDiagonal, kEll, kN1));
  std::vector<double> flat;
  std::vector<std::size_t> matches;
  for (std::size_t e = 0; e < kGamma * kGamma; ++e) {
    const auto s = plainScores(ds.vectors, ds.queries[e]);
    flat.insert(flat.end(), s.begin(), s.end());
    matches.push_back(e * ds.vectors.size() + ds.planted[e][0]);
  }
  const ChebyshevComparator cmp = ChebyshevComparator::make(10, midpointThreshold(flat, matches));
  try {
    const OrderedIdResult r = orderedIdentification(
        ctx, ds.queries, kGamma, db, EngineConfig{Engine::BsgsDiagonal, kN1, 1, 0}, cmp, keys);
    std::size_t correct = 0;
    for (std::size_t e = 0; e < kGamma * kGamma; ++e) {
      const auto it = r.assignment.find(e);
      if (it != r.assignment.end() && it->second == ds.planted[e][0]) ++correct;
    }
    return {correct == kGamma * kGamma && r.serverQueries == 2 * kGamma,
            fmt("gamma 4, K 256: %zu/16 identities assigned correctly using %zu index queries",
                correct, r.serverQueries)};
  } catch (const Error& e) {
    return {false, std::string("identification failed: ") + e.what()};
  }
}

Outcome onlineAggregation() {
  constexpr std::size_t kEll = 8;
  constexpr std::size_t kSlots = 16;
  constexpr std::size_t kN1 = 3;
  constexpr std::size_t kG = 4;
  const SyntheticDataset ds = generateSyntheticDataset(kG * kSlots, 2, kEll, 11);
  const auto normalized = normalizeAll(ds.vectors);
  HeContext ctx(SimParams{kSlots, 12});
  const PackedDatabase db = pack(ctx, normalized, {kEll, kSlots, kN1, Layout::FlatConcat});
  const RotationKeyRegistry keys =
      ctx.generateRotationKeys(keySetFor(Engine::BsgsDiagonal, kEll, kN1, kSlots));
  const double tau = midpointThreshold(plainScores(ds.vectors, ds.queries[0]), ds.planted[0]);
  const ChebyshevComparator cmp = ChebyshevComparator::make(10, tau);

  const QueryBundle oq = buildOnlineAggregationQuery(ctx, ds.queries[0], kG);
  const MembershipResult online = onlineAggregatedMembership(ctx, db, oq, cmp, keys, kN1);
  const MembershipResult base = membershipQuery(ctx, db, buildSingleQuery(ctx, ds.queries[0]),
                                                EngineConfig{Engine::BsgsDiagonal, kN1, 1, 0},
                                                cmp, keys);
  const bool counts = online.costs.similarity.ctCtMults == kEll &&
                      online.costs.merge.ctCtAdds == kEll * (kG - 1) && online.comparisons == 1 &&
                      base.costs.similarity.ctCtMults == kEll * kG && base.comparisons == kG;

  // Merged scores computed the same way the online path does, against a plain
  // per-slot sum of cosine scores.
  const RotationTable table =
      buildRotationTable(ctx, oq.cipher, BsgsParams::make(kEll, kN1), keys);
  std::vector<CipherVector> merged;
  for (std::size_t i = 0; i < kEll; ++i) {
    CipherVector d = db.diagonal(0, i);
    for (std::size_t g = 1; g < kG; ++g) d = ctx.add(d, db.diagonal(g, i));
    merged.push_back(d);
  }
  DbMeta mm = db.meta();
  mm.cipherCount = mm.groupCount = 1;
  mm.vectorCount = kSlots;
  const auto scaled = ctx.decrypt(
      bsgsDiagonalSimilarity(ctx, PackedDatabase(mm, merged), table, 1).perGroup.front());
  std::vector<double> plainSum(kSlots, 0.0);
  for (std::size_t v = 0; v < ds.vectors.size(); ++v) {
    plainSum[locateScore(db.meta(), v).slot] += cosine(ds.vectors[v], ds.queries[0]);
  }
  std::size_t agree = 0;
  std::size_t total = 0;
  for (int t = 0; t <= 200; ++t) {
    const double level = -static_cast<double>(kG) + 2.0 * kG * t / 200.0;
    for (std::size_t s = 0; s < kSlots; ++s) {
      if (std::abs(plainSum[s] - level) < 1e-9) continue;
      ++total;
      if ((scaled[s] >= level / oq.scaleFactor) == (plainSum[s] >= level)) ++agree;
    }
  }
  return {counts && agree == total,
          fmt("online: %llu mults, %llu merge adds, %zu comparison; baseline: %llu mults, %zu "
              "comparisons; threshold invariance %zu/%zu slot-threshold pairs",
              static_cast<unsigned long long>(online.costs.similarity.ctCtMults),
              static_cast<unsigned long long>(online.costs.merge.ctCtAdds), online.comparisons,
              static_cast<unsigned long long>(base.costs.similarity.ctCtMults), base.comparisons,
              agree, total)};
}

std::uint64_t streamFormula(std::uint64_t sms, std::uint64_t freeBytes, std::uint64_t ctBytes) {
  const long double memory = std::floor(0.2L * freeBytes / (40.0L * ctBytes));
  const long double s = std::min({std::floor(sms / 4.0L), memory, 32.0L});
  return static_cast<std::uint64_t>(std::max(2.0L, s));
}

Outcome streamPool() {
  constexpr std::uint64_t kGiB = 1ull << 30;
  constexpr std::uint64_t kMiB = 1ull << 20;
  const std::uint64_t top = streamPoolSize(132, 80 * kGiB, kMiB);
  const std::uint64_t low = streamPoolSize(4, 80 * kGiB, kMiB);
  std::size_t agree = 0;
  const std::uint64_t sms[] = {1, 4, 8, 9, 27, 64, 108, 128, 132, 1024};
  const std::uint64_t mem[] = {kMiB, 100 * kMiB, 400 * kMiB, 1000 * kMiB, 2 * kGiB,
                               5 * kGiB, 6 * kGiB + 1, 16 * kGiB, 40 * kGiB, 80 * kGiB};
  for (std::uint64_t s : sms) {
    for (std::uint64_t m : mem) agree += streamPoolSize(s, m, kMiB) == streamFormula(s, m, kMiB);
  }
  return {top == 32 && low == 2 && agree == 100,
          fmt("132 SMs with 80 GiB gives %llu; 4 SMs gives %llu; grid agreement %zu/100",
              static_cast<unsigned long long>(top), static_cast<unsigned long long>(low), agree)};
}

Outcome keyEnforcement() {
  constexpr std::size_t kEll = 16;
  constexpr std::size_t kN1 = 4;
  constexpr std::size_t kSlots = 64;
  std::mt19937_64 rng(13);
  const auto raw = randomVectors(rng, 32, kEll);
  std::vector<std::vector<double>> db;
  for (const auto& v : raw) db.push_back(normalizeL2(v));
  const auto q = normalizeL2(randomVectors(rng, 1, kEll).front());
  std::size_t cases = 0;
  std::size_t named = 0;
  for (Engine e : {Engine::HyDia, Engine::BsgsDiagonal, Engine::GroupedBsgs,
                   Engine::SenderBlockPacked}) {
    HeContext ctx(SimParams{kSlots, 4});
    const PackedDatabase packed = pack(ctx, db, {kEll, kSlots, kN1, nativeLayout(e)});
    const CipherVector ct = ctx.encrypt(replicateQuery(q, kSlots));
    const auto required = diagonalKeySet(e, kEll, kN1);
    for (int r : required) {
      ++cases;
      auto reduced = required;
      reduced.erase(r);
      const RotationKeyRegistry keys = ctx.generateRotationKeys(reduced);
      try {
        computeSimilarity(ctx, EngineConfig{e, kN1, 1, 0}, packed, ct, keys);
      } catch (const MissingRotationKeyError& err) {
        const std::string what = err.what();
        if (err.code() == Errc::MissingRotationKey && err.offset() == canonicalOffset(r, kSlots) &&
            what.find(std::to_string(canonicalOffset(r, kSlots))) != std::string::npos) {
          ++named;
        }
      }
    }
  }
  // The membership sum needs every power-of-two offset below numSlots.
  HeContext ctx(SimParams{kSlots, 4});
  const CipherVector ct = ctx.encrypt(std::vector<double>(kSlots, 1.0));
  for (int r : evalSumKeys(kSlots)) {
    ++cases;
    auto reduced = evalSumKeys(kSlots);
    reduced.erase(r);
    try {
      ctx.evalSum(ct, kSlots, ctx.generateRotationKeys(reduced));
    } catch (const MissingRotationKeyError& err) {
      if (err.offset() == canonicalOffset(r, kSlots)) ++named;
    }
  }
  return {named == cases, fmt("%zu/%zu single-offset removals failed with missing-rotation-key "
                              "naming the removed offset", named, cases)};
}

}  // namespace
}  // namespace encsim

int main() {
  using encsim::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"key-count reproduction", encsim::keyCounts},
      {"rotation-count table", encsim::rotationTable},
      {"engine equivalence", encsim::engineEquivalence},
      {"operation-count closed forms", encsim::operationCounts},
      {"pre-rotation identity", encsim::preRotation},
      {"rotate within block", encsim::rotateWithinBlocks},
      {"PS split and depth", encsim::psSplitAndDepth},
      {"depth-budget feasibility", encsim::depthBudget},
      {"scenario correctness", encsim::scenarioCorrectness},
      {"ordered identification", encsim::orderedIdCheck},
      {"online aggregation costs", encsim::onlineAggregation},
      {"stream-pool formula", encsim::streamPool},
      {"key enforcement", encsim::keyEnforcement},
  };
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("unexpected exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%2zu %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", checks[i].first,
                o.detail.c_str());
  }
  std::printf("%d/%zu checks passed\n", static_cast<int>(checks.size()) - failures, checks.size());
  return failures == 0 ? 0 : 1;
}
