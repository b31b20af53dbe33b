// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "encsim/errors.hpp"

namespace encsim {

double aggregateScaleFactor(std::size_t gamma, std::size_t ell) {
  if (gamma == 0) throw Error(Errc::EmptyAggregate, "aggregate of zero embeddings");
  return 1.0 + static_cast<double>(gamma - 1) / std::sqrt(static_cast<double>(ell));
}

double onlineScaleFactor(std::size_t groups, std::size_t ell) {
  if (groups == 0) throw Error(Errc::InvalidArgument, "group count must be positive");
  return 1.0 + static_cast<double>(groups - 1) * 2.0 / std::sqrt(static_cast<double>(ell));
}

QueryBundle buildSingleQuery(HeContext& ctx, std::span<const double> q) {
  QueryBundle b;
  b.cipher = ctx.encrypt(replicateQuery(normalizeL2(q), ctx.numSlots()));
  return b;
}

QueryBundle buildAggregateQuery(HeContext& ctx,
                                const std::vector<std::vector<double>>& embeddings) {
  if (embeddings.empty()) throw Error(Errc::EmptyAggregate, "aggregate of zero embeddings");
  const std::size_t ell = embeddings.front().size();
  std::vector<double> sum(ell, 0.0);
  for (const auto& e : embeddings) {
    if (e.size() != ell) throw Error(Errc::Shape, "embeddings differ in length");
    const auto n = normalizeL2(e);
    for (std::size_t i = 0; i < ell; ++i) sum[i] += n[i];
  }
  const double f = aggregateScaleFactor(embeddings.size(), ell);
  for (auto& x : sum) x /= f;
  QueryBundle b;
  b.cipher = ctx.encrypt(replicateQuery(sum, ctx.numSlots()));
  b.kind = embeddings.size() == 1 ? QueryKind::Single : QueryKind::Aggregated;
  b.gamma = embeddings.size();
  b.scaleFactor = f;
  return b;
}

QueryBundle buildOnlineAggregationQuery(HeContext& ctx, std::span<const double> q,
                                        std::size_t groups) {
  auto n = normalizeL2(q);
  const double f = onlineScaleFactor(groups, n.size());
  for (auto& x : n) x /= f;
  QueryBundle b;
  b.cipher = ctx.encrypt(replicateQuery(n, ctx.numSlots()));
  b.kind = QueryKind::OnlineAggregated;
  b.scaleFactor = f;
  return b;
}

namespace {

ChebyshevComparator scaledComparator(const ChebyshevComparator& cmp, const QueryBundle& q) {
  if (q.scaleFactor == 1.0) return cmp;
  return cmp.withThreshold(cmp.threshold / q.scaleFactor);
}

// Compare every score ciphertext; optionally zero the slots that do not hold
// a database vector (padding, stride gaps).
std::vector<CipherVector> compareGroups(HeContext& ctx, const ScoreSet& scores,
                                        const ChebyshevComparator& cmp, bool mask) {
  std::vector<CipherVector> out;
  out.reserve(scores.perGroup.size());
  for (std::size_t c = 0; c < scores.perGroup.size(); ++c) {
    CipherVector r = evalChebPS(ctx, scores.perGroup[c], cmp);
    if (mask) {
      r = ctx.rescale(ctx.multNoRelin(r, ctx.encode(validSlotMask(scores.meta, c))));
    }
    out.push_back(std::move(r));
  }
  return out;
}

MembershipResult aggregateCount(HeContext& ctx, const std::vector<CipherVector>& flags,
                                const RotationKeyRegistry& keys) {
  MembershipResult res;
  CipherVector total = flags.front();
  for (std::size_t c = 1; c < flags.size(); ++c) {
    auto [a, b] = ctx.matchLevel(total, flags[c]);
    total = ctx.add(a, b);
  }
  res.cipher = ctx.evalSum(total, ctx.numSlots(), keys);
  res.slot0 = ctx.decrypt(res.cipher)[0];
  res.decodedCount = std::max(0LL, std::llround(res.slot0));
  res.member = res.decodedCount > 0;
  return res;
}

}  // namespace

MembershipResult membershipQuery(HeContext& ctx, const DiagonalSource& db,
                                 const QueryBundle& query, const EngineConfig& engine,
                                 const ChebyshevComparator& cmp, const RotationKeyRegistry& keys) {
  const CostLedger l0 = ctx.ledger();
  const ScoreSet scores = computeSimilarity(ctx, engine, db, query.cipher, keys);
  const CostLedger l1 = ctx.ledger();
  const auto flags =
      compareGroups(ctx, scores, scaledComparator(cmp, query), hasInvalidSlots(db.meta()));
  const CostLedger l2 = ctx.ledger();
  MembershipResult res = aggregateCount(ctx, flags, keys);
  const CostLedger l3 = ctx.ledger();
  res.comparisons = flags.size();
  res.costs.similarity = l1 - l0;
  res.costs.compare = l2 - l1;
  res.costs.aggregate = l3 - l2;
  return res;
}

IndexResult indexQuery(HeContext& ctx, const DiagonalSource& db, const QueryBundle& query,
                       const EngineConfig& engine, const ChebyshevComparator& cmp,
                       const RotationKeyRegistry& keys) {
  const CostLedger l0 = ctx.ledger();
  const ScoreSet scores = computeSimilarity(ctx, engine, db, query.cipher, keys);
  const CostLedger l1 = ctx.ledger();
  const ChebyshevComparator c = scaledComparator(cmp, query);
  const auto flags = compareGroups(ctx, scores, c, false);
  const CostLedger l2 = ctx.ledger();

  IndexResult res;
  res.comparisons = flags.size();
  for (const auto& f : flags) res.perGroup.push_back(ctx.decrypt(f));
  const DbMeta& meta = db.meta();
  res.indicators.resize(meta.vectorCount);
  for (std::size_t v = 0; v < meta.vectorCount; ++v) {
    const ScoreLocation loc = locateScore(meta, v);
    res.indicators[v] = res.perGroup.at(loc.cipher)[loc.slot];
    if (res.indicators[v] >= c.decisionLevel()) res.matchedIndices.push_back(v);
  }
  res.costs.similarity = l1 - l0;
  res.costs.compare = l2 - l1;
  return res;
}

OrderedIdResult orderedIdentification(HeContext& ctx,
                                      const std::vector<std::vector<double>>& embeddings,
                                      std::size_t gamma, const DiagonalSource& db,
                                      const EngineConfig& engine, const ChebyshevComparator& cmp,
                                      const RotationKeyRegistry& keys) {
  if (gamma < 2) throw Error(Errc::InvalidArgument, "ordered identification needs gamma >= 2");
  if (embeddings.size() != gamma * gamma) {
    throw Error(Errc::Shape, "expected gamma^2 = " + std::to_string(gamma * gamma) +
                                 " embeddings, got " + std::to_string(embeddings.size()));
  }
  const std::size_t K = db.meta().vectorCount;
  std::vector<std::vector<std::size_t>> rowsOf(K);
  std::vector<std::vector<std::size_t>> colsOf(K);
  OrderedIdResult res;
  for (std::size_t block = 0; block < 2 * gamma; ++block) {
    std::vector<std::vector<double>> members;
    for (std::size_t t = 0; t < gamma; ++t) {
      const std::size_t e = block < gamma ? block * gamma + t : t * gamma + (block - gamma);
      members.push_back(embeddings[e]);
    }
    const QueryBundle q = buildAggregateQuery(ctx, members);
    const IndexResult r = indexQuery(ctx, db, q, engine, cmp, keys);
    ++res.serverQueries;
    res.costs.similarity += r.costs.similarity;
    res.costs.compare += r.costs.compare;
    for (std::size_t k : r.matchedIndices) {
      (block < gamma ? rowsOf[k] : colsOf[k]).push_back(block < gamma ? block : block - gamma);
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (rowsOf[k].empty() && colsOf[k].empty()) continue;
    if (rowsOf[k].size() != 1 || colsOf[k].size() != 1) {
      throw Error(Errc::AmbiguousMatch,
                  "database index " + std::to_string(k) + " matched " +
                      std::to_string(rowsOf[k].size()) + " row and " +
                      std::to_string(colsOf[k].size()) + " column aggregates");
    }
    res.assignment[rowsOf[k][0] * gamma + colsOf[k][0]] = k;
  }
  return res;
}

MembershipResult onlineAggregatedMembership(HeContext& ctx, const DiagonalSource& db,
                                            const QueryBundle& query,
                                            const ChebyshevComparator& cmp,
                                            const RotationKeyRegistry& keys, std::size_t n1,
                                            std::size_t workers) {
  const DbMeta& meta = db.meta();
  if (meta.layout.layout != Layout::FlatConcat || meta.preRotation != PreRotation::None) {
    throw Error(Errc::Layout, "online aggregation needs unrotated flat diagonals");
  }
  const std::size_t ell = meta.layout.ell;
  const CostLedger l0 = ctx.ledger();
  const RotationTable table =
      buildRotationTable(ctx, query.cipher, BsgsParams::make(ell, n1), keys, HoistMode::DoubleHoist);
  const CostLedger l1 = ctx.ledger();

  std::vector<CipherVector> merged;
  merged.reserve(ell);
  for (std::size_t i = 0; i < ell; ++i) {
    CipherVector d = db.diagonal(0, i);
    for (std::size_t g = 1; g < meta.cipherCount; ++g) ctx.addInPlace(d, db.diagonal(g, i));
    merged.push_back(std::move(d));
  }
  DbMeta mergedMeta = meta;
  mergedMeta.cipherCount = 1;
  mergedMeta.groupCount = 1;
  mergedMeta.vectorCount = std::min(meta.vectorCount, meta.layout.numSlots);
  const PackedDatabase mergedDb(mergedMeta, std::move(merged));
  const CostLedger l2 = ctx.ledger();

  const ScoreSet scores = bsgsDiagonalSimilarity(ctx, mergedDb, table, workers);
  const CostLedger l3 = ctx.ledger();
  const auto flags =
      compareGroups(ctx, scores, scaledComparator(cmp, query), hasInvalidSlots(mergedMeta));
  const CostLedger l4 = ctx.ledger();
  MembershipResult res = aggregateCount(ctx, flags, keys);
  const CostLedger l5 = ctx.ledger();
  res.comparisons = flags.size();
  res.costs.similarity = (l1 - l0) + (l3 - l2);
  res.costs.merge = l2 - l1;
  res.costs.compare = l4 - l3;
  res.costs.aggregate = l5 - l4;
  return res;
}

}  // namespace encsim
