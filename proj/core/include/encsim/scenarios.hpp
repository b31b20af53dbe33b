// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end query protocols: membership, index, aggregated and ordered
// identification, and online database aggregation.

#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "encsim/compare.hpp"
#include "encsim/eval.hpp"
#include "encsim/he_sim.hpp"
#include "encsim/packing.hpp"

namespace encsim {

enum class QueryKind { Single, Aggregated, OnlineAggregated };

struct QueryBundle {
  CipherVector cipher;
  QueryKind kind = QueryKind::Single;
  std::size_t gamma = 1;
  double scaleFactor = 1.0;
};

double aggregateScaleFactor(std::size_t gamma, std::size_t ell);
double onlineScaleFactor(std::size_t groups, std::size_t ell);

// Normalizes q and replicates it into every ell-slot block.
QueryBundle buildSingleQuery(HeContext& ctx, std::span<const double> q);
// (sum of normalized embeddings) / f with f = 1 + (gamma-1)/sqrt(ell).
QueryBundle buildAggregateQuery(HeContext& ctx, const std::vector<std::vector<double>>& embeddings);
// q / f_G with f_G = 1 + 2(G-1)/sqrt(ell).
QueryBundle buildOnlineAggregationQuery(HeContext& ctx, std::span<const double> q,
                                        std::size_t groups);

struct PhaseCosts {
  CostLedger similarity;
  CostLedger merge;
  CostLedger compare;
  CostLedger aggregate;

  CostLedger total() const { return similarity + merge + compare + aggregate; }
};

struct MembershipResult {
  CipherVector cipher;
  double slot0 = 0.0;
  long long decodedCount = 0;
  bool member = false;
  std::size_t comparisons = 0;
  PhaseCosts costs;
};

struct IndexResult {
  std::vector<std::vector<double>> perGroup;
  // Decrypted comparator output at each database vector's score slot.
  std::vector<double> indicators;
  std::vector<std::size_t> matchedIndices;
  std::size_t comparisons = 0;
  PhaseCosts costs;
};

// `cmp` is fitted at the raw threshold tau; aggregated bundles compare
// against tau / scaleFactor.
MembershipResult membershipQuery(HeContext& ctx, const DiagonalSource& db,
                                 const QueryBundle& query, const EngineConfig& engine,
                                 const ChebyshevComparator& cmp, const RotationKeyRegistry& keys);

IndexResult indexQuery(HeContext& ctx, const DiagonalSource& db, const QueryBundle& query,
                       const EngineConfig& engine, const ChebyshevComparator& cmp,
                       const RotationKeyRegistry& keys);

struct OrderedIdResult {
  // embedding index -> database index
  std::map<std::size_t, std::size_t> assignment;
  std::size_t serverQueries = 0;
  PhaseCosts costs;
};

// gamma^2 embeddings, 2*gamma aggregated index queries: row a sums
// embeddings a*gamma + b over b, column b sums them over a.
OrderedIdResult orderedIdentification(HeContext& ctx,
                                      const std::vector<std::vector<double>>& embeddings,
                                      std::size_t gamma, const DiagonalSource& db,
                                      const EngineConfig& engine, const ChebyshevComparator& cmp,
                                      const RotationKeyRegistry& keys);

// Merges the diagonals of all matrix groups, then runs one BSGS-Diagonal
// product and a single comparison at tau / f_G.
MembershipResult onlineAggregatedMembership(HeContext& ctx, const DiagonalSource& db,
                                            const QueryBundle& query,
                                            const ChebyshevComparator& cmp,
                                            const RotationKeyRegistry& keys,
                                            std::size_t n1, std::size_t workers = 1);

}  // namespace encsim
