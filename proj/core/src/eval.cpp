// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/eval.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <thread>

#include "encsim/errors.hpp"

namespace encsim {

const char* toString(Engine engine) noexcept {
  switch (engine) {
    case Engine::HyDia: return "hydia";
    case Engine::BsgsDiagonal: return "bsgs-diagonal";
    case Engine::GroupedBsgs: return "grouped";
    case Engine::SenderBlockPacked: return "sender";
  }
  return "unknown";
}

Engine parseEngine(std::string_view name) {
  for (Engine e : {Engine::HyDia, Engine::BsgsDiagonal, Engine::GroupedBsgs,
                   Engine::SenderBlockPacked}) {
    if (name == toString(e)) return e;
  }
  throw Error(Errc::InvalidArgument, "unknown engine '" + std::string(name) + "'");
}

Layout nativeLayout(Engine engine) noexcept {
  switch (engine) {
    case Engine::HyDia:
    case Engine::BsgsDiagonal: return Layout::FlatConcat;
    case Engine::GroupedBsgs: return Layout::FlatPreRotated;
    case Engine::SenderBlockPacked: return Layout::ReplicatedStride2N;
  }
  return Layout::FlatConcat;
}

BsgsParams BsgsParams::make(std::size_t ell, std::size_t n1) {
  if (ell == 0 || n1 < 1 || n1 > ell) throw Error(Errc::InvalidArgument, "n1 must lie in [1, ell]");
  BsgsParams p;
  p.ell = ell;
  p.n1 = n1;
  p.n2 = (ell + n1 - 1) / n1;
  return p;
}

std::vector<long long> senderGiantSteps(std::size_t N, std::size_t n1) {
  const long long lo = giantIndex(-static_cast<long long>(N / 2), n1);
  const long long hi = giantIndex(static_cast<long long>((N + 1) / 2) - 1, n1);
  std::vector<long long> js;
  for (long long j = lo; j <= hi; ++j) js.push_back(j);
  return js;
}

std::vector<double> ScoreSet::decryptScores(const HeContext& ctx) const {
  std::map<std::size_t, std::vector<double>> plain;
  std::vector<double> scores(meta.vectorCount);
  for (std::size_t v = 0; v < meta.vectorCount; ++v) {
    const ScoreLocation loc = locateScore(meta, v);
    auto it = plain.find(loc.cipher);
    if (it == plain.end()) it = plain.emplace(loc.cipher, ctx.decrypt(perGroup.at(loc.cipher))).first;
    scores[v] = it->second[loc.slot];
  }
  return scores;
}

RotationTable buildRotationTable(HeContext& ctx, const CipherVector& query,
                                 const BsgsParams& params, const RotationKeyRegistry& keys,
                                 HoistMode mode) {
  const std::size_t ell = params.ell;
  RotationTable table;
  table.builtWith = mode;
  table.entries.resize(ell);
  table.entries[0] = query;
  if (ell == 1) return table;
  const HoistHandle qh = ctx.hoistPrecompute(query);
  if (mode == HoistMode::SingleHoist) {
    for (std::size_t i = 1; i < ell; ++i) {
      table.entries[i] = ctx.hoistedRotate(qh, static_cast<long long>(i), keys);
    }
    return table;
  }
  const std::size_t n1 = params.n1;
  const std::size_t babies = std::min(n1, ell);
  for (std::size_t i = 1; i < babies; ++i) {
    table.entries[i] = ctx.hoistedRotate(qh, static_cast<long long>(i), keys);
  }
  for (std::size_t b2 = 0; b2 < babies && n1 + b2 < ell; ++b2) {
    const HoistHandle h = b2 == 0 ? qh : ctx.hoistPrecompute(table.entries[b2]);
    for (std::size_t i = n1 + b2; i < ell; i += n1) {
      table.entries[i] = ctx.hoistedRotate(h, static_cast<long long>((i / n1) * n1), keys);
    }
  }
  return table;
}

namespace {

void checkFlatUnrotated(const DiagonalSource& db, const RotationTable& table) {
  const DbMeta& m = db.meta();
  if (m.layout.layout != Layout::FlatConcat || m.preRotation != PreRotation::None) {
    throw Error(Errc::Layout, std::string("diagonal engine needs unrotated flat diagonals, got ") +
                                  toString(m.layout.layout));
  }
  if (table.entries.size() != m.layout.ell) {
    throw Error(Errc::Shape, "rotation table size differs from ell");
  }
}

CipherVector finishGroup(HeContext& ctx, const CipherVector& acc) {
  return ctx.rescale(ctx.relinearize(acc));
}

}  // namespace

ScoreSet hydiaSimilarity(HeContext& ctx, const DiagonalSource& db, const RotationTable& table) {
  checkFlatUnrotated(db, table);
  const DbMeta& m = db.meta();
  ScoreSet out;
  out.meta = m;
  for (std::size_t g = 0; g < m.cipherCount; ++g) {
    CipherVector acc;
    for (std::size_t i = 0; i < m.layout.ell; ++i) {
      ctx.multAccumulate(acc, table.entries[i], db.diagonal(g, i));
    }
    out.perGroup.push_back(finishGroup(ctx, acc));
  }
  return out;
}

ScoreSet bsgsDiagonalSimilarity(HeContext& ctx, const DiagonalSource& db,
                                const RotationTable& table, std::size_t workers) {
  checkFlatUnrotated(db, table);
  if (workers == 0) throw Error(Errc::InvalidArgument, "workers must be positive");
  const DbMeta& m = db.meta();
  const std::size_t ell = m.layout.ell;
  const std::size_t w = std::min(workers, ell);
  ScoreSet out;
  out.meta = m;
  for (std::size_t g = 0; g < m.cipherCount; ++g) {
    std::vector<CipherVector> acc(w);
    auto work = [&](std::size_t t) {
      const std::size_t lo = t * ell / w;
      const std::size_t hi = (t + 1) * ell / w;
      for (std::size_t i = lo; i < hi; ++i) {
        ctx.multAccumulate(acc[t], table.entries[i], db.diagonal(g, i));
      }
    };
    if (w == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      std::vector<std::exception_ptr> errors(w);
      for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
          try {
            work(t);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      pool.clear();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t stride = 1; stride < w; stride *= 2) {
      for (std::size_t t = 0; t + stride < w; t += 2 * stride) {
        ctx.addInPlace(acc[t], acc[t + stride]);
        acc[t + stride] = CipherVector();
      }
    }
    out.perGroup.push_back(finishGroup(ctx, acc[0]));
  }
  return out;
}

ScoreSet groupedBsgsSimilarity(HeContext& ctx, const DiagonalSource& db,
                               const CipherVector& query, const BsgsParams& params,
                               const RotationKeyRegistry& keys) {
  const DbMeta& m = db.meta();
  if (m.layout.layout != Layout::FlatPreRotated || m.preRotation == PreRotation::None) {
    throw Error(Errc::Layout,
                "grouped BSGS needs pre-rotated diagonals; the giant rotation would otherwise "
                "rotate the diagonal components too");
  }
  if (m.layout.n1 != params.n1 || m.layout.ell != params.ell) {
    throw Error(Errc::Layout, "database was pre-rotated for n1 = " + std::to_string(m.layout.n1));
  }
  const std::size_t ell = params.ell;
  const std::size_t n1 = params.n1;
  std::vector<CipherVector> baby(std::min(n1, ell));
  baby[0] = query;
  if (baby.size() > 1) {
    const HoistHandle h = ctx.hoistPrecompute(query);
    for (std::size_t i = 1; i < baby.size(); ++i) {
      baby[i] = ctx.hoistedRotate(h, static_cast<long long>(i), keys);
    }
  }
  ScoreSet out;
  out.meta = m;
  for (std::size_t g = 0; g < m.cipherCount; ++g) {
    CipherVector acc;
    for (std::size_t j = 0; j < params.n2; ++j) {
      const std::size_t count = std::min(n1, ell - j * n1);
      CipherVector partial;
      for (std::size_t i = 0; i < count; ++i) {
        ctx.multAccumulate(partial, baby[i], db.diagonal(g, j * n1 + i));
      }
      CipherVector sum = ctx.rescale(ctx.relinearize(partial));
      if (j > 0) sum = ctx.rotate(sum, static_cast<long long>(j * n1), keys);
      if (acc.empty()) {
        acc = sum;
      } else {
        ctx.addInPlace(acc, sum);
      }
    }
    out.perGroup.push_back(acc);
  }
  return out;
}

CipherVector rotateWithinBlock(HeContext& ctx, const CipherVector& x, std::size_t s,
                               std::size_t N, const RotationKeyRegistry& keys) {
  if (s >= N) {
    throw Error(Errc::InvalidArgument, "block shift " + std::to_string(s) + " outside [0, " +
                                           std::to_string(N) + ")");
  }
  if (s == 0) return x;
  const auto a = ctx.rotate(x, static_cast<long long>(s), keys);
  const auto b = ctx.rotate(x, static_cast<long long>(s) - static_cast<long long>(N), keys);
  return ctx.add(a, b);
}

ScoreSet senderBsgsBlockPacked(HeContext& ctx, const DiagonalSource& db,
                               const CipherVector& query, const BsgsParams& params,
                               const RotationKeyRegistry& keys, std::size_t chunk) {
  const DbMeta& m = db.meta();
  if (m.layout.layout != Layout::ReplicatedStride2N) {
    throw Error(Errc::Layout, "sender needs the replicated stride-2N layout");
  }
  if (m.layout.n1 != params.n1 || m.layout.ell != params.ell) {
    throw Error(Errc::Layout, "database was pre-shifted for n1 = " + std::to_string(m.layout.n1));
  }
  const std::size_t N = m.layout.N();
  const std::size_t n1 = params.n1;
  const auto n1s = static_cast<long long>(n1);
  const auto half = static_cast<long long>(N / 2);
  const auto upper = static_cast<long long>((N + 1) / 2);
  if (chunk == 0) chunk = n1;

  std::vector<CipherVector> baby(n1);
  baby[0] = query;
  if (n1 > 1) {
    const HoistHandle h = ctx.hoistPrecompute(query);
    for (std::size_t i = 1; i < n1; ++i) {
      baby[i] = ctx.hoistedRotate(h, static_cast<long long>(i), keys);
    }
  }
  const std::vector<long long> giants =
      params.giantSteps.empty() ? senderGiantSteps(N, n1) : params.giantSteps;

  ScoreSet out;
  out.meta = m;
  for (std::size_t c = 0; c < m.cipherCount; ++c) {
    CipherVector acc;
    for (long long j : giants) {
      const long long lo = std::max(0LL, -j * n1s - half);
      const long long hi = std::min(n1s - 1, upper - 1 - j * n1s);
      if (lo > hi) continue;
      CipherVector giantSum;
      for (long long start = lo; start <= hi; start += static_cast<long long>(chunk)) {
        const long long stop = std::min(hi, start + static_cast<long long>(chunk) - 1);
        CipherVector partial;
        for (long long i = start; i <= stop; ++i) {
          const auto n = static_cast<long long>(N);
          const auto k = static_cast<std::size_t>(((j * n1s + i) % n + n) % n);
          ctx.multAccumulate(partial, baby[static_cast<std::size_t>(i)], db.diagonal(c, k));
        }
        if (giantSum.empty()) {
          giantSum = std::move(partial);
        } else {
          ctx.addInPlace(giantSum, partial);
        }
      }
      CipherVector s = ctx.rescale(ctx.relinearize(giantSum));
      s = ctx.relinearize(rotateWithinBlock(ctx, s, preShift(j, n1, N), N, keys));
      if (acc.empty()) {
        acc = s;
      } else {
        ctx.addInPlace(acc, s);
      }
    }
    if (acc.empty()) continue;
    acc = ctx.relinearize(acc);
    if (acc.rescalePending()) acc = ctx.rescale(acc);
    out.perGroup.push_back(acc);
  }
  return out;
}

ScoreSet computeSimilarity(HeContext& ctx, const EngineConfig& cfg, const DiagonalSource& db,
                           const CipherVector& query, const RotationKeyRegistry& keys) {
  const std::size_t ell = db.meta().layout.ell;
  const std::size_t n1 = cfg.engine == Engine::HyDia ? std::min(cfg.n1, ell) : cfg.n1;
  const BsgsParams params = BsgsParams::make(ell, n1);
  switch (cfg.engine) {
    case Engine::HyDia:
      return hydiaSimilarity(ctx, db,
                             buildRotationTable(ctx, query, params, keys, HoistMode::SingleHoist));
    case Engine::BsgsDiagonal:
      return bsgsDiagonalSimilarity(
          ctx, db, buildRotationTable(ctx, query, params, keys, HoistMode::DoubleHoist),
          cfg.workers);
    case Engine::GroupedBsgs:
      return groupedBsgsSimilarity(ctx, db, query, params, keys);
    case Engine::SenderBlockPacked:
      return senderBsgsBlockPacked(ctx, db, query, params, keys, cfg.chunk);
  }
  throw Error(Errc::InvalidArgument, "unknown engine");
}

}  // namespace encsim
