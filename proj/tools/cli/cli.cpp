// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>

#include "CLI11.hpp"
#include "encsim/compare.hpp"
#include "encsim/costs.hpp"
#include "encsim/dataset.hpp"
#include "encsim/db_io.hpp"
#include "encsim/errors.hpp"
#include "encsim/scenarios.hpp"

namespace encsim::cli {

namespace {

using Json = nlohmann::ordered_json;

const char* toString(Scenario s) {
  switch (s) {
    case Scenario::Membership: return "membership";
    case Scenario::Index: return "index";
    case Scenario::OrderedId: return "ordered-id";
    case Scenario::OnlineAggregation: return "online-aggr";
  }
  return "unknown";
}

class Emitter {
 public:
  Emitter(std::ostream& out, const std::string& reportPath) : out_(out) {
    if (!reportPath.empty()) {
      report_ = std::make_unique<std::ofstream>(reportPath, std::ios::trunc);
      if (!*report_) throw Error(Errc::Io, "cannot open report " + reportPath);
    }
  }

  void emit(const Json& record) {
    const std::string line = record.dump();
    out_ << line << '\n';
    if (report_) *report_ << line << '\n';
  }

 private:
  std::ostream& out_;
  std::unique_ptr<std::ofstream> report_;
};

Json ledgerJson(const CostLedger& l) {
  Json j = Json::object();
  l.forEach([&](const char* name, std::uint64_t v) { j[name] = v; });
  return j;
}

Json phasesJson(const PhaseCosts& p) {
  return Json{{"similarity", ledgerJson(p.similarity)},
              {"merge", ledgerJson(p.merge)},
              {"compare", ledgerJson(p.compare)},
              {"aggregate", ledgerJson(p.aggregate)}};
}

const std::string& requirePath(const std::string& path, const char* what) {
  if (path.empty()) throw Error(Errc::Configuration, std::string("no ") + what + " path given");
  return path;
}

std::filesystem::path plantedSidecar(const std::string& dataset) {
  return dataset + ".planted.json";
}

std::set<int> autoKeys(Engine engine, const DbMeta& meta, Scenario scenario) {
  const bool sums = scenario == Scenario::Membership || scenario == Scenario::OnlineAggregation;
  return keySetFor(engine, meta.layout.ell, meta.layout.n1, sums ? meta.layout.numSlots : 1);
}

std::set<int> selectKeys(const RunConfig& cfg, Engine engine, const DbMeta& meta,
                         Scenario scenario) {
  switch (cfg.keys) {
    case KeyMode::Auto: return autoKeys(engine, meta, scenario);
    case KeyMode::BabyOnly: {
      std::set<int> keys;
      for (std::size_t i = 1; i < meta.layout.n1; ++i) keys.insert(static_cast<int>(i));
      return keys;
    }
    case KeyMode::None: return {};
    case KeyMode::List: return {cfg.keyList.begin(), cfg.keyList.end()};
  }
  return {};
}

// Midpoint of the gap between planted and non-planted plaintext scores over
// the given queries.
double autoThreshold(const SyntheticDataset& ds, std::size_t queries) {
  std::vector<double> scores;
  std::vector<std::size_t> matches;
  const std::size_t K = ds.vectors.size();
  for (std::size_t q = 0; q < queries; ++q) {
    const auto s = plainScores(ds.vectors, ds.queries[q]);
    scores.insert(scores.end(), s.begin(), s.end());
    for (std::size_t v : ds.planted[q]) matches.push_back(q * K + v);
  }
  return midpointThreshold(scores, matches);
}

Engine resolveEngine(const RunConfig& cfg, const DbMeta& meta) {
  const Engine e = cfg.engine.value_or(defaultEngine(meta.layout.layout));
  if (nativeLayout(e) != meta.layout.layout) {
    throw Error(Errc::Layout, std::string("engine ") + toString(e) + " needs the " +
                                  toString(nativeLayout(e)) + " layout, database is " +
                                  toString(meta.layout.layout));
  }
  return e;
}

void checkDatasetFits(const SyntheticDataset& ds, const DbMeta& meta) {
  if (ds.ell != meta.layout.ell || ds.vectors.size() != meta.vectorCount) {
    throw Error(Errc::Shape, "dataset does not match the enrolled database");
  }
  if (ds.queries.empty()) throw Error(Errc::Shape, "dataset has no queries");
}

PackedDatabase enroll(HeContext& ctx, const SyntheticDataset& ds, const RunConfig& cfg) {
  LayoutParams params{ds.ell, cfg.numSlots, cfg.n1, cfg.layout};
  return pack(ctx, normalizeAll(ds.vectors), params);
}

// ---- gen -------------------------------------------------------------------

int runGen(const RunConfig& cfg, Emitter& em) {
  const std::string& path = requirePath(cfg.datasetPath, "dataset");
  if (cfg.Km > cfg.K) {
    throw Error(Errc::InvalidArgument, "Km " + std::to_string(cfg.Km) + " exceeds K " +
                                           std::to_string(cfg.K));
  }
  if (cfg.identities > cfg.K) throw Error(Errc::InvalidArgument, "more identities than vectors");
  const SyntheticDataset ds = cfg.identities > 0
                                  ? generateIdentityDataset(cfg.K, cfg.identities, cfg.ell, cfg.seed)
                                  : generateSyntheticDataset(cfg.K, cfg.Km, cfg.ell, cfg.seed);
  saveDataset(ds, path);

  Json sidecar{{"seed", ds.seed}, {"planted", ds.planted}};
  std::ofstream f(plantedSidecar(path), std::ios::trunc);
  if (!(f << sidecar.dump() << '\n')) throw Error(Errc::Io, "cannot write planted sidecar");

  em.emit(Json{{"record", "gen"},
               {"dataset", path},
               {"ell", ds.ell},
               {"K", ds.vectors.size()},
               {"queries", ds.queries.size()},
               {"seed", ds.seed},
               {"planted", ds.plantedIndices()}});
  return kExitOk;
}

// ---- enroll ----------------------------------------------------------------

int runEnroll(const RunConfig& cfg, Emitter& em) {
  const SyntheticDataset ds = loadDataset(requirePath(cfg.datasetPath, "dataset"));
  const std::string& dir = requirePath(cfg.dbPath, "database");
  HeContext ctx(SimParams{cfg.numSlots, cfg.maxLevel});
  const PackedDatabase db = enroll(ctx, ds, cfg);
  const std::size_t files = serializeDb(db, dir);
  const DbMeta& m = db.meta();
  const Engine engine = defaultEngine(m.layout.layout);
  em.emit(Json{{"record", "enroll"},
               {"db", dir},
               {"layout", toString(m.layout.layout)},
               {"preRotation", toString(m.preRotation)},
               {"ell", m.layout.ell},
               {"numSlots", m.layout.numSlots},
               {"n1", m.layout.n1},
               {"level", m.level},
               {"K", m.vectorCount},
               {"G", m.groupCount},
               {"ciphertexts", m.cipherCount},
               {"files", files},
               {"engine", toString(engine)},
               {"diagonalKeys", diagonalKeySet(engine, m.layout.ell, m.layout.n1).size()},
               {"evalSumKeys", evalSumKeys(m.layout.numSlots).size()},
               {"ledger", ledgerJson(ctx.ledger())}});
  return kExitOk;
}

// ---- query -----------------------------------------------------------------

struct QueryOutcome {
  Json record;
  bool pass = false;
};

QueryOutcome runScenario(HeContext& ctx, const DiagonalSource& db, const SyntheticDataset& ds,
                         const RunConfig& cfg, Scenario scenario) {
  const DbMeta& meta = db.meta();
  const Engine engine =
      scenario == Scenario::OnlineAggregation ? Engine::BsgsDiagonal : resolveEngine(cfg, meta);
  const EngineConfig ec{engine, meta.layout.n1, cfg.workers, 0};
  const std::size_t gamma = scenario == Scenario::OrderedId ? cfg.gamma : 1;
  if (ds.queries.size() < gamma * gamma) {
    throw Error(Errc::Shape, "ordered identification needs " + std::to_string(gamma * gamma) +
                                 " queries, dataset has " + std::to_string(ds.queries.size()));
  }
  const double tau = cfg.delta ? *cfg.delta : autoThreshold(ds, gamma * gamma);
  const ChebyshevComparator cmp = ChebyshevComparator::make(cfg.kappa, tau);
  const RotationKeyRegistry keys = ctx.generateRotationKeys(selectKeys(cfg, engine, meta, scenario));

  QueryOutcome o;
  Json& r = o.record;
  r["record"] = "query";
  r["scenario"] = toString(scenario);
  r["engine"] = toString(engine);
  r["layout"] = toString(meta.layout.layout);
  r["ell"] = meta.layout.ell;
  r["numSlots"] = meta.layout.numSlots;
  r["maxLevel"] = ctx.maxLevel();
  r["n1"] = meta.layout.n1;
  r["K"] = meta.vectorCount;
  r["G"] = meta.groupCount;
  r["kappa"] = cfg.kappa;
  r["degree"] = cmp.degree;
  r["tau"] = tau;
  r["tauSource"] = cfg.delta ? "flag" : "auto";
  r["keys"] = keys.size();

  const auto& truth = ds.planted.front();
  switch (scenario) {
    case Scenario::Membership:
    case Scenario::OnlineAggregation: {
      MembershipResult m;
      if (scenario == Scenario::Membership) {
        m = membershipQuery(ctx, db, buildSingleQuery(ctx, ds.queries.front()), ec, cmp, keys);
      } else {
        const QueryBundle q = buildOnlineAggregationQuery(ctx, ds.queries.front(), meta.cipherCount);
        m = onlineAggregatedMembership(ctx, db, q, cmp, keys, meta.layout.n1, cfg.workers);
        r["scaleFactor"] = q.scaleFactor;
      }
      // Merged groups sum their scores per slot, so only membership is exact.
      const bool countOk = scenario == Scenario::OnlineAggregation ||
                           m.decodedCount == static_cast<long long>(truth.size());
      o.pass = countOk && m.member == !truth.empty();
      r["slot0"] = m.slot0;
      r["count"] = m.decodedCount;
      r["member"] = m.member;
      r["expectedCount"] = truth.size();
      r["comparisons"] = m.comparisons;
      r["phases"] = phasesJson(m.costs);
      break;
    }
    case Scenario::Index: {
      const IndexResult x =
          indexQuery(ctx, db, buildSingleQuery(ctx, ds.queries.front()), ec, cmp, keys);
      o.pass = x.matchedIndices == truth;
      r["matched"] = x.matchedIndices;
      r["expected"] = truth;
      r["comparisons"] = x.comparisons;
      r["phases"] = phasesJson(x.costs);
      break;
    }
    case Scenario::OrderedId: {
      const std::vector<std::vector<double>> batch(ds.queries.begin(),
                                                   ds.queries.begin() + gamma * gamma);
      const OrderedIdResult x = orderedIdentification(ctx, batch, gamma, db, ec, cmp, keys);
      Json assignment = Json::array();
      o.pass = x.assignment.size() == gamma * gamma;
      for (std::size_t e = 0; e < gamma * gamma; ++e) {
        const auto it = x.assignment.find(e);
        const bool ok = it != x.assignment.end() && ds.planted[e].size() == 1 &&
                        ds.planted[e].front() == it->second;
        o.pass = o.pass && ok;
        assignment.push_back(Json{{"embedding", e},
                                  {"index", it == x.assignment.end() ? Json() : Json(it->second)},
                                  {"correct", ok}});
      }
      r["gamma"] = gamma;
      r["serverQueries"] = x.serverQueries;
      r["assignment"] = assignment;
      r["phases"] = phasesJson(x.costs);
      break;
    }
  }
  r["pass"] = o.pass;
  r["ledger"] = ledgerJson(ctx.ledger());
  return o;
}

int runQuery(const RunConfig& cfg, Emitter& em) {
  const std::string& dir = requirePath(cfg.dbPath, "database");
  const SyntheticDataset ds = loadDataset(requirePath(cfg.datasetPath, "dataset"));
  const DbMeta meta = readDbMeta(dir);
  HeContext ctx(SimParams{meta.layout.numSlots, meta.level});
  const PackedDatabase db = deserializeDb(ctx, dir);
  checkDatasetFits(ds, meta);
  ctx.resetLedger();
  const QueryOutcome o = runScenario(ctx, db, ds, cfg, cfg.scenario);
  em.emit(o.record);
  return o.pass ? kExitOk : kExitCheckFailed;
}

// ---- bench -----------------------------------------------------------------

int runBench(const RunConfig& cfg, Emitter& em) {
  if (cfg.trials == 0) throw Error(Errc::InvalidArgument, "trials must be positive");
  const SyntheticDataset ds = loadDataset(requirePath(cfg.datasetPath, "dataset"));
  const std::string& dir = requirePath(cfg.dbPath, "database");
  std::size_t passed = 0;
  std::vector<CostLedger> ledgers;
  for (std::size_t t = 1; t <= cfg.trials; ++t) {
    HeContext ctx(SimParams{cfg.numSlots, cfg.maxLevel});
    PackedDatabase db;
    if (t == 1) {
      db = enroll(ctx, ds, cfg);
      serializeDb(db, dir);
    } else {
      db = deserializeDb(ctx, dir);
    }
    checkDatasetFits(ds, db.meta());
    const QueryOutcome member = runScenario(ctx, db, ds, cfg, Scenario::Membership);
    const QueryOutcome index = runScenario(ctx, db, ds, cfg, Scenario::Index);
    const bool pass = member.pass && index.pass;
    passed += pass ? 1 : 0;
    ledgers.push_back(ctx.ledger());
    em.emit(Json{{"record", "trial"},
                 {"trial", t},
                 {"source", t == 1 ? "enroll" : "deserialize"},
                 {"count", member.record["count"]},
                 {"expectedCount", member.record["expectedCount"]},
                 {"membershipPass", member.pass},
                 {"matched", index.record["matched"]},
                 {"indexPass", index.pass},
                 {"pass", pass},
                 {"ledger", ledgerJson(ledgers.back())}});
  }
  CostLedger tail;
  bool stable = true;
  for (std::size_t i = 1; i < ledgers.size(); ++i) {
    tail += ledgers[i];
    stable = stable && ledgers[i] == ledgers[1];
  }
  em.emit(Json{{"record", "bench-summary"},
               {"trials", cfg.trials},
               {"passed", passed},
               {"reusedTrials", cfg.trials - 1},
               {"stableLedgers", stable},
               {"reusedLedgerTotal", ledgerJson(tail)},
               {"pass", passed == cfg.trials}});
  return passed == cfg.trials ? kExitOk : kExitCheckFailed;
}

// ---- costs -----------------------------------------------------------------

int runCosts(const RunConfig& cfg, Emitter& em) {
  const Engine engine = cfg.engine.value_or(Engine::BsgsDiagonal);
  const CostPrediction p = predictCosts(engine, cfg.ell, cfg.n1, cfg.groups);
  em.emit(Json{{"record", "prediction"},
               {"engine", toString(engine)},
               {"ell", cfg.ell},
               {"n1", cfg.n1},
               {"n2", p.scenario.n2},
               {"G", cfg.groups},
               {"rotations", p.rotations},
               {"ctCtMults", p.ctCtMults},
               {"ctCtAdds", p.ctCtAdds},
               {"relins", p.relins},
               {"rescales", p.rescales},
               {"rotationKeys", p.rotationKeys},
               {"keyMemoryBytes", p.keyMemoryBytes}});

  const std::size_t span = std::max<std::size_t>(1, cfg.numSlots / cfg.ell);
  em.emit(Json{{"record", "keys"},
               {"engine", toString(engine)},
               {"diagonal", diagonalKeySet(engine, cfg.ell, cfg.n1).size()},
               {"evalSumSpan", span},
               {"evalSum", evalSumKeys(span).size()},
               {"total", keySetFor(engine, cfg.ell, cfg.n1, span).size()},
               {"hydiaDiagonal", diagonalKeySet(Engine::HyDia, cfg.ell, cfg.n1).size()},
               {"bsgsDiagonal", diagonalKeySet(Engine::BsgsDiagonal, cfg.ell, cfg.n1).size()},
               {"reductionRatio", keyReductionRatio(cfg.ell, cfg.n1)}});

  int status = kExitOk;
  if (cfg.measure) {
    const Measurement m =
        measureCosts(EngineConfig{engine, cfg.n1, cfg.workers, 0}, cfg.ell, cfg.groups, cfg.numSlots);
    const ReconcileReport rep = reconcile(p, m.scenario, m.ledger);
    Json entries = Json::array();
    for (const auto& e : rep.entries) {
      entries.push_back(Json{{"counter", e.counter},
                             {"predicted", e.predicted},
                             {"measured", e.measured},
                             {"delta", e.delta()},
                             {"match", e.match()}});
    }
    em.emit(Json{{"record", "reconcile"},
                 {"scenario", describe(rep.scenario)},
                 {"numSlots", cfg.numSlots},
                 {"entries", entries},
                 {"ok", rep.ok()}});
    if (!rep.ok()) status = kExitCheckFailed;
  }
  if (cfg.sms) {
    em.emit(Json{{"record", "stream-pool"},
                 {"sms", *cfg.sms},
                 {"freeBytes", cfg.freeBytes},
                 {"ctBytes", cfg.ctBytes},
                 {"streams", streamPoolSize(*cfg.sms, cfg.freeBytes, cfg.ctBytes)}});
  }
  return status;
}

}  // namespace

Engine defaultEngine(Layout layout) noexcept {
  switch (layout) {
    case Layout::FlatConcat: return Engine::BsgsDiagonal;
    case Layout::FlatPreRotated: return Engine::GroupedBsgs;
    case Layout::ReplicatedStride2N: return Engine::SenderBlockPacked;
  }
  return Engine::BsgsDiagonal;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Emitter em(out, cfg.reportPath);
    switch (cfg.command) {
      case Command::Gen: return runGen(cfg, em);
      case Command::Enroll: return runEnroll(cfg, em);
      case Command::Query: return runQuery(cfg, em);
      case Command::Bench: return runBench(cfg, em);
      case Command::Costs: return runCosts(cfg, em);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    out << Json{{"record", "error"}, {"code", toString(e.code())}, {"message", e.what()}}.dump()
        << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Encrypted similarity search simulator"};
  app.require_subcommand(1);

  const std::map<std::string, Layout> layouts{{"flat", Layout::FlatConcat},
                                              {"replicated", Layout::ReplicatedStride2N},
                                              {"prerotated", Layout::FlatPreRotated}};
  const std::map<std::string, Engine> engines{{"hydia", Engine::HyDia},
                                              {"bsgs-diagonal", Engine::BsgsDiagonal},
                                              {"grouped", Engine::GroupedBsgs},
                                              {"sender", Engine::SenderBlockPacked}};
  const std::map<std::string, Scenario> scenarios{{"membership", Scenario::Membership},
                                                  {"index", Scenario::Index},
                                                  {"ordered-id", Scenario::OrderedId},
                                                  {"online-aggr", Scenario::OnlineAggregation}};

  auto datasetOpt = [&](CLI::App* sub) {
    sub->add_option("--dataset", cfg.datasetPath, "Dataset file")->envname("ENCSIM_DATASET");
  };
  auto dbOpt = [&](CLI::App* sub) {
    sub->add_option("--db", cfg.dbPath, "Database directory")->envname("ENCSIM_DB");
  };
  auto reportOpt = [&](CLI::App* sub) {
    sub->add_option("--report", cfg.reportPath, "Also write records here")->envname("ENCSIM_REPORT");
  };
  auto packOpts = [&](CLI::App* sub) {
    sub->add_option("--num-slots", cfg.numSlots, "Slots per ciphertext")->capture_default_str();
    sub->add_option("--max-level", cfg.maxLevel, "Fresh ciphertext level")->capture_default_str();
    sub->add_option("--n1", cfg.n1, "Baby-step count")->capture_default_str();
    sub->add_option("--layout", cfg.layout, "flat | replicated | prerotated")
        ->transform(CLI::CheckedTransformer(layouts, CLI::ignore_case))
        ->option_text("LAYOUT");
  };
  std::string keys = "auto";
  auto queryOpts = [&](CLI::App* sub) {
    sub->add_option("--engine", cfg.engine, "hydia | bsgs-diagonal | grouped | sender")
        ->transform(CLI::CheckedTransformer(engines, CLI::ignore_case))
        ->option_text("ENGINE");
    sub->add_option("--kappa", cfg.kappa, "Comparator depth (7-10)")->capture_default_str();
    sub->add_option("--delta", cfg.delta, "Threshold; default is the score-gap midpoint");
    sub->add_option("--workers", cfg.workers, "Engine worker threads")->capture_default_str();
    sub->add_option("--keys", keys, "auto | baby-only | none | comma-separated offsets")
        ->capture_default_str();
  };

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--K", cfg.K, "Database size")->capture_default_str();
  gen->add_option("--Km", cfg.Km, "Planted matches")->capture_default_str();
  gen->add_option("--identities", cfg.identities, "Distinct planted identities (overrides --Km)");
  gen->add_option("--ell", cfg.ell, "Embedding dimension")->capture_default_str();
  gen->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
  datasetOpt(gen);
  reportOpt(gen);

  CLI::App* enrollCmd = app.add_subcommand("enroll", "Pack, encrypt and serialize a dataset");
  datasetOpt(enrollCmd);
  dbOpt(enrollCmd);
  packOpts(enrollCmd);
  reportOpt(enrollCmd);

  CLI::App* query = app.add_subcommand("query", "Run one query scenario on an enrolled database");
  datasetOpt(query);
  dbOpt(query);
  queryOpts(query);
  query->add_option("--scenario", cfg.scenario, "membership | index | ordered-id | online-aggr")
      ->transform(CLI::CheckedTransformer(scenarios, CLI::ignore_case))
      ->option_text("SCENARIO");
  query->add_option("--gamma", cfg.gamma, "Ordered identification batch side")->capture_default_str();
  reportOpt(query);

  CLI::App* bench = app.add_subcommand("bench", "Enroll once, then repeat verified queries");
  datasetOpt(bench);
  dbOpt(bench);
  packOpts(bench);
  queryOpts(bench);
  bench->add_option("--trials", cfg.trials, "Trial count")->capture_default_str();
  reportOpt(bench);

  CLI::App* costs = app.add_subcommand("costs", "Predicted counts, key census and reconciliation");
  costs->add_option("--engine", cfg.engine, "hydia | bsgs-diagonal | grouped | sender")
      ->transform(CLI::CheckedTransformer(engines, CLI::ignore_case))
        ->option_text("ENGINE");
  costs->add_option("--ell", cfg.ell, "Embedding dimension")->capture_default_str();
  costs->add_option("--n1", cfg.n1, "Baby-step count")->capture_default_str();
  costs->add_option("--groups", cfg.groups, "Score ciphertexts")->capture_default_str();
  costs->add_option("--num-slots", cfg.numSlots, "Slots per ciphertext")->capture_default_str();
  costs->add_option("--workers", cfg.workers, "Engine worker threads")->capture_default_str();
  costs->add_flag("--measure", cfg.measure, "Run the engine and reconcile against the ledger");
  costs->add_option("--sms", cfg.sms, "Streaming multiprocessors for the stream-pool size");
  costs->add_option("--free-bytes", cfg.freeBytes, "Free device memory")->capture_default_str();
  costs->add_option("--ct-bytes", cfg.ctBytes, "Ciphertext size")->capture_default_str();
  reportOpt(costs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  if (*gen) cfg.command = Command::Gen;
  if (*enrollCmd) cfg.command = Command::Enroll;
  if (*query) cfg.command = Command::Query;
  if (*bench) cfg.command = Command::Bench;
  if (*costs) cfg.command = Command::Costs;

  if (keys == "auto") {
    cfg.keys = KeyMode::Auto;
  } else if (keys == "baby-only") {
    cfg.keys = KeyMode::BabyOnly;
  } else if (keys == "none") {
    cfg.keys = KeyMode::None;
  } else {
    cfg.keys = KeyMode::List;
    try {
      for (const auto& tok : CLI::detail::split(keys, ',')) cfg.keyList.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      err << "error: --keys expects auto, baby-only, none or a list of offsets\n";
      return kExitError;
    }
  }
  return execute(cfg, out, err);
}

}  // namespace encsim::cli
