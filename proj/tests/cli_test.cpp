// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <gtest/gtest.h>
#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace encsim::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Result {
  int code = 0;
  std::vector<Json> records;
  std::string err;

  const Json& last(const std::string& kind) const {
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
      if ((*it)["record"] == kind) return *it;
    }
    throw std::runtime_error("no record " + kind);
  }
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("encsim_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result call(std::vector<std::string> args) const {
    args.insert(args.begin(), "encsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    Result r;
    r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    std::istringstream lines(out.str());
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty() && line.front() == '{') r.records.push_back(Json::parse(line));
    }
    r.err = err.str();
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  // ell 16, 64 slots, 128 vectors with 3 planted matches.
  void smallDb(const std::string& layout = "flat") const {
    ASSERT_EQ(call({"gen", "--dataset", path("ds"), "--K", "128", "--Km", "3", "--ell", "16"}).code,
              kExitOk);
    ASSERT_EQ(call({"enroll", "--dataset", path("ds"), "--db", path("db"), "--num-slots", "64",
                    "--n1", "4", "--layout", layout})
                  .code,
              kExitOk);
  }

  fs::path dir_;
};

TEST_F(Cli, GenIsDeterministic) {
  const Result a = call({"gen", "--dataset", path("a"), "--K", "64", "--Km", "2", "--ell", "16", "--seed", "5"});
  const Result b = call({"gen", "--dataset", path("b"), "--K", "64", "--Km", "2", "--ell", "16", "--seed", "5"});
  ASSERT_EQ(a.code, kExitOk);
  ASSERT_EQ(b.code, kExitOk);
  EXPECT_EQ(slurp(path("a")), slurp(path("b")));
  EXPECT_EQ(slurp(path("a") + ".planted.json"), slurp(path("b") + ".planted.json"));
  const Json& g = a.last("gen");
  EXPECT_EQ(g["K"], 64);
  EXPECT_EQ(g["planted"].size(), 2u);
  EXPECT_EQ(g["planted"], b.last("gen")["planted"]);
  call({"gen", "--dataset", path("c"), "--K", "64", "--Km", "2", "--ell", "16", "--seed", "6"});
  EXPECT_NE(slurp(path("a")), slurp(path("c")));
}

TEST_F(Cli, GenRejectsTooManyMatches) {
  const Result r = call({"gen", "--dataset", path("ds"), "--K", "4", "--Km", "5", "--ell", "16"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_EQ(r.last("error")["code"], "invalid-argument");
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(Cli, EnrollWritesOneFilePerDiagonal) {
  smallDb();
  const Result r = call({"enroll", "--dataset", path("ds"), "--db", path("db2"), "--num-slots", "64",
                         "--n1", "4"});
  ASSERT_EQ(r.code, kExitOk);
  const Json& e = r.last("enroll");
  EXPECT_EQ(e["ciphertexts"], 2);
  EXPECT_EQ(e["K"], 128);
  const auto entries = std::distance(fs::directory_iterator(path("db2")), fs::directory_iterator{});
  EXPECT_EQ(e["files"], 2 * 16);
  EXPECT_EQ(entries, 2 * 16 + 1);
}

TEST_F(Cli, QueriesPassOnEveryLayout) {
  for (const std::string layout : {"flat", "prerotated", "replicated"}) {
    fs::remove_all(path("db"));
    smallDb(layout);
    for (const std::string scenario : {"membership", "index"}) {
      const Result r =
          call({"query", "--dataset", path("ds"), "--db", path("db"), "--scenario", scenario});
      EXPECT_EQ(r.code, kExitOk) << layout << " " << scenario << " " << r.err;
      const Json& q = r.last("query");
      EXPECT_TRUE(q["pass"].get<bool>()) << q.dump();
      EXPECT_EQ(q["tauSource"], "auto");
    }
  }
  const Result membership =
      call({"query", "--dataset", path("ds"), "--db", path("db"), "--scenario", "membership"});
  EXPECT_EQ(membership.last("query")["count"], 3);
}

TEST_F(Cli, OnlineAggregationAndWrongThreshold) {
  smallDb();
  const Result r =
      call({"query", "--dataset", path("ds"), "--db", path("db"), "--scenario", "online-aggr"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.last("query")["engine"], "bsgs-diagonal");

  // A threshold below every score matches everything, so the check fails.
  const Result miss = call(
      {"query", "--dataset", path("ds"), "--db", path("db"), "--scenario", "index", "--delta", "-0.9"});
  EXPECT_EQ(miss.code, kExitCheckFailed);
  EXPECT_FALSE(miss.last("query")["pass"].get<bool>());
  EXPECT_EQ(miss.last("query")["tauSource"], "flag");
}

TEST_F(Cli, BabyOnlyKeysAreInsufficient) {
  smallDb("prerotated");
  const Result r = call({"query", "--dataset", path("ds"), "--db", path("db"), "--keys", "baby-only"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_EQ(r.last("error")["code"], "missing-rotation-key");
  const Result none = call({"query", "--dataset", path("ds"), "--db", path("db"), "--keys", "none"});
  EXPECT_EQ(none.code, kExitError);
  const Result bad = call({"query", "--dataset", path("ds"), "--db", path("db"), "--keys", "1,x"});
  EXPECT_EQ(bad.code, kExitError);
}

TEST_F(Cli, OrderedIdentificationUsesTwoGammaQueries) {
  ASSERT_EQ(call({"gen", "--dataset", path("ds"), "--K", "128", "--identities", "4", "--ell", "256",
                  "--seed", "11"})
                .code,
            kExitOk);
  ASSERT_EQ(call({"enroll", "--dataset", path("ds"), "--db", path("db"), "--num-slots", "256",
                  "--n1", "8"})
                .code,
            kExitOk);
  const Result r = call({"query", "--dataset", path("ds"), "--db", path("db"), "--scenario",
                         "ordered-id", "--gamma", "2"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const Json& q = r.last("query");
  EXPECT_EQ(q["serverQueries"], 4);
  EXPECT_EQ(q["assignment"].size(), 4u);
  const Result tooBig = call({"query", "--dataset", path("ds"), "--db", path("db"), "--scenario",
                              "ordered-id", "--gamma", "3"});
  EXPECT_EQ(tooBig.code, kExitError);
  EXPECT_EQ(tooBig.last("error")["code"], "shape");
}

TEST_F(Cli, BenchReusesSerializedDatabase) {
  ASSERT_EQ(call({"gen", "--dataset", path("ds"), "--K", "128", "--Km", "3", "--ell", "16"}).code,
            kExitOk);
  const Result r = call({"bench", "--dataset", path("ds"), "--db", path("db"), "--num-slots", "64",
                         "--n1", "4", "--trials", "3", "--report", path("report.jsonl")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  ASSERT_EQ(r.records.size(), 4u);
  EXPECT_EQ(r.records[0]["source"], "enroll");
  EXPECT_EQ(r.records[1]["source"], "deserialize");
  const Json& s = r.last("bench-summary");
  EXPECT_TRUE(s["stableLedgers"].get<bool>());
  EXPECT_EQ(s["passed"], 3);
  std::ifstream report(path("report.jsonl"));
  std::size_t lines = 0;
  for (std::string line; std::getline(report, line);) ++lines;
  EXPECT_EQ(lines, 4u);
}

TEST_F(Cli, CostsReportAndReconcile) {
  const Result r = call({"costs", "--engine", "grouped", "--ell", "512", "--n1", "23", "--groups",
                         "16", "--num-slots", "1024", "--measure", "--sms", "132"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.last("prediction")["rotations"], 374);
  EXPECT_EQ(r.last("keys")["diagonal"], 44);
  EXPECT_EQ(r.last("keys")["hydiaDiagonal"], 511);
  EXPECT_TRUE(r.last("reconcile")["ok"].get<bool>());
  EXPECT_EQ(r.last("stream-pool")["streams"], 32);
}

TEST_F(Cli, EnvironmentSuppliesPaths) {
  ::setenv("ENCSIM_DATASET", path("envds").c_str(), 1);
  ::setenv("ENCSIM_DB", path("envdb").c_str(), 1);
  const Result g = call({"gen", "--K", "64", "--Km", "1", "--ell", "16"});
  const Result e = call({"enroll", "--num-slots", "64", "--n1", "4"});
  const Result q = call({"query", "--scenario", "index"});
  ::unsetenv("ENCSIM_DATASET");
  ::unsetenv("ENCSIM_DB");
  EXPECT_EQ(g.code, kExitOk);
  EXPECT_EQ(e.code, kExitOk);
  EXPECT_EQ(q.code, kExitOk) << q.err;
  EXPECT_TRUE(fs::exists(path("envds")));
  const Result missing = call({"enroll"});
  EXPECT_EQ(missing.code, kExitError);
}

TEST_F(Cli, ParseErrors) {
  EXPECT_EQ(call({}).code, kExitError);
  EXPECT_EQ(call({"query", "--engine", "nope"}).code, kExitError);
  EXPECT_EQ(call({"--help"}).code, kExitOk);
}

}  // namespace
}  // namespace encsim::cli
