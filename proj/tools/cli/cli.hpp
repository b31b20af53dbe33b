// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: dataset generation, enrollment, queries, trial runs
// and cost reports. Results are JSON lines with a fixed field order.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "encsim/eval.hpp"
#include "encsim/packing.hpp"

namespace encsim::cli {

enum class Command { Gen, Enroll, Query, Bench, Costs };
enum class KeyMode { Auto, BabyOnly, None, List };
enum class Scenario { Membership, Index, OrderedId, OnlineAggregation };

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

struct RunConfig {
  Command command = Command::Gen;
  std::size_t ell = 512;
  std::size_t numSlots = 1024;
  int maxLevel = 12;
  std::size_t n1 = 23;
  int kappa = 10;
  std::optional<double> delta;  // unset: midpoint of the plaintext score gap
  std::optional<Engine> engine;  // unset: the layout's native engine
  Layout layout = Layout::FlatConcat;
  Scenario scenario = Scenario::Membership;
  std::size_t K = 1024;
  std::size_t Km = 3;
  std::size_t identities = 0;
  std::size_t gamma = 4;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t trials = 3;
  std::size_t groups = 1;
  KeyMode keys = KeyMode::Auto;
  std::vector<int> keyList;
  bool measure = false;
  std::optional<std::uint64_t> sms;
  std::uint64_t freeBytes = 80ull << 30;
  std::uint64_t ctBytes = 1ull << 20;
  std::string datasetPath;
  std::string dbPath;
  std::string reportPath;
};

Engine defaultEngine(Layout layout) noexcept;

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv and executes. Environment variables ENCSIM_DATASET, ENCSIM_DB
// and ENCSIM_REPORT supply paths not given as flags.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace encsim::cli
