#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/chain/chain_data.h"
#include "botdetect/dataset/labels.h"

namespace botdetect::cli {

struct FixtureOptions {
  std::uint64_t seed = 1;
  std::uint32_t scale = 1;
};

struct FixtureSummary {
  std::size_t blocks = 0;
  std::size_t transactions = 0;
  std::size_t logs = 0;
  std::size_t bots = 0;    // binary-labeled
  std::size_t humans = 0;  // binary-labeled
  std::size_t test_bots = 0;
  std::size_t test_humans = 0;
  std::size_t mev_per_class = 0;
  std::size_t senders = 0;
};

// Synthetic chain with scripted populations:
//  - trading bots: one router swap every 24 blocks at a fixed hour, constant
//    gas, non-round amounts, swap logs;
//  - humans: transactions in waking hours with idle gaps, round values,
//    varied gas, ETH and token transfers;
//  - arbitrage, sandwich and liquidation bots for the MEV dataset.
// Every sender in the last two blocks is a labeled trading bot or human.
struct Fixture {
  ChainData data;
  std::vector<LabeledAccount> labels;      // binary + fine label
  std::vector<LabeledAccount> mev_labels;  // MEV class
  FixtureSummary summary;
};

Fixture generate_fixture(const FixtureOptions& options);

// Writes blocks.ndjson, transactions.ndjson, logs.ndjson, labels.csv,
// mev_labels.csv and run.json (a config using relative paths) into `dir`.
FixtureSummary write_fixture(const std::filesystem::path& dir, const FixtureOptions& options);

nlohmann::ordered_json fixture_run_config(const Fixture& f, const FixtureOptions& options);

}  // namespace botdetect::cli
