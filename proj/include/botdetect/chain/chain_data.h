#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "botdetect/chain/types.h"

namespace botdetect {

struct Block {
  std::uint64_t number = 0;
  std::int64_t timestamp = 0;  // unix seconds
  std::uint64_t tx_count = 0;
};

struct Transaction {
  Hash32 hash;
  std::uint64_t block_number = 0;
  std::uint64_t index = 0;
  Address from;
  std::optional<Address> to;  // absent for contract creation
  U256 value = 0;             // wei
  std::uint64_t gas_limit = 0;
  U256 gas_price = 0;  // wei per gas
  Bytes input;
  int tx_type = 0;  // 0, 1 or 2
  int status = 1;   // 0 failed, 1 success
};

struct LogEvent {
  Address emitting_contract;
  std::vector<Hash32> topics;
  Bytes data;
  std::uint64_t block_number = 0;
  Hash32 tx_hash;
  std::uint64_t log_index = 0;
};

// A transaction seen from one account, with its block context joined on.
// Borrows from the ChainData it was produced from.
struct TimedTx {
  const Transaction* tx = nullptr;
  std::int64_t timestamp = 0;
  std::uint64_t block_tx_count = 0;
};

struct AccountHistory {
  Address address;
  std::vector<TimedTx> out_txs;  // from == address, ordered by (block, index)
  std::vector<TimedTx> in_txs;   // to == address, same order
};

// Immutable indexed store for one block range. Safe to read concurrently.
class ChainData {
 public:
  ChainData() = default;
  // Validates the invariants below and builds the per-address indices.
  // Records are expected to already be inside `range`.
  ChainData(BlockInterval range, std::vector<Block> blocks,
            std::vector<Transaction> txs, std::vector<LogEvent> logs);

  const BlockInterval& block_range() const { return range_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Transaction>& transactions() const { return txs_; }
  const std::vector<LogEvent>& logs() const { return logs_; }

  const Block* find_block(std::uint64_t number) const;

  // Distinct senders of transactions in `blocks`, in address order.
  std::set<Address> senders_in_blocks(const BlockInterval& blocks) const;

  AccountHistory account_history(const Address& a) const;

 private:
  BlockInterval range_;
  std::vector<Block> blocks_;      // sorted by number
  std::vector<Transaction> txs_;   // sorted by (block, index)
  std::vector<LogEvent> logs_;     // sorted by (block, log index)
  std::unordered_map<std::uint64_t, std::size_t> block_pos_;
  std::unordered_map<Address, std::vector<std::size_t>> by_sender_;
  std::unordered_map<Address, std::vector<std::size_t>> by_recipient_;
};

struct ChainPaths {
  std::filesystem::path blocks;
  std::filesystem::path txs;
  std::filesystem::path logs;
};

// Loads the three NDJSON exports. Records outside `range` are skipped
// silently. Malformed records raise RecordError naming file, line and field.
ChainData load_chain_data(const ChainPaths& paths, const BlockInterval& range);

// Canonical NDJSON serialization; load followed by write is a fixed point.
void write_chain_data(const ChainData& data, const ChainPaths& paths);

}  // namespace botdetect
