#include "botdetect/chain/chain_data.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "botdetect/common/error.h"

namespace botdetect {
namespace {

using nlohmann::json;

// Reads one NDJSON file, handing (line number, parsed object) to `fn`.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw RecordError(path.string(), line_no, "<record>",
                        std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object())
      throw RecordError(path.string(), line_no, "<record>",
                        "expected a JSON object");
    fn(line_no, obj);
  }
}

class FieldReader {
 public:
  FieldReader(const std::filesystem::path& file, std::size_t line,
              const json& obj)
      : file_(file.string()), line_(line), obj_(obj) {}

  const json& get(const char* field) const {
    auto it = obj_.find(field);
    if (it == obj_.end()) fail(field, "missing");
    return *it;
  }

  std::uint64_t u64(const char* field) const {
    const json& v = get(field);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(field, "expected a non-negative integer");
  }

  std::int64_t i64(const char* field) const {
    const json& v = get(field);
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<std::int64_t>();
  }

  U256 big(const char* field) const {
    const json& v = get(field);
    try {
      if (v.is_string()) return parse_u256(v.get<std::string>());
      if (v.is_number_unsigned()) return U256(v.get<std::uint64_t>());
    } catch (const std::invalid_argument& e) {
      fail(field, e.what());
    }
    fail(field, "expected a decimal or hex string");
  }

  template <typename T>
  T fixed(const char* field) const {
    return fixed_value<T>(field, get(field));
  }

  template <typename T>
  T fixed_value(const char* field, const json& v) const {
    if (!v.is_string()) fail(field, "expected a hex string");
    try {
      return T::from_hex(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(field, e.what());
    }
  }

  Bytes bytes(const char* field) const {
    const json& v = get(field);
    if (!v.is_string()) fail(field, "expected a hex string");
    try {
      return from_hex(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(field, e.what());
    }
  }

  [[noreturn]] void fail(const char* field, const std::string& what) const {
    throw RecordError(file_, line_, field, what);
  }

 private:
  std::string file_;
  std::size_t line_;
  const json& obj_;
};

}  // namespace

ChainData::ChainData(BlockInterval range, std::vector<Block> blocks,
                     std::vector<Transaction> txs, std::vector<LogEvent> logs)
    : range_(range),
      blocks_(std::move(blocks)),
      txs_(std::move(txs)),
      logs_(std::move(logs)) {
  if (range_.empty()) throw InputError("empty block range");
  std::sort(blocks_.begin(), blocks_.end(),
            [](const Block& a, const Block& b) { return a.number < b.number; });
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    if (!range_.contains(b.number))
      throw InputError("block " + std::to_string(b.number) + " outside range");
    if (i > 0 && blocks_[i - 1].number == b.number)
      throw InputError("duplicate block " + std::to_string(b.number));
    if (i > 0 && blocks_[i - 1].timestamp > b.timestamp)
      throw InputError("block timestamps decrease at block " +
                       std::to_string(b.number));
    block_pos_[b.number] = i;
  }

  std::sort(txs_.begin(), txs_.end(),
            [](const Transaction& a, const Transaction& b) {
              return std::tie(a.block_number, a.index) <
                     std::tie(b.block_number, b.index);
            });
  for (std::size_t i = 0; i < txs_.size(); ++i) {
    const Transaction& tx = txs_[i];
    const Block* block = find_block(tx.block_number);
    if (block == nullptr)
      throw InputError("transaction " + tx.hash.prefixed() +
                       " references unknown block " +
                       std::to_string(tx.block_number));
    if (tx.index >= block->tx_count)
      throw InputError("transaction " + tx.hash.prefixed() +
                       " index exceeds block txCount");
    if (i > 0 && txs_[i - 1].block_number == tx.block_number &&
        txs_[i - 1].index == tx.index)
      throw InputError("duplicate transaction position in block " +
                       std::to_string(tx.block_number));
    by_sender_[tx.from].push_back(i);
    if (tx.to) by_recipient_[*tx.to].push_back(i);
  }

  std::sort(logs_.begin(), logs_.end(),
            [](const LogEvent& a, const LogEvent& b) {
              return std::tie(a.block_number, a.log_index) <
                     std::tie(b.block_number, b.log_index);
            });
  for (const LogEvent& log : logs_) {
    if (!range_.contains(log.block_number))
      throw InputError("log outside block range");
  }
}

const Block* ChainData::find_block(std::uint64_t number) const {
  auto it = block_pos_.find(number);
  return it == block_pos_.end() ? nullptr : &blocks_[it->second];
}

std::set<Address> ChainData::senders_in_blocks(
    const BlockInterval& blocks) const {
  std::set<Address> out;
  if (blocks.empty()) return out;
  auto first = std::lower_bound(
      txs_.begin(), txs_.end(), blocks.lo,
      [](const Transaction& t, std::uint64_t b) { return t.block_number < b; });
  for (auto it = first; it != txs_.end() && it->block_number <= blocks.hi; ++it)
    out.insert(it->from);
  return out;
}

AccountHistory ChainData::account_history(const Address& a) const {
  AccountHistory h;
  h.address = a;
  auto collect = [&](const auto& index, std::vector<TimedTx>& into) {
    auto it = index.find(a);
    if (it == index.end()) return;
    into.reserve(it->second.size());
    for (std::size_t pos : it->second) {
      const Transaction& tx = txs_[pos];
      const Block* block = find_block(tx.block_number);
      into.push_back({&tx, block->timestamp, block->tx_count});
    }
  };
  collect(by_sender_, h.out_txs);
  collect(by_recipient_, h.in_txs);
  return h;
}

ChainData load_chain_data(const ChainPaths& paths, const BlockInterval& range) {
  if (range.empty()) throw InputError("empty block range");

  std::vector<Block> blocks;
  std::unordered_map<std::uint64_t, std::uint64_t> tx_counts;
  for_each_record(paths.blocks, [&](std::size_t line, const json& obj) {
    FieldReader r(paths.blocks, line, obj);
    Block b;
    b.number = r.u64("number");
    b.timestamp = r.i64("timestamp");
    b.tx_count = r.u64("txCount");
    if (!range.contains(b.number)) return;
    if (!tx_counts.emplace(b.number, b.tx_count).second)
      r.fail("number", "duplicate block");
    blocks.push_back(b);
  });

  std::vector<Transaction> txs;
  for_each_record(paths.txs, [&](std::size_t line, const json& obj) {
    FieldReader r(paths.txs, line, obj);
    Transaction tx;
    tx.block_number = r.u64("blockNumber");
    if (!range.contains(tx.block_number)) return;
    tx.hash = r.fixed<Hash32>("hash");
    tx.index = r.u64("index");
    tx.from = r.fixed<Address>("from");
    const json& to = r.get("to");
    if (!to.is_null()) tx.to = r.fixed_value<Address>("to", to);
    tx.value = r.big("value");
    tx.gas_limit = r.u64("gasLimit");
    tx.gas_price = r.big("gasPrice");
    tx.input = r.bytes("input");
    const std::uint64_t type = r.u64("type");
    if (type > 2) r.fail("type", "expected 0, 1 or 2");
    tx.tx_type = static_cast<int>(type);
    const std::uint64_t status = r.u64("status");
    if (status > 1) r.fail("status", "expected 0 or 1");
    tx.status = static_cast<int>(status);
    auto block = tx_counts.find(tx.block_number);
    if (block == tx_counts.end())
      r.fail("blockNumber", "block not present in blocks export");
    if (tx.index >= block->second)
      r.fail("index", "index not below the block's txCount");
    txs.push_back(std::move(tx));
  });

  std::vector<LogEvent> logs;
  for_each_record(paths.logs, [&](std::size_t line, const json& obj) {
    FieldReader r(paths.logs, line, obj);
    LogEvent log;
    log.block_number = r.u64("blockNumber");
    if (!range.contains(log.block_number)) return;
    log.emitting_contract = r.fixed<Address>("address");
    const json& topics = r.get("topics");
    if (!topics.is_array() || topics.size() > 4)
      r.fail("topics", "expected an array of at most 4 topics");
    for (const json& t : topics)
      log.topics.push_back(r.fixed_value<Hash32>("topics", t));
    log.data = r.bytes("data");
    if (log.data.size() % 32 != 0)
      r.fail("data", "length is not a multiple of 32 bytes");
    log.tx_hash = r.fixed<Hash32>("txHash");
    log.log_index = r.u64("logIndex");
    logs.push_back(std::move(log));
  });

  return ChainData(range, std::move(blocks), std::move(txs), std::move(logs));
}

void write_chain_data(const ChainData& data, const ChainPaths& paths) {
  using ojson = nlohmann::ordered_json;
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    return out;
  };

  auto blocks = open(paths.blocks);
  for (const Block& b : data.blocks()) {
    ojson o;
    o["number"] = b.number;
    o["timestamp"] = b.timestamp;
    o["txCount"] = b.tx_count;
    blocks << o.dump() << '\n';
  }

  auto txs = open(paths.txs);
  for (const Transaction& tx : data.transactions()) {
    ojson o;
    o["hash"] = tx.hash.prefixed();
    o["blockNumber"] = tx.block_number;
    o["index"] = tx.index;
    o["from"] = tx.from.prefixed();
    o["to"] = tx.to ? ojson(tx.to->prefixed()) : ojson(nullptr);
    o["value"] = to_decimal(tx.value);
    o["gasLimit"] = tx.gas_limit;
    o["gasPrice"] = to_decimal(tx.gas_price);
    o["input"] = "0x" + to_hex(tx.input);
    o["type"] = tx.tx_type;
    o["status"] = tx.status;
    txs << o.dump() << '\n';
  }

  auto logs = open(paths.logs);
  for (const LogEvent& log : data.logs()) {
    ojson o;
    o["address"] = log.emitting_contract.prefixed();
    ojson topics = ojson::array();
    for (const Hash32& t : log.topics) topics.push_back(t.prefixed());
    o["topics"] = std::move(topics);
    o["data"] = "0x" + to_hex(log.data);
    o["blockNumber"] = log.block_number;
    o["txHash"] = log.tx_hash.prefixed();
    o["logIndex"] = log.log_index;
    logs << o.dump() << '\n';
  }
}

}  // namespace botdetect
