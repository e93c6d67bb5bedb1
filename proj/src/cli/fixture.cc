#include "botdetect/cli/fixture.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <string>

#include "botdetect/abi/abi.h"
#include "botdetect/common/error.h"
#include "botdetect/common/random.h"

namespace botdetect::cli {
namespace {

constexpr std::uint64_t kFirstBlock = 17'000'000;
constexpr std::int64_t kFirstTimestamp = 1'700'006'400;  // midnight UTC
constexpr std::int64_t kBlockSeconds = 3600;
constexpr std::size_t kBlocksPerScale = 200;
constexpr std::size_t kTestBlocks = 2;

constexpr Selector kSwapExactTokensForTokens =
    selector_of("swapExactTokensForTokens(uint256,uint256,address[],address,uint256)");
constexpr Selector kSwapExactTokensForEth =
    selector_of("swapExactTokensForETH(uint256,uint256,address[],address,uint256)");
constexpr Selector kTransfer = selector_of("transfer(address,uint256)");
constexpr Selector kV3PoolSwap = selector_of("swap(address,bool,int256,uint160,bytes)");
constexpr Selector kLiquidationCall =
    selector_of("liquidationCall(address,address,address,uint256,bool)");
constexpr Hash32 kTransferTopic = topic0_of("Transfer(address,address,uint256)");
constexpr Hash32 kSwapV2Topic = topic0_of("Swap(address,uint256,uint256,uint256,uint256,address)");
constexpr Hash32 kSwapV3Topic = topic0_of("Swap(address,address,int256,int256,uint160,uint128,int24)");

U256 pow10(unsigned e) {
  U256 v = 1;
  for (unsigned i = 0; i < e; ++i) v *= 10;
  return v;
}

const U256 kEther = pow10(18);
const U256 kGwei = pow10(9);

Word address_word(const Address& a) {
  Word w{};
  std::copy(a.bytes.begin(), a.bytes.end(), w.begin() + 12);
  return w;
}

Hash32 address_topic(const Address& a) { return Hash32{address_word(a)}; }

void put(Bytes& out, const Word& w) { out.insert(out.end(), w.begin(), w.end()); }

Bytes call(const Selector& s) { return Bytes(s.begin(), s.end()); }

Bytes encode_router_swap(const Selector& s, const U256& amount_in, const U256& amount_out_min,
                         const std::vector<Address>& path, const Address& to,
                         std::uint64_t deadline) {
  Bytes b = call(s);
  put(b, word_from_u256(amount_in));
  put(b, word_from_u256(amount_out_min));
  put(b, word_from_u256(U256(5 * 32)));
  put(b, address_word(to));
  put(b, word_from_u256(U256(deadline)));
  put(b, word_from_u256(U256(path.size())));
  for (const auto& a : path) put(b, address_word(a));
  return b;
}

Bytes encode_transfer(const Address& to, const U256& value) {
  Bytes b = call(kTransfer);
  put(b, address_word(to));
  put(b, word_from_u256(value));
  return b;
}

Bytes data_of(std::initializer_list<Word> words) {
  Bytes b;
  for (const auto& w : words) put(b, w);
  return b;
}

struct Pending {
  Transaction tx;
  int priority = 2;  // lower sorts earlier in the block
  std::vector<LogEvent> logs;
};

class Generator {
 public:
  explicit Generator(const FixtureOptions& o)
      : options_(o),
        rng_(derive_seed(o.seed, 0xf1c7)),
        n_blocks_(kBlocksPerScale * o.scale),
        pending_(n_blocks_) {
    router_ = contract("router-v2");
    lending_pool_ = contract("lending-pool");
    for (const char* t : {"WETH", "USDC", "DAI", "LINK", "UNI", "AAVE"})
      tokens_.push_back(contract(std::string("token-") + t));
    for (int i = 0; i < 4; ++i) v3_pools_.push_back(contract("v3-pool-" + std::to_string(i)));
  }

  Fixture run() {
    const std::size_t s = options_.scale;
    Fixture f;
    for (std::size_t i = 0; i < 24 * s; ++i) trading_bot(f, true, i);
    for (std::size_t i = 0; i < 24 * s; ++i) human(f, true, i);
    for (std::size_t i = 0; i < 30 * s; ++i) trading_bot(f, false, i);
    for (std::size_t i = 0; i < 30 * s; ++i) human(f, false, i);
    for (std::size_t i = 0; i < 22 * s; ++i) arbitrage_bot(f, i);
    for (std::size_t i = 0; i < 22 * s; ++i) sandwich_bot(f, i);
    for (std::size_t i = 0; i < 22 * s; ++i) liquidation_bot(f, i);
    f.summary.mev_per_class = 22 * s;
    assemble(f);
    return f;
  }

 private:
  Address account(const std::string& tag, std::size_t zero_bytes) {
    const auto d = keccak256("fixture-account:" + std::to_string(options_.seed) + ":" + tag);
    Address a;
    std::copy(d.begin() + 12, d.end(), a.bytes.begin());
    std::fill(a.bytes.begin(), a.bytes.begin() + static_cast<std::ptrdiff_t>(zero_bytes), 0);
    return a;
  }

  Address contract(const std::string& tag) {
    const auto d = keccak256("fixture-contract:" + tag);
    Address a;
    std::copy(d.begin() + 12, d.end(), a.bytes.begin());
    return a;
  }

  Address random_eoa() { return account("eoa-" + std::to_string(eoa_counter_++), 0); }

  std::size_t last_regular_block() const { return n_blocks_ - kTestBlocks; }

  std::int64_t timestamp(std::size_t block) const {
    return kFirstTimestamp + static_cast<std::int64_t>(block) * kBlockSeconds;
  }

  // Integer with `digits` digits and a non-zero last digit.
  U256 ragged(unsigned digits) {
    U256 v = rng_.range(1, 9);
    for (unsigned i = 1; i + 1 < digits; ++i) v = v * 10 + rng_.range(0, 9);
    return v * 10 + rng_.range(1, 9);
  }

  U256 round_amount(unsigned decimals) {
    static constexpr int kMantissa[] = {1, 2, 5, 10, 20, 25, 50, 100, 200, 500, 1000};
    return U256(kMantissa[rng_.index(std::size(kMantissa))]) * pow10(decimals);
  }

  U256 gwei(std::uint64_t lo, std::uint64_t hi) { return U256(rng_.range(lo, hi)) * kGwei; }

  Pending& add(std::size_t block, Transaction tx, int priority) {
    tx.block_number = kFirstBlock + block;
    tx.hash = Hash32{keccak256("fixture-tx:" + std::to_string(options_.seed) + ":" +
                               std::to_string(tx_counter_++))};
    pending_[block].push_back({std::move(tx), priority, {}});
    return pending_[block].back();
  }

  static LogEvent log(const Address& contract, std::vector<Hash32> topics, Bytes data) {
    LogEvent l;
    l.emitting_contract = contract;
    l.topics = std::move(topics);
    l.data = std::move(data);
    return l;
  }

  LogEvent swap_v2_log(const Address& to, const U256& in, const U256& out) {
    return log(contract("pair-" + std::to_string(rng_.index(8))),
               {kSwapV2Topic, address_topic(router_), address_topic(to)},
               data_of({word_from_u256(in), word_from_u256(0), word_from_u256(0),
                        word_from_u256(out)}));
  }

  LogEvent swap_v3_log(const Address& pool, const Address& recipient, const U256& in,
                       const U256& out) {
    return log(pool, {kSwapV3Topic, address_topic(recipient), address_topic(recipient)},
               data_of({word_from_i256(I256(in)), word_from_i256(-I256(out)),
                        word_from_u256(pow10(28) + rng_.range(0, 1'000'000)),
                        word_from_u256(pow10(20) + rng_.range(0, 1'000'000)),
                        word_from_i256(I256(static_cast<std::int64_t>(rng_.range(0, 400'000)) -
                                            200'000))}));
  }

  LogEvent transfer_log(const Address& token, const Address& from, const Address& to,
                        const U256& value) {
    return log(token, {kTransferTopic, address_topic(from), address_topic(to)},
               data_of({word_from_u256(value)}));
  }

  Transaction base(const Address& from, std::optional<Address> to, std::uint64_t gas_limit,
                   const U256& gas_price, int type) {
    Transaction t;
    t.from = from;
    t.to = to;
    t.gas_limit = gas_limit;
    t.gas_price = gas_price;
    t.tx_type = type;
    t.status = 1;
    return t;
  }

  std::uint64_t deadline(std::size_t block) const {
    return static_cast<std::uint64_t>(timestamp(block) + 1200);
  }

  void label(Fixture& f, const Address& a, BinaryLabel b, std::string fine, bool test) {
    LabeledAccount l;
    l.address = a;
    l.binary = b;
    l.fine = std::move(fine);
    f.labels.push_back(l);
    if (b == BinaryLabel::kBot) {
      ++f.summary.bots;
      if (test) ++f.summary.test_bots;
    } else {
      ++f.summary.humans;
      if (test) ++f.summary.test_humans;
    }
  }

  // Regular swapper: same hour every day, same gas, ragged amounts.
  void trading_bot(Fixture& f, bool test, std::size_t i) {
    const Address me = account((test ? "test-bot-" : "bot-") + std::to_string(i),
                               rng_.bernoulli(0.5) ? 1 + rng_.index(2) : 0);
    std::size_t hour;
    if (test)
      hour = (n_blocks_ - 1 - (i % 2)) % 24;
    else
      hour = rng_.index(24);
    const std::uint64_t gas_limit = 200'000 + 10'000 * rng_.range(0, 10);
    const U256 gas_price = gwei(18, 45) + rng_.range(1, 999'999);
    const unsigned digits = static_cast<unsigned>(rng_.range(17, 20));
    const double v3_share = rng_.uniform(0.0, 0.4);
    for (std::size_t b = hour; b < n_blocks_; b += 24) {
      if (!test && b >= last_regular_block()) break;
      const U256 in = ragged(digits);
      const U256 out = ragged(digits);
      if (rng_.bernoulli(v3_share)) {
        const Address& pool = v3_pools_[rng_.index(v3_pools_.size())];
        Bytes input = call(kV3PoolSwap);
        put(input, address_word(me));
        put(input, word_from_u256(1));
        put(input, word_from_i256(I256(in)));
        Pending& p = add(b, base(me, pool, gas_limit, gas_price, 2), 2);
        p.tx.input = std::move(input);
        p.logs.push_back(swap_v3_log(pool, me, in, out));
      } else {
        const std::vector<Address> path{tokens_[0], tokens_[1 + rng_.index(tokens_.size() - 1)]};
        Pending& p = add(b, base(me, router_, gas_limit, gas_price, 2), 2);
        p.tx.input = encode_router_swap(kSwapExactTokensForTokens, in, out, path, me, deadline(b));
        p.logs.push_back(swap_v2_log(me, in, out));
      }
    }
    label(f, me, BinaryLabel::kBot, "trading bot", test);
  }

  // Waking-hours activity with round values and varied gas.
  void human(Fixture& f, bool test, std::size_t i) {
    const Address me = account((test ? "test-human-" : "human-") + std::to_string(i), 0);
    humans_.push_back(me);
    const std::size_t wake = rng_.index(24);
    const std::size_t txs = static_cast<std::size_t>(rng_.range(6, 14));
    std::vector<std::size_t> candidates;
    for (std::size_t b = 0; b < last_regular_block(); ++b)
      if ((b % 24 + 24 - wake) % 24 < 14) candidates.push_back(b);
    std::vector<std::size_t> blocks;
    for (std::size_t k : sample_without_replacement(rng_, candidates.size(),
                                                    std::min(txs, candidates.size())))
      blocks.push_back(candidates[k]);
    if (test) blocks.push_back(n_blocks_ - 1 - (i % 2));
    std::sort(blocks.begin(), blocks.end());
    for (std::size_t b : blocks) human_tx(me, b);
    label(f, me, BinaryLabel::kHuman, "human", test);
  }

  void human_tx(const Address& me, std::size_t b) {
    const int type = rng_.bernoulli(0.5) ? 2 : 0;
    const U256 gas_price = gwei(8, 90) + rng_.range(0, 999'999'999);
    const double kind = rng_.uniform();
    Pending* p;
    if (kind < 0.45) {
      Address to = humans_.size() > 1 && rng_.bernoulli(0.3) ? humans_[rng_.index(humans_.size())]
                                                             : random_eoa();
      if (to == me) to = random_eoa();
      p = &add(b, base(me, to, 21'000, gas_price, type), 2);
      p->tx.value = round_amount(16);
    } else if (kind < 0.8) {
      const Address& token = tokens_[1 + rng_.index(tokens_.size() - 1)];
      const Address to = random_eoa();
      const U256 value = round_amount(18);
      p = &add(b, base(me, token, rng_.range(45'000, 90'000), gas_price, type), 2);
      p->tx.input = encode_transfer(to, value);
      p->logs.push_back(transfer_log(token, me, to, value));
    } else {
      const U256 in = round_amount(18);
      const U256 out = ragged(18);
      std::vector<Address> path{tokens_[1 + rng_.index(tokens_.size() - 1)], tokens_[0]};
      if (rng_.bernoulli(0.3)) path.push_back(tokens_[1 + rng_.index(tokens_.size() - 1)]);
      p = &add(b, base(me, router_, rng_.range(140'000, 320'000), gas_price, type), 2);
      p->tx.input = encode_router_swap(kSwapExactTokensForTokens, in, out, path, me, deadline(b));
      p->logs.push_back(swap_v2_log(me, in, out));
    }
    if (rng_.bernoulli(0.05)) {
      p->tx.status = 0;
      p->logs.clear();
    }
  }

  std::vector<std::size_t> random_blocks(std::size_t lo, std::size_t hi) {
    const std::size_t count = static_cast<std::size_t>(rng_.range(lo, hi));
    auto picked = sample_without_replacement(rng_, last_regular_block(), count);
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  void mev(Fixture& f, const Address& me, MevClass c) {
    LabeledAccount l;
    l.address = me;
    l.mev = c;
    f.mev_labels.push_back(l);
  }

  // Circular multi-hop swaps at the top of the block.
  void arbitrage_bot(Fixture& f, std::size_t i) {
    const Address me = account("arb-" + std::to_string(i), rng_.bernoulli(0.7) ? 2 : 0);
    const std::uint64_t gas_limit = 380'000 + 1'000 * rng_.range(0, 40);
    for (std::size_t b : random_blocks(10, 20)) {
      const U256 in = ragged(static_cast<unsigned>(rng_.range(18, 20)));
      const U256 out = in + ragged(15);
      std::vector<Address> path{tokens_[0]};
      const std::size_t hops = static_cast<std::size_t>(rng_.range(1, 2));
      for (std::size_t h = 0; h < hops; ++h)
        path.push_back(tokens_[1 + rng_.index(tokens_.size() - 1)]);
      path.push_back(tokens_[0]);
      Pending& p = add(b, base(me, router_, gas_limit, gwei(60, 160) + rng_.range(0, 999'999), 2), 0);
      p.tx.input = encode_router_swap(kSwapExactTokensForTokens, in, out, path, me, deadline(b));
      p.logs.push_back(swap_v2_log(me, in, out));
    }
    mev(f, me, MevClass::kArbitrage);
  }

  // Front-run and back-run pairs around the rest of the block.
  void sandwich_bot(Fixture& f, std::size_t i) {
    const Address me = account("sandwich-" + std::to_string(i), rng_.bernoulli(0.5) ? 1 : 0);
    const std::uint64_t gas_limit = 170'000 + 1'000 * rng_.range(0, 30);
    for (std::size_t b : random_blocks(6, 10)) {
      const Address& token = tokens_[1 + rng_.index(tokens_.size() - 1)];
      const U256 in = ragged(static_cast<unsigned>(rng_.range(18, 21)));
      const U256 bought = ragged(20);
      const U256 price = gwei(200, 450) + rng_.range(0, 999'999'999);
      Pending& front = add(b, base(me, router_, gas_limit, price, 2), 0);
      front.tx.input = encode_router_swap(kSwapExactTokensForTokens, in, bought,
                                          {tokens_[0], token}, me, deadline(b));
      front.logs.push_back(swap_v2_log(me, in, bought));
      const U256 back_out = in + ragged(16);
      Pending& back = add(b, base(me, router_, gas_limit, gwei(5, 12), 2), 3);
      back.tx.input = encode_router_swap(kSwapExactTokensForEth, bought, back_out,
                                         {token, tokens_[0]}, me, deadline(b));
      back.logs.push_back(swap_v2_log(me, bought, back_out));
    }
    mev(f, me, MevClass::kSandwich);
  }

  // Lending-pool liquidations repaying debt with token transfers.
  void liquidation_bot(Fixture& f, std::size_t i) {
    const Address me = account("liquidator-" + std::to_string(i), rng_.bernoulli(0.3) ? 1 : 0);
    for (std::size_t b : random_blocks(4, 8)) {
      const Address& debt = tokens_[1 + rng_.index(tokens_.size() - 1)];
      const Address borrower = random_eoa();
      const U256 amount = ragged(static_cast<unsigned>(rng_.range(19, 22)));
      Bytes input = call(kLiquidationCall);
      put(input, address_word(tokens_[0]));
      put(input, address_word(debt));
      put(input, address_word(borrower));
      put(input, word_from_u256(amount));
      put(input, word_from_u256(0));
      Pending& p = add(b, base(me, lending_pool_, rng_.range(650'000, 950'000),
                               gwei(30, 250) + rng_.range(0, 999'999'999), 2),
                       1);
      p.tx.input = std::move(input);
      if (rng_.bernoulli(0.15)) {
        p.tx.status = 0;
        continue;
      }
      p.logs.push_back(transfer_log(debt, me, lending_pool_, amount));
      p.logs.push_back(transfer_log(debt, me, lending_pool_, ragged(15)));
    }
    mev(f, me, MevClass::kLiquidation);
  }

  void assemble(Fixture& f) {
    std::vector<Block> blocks;
    std::vector<Transaction> txs;
    std::vector<LogEvent> logs;
    for (std::size_t b = 0; b < n_blocks_; ++b) {
      auto& list = pending_[b];
      std::stable_sort(list.begin(), list.end(), [](const Pending& x, const Pending& y) {
        if (x.priority != y.priority) return x.priority < y.priority;
        if (x.tx.gas_price != y.tx.gas_price) return x.tx.gas_price > y.tx.gas_price;
        return x.tx.hash < y.tx.hash;
      });
      const std::size_t filler = static_cast<std::size_t>(rng_.range(20, 150));
      const std::size_t tx_count = list.size() + filler;
      auto positions = sample_without_replacement(rng_, tx_count, list.size());
      std::sort(positions.begin(), positions.end());
      blocks.push_back({kFirstBlock + b, timestamp(b), tx_count});
      std::uint64_t log_index = 0;
      for (std::size_t k = 0; k < list.size(); ++k) {
        Pending& p = list[k];
        p.tx.index = positions[k];
        for (LogEvent& l : p.logs) {
          l.block_number = p.tx.block_number;
          l.tx_hash = p.tx.hash;
          l.log_index = log_index++;
          logs.push_back(std::move(l));
        }
        txs.push_back(std::move(p.tx));
      }
    }
    f.summary.blocks = blocks.size();
    f.summary.transactions = txs.size();
    f.summary.logs = logs.size();
    f.data = ChainData({kFirstBlock, kFirstBlock + n_blocks_ - 1}, std::move(blocks),
                       std::move(txs), std::move(logs));
    f.summary.senders =
        f.data.senders_in_blocks(f.data.block_range()).size();
  }

  FixtureOptions options_;
  Rng rng_;
  std::size_t n_blocks_;
  std::vector<std::vector<Pending>> pending_;
  Address router_;
  Address lending_pool_;
  std::vector<Address> tokens_;
  std::vector<Address> v3_pools_;
  std::vector<Address> humans_;
  std::size_t eoa_counter_ = 0;
  std::size_t tx_counter_ = 0;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

}  // namespace

Fixture generate_fixture(const FixtureOptions& options) {
  if (options.scale < 1) throw InputError("fixture scale must be >= 1");
  return Generator(options).run();
}

nlohmann::ordered_json fixture_run_config(const Fixture& f, const FixtureOptions& options) {
  using nlohmann::ordered_json;
  const auto& range = f.data.block_range();
  ordered_json j;
  j["chain"] = {{"blocks", "blocks.ndjson"},
                {"transactions", "transactions.ndjson"},
                {"logs", "logs.ndjson"}};
  j["labels"] = "labels.csv";
  j["mev_labels"] = "mev_labels.csv";
  j["output_dir"] = "out";
  j["block_range"] = {range.lo, range.hi};
  j["test_block_count"] = 2;
  j["seed"] = options.seed;
  j["workers"] = 1;
  j["clustering"] = {{"algorithms", {"kmeans", "gmm"}},
                     {"k", {5, 15, 30}},
                     {"imputations", {"-1", "mean"}},
                     {"embeddings", {false, true}},
                     {"scaling", "minmax"},
                     {"gmm_covariance", "diagonal"},
                     {"gmm_reg", 1e-6},
                     {"selection_k_max", 15}};
  j["classification"] = {{"models", {"random_forest", "gradient_boosting", "adaboost"}},
                         {"datasets", {"binary", "multiclass"}},
                         {"folds", 20},
                         {"stratified", true},
                         {"scaling", "standardize"},
                         {"imputation", "mean"},
                         {"per_class", 20 * options.scale},
                         {"random_forest", {{"n_trees", 400}}},
                         {"gradient_boosting", {{"rounds", 100}, {"depth", 3}, {"rate", 0.1}}},
                         {"adaboost", {{"rounds", 50}}}};
  j["explain"] = {{"model", "random_forest"},
                  {"dataset", "multiclass"},
                  {"permutations", 50},
                  {"background", 100},
                  {"top", 10}};
  return j;
}

FixtureSummary write_fixture(const std::filesystem::path& dir, const FixtureOptions& options) {
  Fixture f = generate_fixture(options);
  std::filesystem::create_directories(dir);
  write_chain_data(f.data, {dir / "blocks.ndjson", dir / "transactions.ndjson", dir / "logs.ndjson"});

  std::string labels = "address,binary_label,fine_label\n";
  for (const auto& l : f.labels)
    labels += l.address.prefixed() + "," + std::string(to_string(*l.binary)) + "," + *l.fine + "\n";
  write_text(dir / "labels.csv", labels);

  std::string mev = "address,mev_class\n";
  for (const auto& l : f.mev_labels)
    mev += l.address.prefixed() + "," + std::string(to_string(*l.mev)) + "\n";
  write_text(dir / "mev_labels.csv", mev);

  write_text(dir / "run.json", fixture_run_config(f, options).dump(2) + "\n");
  return f.summary;
}

}  // namespace botdetect::cli
