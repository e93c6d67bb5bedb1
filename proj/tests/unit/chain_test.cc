#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <set>

#include "botdetect/chain/chain_data.h"
#include "botdetect/common/error.h"
#include "botdetect/common/parallel.h"
#include "botdetect/common/random.h"
#include "support/support.h"

using namespace botdetect;

TEST(Random, SeedsAreReproducibleAndDistinct) {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(Rng(7).next(), c.next());
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Random, IndexAndRangeStayInBounds) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(rng.index(7), 7u);
    auto r = rng.range(-3, 3);
    EXPECT_GE(r, -3);
    EXPECT_LE(r, 3);
    double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Random, SampleWithoutReplacementIsDistinct) {
  Rng rng(5);
  auto s = sample_without_replacement(rng, 50, 20);
  ASSERT_EQ(s.size(), 20u);
  std::set<std::size_t> uniq(s.begin(), s.end());
  EXPECT_EQ(uniq.size(), 20u);
  for (auto v : s) EXPECT_LT(v, 50u);
}

TEST(Parallel, EveryIndexOnceAndErrorsPropagate) {
  std::vector<std::atomic<int>> hits(101);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Types, HexRoundTrip) {
  Bytes b{0x00, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "00abff");
  EXPECT_EQ(from_hex("0x00ABff"), b);
  EXPECT_THROW(from_hex("abc"), std::invalid_argument);
  EXPECT_THROW(from_hex("zz"), std::invalid_argument);
  auto a = Address::from_hex("0x00000000000000000000000000000000000000Aa");
  EXPECT_EQ(a.hex(), "00000000000000000000000000000000000000aa");
  EXPECT_EQ(a.hex().size(), 40u);
  EXPECT_THROW(Address::from_hex("0x1234"), std::invalid_argument);
}

TEST(Types, WordConversionsMatchIndependentEncoder) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    U256 u = bdtest::random_u256(rng);
    Word w = word_from_u256(u);
    EXPECT_EQ(Bytes(w.begin(), w.end()), bdtest::uint_word(u));
    EXPECT_EQ(u256_from_word(w.data()), u);

    I256 s = bdtest::random_i256(rng);
    Word ws = word_from_i256(s);
    EXPECT_EQ(Bytes(ws.begin(), ws.end()), bdtest::int_word(s));
    EXPECT_EQ(i256_from_word(ws.data()), s);
  }
  Word minus_one;
  minus_one.fill(0xff);
  EXPECT_EQ(i256_from_word(minus_one.data()), I256(-1));
}

TEST(Types, ParseU256) {
  EXPECT_EQ(parse_u256("12345"), U256(12345));
  EXPECT_EQ(parse_u256("0x10"), U256(16));
  EXPECT_EQ(to_decimal(parse_u256("115792089237316195423570985008687907853269984665640564039457584007913129639935")),
            "115792089237316195423570985008687907853269984665640564039457584007913129639935");
  EXPECT_THROW(parse_u256("115792089237316195423570985008687907853269984665640564039457584007913129639936"),
               std::invalid_argument);
  EXPECT_THROW(parse_u256("12a"), std::invalid_argument);
  EXPECT_THROW(parse_u256(""), std::invalid_argument);
}

namespace {

Hash32 hash_of(int i) {
  Hash32 h;
  h.bytes[31] = static_cast<std::uint8_t>(i);
  h.bytes[30] = static_cast<std::uint8_t>(i >> 8);
  return h;
}

Address addr_of(int i) {
  Address a;
  a.bytes[19] = static_cast<std::uint8_t>(i);
  return a;
}

ChainData small_chain() {
  std::vector<Block> blocks{{100, 1000, 2}, {101, 1012, 1}, {102, 1024, 2}};
  std::vector<Transaction> txs;
  auto tx = [&](int id, std::uint64_t block, std::uint64_t index, int from, int to) {
    Transaction t;
    t.hash = hash_of(id);
    t.block_number = block;
    t.index = index;
    t.from = addr_of(from);
    t.to = addr_of(to);
    t.value = U256(id) * 1000;
    t.gas_limit = 21000;
    t.gas_price = 7;
    t.tx_type = 2;
    txs.push_back(t);
  };
  tx(1, 100, 0, 1, 2);
  tx(2, 100, 1, 2, 1);
  tx(3, 101, 0, 1, 3);
  tx(4, 102, 0, 3, 1);
  tx(5, 102, 1, 1, 2);
  LogEvent log;
  log.emitting_contract = addr_of(9);
  log.topics = {hash_of(77)};
  log.data = Bytes(32, 1);
  log.block_number = 101;
  log.tx_hash = hash_of(3);
  return ChainData({100, 102}, blocks, txs, {log});
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST(ChainData, IndicesAreConsistent) {
  ChainData d = small_chain();
  auto h = d.account_history(addr_of(1));
  ASSERT_EQ(h.out_txs.size(), 3u);
  EXPECT_EQ(h.in_txs.size(), 2u);
  for (std::size_t i = 0; i < h.out_txs.size(); ++i) {
    EXPECT_EQ(h.out_txs[i].tx->from, addr_of(1));
    if (i > 0) {
      auto prev = std::pair(h.out_txs[i - 1].tx->block_number, h.out_txs[i - 1].tx->index);
      auto cur = std::pair(h.out_txs[i].tx->block_number, h.out_txs[i].tx->index);
      EXPECT_LT(prev, cur);
    }
  }
  EXPECT_EQ(h.out_txs[1].timestamp, 1012);
  EXPECT_EQ(h.out_txs[2].block_tx_count, 2u);

  auto senders = d.senders_in_blocks({102, 102});
  EXPECT_EQ(senders, (std::set<Address>{addr_of(1), addr_of(3)}));
  EXPECT_EQ(d.find_block(101)->timestamp, 1012);
  EXPECT_EQ(d.find_block(99), nullptr);
}

TEST(ChainData, RejectsBrokenInvariants) {
  std::vector<Block> blocks{{100, 1000, 1}, {101, 900, 1}};
  EXPECT_THROW(ChainData({100, 101}, blocks, {}, {}), InputError);

  std::vector<Block> ok{{100, 1000, 1}};
  Transaction t;
  t.block_number = 100;
  t.index = 3;  // beyond tx_count
  EXPECT_THROW(ChainData({100, 100}, ok, {t}, {}), InputError);
}

TEST(ChainData, WriteLoadIsFixedPoint) {
  auto dir = bdtest::scratch_dir("chain-roundtrip");
  ChainPaths p{dir / "b.ndjson", dir / "t.ndjson", dir / "l.ndjson"};
  ChainData d = small_chain();
  write_chain_data(d, p);
  ChainData loaded = load_chain_data(p, {100, 102});
  EXPECT_EQ(loaded.transactions().size(), 5u);
  EXPECT_EQ(loaded.logs().size(), 1u);
  ChainPaths p2{dir / "b2.ndjson", dir / "t2.ndjson", dir / "l2.ndjson"};
  write_chain_data(loaded, p2);
  auto slurp = [](const std::filesystem::path& f) {
    std::ifstream in(f);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(p.blocks), slurp(p2.blocks));
  EXPECT_EQ(slurp(p.txs), slurp(p2.txs));
  EXPECT_EQ(slurp(p.logs), slurp(p2.logs));

  // Range filter drops records outside.
  ChainData part = load_chain_data(p, {101, 102});
  EXPECT_EQ(part.blocks().size(), 2u);
  EXPECT_EQ(part.transactions().size(), 3u);
}

TEST(ChainData, MalformedRecordNamesFileLineAndField) {
  auto dir = bdtest::scratch_dir("chain-bad");
  ChainPaths p{dir / "b.ndjson", dir / "t.ndjson", dir / "l.ndjson"};
  write_chain_data(small_chain(), p);
  std::ifstream in(p.txs);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  in.close();
  auto pos = lines[2].find("\"value\":\"");
  ASSERT_NE(pos, std::string::npos);
  lines[2].insert(pos + 9, "x");
  write_lines(p.txs, lines);
  try {
    load_chain_data(p, {100, 102});
    FAIL() << "expected RecordError";
  } catch (const RecordError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "value");
    EXPECT_NE(std::string(e.what()).find("t.ndjson:3"), std::string::npos);
  }

  write_lines(p.txs, {"{not json"});
  try {
    load_chain_data(p, {100, 102});
    FAIL() << "expected RecordError";
  } catch (const RecordError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}
