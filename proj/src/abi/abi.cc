#include "botdetect/abi/abi.h"

#include <algorithm>
#include <map>

namespace botdetect {
namespace {

using enum ParamKind;

constexpr AbiParam kExactInParams[] = {{"amountIn", kUint256},
                                       {"amountOutMin", kUint256},
                                       {"path", kAddressArray},
                                       {"to", kAddress},
                                       {"deadline", kUint256}};
constexpr AbiParam kExactInNoDeadlineParams[] = {{"amountIn", kUint256},
                                                 {"amountOutMin", kUint256},
                                                 {"path", kAddressArray},
                                                 {"to", kAddress}};
constexpr AbiParam kExactOutParams[] = {{"amountOut", kUint256},
                                        {"amountInMax", kUint256},
                                        {"path", kAddressArray},
                                        {"to", kAddress},
                                        {"deadline", kUint256}};
constexpr AbiParam kEthForExactParams[] = {{"amountOut", kUint256},
                                           {"path", kAddressArray},
                                           {"to", kAddress},
                                           {"deadline", kUint256}};

constexpr std::string_view kInRelevant = "<sender>,amountIn,to,path";
constexpr std::string_view kOutRelevant = "<sender>,amountOut,to,path";

// The four-argument router variant is tabulated with "amountOut" as its
// relevant amount although it carries no such parameter; the closest word,
// amountOutMin, is used with the "out" role.
constexpr FunctionSpec kFunctions[] = {
    {"swapExactTokensForTokens",
     "swapExactTokensForTokens(uint256,uint256,address[],address,uint256)",
     "38ed1739", kExactInParams, "amountIn", AmountRole::kIn, kInRelevant},
    {"swapExactTokensForTokens",
     "swapExactTokensForTokens(uint256,uint256,address[],address)", "472b43f3",
     kExactInNoDeadlineParams, "amountOutMin", AmountRole::kOut, kOutRelevant},
    {"swapTokensForExactTokens",
     "swapTokensForExactTokens(uint256,uint256,address[],address,uint256)",
     "8803dbee", kExactOutParams, "amountOut", AmountRole::kOut, kOutRelevant},
    {"swapTokensForExactETH",
     "swapTokensForExactETH(uint256,uint256,address[],address,uint256)",
     "4a25d94a", kExactOutParams, "amountOut", AmountRole::kOut, kOutRelevant},
    {"swapExactTokensForETH",
     "swapExactTokensForETH(uint256,uint256,address[],address,uint256)",
     "18cbafe5", kExactInParams, "amountIn", AmountRole::kIn, kInRelevant},
    {"swapETHForExactTokens",
     "swapETHForExactTokens(uint256,address[],address,uint256)", "fb3bdb41",
     kEthForExactParams, "amountOut", AmountRole::kOut, kOutRelevant},
    {"swapExactTokensForTokensSupportingFeeOnTransferTokens",
     "swapExactTokensForTokensSupportingFeeOnTransferTokens(uint256,uint256,"
     "address[],address,uint256)",
     "5c11d795", kExactInParams, "amountIn", AmountRole::kIn, kInRelevant},
    {"swapExactTokensForETHSupportingFeeOnTransferTokens",
     "swapExactTokensForETHSupportingFeeOnTransferTokens(uint256,uint256,"
     "address[],address,uint256)",
     "791ac947", kExactInParams, "amountIn", AmountRole::kIn, kInRelevant},
};

constexpr std::string_view kTransferIndexed[] = {"from", "to"};
constexpr std::string_view kTransferData[] = {"value"};
constexpr std::string_view kSwapV2Indexed[] = {"sender", "to"};
constexpr std::string_view kSwapV2Data[] = {"amount0In", "amount1In",
                                            "amount0Out", "amount1Out"};
constexpr std::string_view kSwapV3Indexed[] = {"sender", "recipient"};
constexpr std::string_view kSwapV3Data[] = {"amount0", "amount1",
                                            "sqrtPriceX96", "liquidity",
                                            "tick"};

constexpr EventSpec kEvents[] = {
    {"Transfer", EventKind::kTransfer, "Transfer(address,address,uint256)",
     "ddf252ad", kTransferIndexed, kTransferData, "from,to,value"},
    {"Swap", EventKind::kSwapV2,
     "Swap(address,uint256,uint256,uint256,uint256,address)", "d78ad95f",
     kSwapV2Indexed, kSwapV2Data,
     "sender,amount0In,amount1In,amount0Out,amount1Out,to"},
    {"Swap", EventKind::kSwapV3,
     "Swap(address,address,int256,int256,uint160,uint128,int24)", "c42079f9",
     kSwapV3Indexed, kSwapV3Data, "sender,recipient,amount0,amount1"},
};

constexpr int hex_nibble(char c) {
  return c <= '9' ? c - '0' : c - 'a' + 10;
}

constexpr bool prefix_matches(const std::uint8_t* digest,
                              std::string_view printed) {
  for (std::size_t i = 0; i < 4; ++i) {
    int byte = hex_nibble(printed[2 * i]) << 4 | hex_nibble(printed[2 * i + 1]);
    if (digest[i] != byte) return false;
  }
  return true;
}

constexpr bool function_prefixes_match() {
  for (const FunctionSpec& f : kFunctions) {
    Selector s = selector_of(f.signature);
    if (!prefix_matches(s.data(), f.printed_prefix)) return false;
  }
  return true;
}

constexpr bool event_prefixes_match() {
  for (const EventSpec& e : kEvents) {
    auto digest = keccak256(e.signature);
    if (!prefix_matches(digest.data(), e.printed_prefix)) return false;
  }
  return true;
}

static_assert(function_prefixes_match(),
              "function selectors disagree with the tabulated prefixes");
static_assert(event_prefixes_match(),
              "event topics disagree with the tabulated prefixes");

std::string_view kind_name(ParamKind k) {
  switch (k) {
    case kUint256:
      return "uint256";
    case kAddress:
      return "address";
    case kAddressArray:
      return "address[]";
  }
  return "?";
}

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::kTransfer:
      return "Transfer";
    case EventKind::kSwapV2:
      return "SwapV2";
    case EventKind::kSwapV3:
      return "SwapV3";
  }
  return "?";
}

bool word_is_address(const std::uint8_t* word) {
  return std::all_of(word, word + 12, [](std::uint8_t b) { return b == 0; });
}

Address address_from_word(const std::uint8_t* word) {
  Address a;
  std::copy(word + 12, word + 32, a.bytes.begin());
  return a;
}

using ParamValue = std::variant<U256, Address, std::vector<Address>>;

// Decodes the argument block (calldata minus the selector). Returns an error
// message on failure.
std::optional<std::string> decode_params(std::span<const std::uint8_t> args,
                                         std::span<const AbiParam> params,
                                         std::map<std::string_view, ParamValue>& out) {
  const std::size_t head_size = params.size() * 32;
  if (args.size() < head_size)
    return "calldata shorter than the static head (" +
           std::to_string(args.size()) + " < " + std::to_string(head_size) +
           " bytes)";
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::uint8_t* word = args.data() + 32 * i;
    const AbiParam& p = params[i];
    switch (p.kind) {
      case kUint256:
        out[p.name] = u256_from_word(word);
        break;
      case kAddress:
        if (!word_is_address(word))
          return "parameter '" + std::string(p.name) + "' has dirty high bytes";
        out[p.name] = address_from_word(word);
        break;
      case kAddressArray: {
        U256 offset = u256_from_word(word);
        if (offset % 32 != 0 || offset + 32 > args.size())
          return "offset of '" + std::string(p.name) + "' out of bounds";
        const std::size_t off = static_cast<std::size_t>(offset);
        U256 length = u256_from_word(args.data() + off);
        const std::size_t available = (args.size() - off - 32) / 32;
        if (length > available)
          return "length of '" + std::string(p.name) + "' exceeds calldata";
        std::vector<Address> elems;
        const std::size_t n = static_cast<std::size_t>(length);
        elems.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
          const std::uint8_t* elem = args.data() + off + 32 * (k + 1);
          if (!word_is_address(elem))
            return "element of '" + std::string(p.name) + "' has dirty high bytes";
          elems.push_back(address_from_word(elem));
        }
        out[p.name] = std::move(elems);
        break;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(AmountRole role) {
  return role == AmountRole::kIn ? "in" : "out";
}

std::span<const FunctionSpec> function_specs() { return kFunctions; }
std::span<const EventSpec> event_specs() { return kEvents; }

const FunctionSpec* find_function(const Selector& selector) {
  for (const FunctionSpec& f : kFunctions)
    if (f.selector() == selector) return &f;
  return nullptr;
}

const EventSpec* find_event(const Hash32& topic0) {
  for (const EventSpec& e : kEvents)
    if (e.topic0() == topic0) return &e;
  return nullptr;
}

nlohmann::ordered_json signature_table_json() {
  using ojson = nlohmann::ordered_json;
  ojson functions = ojson::array();
  for (const FunctionSpec& f : kFunctions) {
    ojson params = ojson::array();
    for (const AbiParam& p : f.params)
      params.push_back({{"name", p.name}, {"type", kind_name(p.kind)}});
    functions.push_back({{"name", f.name},
                         {"type", "Function"},
                         {"signature", f.signature},
                         {"selector", "0x" + to_hex(f.selector().data(), 4)},
                         {"params", std::move(params)},
                         {"relevant", f.relevant},
                         {"amount_param", f.amount_param},
                         {"amount_role", to_string(f.role)}});
  }
  ojson events = ojson::array();
  for (const EventSpec& e : kEvents) {
    events.push_back({{"name", e.name},
                      {"type", "Event"},
                      {"kind", event_kind_name(e.kind)},
                      {"signature", e.signature},
                      {"topic0", e.topic0().prefixed()},
                      {"indexed", std::vector<std::string_view>(e.indexed.begin(), e.indexed.end())},
                      {"data", std::vector<std::string_view>(e.data.begin(), e.data.end())},
                      {"relevant", e.relevant}});
  }
  return {{"version", 1}, {"events", std::move(events)},
          {"functions", std::move(functions)}};
}

std::optional<DecodedSwapCall> decode_swap_call(const Transaction& tx,
                                                Diagnostics* diag) {
  if (!tx.to || tx.input.size() < 4) return std::nullopt;
  Selector sel{tx.input[0], tx.input[1], tx.input[2], tx.input[3]};
  const FunctionSpec* spec = find_function(sel);
  if (spec == nullptr) return std::nullopt;

  auto fail = [&](const std::string& why) -> std::optional<DecodedSwapCall> {
    if (diag)
      diag->warn("tx " + tx.hash.prefixed() + ": cannot decode " +
                 std::string(spec->name) + ": " + why);
    return std::nullopt;
  };

  std::map<std::string_view, ParamValue> values;
  std::span<const std::uint8_t> args(tx.input.data() + 4, tx.input.size() - 4);
  if (auto err = decode_params(args, spec->params, values)) return fail(*err);

  DecodedSwapCall call;
  call.spec = spec;
  call.function_name = std::string(spec->name);
  call.sender = tx.from;
  call.amount = std::get<U256>(values.at(spec->amount_param));
  call.amount_role = spec->role;
  call.to = std::get<Address>(values.at("to"));
  call.path = std::get<std::vector<Address>>(values.at("path"));
  if (call.path.size() < 2)
    return fail("path has " + std::to_string(call.path.size()) +
                " entries, need at least 2");
  return call;
}

std::optional<DecodedLog> decode_log(const LogEvent& log, Diagnostics* diag) {
  if (log.topics.empty()) return std::nullopt;
  const EventSpec* spec = find_event(log.topics[0]);
  if (spec == nullptr) return std::nullopt;

  auto fail = [&](const std::string& why) -> std::optional<DecodedLog> {
    if (diag)
      diag->warn("log " + log.tx_hash.prefixed() + "#" +
                 std::to_string(log.log_index) + ": cannot decode " +
                 std::string(spec->signature) + ": " + why);
    return std::nullopt;
  };

  const std::size_t want_topics = spec->indexed.size() + 1;
  if (log.topics.size() != want_topics)
    return fail("expected " + std::to_string(want_topics) + " topics, got " +
                std::to_string(log.topics.size()));
  const std::size_t want_data = spec->data.size() * 32;
  if (log.data.size() < want_data)
    return fail("data has " + std::to_string(log.data.size()) +
                " bytes, need " + std::to_string(want_data));
  for (std::size_t i = 1; i < log.topics.size(); ++i)
    if (!word_is_address(log.topics[i].bytes.data()))
      return fail("indexed address topic has dirty high bytes");

  auto topic_addr = [&](std::size_t i) {
    return address_from_word(log.topics[i].bytes.data());
  };
  auto data_word = [&](std::size_t i) { return log.data.data() + 32 * i; };

  DecodedLog out;
  out.contract = log.emitting_contract;
  out.block_number = log.block_number;
  out.tx_hash = log.tx_hash;
  out.log_index = log.log_index;
  switch (spec->kind) {
    case EventKind::kTransfer:
      out.event = TransferEvent{topic_addr(1), topic_addr(2),
                                u256_from_word(data_word(0))};
      break;
    case EventKind::kSwapV2:
      out.event = SwapV2Event{topic_addr(1),
                              u256_from_word(data_word(0)),
                              u256_from_word(data_word(1)),
                              u256_from_word(data_word(2)),
                              u256_from_word(data_word(3)),
                              topic_addr(2)};
      break;
    case EventKind::kSwapV3:
      out.event = SwapV3Event{topic_addr(1), topic_addr(2),
                              i256_from_word(data_word(0)),
                              i256_from_word(data_word(1))};
      break;
  }
  return out;
}

}  // namespace botdetect
