#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/abi/keccak.h"
#include "botdetect/chain/chain_data.h"
#include "botdetect/common/diagnostics.h"

namespace botdetect {

using Selector = std::array<std::uint8_t, 4>;

constexpr Selector selector_of(std::string_view signature) {
  auto digest = keccak256(signature);
  return {digest[0], digest[1], digest[2], digest[3]};
}

constexpr Hash32 topic0_of(std::string_view event_signature) {
  return Hash32{keccak256(event_signature)};
}

enum class ParamKind { kUint256, kAddress, kAddressArray };
enum class AmountRole { kIn, kOut };

std::string_view to_string(AmountRole role);

struct AbiParam {
  std::string_view name;
  ParamKind kind;
};

// One modeled router function. `amount_param` names the user-entered amount
// whose value feeds the trade-value features.
struct FunctionSpec {
  std::string_view name;
  std::string_view signature;
  std::string_view printed_prefix;  // "first 8" hex digits of the hash
  std::span<const AbiParam> params;
  std::string_view amount_param;
  AmountRole role;
  std::string_view relevant;  // relevant parameters as tabulated

  Selector selector() const { return selector_of(signature); }
};

enum class EventKind { kTransfer, kSwapV2, kSwapV3 };

struct EventSpec {
  std::string_view name;
  EventKind kind;
  std::string_view signature;
  std::string_view printed_prefix;
  std::span<const std::string_view> indexed;  // after topic0
  std::span<const std::string_view> data;
  std::string_view relevant;

  Hash32 topic0() const { return topic0_of(signature); }
};

// The modeled function and event tables, in table order.
std::span<const FunctionSpec> function_specs();
std::span<const EventSpec> event_specs();

const FunctionSpec* find_function(const Selector& selector);
const EventSpec* find_event(const Hash32& topic0);

// Versioned JSON rendering of the signature tables.
nlohmann::ordered_json signature_table_json();

struct DecodedSwapCall {
  const FunctionSpec* spec = nullptr;
  std::string function_name;
  Address sender;  // the transaction sender, not a calldata parameter
  U256 amount = 0;
  AmountRole amount_role = AmountRole::kIn;
  Address to;
  std::vector<Address> path;  // at least two hops
};

struct TransferEvent {
  Address from;
  Address to;
  U256 value = 0;
};

struct SwapV2Event {
  Address sender;
  U256 amount0_in = 0;
  U256 amount1_in = 0;
  U256 amount0_out = 0;
  U256 amount1_out = 0;
  Address to;
};

struct SwapV3Event {
  Address sender;
  Address recipient;
  I256 amount0 = 0;
  I256 amount1 = 0;
};

using DecodedEvent = std::variant<TransferEvent, SwapV2Event, SwapV3Event>;

struct DecodedLog {
  Address contract;
  std::uint64_t block_number = 0;
  Hash32 tx_hash;
  std::uint64_t log_index = 0;
  DecodedEvent event;
};

// Returns the decoded call when the calldata selector is one of the modeled
// swap functions. A matching selector with a malformed body is reported to
// `diag` and treated as a non-swap.
std::optional<DecodedSwapCall> decode_swap_call(const Transaction& tx,
                                                Diagnostics* diag = nullptr);

// Same contract for logs: unknown topic0 yields nothing; a known topic0 with
// the wrong topic count or short data is reported and skipped.
std::optional<DecodedLog> decode_log(const LogEvent& log,
                                     Diagnostics* diag = nullptr);

}  // namespace botdetect
