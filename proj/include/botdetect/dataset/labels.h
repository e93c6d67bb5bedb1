#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "botdetect/chain/types.h"

namespace botdetect {

enum class BinaryLabel { kHuman = 0, kBot = 1 };
enum class MevClass { kArbitrage = 0, kSandwich = 1, kLiquidation = 2, kNonMev = 3 };

inline constexpr std::string_view kBinaryClassNames[] = {"Human", "Bot"};
inline constexpr std::string_view kMevClassNames[] = {"Arbitrage", "Sandwich",
                                                      "Liquidation", "NonMEV"};

std::string_view to_string(BinaryLabel l);
std::string_view to_string(MevClass c);
// Case-insensitive; "non-MEV" is accepted for NonMEV.
std::optional<BinaryLabel> parse_binary_label(std::string_view token);
std::optional<MevClass> parse_mev_class(std::string_view token);

struct LabeledAccount {
  Address address;
  std::optional<BinaryLabel> binary;
  std::optional<std::string> fine;
  std::optional<MevClass> mev;
};

// "address,binary_label,fine_label" (header optional, fine label may be
// empty). Duplicate addresses and unknown tokens raise RecordError.
std::vector<LabeledAccount> load_labels(const std::filesystem::path& path);

// "address,mev_class".
std::vector<LabeledAccount> load_mev_labels(const std::filesystem::path& path);

struct BinaryCounts {
  std::size_t bots = 0;
  std::size_t humans = 0;
};

BinaryCounts count_binary(const std::vector<LabeledAccount>& labels);

}  // namespace botdetect
