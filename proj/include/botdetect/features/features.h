#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "botdetect/abi/abi.h"
#include "botdetect/chain/chain_data.h"
#include "botdetect/common/diagnostics.h"
#include "botdetect/features/feature_value.h"

namespace botdetect {

enum class FeatureGroup { kAddress, kTransaction, kFunctionCall, kEvent };

std::string_view to_string(FeatureGroup g);

struct FeatureDef {
  std::string name;
  FeatureGroup group;
  std::string definition;
};

// Ordered, schema-versioned list of matrix columns.
class FeatureRegistry {
 public:
  static constexpr std::string_view kSchemaVersion = "botdetect-features/1";

  static const FeatureRegistry& standard();

  explicit FeatureRegistry(std::vector<FeatureDef> defs);

  std::size_t size() const { return defs_.size(); }
  const std::vector<FeatureDef>& defs() const { return defs_; }
  const FeatureDef& operator[](std::size_t i) const { return defs_[i]; }
  std::vector<std::string> names() const;
  // Throws std::out_of_range for unknown names.
  std::size_t index_of(std::string_view name) const;

 private:
  std::vector<FeatureDef> defs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using FeatureMap = std::map<std::string, FeatureValue, std::less<>>;

// Suffixes of the six numerical statistics, in column order.
inline constexpr std::string_view kStatSuffixes[] = {"mean", "mode", "std",
                                                     "min",  "max",  "q95"};

FeatureMap transaction_features(const AccountHistory& h,
                                std::uint64_t total_blocks);

// One map per modeled function, in table order. Keys: benford, tvc,
// path_length_<stat>, swaps_per_block. `calls` are the account's outgoing
// decoded swaps.
std::vector<FeatureMap> function_call_features(
    std::span<const DecodedSwapCall> calls, std::uint64_t total_blocks);

struct EventFeatureMaps {
  FeatureMap swap_v2;   // benford, tvc, swaps_per_block
  FeatureMap swap_v3;   // benford, tvc, swaps_per_block
  FeatureMap transfer;  // benford, tvc, transfers_per_block
};

// Swap events count for the account when it is the swap recipient; transfer
// events count when it is the sender of the tokens.
EventFeatureMaps event_features(std::span<const DecodedLog> events,
                                const Address& a, std::uint64_t total_blocks);

// Averages each swap-derived feature over the sources where it is defined.
// Path-length statistics come from the functions only. Output keys:
// swap_benford, swap_tvc, swap_per_block, swap_path_length_<stat>.
FeatureMap reduce_swap_features(std::span<const FeatureMap> function_maps,
                                std::span<const FeatureMap> swap_event_maps);

// Decoded logs grouped by the account each one is attributed to.
class EventIndex {
 public:
  EventIndex(const ChainData& data, Diagnostics* diag = nullptr);
  std::span<const DecodedLog> events_for(const Address& a) const;

 private:
  std::unordered_map<Address, std::vector<DecodedLog>> by_account_;
};

class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<Address> addresses, std::vector<std::string> columns);

  std::size_t rows() const { return addresses_.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<Address>& addresses() const { return addresses_; }
  const std::vector<std::string>& columns() const { return columns_; }

  FeatureValue& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  const FeatureValue& at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }

  // New matrix with the given rows, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  // Row-major doubles with NaN marking MISSING.
  std::vector<double> to_dense() const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::vector<Address> addresses_;
  std::vector<std::string> columns_;
  std::vector<FeatureValue> values_;
};

struct BuildOptions {
  std::size_t workers = 1;
};

// One row per address, every registry column present. Decode problems are
// reported to `diag`; a bad record never aborts the build.
FeatureMatrix build_feature_matrix(const ChainData& data,
                                   std::span<const Address> addresses,
                                   const BuildOptions& options = {},
                                   Diagnostics* diag = nullptr);

// Same, reusing a prebuilt event index.
FeatureMatrix build_feature_matrix(const ChainData& data,
                                   const EventIndex& events,
                                   std::span<const Address> addresses,
                                   const BuildOptions& options = {},
                                   Diagnostics* diag = nullptr);

// CSV with header "address,<columns...>", MISSING as an empty cell and
// values with 17 significant digits. Lines starting with '#' before the
// header carry provenance and are skipped on read.
void write_features_csv(const FeatureMatrix& m, const std::filesystem::path& path,
                        std::string_view provenance = {});
FeatureMatrix read_features_csv(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace botdetect
