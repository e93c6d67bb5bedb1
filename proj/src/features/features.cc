#include "botdetect/features/features.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "botdetect/common/error.h"
#include "botdetect/common/parallel.h"
#include "botdetect/features/aggregators.h"

namespace botdetect {
namespace {

constexpr int kTypeDomain[] = {0, 1, 2};
constexpr int kStatusDomain[] = {0, 1};

void put_stats(FeatureMap& m, const std::string& prefix,
               const NumericalStats& s) {
  m[prefix + "_mean"] = s.mean;
  m[prefix + "_mode"] = s.mode;
  m[prefix + "_std"] = s.std;
  m[prefix + "_min"] = s.min;
  m[prefix + "_max"] = s.max;
  m[prefix + "_q95"] = s.q95;
}

void put_categorical(FeatureMap& m, const std::string& prefix,
                     const CategoricalStats& s, std::span<const int> domain) {
  m[prefix + "_entropy"] = s.entropy;
  for (std::size_t i = 0; i < domain.size(); ++i)
    m[prefix + "_share_" + std::to_string(domain[i])] = s.shares[i];
  m[prefix + "_mode"] = s.mode;
}

FeatureValue per_block(std::size_t count, std::uint64_t total_blocks) {
  return FeatureValue::of(static_cast<double>(count) /
                          static_cast<double>(total_blocks));
}

FeatureValue frequency(std::span<const std::int64_t> ts) {
  if (ts.size() < 2) return FeatureValue::missing();
  const std::int64_t span = ts.back() - ts.front();
  if (span <= 0) return FeatureValue::missing();
  return FeatureValue::of(static_cast<double>(ts.size()) /
                          static_cast<double>(span));
}

std::vector<std::int64_t> timestamps_of(const std::vector<TimedTx>& txs) {
  std::vector<std::int64_t> ts;
  ts.reserve(txs.size());
  for (const TimedTx& t : txs) ts.push_back(t.timestamp);
  return ts;
}

std::vector<FeatureDef> standard_defs() {
  using G = FeatureGroup;
  std::vector<FeatureDef> d;
  auto stats = [&](const std::string& prefix, G g, const std::string& what) {
    for (auto s : kStatSuffixes)
      d.push_back({prefix + "_" + std::string(s), g,
                   std::string(s) + " of " + what});
  };

  d.push_back({"n_leading_zeros", G::kAddress,
               "leading '0' characters of the 40-char hex address"});
  d.push_back({"digit_entropy", G::kAddress,
               "entropy of the hex character distribution of the address"});

  d.push_back({"tx_out_per_block", G::kTransaction,
               "outgoing transactions / blocks in range"});
  stats("tx_per_active_block", G::kTransaction,
        "outgoing transactions per block, blocks without any removed");
  d.push_back({"sleepiness_in", G::kTransaction,
               "gap-based sleepiness of incoming transaction timestamps"});
  d.push_back({"sleepiness_out", G::kTransaction,
               "gap-based sleepiness of outgoing transaction timestamps"});
  d.push_back({"frequency_in", G::kTransaction,
               "incoming transactions / seconds between first and last"});
  d.push_back({"frequency_out", G::kTransaction,
               "outgoing transactions / seconds between first and last"});
  stats("time_diff_out", G::kTransaction,
        "seconds between consecutive outgoing transactions");
  d.push_back({"entropy_time_in", G::kTransaction,
               "entropy of hour-of-day of incoming transactions"});
  d.push_back({"entropy_time_out", G::kTransaction,
               "entropy of hour-of-day of outgoing transactions"});
  d.push_back({"benford_value_out", G::kTransaction,
               "Benford chi-squared p-value of outgoing ETH values"});
  d.push_back({"tvc_value_out", G::kTransaction,
               "round fraction of outgoing ETH values"});
  d.push_back({"type_entropy", G::kTransaction,
               "entropy of outgoing transaction types"});
  for (int t : kTypeDomain)
    d.push_back({"type_share_" + std::to_string(t), G::kTransaction,
                 "share of outgoing transactions of type " + std::to_string(t)});
  d.push_back({"type_mode", G::kTransaction, "most common outgoing type"});
  d.push_back({"status_entropy", G::kTransaction,
               "entropy of outgoing transaction status"});
  for (int s : kStatusDomain)
    d.push_back({"status_share_" + std::to_string(s), G::kTransaction,
                 "share of outgoing transactions with status " +
                     std::to_string(s)});
  d.push_back({"status_mode", G::kTransaction, "most common outgoing status"});
  stats("value", G::kTransaction, "outgoing transaction value (wei)");
  stats("gas_limit", G::kTransaction, "outgoing transaction gas limit");
  stats("gas_price", G::kTransaction, "outgoing transaction gas price (wei)");
  stats("index_relative", G::kTransaction,
        "position in block / block transaction count");

  d.push_back({"swap_benford", G::kFunctionCall,
               "Benford p-value of swap amounts, averaged over modeled "
               "functions and swap events"});
  d.push_back({"swap_tvc", G::kFunctionCall,
               "round fraction of swap amounts, averaged over modeled "
               "functions and swap events"});
  d.push_back({"swap_per_block", G::kFunctionCall,
               "swaps / blocks in range, averaged over modeled functions and "
               "swap events"});
  stats("swap_path_length", G::kFunctionCall,
        "swap path length, averaged over modeled functions");

  d.push_back({"transfer_benford", G::kEvent,
               "Benford p-value of ERC-20 transfer values sent"});
  d.push_back({"transfer_tvc", G::kEvent,
               "round fraction of ERC-20 transfer values sent"});
  d.push_back({"transfer_events_per_block", G::kEvent,
               "ERC-20 transfers sent / blocks in range"});
  return d;
}

}  // namespace

std::string_view to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::kAddress:
      return "address";
    case FeatureGroup::kTransaction:
      return "transaction";
    case FeatureGroup::kFunctionCall:
      return "function_call";
    case FeatureGroup::kEvent:
      return "event";
  }
  return "?";
}

FeatureRegistry::FeatureRegistry(std::vector<FeatureDef> defs)
    : defs_(std::move(defs)) {
  for (std::size_t i = 0; i < defs_.size(); ++i)
    if (!index_.emplace(defs_[i].name, i).second)
      throw std::invalid_argument("duplicate feature name " + defs_[i].name);
}

const FeatureRegistry& FeatureRegistry::standard() {
  static const FeatureRegistry registry(standard_defs());
  return registry;
}

std::vector<std::string> FeatureRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(defs_.size());
  for (const auto& d : defs_) out.push_back(d.name);
  return out;
}

std::size_t FeatureRegistry::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw std::out_of_range("unknown feature " + std::string(name));
  return it->second;
}

FeatureMap transaction_features(const AccountHistory& h,
                                std::uint64_t total_blocks) {
  if (total_blocks == 0)
    throw std::invalid_argument("transaction_features: total_blocks is zero");
  FeatureMap m;
  const auto& out = h.out_txs;
  m["tx_out_per_block"] = per_block(out.size(), total_blocks);

  std::vector<double> per_active;
  for (std::size_t i = 0; i < out.size();) {
    std::size_t j = i;
    while (j < out.size() && out[j].tx->block_number == out[i].tx->block_number)
      ++j;
    per_active.push_back(static_cast<double>(j - i));
    i = j;
  }
  put_stats(m, "tx_per_active_block", numerical_stats(per_active));

  const auto ts_out = timestamps_of(out);
  const auto ts_in = timestamps_of(h.in_txs);
  m["sleepiness_in"] = gap_based_sleepiness(ts_in);
  m["sleepiness_out"] = gap_based_sleepiness(ts_out);
  m["frequency_in"] = frequency(ts_in);
  m["frequency_out"] = frequency(ts_out);

  std::vector<double> deltas;
  for (std::size_t i = 1; i < ts_out.size(); ++i)
    deltas.push_back(static_cast<double>(ts_out[i] - ts_out[i - 1]));
  put_stats(m, "time_diff_out", numerical_stats(deltas));

  m["entropy_time_in"] = hour_of_day_entropy(ts_in);
  m["entropy_time_out"] = hour_of_day_entropy(ts_out);

  std::vector<U256> values;
  std::vector<double> value_d, gas_limit, gas_price, index_rel;
  std::vector<int> types, statuses;
  for (const TimedTx& t : out) {
    values.push_back(t.tx->value);
    value_d.push_back(to_double(t.tx->value));
    gas_limit.push_back(static_cast<double>(t.tx->gas_limit));
    gas_price.push_back(to_double(t.tx->gas_price));
    index_rel.push_back(static_cast<double>(t.tx->index) /
                        static_cast<double>(t.block_tx_count));
    types.push_back(t.tx->tx_type);
    statuses.push_back(t.tx->status);
  }
  m["benford_value_out"] = benford_p_value(std::span<const U256>(values));
  m["tvc_value_out"] = trade_value_clustering(values);
  put_categorical(m, "type", categorical_stats(types, kTypeDomain),
                  kTypeDomain);
  put_categorical(m, "status", categorical_stats(statuses, kStatusDomain),
                  kStatusDomain);
  put_stats(m, "value", numerical_stats(value_d));
  put_stats(m, "gas_limit", numerical_stats(gas_limit));
  put_stats(m, "gas_price", numerical_stats(gas_price));
  put_stats(m, "index_relative", numerical_stats(index_rel));
  return m;
}

std::vector<FeatureMap> function_call_features(
    std::span<const DecodedSwapCall> calls, std::uint64_t total_blocks) {
  const auto specs = function_specs();
  std::vector<FeatureMap> out(specs.size());
  for (std::size_t f = 0; f < specs.size(); ++f) {
    std::vector<U256> amounts;
    std::vector<double> path_lengths;
    for (const DecodedSwapCall& c : calls) {
      if (c.spec != &specs[f]) continue;
      amounts.push_back(c.amount);
      path_lengths.push_back(static_cast<double>(c.path.size()));
    }
    FeatureMap& m = out[f];
    m["benford"] = benford_p_value(std::span<const U256>(amounts));
    m["tvc"] = trade_value_clustering(amounts);
    put_stats(m, "path_length", numerical_stats(path_lengths));
    m["swaps_per_block"] = per_block(amounts.size(), total_blocks);
  }
  return out;
}

EventFeatureMaps event_features(std::span<const DecodedLog> events,
                                const Address& a, std::uint64_t total_blocks) {
  std::vector<U256> v2_inputs, v3_inputs, transfers;
  std::size_t v2_count = 0, v3_count = 0, transfer_count = 0;
  for (const DecodedLog& log : events) {
    if (const auto* e = std::get_if<SwapV2Event>(&log.event)) {
      if (e->to != a) continue;
      ++v2_count;
      // Sum of two uint256 can exceed 256 bits; saturate instead of wrapping.
      U256 sum = e->amount0_in + e->amount1_in;
      if (sum < e->amount0_in) sum = std::numeric_limits<U256>::max();
      v2_inputs.push_back(sum);
    } else if (const auto* e = std::get_if<SwapV3Event>(&log.event)) {
      if (e->recipient != a) continue;
      ++v3_count;
      const I256 input = std::max(e->amount0, e->amount1);
      if (input > 0) v3_inputs.push_back(U256(input));
    } else if (const auto* e = std::get_if<TransferEvent>(&log.event)) {
      if (e->from != a) continue;
      ++transfer_count;
      transfers.push_back(e->value);
    }
  }
  EventFeatureMaps m;
  m.swap_v2["benford"] = benford_p_value(std::span<const U256>(v2_inputs));
  m.swap_v2["tvc"] = trade_value_clustering(v2_inputs);
  m.swap_v2["swaps_per_block"] = per_block(v2_count, total_blocks);
  m.swap_v3["benford"] = benford_p_value(std::span<const U256>(v3_inputs));
  m.swap_v3["tvc"] = trade_value_clustering(v3_inputs);
  m.swap_v3["swaps_per_block"] = per_block(v3_count, total_blocks);
  m.transfer["benford"] = benford_p_value(std::span<const U256>(transfers));
  m.transfer["tvc"] = trade_value_clustering(transfers);
  m.transfer["transfers_per_block"] = per_block(transfer_count, total_blocks);
  return m;
}

FeatureMap reduce_swap_features(std::span<const FeatureMap> function_maps,
                                std::span<const FeatureMap> swap_event_maps) {
  auto mean_over = [](std::initializer_list<std::span<const FeatureMap>> groups,
                      const std::string& key) {
    double sum = 0.0;
    std::size_t n = 0;
    for (auto group : groups)
      for (const FeatureMap& m : group) {
        auto it = m.find(key);
        if (it == m.end() || it->second.is_missing()) continue;
        sum += it->second.value();
        ++n;
      }
    return n == 0 ? FeatureValue::missing()
                  : FeatureValue::of(sum / static_cast<double>(n));
  };
  FeatureMap out;
  out["swap_benford"] = mean_over({function_maps, swap_event_maps}, "benford");
  out["swap_tvc"] = mean_over({function_maps, swap_event_maps}, "tvc");
  out["swap_per_block"] =
      mean_over({function_maps, swap_event_maps}, "swaps_per_block");
  for (auto s : kStatSuffixes) {
    const std::string key = "path_length_" + std::string(s);
    out["swap_" + key] = mean_over({function_maps}, key);
  }
  return out;
}

EventIndex::EventIndex(const ChainData& data, Diagnostics* diag) {
  for (const LogEvent& log : data.logs()) {
    auto decoded = decode_log(log, diag);
    if (!decoded) continue;
    const Address* owner = nullptr;
    if (const auto* e = std::get_if<SwapV2Event>(&decoded->event))
      owner = &e->to;
    else if (const auto* e = std::get_if<SwapV3Event>(&decoded->event))
      owner = &e->recipient;
    else if (const auto* e = std::get_if<TransferEvent>(&decoded->event))
      owner = &e->from;
    const Address key = *owner;
    by_account_[key].push_back(std::move(*decoded));
  }
}

std::span<const DecodedLog> EventIndex::events_for(const Address& a) const {
  auto it = by_account_.find(a);
  if (it == by_account_.end()) return {};
  return it->second;
}

FeatureMatrix::FeatureMatrix(std::vector<Address> addresses,
                             std::vector<std::string> columns)
    : addresses_(std::move(addresses)),
      columns_(std::move(columns)),
      values_(addresses_.size() * columns_.size()) {}

FeatureMatrix FeatureMatrix::select_rows(
    std::span<const std::size_t> rows) const {
  std::vector<Address> addrs;
  addrs.reserve(rows.size());
  for (std::size_t r : rows) addrs.push_back(addresses_.at(r));
  FeatureMatrix out(std::move(addrs), columns_);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < cols(); ++c) out.at(i, c) = at(rows[i], c);
  return out;
}

std::vector<double> FeatureMatrix::to_dense() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i)
    out[i] = values_[i].value_or(std::numeric_limits<double>::quiet_NaN());
  return out;
}

FeatureMatrix build_feature_matrix(const ChainData& data,
                                   std::span<const Address> addresses,
                                   const BuildOptions& options,
                                   Diagnostics* diag) {
  EventIndex events(data, diag);
  return build_feature_matrix(data, events, addresses, options, diag);
}

FeatureMatrix build_feature_matrix(const ChainData& data,
                                   const EventIndex& events,
                                   std::span<const Address> addresses,
                                   const BuildOptions& options,
                                   Diagnostics* diag) {
  const FeatureRegistry& registry = FeatureRegistry::standard();
  FeatureMatrix m(std::vector<Address>(addresses.begin(), addresses.end()),
                  registry.names());
  const std::uint64_t total_blocks = data.block_range().size();
  std::vector<Diagnostics> row_diags(addresses.size());

  parallel_for(addresses.size(), options.workers, [&](std::size_t r) {
    const Address& a = addresses[r];
    FeatureMap row;
    const AddressFeatures af = address_features(a);
    row["n_leading_zeros"] = af.n_leading_zeros;
    row["digit_entropy"] = af.digit_entropy;

    const AccountHistory h = data.account_history(a);
    row.merge(transaction_features(h, total_blocks));

    std::vector<DecodedSwapCall> calls;
    for (const TimedTx& t : h.out_txs)
      if (auto call = decode_swap_call(*t.tx, &row_diags[r]))
        calls.push_back(std::move(*call));
    const auto fn_maps = function_call_features(calls, total_blocks);
    const auto ev = event_features(events.events_for(a), a, total_blocks);
    const FeatureMap swap_events[] = {ev.swap_v2, ev.swap_v3};
    row.merge(reduce_swap_features(fn_maps, swap_events));
    row["transfer_benford"] = ev.transfer.at("benford");
    row["transfer_tvc"] = ev.transfer.at("tvc");
    row["transfer_events_per_block"] = ev.transfer.at("transfers_per_block");

    for (std::size_t c = 0; c < registry.size(); ++c)
      m.at(r, c) = row.at(registry[c].name);
  });

  if (diag)
    for (const auto& d : row_diags) diag->merge(d);
  return m;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_features_csv(const FeatureMatrix& m,
                        const std::filesystem::path& path,
                        std::string_view provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "address";
  for (const auto& c : m.columns()) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.addresses()[r].prefixed();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << ',';
      const FeatureValue& v = m.at(r, c);
      if (!v.is_missing()) out << format_double(v.value());
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

FeatureMatrix read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with('#')) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty() || header[0] != "address")
    throw InputError(path.string() + ": missing 'address' header");
  std::vector<std::string> columns(header.begin() + 1, header.end());

  std::vector<Address> addrs;
  std::vector<std::vector<FeatureValue>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw RecordError(path.string(), line_no, "<row>",
                        "expected " + std::to_string(header.size()) + " cells");
    try {
      addrs.push_back(Address::from_hex(cells[0]));
    } catch (const std::invalid_argument& e) {
      throw RecordError(path.string(), line_no, "address", e.what());
    }
    std::vector<FeatureValue> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        row.push_back(FeatureValue::missing());
        continue;
      }
      try {
        std::size_t used = 0;
        double v = std::stod(cells[c], &used);
        if (used != cells[c].size() || !std::isfinite(v))
          throw std::invalid_argument("not a finite number");
        row.push_back(FeatureValue::of(v));
      } catch (const std::exception&) {
        throw RecordError(path.string(), line_no, header[c],
                          "not a finite number: " + cells[c]);
      }
    }
    rows.push_back(std::move(row));
  }
  FeatureMatrix m(std::move(addrs), std::move(columns));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
  return m;
}

}  // namespace botdetect
