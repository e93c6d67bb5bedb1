#include "botdetect/dataset/labels.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "botdetect/common/error.h"

namespace botdetect {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Calls fn(line_no, cells) for each data row, skipping a header whose first
// cell is "address" and blank lines.
template <typename Fn>
void for_each_row(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.starts_with('#')) continue;
    auto cells = split(line);
    if (line_no == 1 && lower(cells[0]) == "address") continue;
    fn(line_no, cells);
  }
}

Address parse_address(const std::filesystem::path& path, std::size_t line,
                      const std::string& text) {
  try {
    return Address::from_hex(text);
  } catch (const std::invalid_argument& e) {
    throw RecordError(path.string(), line, "address", e.what());
  }
}

}  // namespace

std::string_view to_string(BinaryLabel l) {
  return kBinaryClassNames[static_cast<int>(l)];
}

std::string_view to_string(MevClass c) {
  return kMevClassNames[static_cast<int>(c)];
}

std::optional<BinaryLabel> parse_binary_label(std::string_view token) {
  const std::string t = lower(token);
  if (t == "bot") return BinaryLabel::kBot;
  if (t == "human") return BinaryLabel::kHuman;
  return std::nullopt;
}

std::optional<MevClass> parse_mev_class(std::string_view token) {
  const std::string t = lower(token);
  if (t == "arbitrage") return MevClass::kArbitrage;
  if (t == "sandwich") return MevClass::kSandwich;
  if (t == "liquidation") return MevClass::kLiquidation;
  if (t == "nonmev" || t == "non-mev" || t == "non_mev") return MevClass::kNonMev;
  return std::nullopt;
}

std::vector<LabeledAccount> load_labels(const std::filesystem::path& path) {
  std::vector<LabeledAccount> out;
  std::set<Address> seen;
  for_each_row(path, [&](std::size_t line, const std::vector<std::string>& cells) {
    if (cells.size() < 2 || cells.size() > 3)
      throw RecordError(path.string(), line, "<row>",
                        "expected address,binary_label[,fine_label]");
    LabeledAccount acc;
    acc.address = parse_address(path, line, cells[0]);
    acc.binary = parse_binary_label(cells[1]);
    if (!acc.binary)
      throw RecordError(path.string(), line, "binary_label",
                        "unknown label '" + cells[1] + "'");
    if (cells.size() == 3 && !cells[2].empty()) {
      acc.fine = cells[2];
      if (*acc.binary == BinaryLabel::kHuman && lower(cells[2]) != "human")
        throw RecordError(path.string(), line, "fine_label",
                          "fine label '" + cells[2] + "' on a Human row");
    }
    if (!seen.insert(acc.address).second)
      throw RecordError(path.string(), line, "address",
                        "duplicate address " + acc.address.prefixed());
    out.push_back(std::move(acc));
  });
  return out;
}

std::vector<LabeledAccount> load_mev_labels(const std::filesystem::path& path) {
  std::vector<LabeledAccount> out;
  std::set<Address> seen;
  for_each_row(path, [&](std::size_t line, const std::vector<std::string>& cells) {
    if (cells.size() != 2)
      throw RecordError(path.string(), line, "<row>",
                        "expected address,mev_class");
    LabeledAccount acc;
    acc.address = parse_address(path, line, cells[0]);
    acc.mev = parse_mev_class(cells[1]);
    if (!acc.mev)
      throw RecordError(path.string(), line, "mev_class",
                        "unknown class '" + cells[1] + "'");
    if (*acc.mev != MevClass::kNonMev) acc.binary = BinaryLabel::kBot;
    if (!seen.insert(acc.address).second)
      throw RecordError(path.string(), line, "address",
                        "duplicate address " + acc.address.prefixed());
    out.push_back(std::move(acc));
  });
  return out;
}

BinaryCounts count_binary(const std::vector<LabeledAccount>& labels) {
  BinaryCounts c;
  for (const auto& l : labels) {
    if (!l.binary) continue;
    if (*l.binary == BinaryLabel::kBot)
      ++c.bots;
    else
      ++c.humans;
  }
  return c;
}

}  // namespace botdetect
