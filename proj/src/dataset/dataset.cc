#include "botdetect/dataset/dataset.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "botdetect/common/error.h"
#include "botdetect/common/random.h"

namespace botdetect {
namespace {

FeatureMatrix features_for(const AssemblyContext& ctx,
                           std::span<const Address> rows) {
  if (ctx.events)
    return build_feature_matrix(ctx.data, *ctx.events, rows, ctx.build, ctx.diag);
  return build_feature_matrix(ctx.data, rows, ctx.build, ctx.diag);
}

std::vector<std::string> names_of(std::span<const std::string_view> names) {
  return {names.begin(), names.end()};
}

}  // namespace

std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::kBinary:
      return "binary";
    case DatasetKind::kClustering:
      return "clustering";
    case DatasetKind::kMulticlass:
      return "multiclass";
  }
  return "?";
}

BlockInterval trailing_blocks(const BlockInterval& range, std::uint64_t count) {
  if (count == 0 || count >= range.size())
    throw InputError("test block count must be at least 1 and below the range size");
  return {range.hi - count + 1, range.hi};
}

LabeledDataset assemble_binary(const AssemblyContext& ctx,
                               std::span<const LabeledAccount> labels,
                               const BlockInterval& test_blocks) {
  std::map<Address, const LabeledAccount*> by_addr;
  for (const auto& l : labels)
    if (l.binary) by_addr[l.address] = &l;

  const auto senders = ctx.data.senders_in_blocks(test_blocks);
  std::vector<Address> rows(senders.begin(), senders.end());
  std::string unlabeled;
  for (const Address& a : rows)
    if (!by_addr.contains(a)) unlabeled += " " + a.prefixed();
  if (!unlabeled.empty())
    throw InputError("test-block senders without a binary label:" + unlabeled);

  LabeledDataset ds;
  ds.kind = DatasetKind::kBinary;
  ds.classes = names_of(kBinaryClassNames);
  for (const Address& a : rows) {
    const LabeledAccount& l = *by_addr.at(a);
    ds.labels.push_back(static_cast<int>(*l.binary));
    ds.fine_labels.push_back(l.fine ? *l.fine : std::string(to_string(*l.binary)));
  }
  const bool has_bot = std::count(ds.labels.begin(), ds.labels.end(), 1) > 0;
  const bool has_human = std::count(ds.labels.begin(), ds.labels.end(), 0) > 0;
  if (!has_bot || !has_human)
    throw InputError("binary dataset needs both Bot and Human rows");
  ds.features = features_for(ctx, rows);
  return ds;
}

LabeledDataset assemble_clustering(const AssemblyContext& ctx,
                                   const BlockInterval& test_blocks) {
  const auto all = ctx.data.senders_in_blocks(ctx.data.block_range());
  const auto test = ctx.data.senders_in_blocks(test_blocks);
  std::vector<Address> rows;
  std::set_difference(all.begin(), all.end(), test.begin(), test.end(),
                      std::back_inserter(rows));
  if (rows.empty() && ctx.diag)
    ctx.diag->warn("clustering dataset is empty: every sender is in the test blocks");
  LabeledDataset ds;
  ds.kind = DatasetKind::kClustering;
  ds.features = features_for(ctx, rows);
  return ds;
}

LabeledDataset assemble_multiclass(const AssemblyContext& ctx,
                                   std::span<const LabeledAccount> mev_labels,
                                   std::span<const Address> nonmev_pool,
                                   std::size_t per_class, std::uint64_t seed) {
  if (per_class == 0) throw InputError("per_class must be positive");
  Rng rng(derive_seed(seed, 0x6d6576));

  auto pick = [&](std::vector<Address> candidates, MevClass cls) {
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    if (candidates.size() < per_class)
      throw InputError("not enough " + std::string(to_string(cls)) +
                       " addresses: have " + std::to_string(candidates.size()) +
                       ", need " + std::to_string(per_class));
    std::vector<Address> chosen;
    for (std::size_t i : sample_without_replacement(rng, candidates.size(), per_class))
      chosen.push_back(candidates[i]);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  };

  std::set<Address> mev_addresses;
  for (const auto& l : mev_labels)
    if (l.mev && *l.mev != MevClass::kNonMev) mev_addresses.insert(l.address);

  LabeledDataset ds;
  ds.kind = DatasetKind::kMulticlass;
  ds.classes = names_of(kMevClassNames);
  std::vector<Address> rows;
  for (MevClass cls : {MevClass::kArbitrage, MevClass::kSandwich,
                       MevClass::kLiquidation}) {
    std::vector<Address> candidates;
    for (const auto& l : mev_labels)
      if (l.mev == cls) candidates.push_back(l.address);
    for (const Address& a : pick(std::move(candidates), cls)) {
      rows.push_back(a);
      ds.labels.push_back(static_cast<int>(cls));
    }
  }
  std::vector<Address> pool;
  for (const Address& a : nonmev_pool)
    if (!mev_addresses.contains(a)) pool.push_back(a);
  for (const Address& a : pick(std::move(pool), MevClass::kNonMev)) {
    rows.push_back(a);
    ds.labels.push_back(static_cast<int>(MevClass::kNonMev));
  }
  ds.features = features_for(ctx, rows);
  return ds;
}

std::vector<Fold> stratified_k_folds(std::span<const int> labels, std::size_t k,
                                     std::uint64_t seed) {
  if (k < 2) throw InputError("fold count must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, idx] : by_class)
    if (idx.size() < k)
      throw InputError("class " + std::to_string(cls) + " has " +
                       std::to_string(idx.size()) + " rows, fewer than " +
                       std::to_string(k) + " folds");

  std::vector<std::vector<std::size_t>> tests(k);
  std::size_t next = 0;
  for (auto& [cls, idx] : by_class) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls) + 1));
    rng.shuffle(idx);
    for (std::size_t i : idx) {
      tests[next].push_back(i);
      next = (next + 1) % k;
    }
  }

  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(tests[f].begin(), tests[f].end());
    std::vector<bool> in_test(labels.size(), false);
    for (std::size_t i : tests[f]) in_test[i] = true;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (!in_test[i]) folds[f].train.push_back(i);
    folds[f].test = std::move(tests[f]);
  }
  return folds;
}

std::vector<Fold> shuffled_k_folds(std::size_t n, std::size_t k,
                                   std::uint64_t seed) {
  if (k < 2 || k > n) throw InputError("fold count must be in [2, rows]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0));
  rng.shuffle(order);
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].test.push_back(order[i]);
  for (auto& f : folds) {
    std::sort(f.test.begin(), f.test.end());
    std::vector<bool> in_test(n, false);
    for (std::size_t i : f.test) in_test[i] = true;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_test[i]) f.train.push_back(i);
  }
  return folds;
}

double cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cohens_kappa: label vectors differ in length");
  if (a.empty()) throw std::invalid_argument("cohens_kappa: empty input");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ma, mb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [cls, count] : ma) {
    auto it = mb.find(cls);
    if (it != mb.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

}  // namespace botdetect
