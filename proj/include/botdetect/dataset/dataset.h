#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "botdetect/chain/chain_data.h"
#include "botdetect/common/diagnostics.h"
#include "botdetect/dataset/labels.h"
#include "botdetect/features/features.h"

namespace botdetect {

enum class DatasetKind { kBinary, kClustering, kMulticlass };

std::string_view to_string(DatasetKind k);

struct LabeledDataset {
  DatasetKind kind = DatasetKind::kClustering;
  FeatureMatrix features;
  std::vector<int> labels;           // index into `classes`; empty if unlabeled
  std::vector<std::string> classes;  // class list in tie-break order
  std::vector<std::string> fine_labels;  // binary kind only

  std::size_t rows() const { return features.rows(); }
};

// Shared inputs for dataset assembly. `events` may be null, in which case
// logs are decoded on demand.
struct AssemblyContext {
  const ChainData& data;
  const EventIndex* events = nullptr;
  BuildOptions build;
  Diagnostics* diag = nullptr;
};

// The last `count` blocks of `range`.
BlockInterval trailing_blocks(const BlockInterval& range, std::uint64_t count);

// Rows are the senders of `test_blocks` in address order; features cover the
// whole range. Unlabeled senders raise InputError listing them.
LabeledDataset assemble_binary(const AssemblyContext& ctx,
                               std::span<const LabeledAccount> labels,
                               const BlockInterval& test_blocks);

// Every sender in range except those sending in `test_blocks`.
LabeledDataset assemble_clustering(const AssemblyContext& ctx,
                                   const BlockInterval& test_blocks);

// `per_class` addresses for each MEV class (seeded sample when more are
// available) plus `per_class` seeded draws from `nonmev_pool`.
LabeledDataset assemble_multiclass(const AssemblyContext& ctx,
                                   std::span<const LabeledAccount> mev_labels,
                                   std::span<const Address> nonmev_pool,
                                   std::size_t per_class, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Class-stratified k folds: every class is shuffled and dealt round-robin,
// continuing across classes, so per-class and total fold sizes each differ by
// at most one. Throws InputError when a class has fewer than k rows.
std::vector<Fold> stratified_k_folds(std::span<const int> labels, std::size_t k,
                                     std::uint64_t seed);

// Plain shuffled folds; sizes differ by at most one.
std::vector<Fold> shuffled_k_folds(std::size_t n, std::size_t k,
                                   std::uint64_t seed);

// Agreement beyond chance. With chance agreement 1 the result is 1 when the
// raters agree everywhere and 0 otherwise.
double cohens_kappa(std::span<const int> a, std::span<const int> b);

}  // namespace botdetect
