#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "botdetect/chain/chain_data.h"
#include "botdetect/dataset/dataset.h"
#include "botdetect/ml/classifier.h"
#include "botdetect/ml/gmm.h"
#include "botdetect/ml/preprocess.h"

namespace botdetect::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ClusterAlgorithm { kKMeans, kGmm };

struct ClusteringConfig {
  std::vector<ClusterAlgorithm> algorithms{ClusterAlgorithm::kKMeans, ClusterAlgorithm::kGmm};
  std::vector<std::size_t> k{5, 15, 30};
  std::vector<ml::Imputation> imputations{ml::Imputation::kMinusOne, ml::Imputation::kMean};
  std::vector<bool> embeddings{false};
  ml::Scaling scaling = ml::Scaling::kMinMax;
  ml::CovarianceType covariance = ml::CovarianceType::kDiagonal;
  double reg = 1e-6;
  // Largest k scanned by the elbow (k-means) and BIC (GMM) selections;
  // 0 disables them.
  std::size_t selection_k_max = 30;
};

struct ClassificationConfig {
  std::vector<ml::ClassifierKind> models{ml::ClassifierKind::kRandomForest,
                                         ml::ClassifierKind::kGradientBoosting,
                                         ml::ClassifierKind::kAdaBoost};
  std::vector<DatasetKind> datasets{DatasetKind::kBinary, DatasetKind::kMulticlass};
  std::size_t folds = 20;
  bool stratified = true;
  ml::PreprocessOptions preprocess{ml::Scaling::kStandardize, ml::Imputation::kMean, false};
  ml::RandomForestParams random_forest;
  ml::GradientBoostingParams gradient_boosting;
  ml::AdaBoostParams adaboost;
  std::size_t per_class = 111;  // multiclass rows per class
};

struct ExplainConfig {
  ml::ClassifierKind model = ml::ClassifierKind::kRandomForest;
  DatasetKind dataset = DatasetKind::kMulticlass;
  std::size_t permutations = 100;
  std::size_t background = 100;
  std::size_t top = 10;
  bool exhaustive = false;
};

struct RunConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  ChainPaths chain;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> mev_labels;
  std::filesystem::path output_dir;
  BlockInterval block_range;
  std::uint64_t test_block_count = 2;
  std::uint64_t seed = 0;
  std::size_t workers = 1;  // never affects outputs
  ClusteringConfig clustering;
  ClassificationConfig classification;
  ExplainConfig explain;

  // The config as read (paths unresolved) with overrides applied; hashed
  // for provenance. `workers` is left out since it cannot change results.
  nlohmann::ordered_json canonical;
};

// Parses a config document. Relative paths resolve against `base_dir`.
// Throws InputError on unknown values or violated constraints.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> workers;
};

void apply_overrides(RunConfig& config, const Overrides& o);

// Throws InputError naming the first referenced input that does not exist.
void check_inputs_exist(const RunConfig& config);

// First 16 hex digits of keccak256 over the canonical config.
std::string config_hash(const RunConfig& config);

// "botdetect 0.1.0 config=<hash> seed=<seed>"
std::string provenance(const RunConfig& config);
nlohmann::ordered_json provenance_json(const RunConfig& config);

}  // namespace botdetect::cli
