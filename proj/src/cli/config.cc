#include "botdetect/cli/config.h"

#include <fstream>

#include "botdetect/abi/keccak.h"
#include "botdetect/chain/types.h"
#include "botdetect/common/error.h"

namespace botdetect::cli {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw InputError(std::string("config: '") + key + "' must be an object");
  return j.at(key);
}

ClusterAlgorithm parse_algorithm(const std::string& s) {
  if (s == "kmeans") return ClusterAlgorithm::kKMeans;
  if (s == "gmm") return ClusterAlgorithm::kGmm;
  throw InputError("config: unknown clustering algorithm '" + s + "'");
}

DatasetKind parse_dataset(const std::string& s) {
  if (s == "binary") return DatasetKind::kBinary;
  if (s == "multiclass") return DatasetKind::kMulticlass;
  throw InputError("config: unknown classification dataset '" + s + "'");
}

template <typename Fn>
auto wrap(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("config: top level must be an object");
  RunConfig c;
  c.base_dir = base_dir;
  c.canonical = nlohmann::ordered_json::parse(j.dump());
  c.canonical.erase("workers");

  const json& chain = section(j, "chain");
  for (const char* key : {"blocks", "transactions", "logs"})
    if (!chain.contains(key)) throw InputError(std::string("config: chain.") + key + " is required");
  c.chain.blocks = resolve(base_dir, chain.at("blocks").get<std::string>());
  c.chain.txs = resolve(base_dir, chain.at("transactions").get<std::string>());
  c.chain.logs = resolve(base_dir, chain.at("logs").get<std::string>());
  if (j.contains("labels")) c.labels = resolve(base_dir, j.at("labels").get<std::string>());
  if (j.contains("mev_labels"))
    c.mev_labels = resolve(base_dir, j.at("mev_labels").get<std::string>());
  c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "out"));

  if (!j.contains("block_range") || !j.at("block_range").is_array() ||
      j.at("block_range").size() != 2)
    throw InputError("config: block_range must be [first, last]");
  c.block_range = {j.at("block_range")[0].get<std::uint64_t>(),
                   j.at("block_range")[1].get<std::uint64_t>()};
  if (c.block_range.empty()) throw InputError("config: block_range is empty");
  c.test_block_count = get_or<std::uint64_t>(j, "test_block_count", 2);
  if (c.test_block_count < 1 || c.test_block_count >= c.block_range.size())
    throw InputError("config: test_block_count must be >= 1 and smaller than the block range");
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.workers = get_or<std::size_t>(j, "workers", 1);

  const json& cl = section(j, "clustering");
  if (cl.contains("algorithms")) {
    c.clustering.algorithms.clear();
    for (const auto& a : cl.at("algorithms")) c.clustering.algorithms.push_back(parse_algorithm(a));
  }
  c.clustering.k = get_or(cl, "k", c.clustering.k);
  if (cl.contains("imputations")) {
    c.clustering.imputations.clear();
    for (const auto& s : cl.at("imputations"))
      c.clustering.imputations.push_back(wrap([&] { return ml::parse_imputation(s.get<std::string>()); }));
  }
  c.clustering.embeddings = get_or(cl, "embeddings", c.clustering.embeddings);
  c.clustering.scaling = wrap([&] { return ml::parse_scaling(get_or<std::string>(cl, "scaling", "minmax")); });
  c.clustering.covariance =
      wrap([&] { return ml::parse_covariance(get_or<std::string>(cl, "gmm_covariance", "diagonal")); });
  c.clustering.reg = get_or(cl, "gmm_reg", c.clustering.reg);
  if (!(c.clustering.reg > 0.0)) throw InputError("config: clustering.gmm_reg must be positive");
  c.clustering.selection_k_max = get_or(cl, "selection_k_max", c.clustering.selection_k_max);
  for (std::size_t k : c.clustering.k)
    if (k == 0) throw InputError("config: clustering.k values must be positive");

  const json& cf = section(j, "classification");
  if (cf.contains("models")) {
    c.classification.models.clear();
    for (const auto& m : cf.at("models"))
      c.classification.models.push_back(wrap([&] { return ml::parse_classifier(m.get<std::string>()); }));
  }
  if (cf.contains("datasets")) {
    c.classification.datasets.clear();
    for (const auto& d : cf.at("datasets")) c.classification.datasets.push_back(parse_dataset(d));
  }
  c.classification.folds = get_or(cf, "folds", c.classification.folds);
  if (c.classification.folds < 2) throw InputError("config: classification.folds must be >= 2");
  c.classification.stratified = get_or(cf, "stratified", c.classification.stratified);
  c.classification.preprocess.scaling =
      wrap([&] { return ml::parse_scaling(get_or<std::string>(cf, "scaling", "standardize")); });
  c.classification.preprocess.imputation =
      wrap([&] { return ml::parse_imputation(get_or<std::string>(cf, "imputation", "mean")); });
  c.classification.per_class = get_or(cf, "per_class", c.classification.per_class);
  const json& rf = section(cf, "random_forest");
  c.classification.random_forest.n_trees = get_or(rf, "n_trees", c.classification.random_forest.n_trees);
  c.classification.random_forest.max_features =
      get_or(rf, "max_features", c.classification.random_forest.max_features);
  const json& gb = section(cf, "gradient_boosting");
  c.classification.gradient_boosting.rounds = get_or(gb, "rounds", c.classification.gradient_boosting.rounds);
  c.classification.gradient_boosting.depth = get_or(gb, "depth", c.classification.gradient_boosting.depth);
  c.classification.gradient_boosting.rate = get_or(gb, "rate", c.classification.gradient_boosting.rate);
  const json& ada = section(cf, "adaboost");
  c.classification.adaboost.rounds = get_or(ada, "rounds", c.classification.adaboost.rounds);

  const json& ex = section(j, "explain");
  c.explain.model = wrap([&] { return ml::parse_classifier(get_or<std::string>(ex, "model", "random_forest")); });
  c.explain.dataset = parse_dataset(get_or<std::string>(ex, "dataset", "multiclass"));
  c.explain.permutations = get_or(ex, "permutations", c.explain.permutations);
  c.explain.background = get_or(ex, "background", c.explain.background);
  c.explain.top = get_or(ex, "top", c.explain.top);
  c.explain.exhaustive = get_or(ex, "exhaustive", c.explain.exhaustive);
  if (c.explain.permutations == 0) throw InputError("config: explain.permutations must be >= 1");
  if (c.explain.background == 0) throw InputError("config: explain.background must be >= 1");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.seed) {
    config.seed = *o.seed;
    config.canonical["seed"] = *o.seed;
  }
  if (o.output_dir) {
    config.output_dir = *o.output_dir;
    config.canonical["output_dir"] = o.output_dir->string();
  }
  if (o.workers) config.workers = *o.workers;
}

void check_inputs_exist(const RunConfig& config) {
  std::vector<std::filesystem::path> paths{config.chain.blocks, config.chain.txs, config.chain.logs};
  if (config.labels) paths.push_back(*config.labels);
  if (config.mev_labels) paths.push_back(*config.mev_labels);
  for (const auto& p : paths)
    if (!std::filesystem::exists(p)) throw InputError("input file not found: " + p.string());
}

std::string config_hash(const RunConfig& config) {
  const std::string text = config.canonical.dump();
  const auto digest = keccak256(text);
  return to_hex(digest.data(), digest.size()).substr(0, 16);
}

std::string provenance(const RunConfig& config) {
  return "botdetect " + std::string(kToolVersion) + " config=" + config_hash(config) +
         " seed=" + std::to_string(config.seed);
}

nlohmann::ordered_json provenance_json(const RunConfig& config) {
  return {{"tool", "botdetect"},
          {"version", kToolVersion},
          {"config_hash", config_hash(config)},
          {"seed", config.seed}};
}

}  // namespace botdetect::cli
