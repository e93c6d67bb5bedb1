#include "botdetect/cli/commands.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <set>

#include "botdetect/abi/abi.h"
#include "botdetect/common/error.h"
#include "botdetect/common/random.h"
#include "botdetect/explain/shapley.h"
#include "botdetect/ml/cluster_eval.h"
#include "botdetect/ml/cross_validate.h"
#include "botdetect/ml/kmeans.h"

namespace botdetect::cli {
namespace {

using nlohmann::ordered_json;

struct Workspace {
  explicit Workspace(const RunConfig& c) : config(c) {
    check_inputs_exist(c);
    data = load_chain_data(c.chain, c.block_range);
    events = std::make_unique<EventIndex>(data, &diag);
  }

  AssemblyContext context() {
    return AssemblyContext{data, events.get(), BuildOptions{config.workers}, &diag};
  }

  BlockInterval test_blocks() const {
    return trailing_blocks(config.block_range, config.test_block_count);
  }

  LabeledDataset binary() {
    if (!config.labels) throw InputError("config: 'labels' is required for the binary dataset");
    const auto labels = load_labels(*config.labels);
    return assemble_binary(context(), labels, test_blocks());
  }

  LabeledDataset multiclass() {
    if (!config.mev_labels)
      throw InputError("config: 'mev_labels' is required for the multiclass dataset");
    const auto mev = load_mev_labels(*config.mev_labels);
    const auto senders = data.senders_in_blocks(data.block_range());
    const std::vector<Address> pool(senders.begin(), senders.end());
    return assemble_multiclass(context(), mev, pool, config.classification.per_class, config.seed);
  }

  LabeledDataset dataset(DatasetKind kind) {
    switch (kind) {
      case DatasetKind::kBinary: return binary();
      case DatasetKind::kMulticlass: return multiclass();
      case DatasetKind::kClustering: return assemble_clustering(context(), test_blocks());
    }
    throw std::logic_error("unknown dataset kind");
  }

  void report_diagnostics(std::ostream& log) const {
    if (diag.empty()) return;
    log << "warnings: " << diag.size() << "\n";
    std::size_t shown = 0;
    for (const auto& m : diag.messages()) {
      if (++shown > 5) break;
      log << "  " << m << "\n";
    }
  }

  const RunConfig& config;
  Diagnostics diag;
  ChainData data;
  std::unique_ptr<EventIndex> events;
};

ml::Matrix to_matrix(const FeatureMatrix& m) {
  return ml::from_dense(m.to_dense(), m.rows(), m.cols());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw InputError("failed writing " + path.string());
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string_view to_string(ClusterAlgorithm a) {
  return a == ClusterAlgorithm::kKMeans ? "kmeans" : "gmm";
}

ordered_json quality_json(const ml::ClusterQuality& q, const std::vector<std::string>& names) {
  ordered_json clusters = ordered_json::array();
  for (const auto& c : q.clusters)
    clusters.push_back({{"cluster", c.cluster},
                        {"purity", c.purity},
                        {"entropy", c.entropy},
                        {"size", c.size},
                        {"majority", names.at(static_cast<std::size_t>(c.majority))}});
  return {{"weighted_purity", q.weighted_purity},
          {"weighted_entropy", q.weighted_entropy},
          {"label_classes", q.label_classes},
          {"clusters", clusters}};
}

struct ClusterFit {
  std::vector<int> train;  // clustering dataset assignments
  std::vector<int> eval;   // binary dataset assignments
  ordered_json model;
};

ClusterFit fit_clusters(ClusterAlgorithm alg, const ml::Matrix& xc, const ml::Matrix& xb,
                        std::size_t k, const ClusteringConfig& cc, std::uint64_t seed) {
  ClusterFit fit;
  if (alg == ClusterAlgorithm::kKMeans) {
    const auto m = ml::kmeans_fit(xc, k, seed);
    fit.train = ml::kmeans_predict(m, xc);
    fit.eval = ml::kmeans_predict(m, xb);
    fit.model = {{"inertia", m.inertia}, {"iterations", m.iterations}};
  } else {
    const auto m = ml::gmm_fit(xc, k, seed, {.covariance = cc.covariance, .reg = cc.reg});
    fit.train = ml::gmm_predict(m, xc);
    fit.eval = ml::gmm_predict(m, xb);
    fit.model = {{"covariance", ml::to_string(m.covariance)},
                 {"log_likelihood", m.log_likelihood_trace.back()},
                 {"bic", ml::gmm_bic(m, xc)},
                 {"iterations", m.iterations},
                 {"reseeds", m.reseeds}};
  }
  return fit;
}

}  // namespace

std::filesystem::path default_model_path(const RunConfig& config, DatasetKind dataset,
                                         ml::ClassifierKind model) {
  return config.output_dir / "models" /
         (std::string(to_string(dataset)) + "_" + std::string(ml::to_string(model)) + ".json");
}

void cmd_features(const RunConfig& config, std::ostream& log) {
  Workspace ws(config);
  const auto senders = ws.data.senders_in_blocks(ws.data.block_range());
  const std::vector<Address> addresses(senders.begin(), senders.end());
  const FeatureMatrix m =
      build_feature_matrix(ws.data, *ws.events, addresses, {config.workers}, &ws.diag);
  std::filesystem::create_directories(config.output_dir);
  const auto path = config.output_dir / "features.csv";
  write_features_csv(m, path, provenance(config));
  ws.report_diagnostics(log);
  log << "registry: " << m.cols() << " features\n"
      << "rows: " << m.rows() << "\n"
      << "wrote " << path.string() << "\n";
}

void cmd_cluster(const RunConfig& config, std::ostream& log) {
  Workspace ws(config);
  const ClusteringConfig& cc = config.clustering;
  const LabeledDataset clustering = ws.dataset(DatasetKind::kClustering);
  if (clustering.rows() == 0) throw InputError("clustering dataset is empty");
  const LabeledDataset binary = ws.binary();

  std::set<std::string> fine_set(binary.fine_labels.begin(), binary.fine_labels.end());
  const std::vector<std::string> fine_names(fine_set.begin(), fine_set.end());
  std::vector<int> fine;
  for (const auto& f : binary.fine_labels)
    fine.push_back(static_cast<int>(std::lower_bound(fine_names.begin(), fine_names.end(), f) -
                                    fine_names.begin()));

  const ml::Matrix raw_c = to_matrix(clustering.features);
  const ml::Matrix raw_b = to_matrix(binary.features);
  const std::size_t rows = clustering.rows();
  for (std::size_t k : cc.k)
    if (k > rows)
      throw InputError("clustering: k=" + std::to_string(k) + " exceeds the " +
                       std::to_string(rows) + " rows of the clustering dataset");

  ordered_json results = ordered_json::array();
  auto evaluate = [&](ClusterAlgorithm alg, ml::Imputation imp, bool embed, std::size_t k,
                      const char* selection, const ml::Matrix& xc, const ml::Matrix& xb,
                      ordered_json extra) {
    const ClusterFit fit = fit_clusters(alg, xc, xb, k, cc, config.seed);
    const std::set<int> used(fit.train.begin(), fit.train.end());
    ordered_json e;
    e["algorithm"] = to_string(alg);
    e["imputation"] = ml::to_string(imp);
    e["embedding"] = embed;
    e["k"] = k;
    e["selection"] = selection;
    if (!extra.is_null()) e["selection_curve"] = std::move(extra);
    e["model"] = fit.model;
    e["silhouette"] =
        used.size() >= 2 ? ordered_json(ml::silhouette_score(xc, fit.train)) : ordered_json();
    const auto qb = ml::cluster_quality(fit.eval, binary.labels, binary.classes.size());
    const auto qf = ml::cluster_quality(fit.eval, fine, fine_names.size());
    e["binary"] = quality_json(qb, binary.classes);
    e["fine"] = quality_json(qf, fine_names);
    log << to_string(alg) << " imputation=" << ml::to_string(imp)
        << " embedding=" << (embed ? "pca2" : "none") << " k=" << k << " (" << selection
        << "): purity " << fixed(qb.weighted_purity) << " entropy "
        << fixed(qb.weighted_entropy) << "\n";
    results.push_back(std::move(e));
  };

  for (ClusterAlgorithm alg : cc.algorithms) {
    for (ml::Imputation imp : cc.imputations) {
      for (bool embed : cc.embeddings) {
        const auto pre = ml::Preprocessor::fit(raw_c, {cc.scaling, imp, embed}, &ws.diag);
        const ml::Matrix xc = pre.transform(raw_c);
        const ml::Matrix xb = pre.transform(raw_b);
        for (std::size_t k : cc.k) evaluate(alg, imp, embed, k, "fixed", xc, xb, nullptr);

        const std::size_t k_max = std::min(cc.selection_k_max, rows);
        if (k_max < 3) continue;
        ordered_json curve = ordered_json::array();
        if (alg == ClusterAlgorithm::kKMeans) {
          std::vector<std::pair<int, double>> points;
          for (std::size_t k = 1; k <= k_max; ++k) {
            const double inertia = ml::kmeans_fit(xc, k, config.seed).inertia;
            points.emplace_back(static_cast<int>(k), inertia);
            curve.push_back({{"k", k}, {"inertia", inertia}});
          }
          const auto chosen = static_cast<std::size_t>(ml::elbow_select(points));
          evaluate(alg, imp, embed, chosen, "elbow", xc, xb, std::move(curve));
        } else {
          std::size_t best_k = 1;
          double best = std::numeric_limits<double>::infinity();
          for (std::size_t k = 1; k <= k_max; ++k) {
            const auto m = ml::gmm_fit(xc, k, config.seed, {.covariance = cc.covariance, .reg = cc.reg});
            const double bic = ml::gmm_bic(m, xc);
            curve.push_back({{"k", k}, {"bic", bic}});
            if (bic < best) {
              best = bic;
              best_k = k;
            }
          }
          evaluate(alg, imp, embed, best_k, "bic", xc, xb, std::move(curve));
        }
      }
    }
  }

  ordered_json report;
  report["provenance"] = provenance_json(config);
  report["clustering_rows"] = rows;
  report["evaluation_rows"] = binary.rows();
  report["scaling"] = ml::to_string(cc.scaling);
  report["results"] = std::move(results);
  std::filesystem::create_directories(config.output_dir);
  const auto path = config.output_dir / "cluster_report.json";
  write_json(path, report);
  ws.report_diagnostics(log);
  log << "wrote " << path.string() << "\n";
}

void cmd_classify(const RunConfig& config, std::ostream& log) {
  Workspace ws(config);
  const ClassificationConfig& cc = config.classification;
  std::filesystem::create_directories(config.output_dir / "models");

  ordered_json datasets = ordered_json::array();
  for (DatasetKind kind : cc.datasets) {
    const LabeledDataset ds = ws.dataset(kind);
    const ml::Matrix raw = to_matrix(ds.features);
    const std::vector<Fold> folds = cc.stratified
                                        ? stratified_k_folds(ds.labels, cc.folds, config.seed)
                                        : shuffled_k_folds(ds.rows(), cc.folds, config.seed);
    const std::optional<int> positive =
        kind == DatasetKind::kBinary ? std::optional<int>(static_cast<int>(BinaryLabel::kBot))
                                     : std::nullopt;
    ordered_json counts = ordered_json::object();
    for (std::size_t c = 0; c < ds.classes.size(); ++c)
      counts[ds.classes[c]] = std::count(ds.labels.begin(), ds.labels.end(), static_cast<int>(c));

    ordered_json results = ordered_json::array();
    for (ml::ClassifierKind model : cc.models) {
      ml::ClassifierSpec spec;
      spec.kind = model;
      spec.random_forest = cc.random_forest;
      spec.random_forest.workers = config.workers;
      spec.gradient_boosting = cc.gradient_boosting;
      spec.adaboost = cc.adaboost;
      const ml::CvReport cv =
          ml::cross_validate(raw, ds.labels, ds.classes, folds, spec, cc.preprocess, config.seed, positive);

      const auto pre = ml::Preprocessor::fit(raw, cc.preprocess);
      ml::Pipeline pipeline{ds.features.columns(), pre,
                            ml::ClassifierModel::fit(spec, pre.transform(raw), ds.labels,
                                                     ds.classes, config.seed)};
      const auto model_path = default_model_path(config, kind, model);
      {
        std::ofstream out(model_path, std::ios::binary);
        if (!out) throw InputError("cannot write " + model_path.string());
        nlohmann::json j = pipeline.to_json();
        j["provenance"] = provenance_json(config);
        out << j.dump() << "\n";
      }

      ordered_json r = cv.to_json();
      r["hyperparameters"] = spec.hyperparameters();
      r["model_file"] = model_path.filename().string();
      results.push_back(std::move(r));
      log << to_string(kind) << " " << ml::to_string(model)
          << ": accuracy " << ml::format_mean_ci(cv.accuracy)
          << "  precision " << ml::format_mean_ci(cv.precision)
          << "  recall " << ml::format_mean_ci(cv.recall)
          << "  f1 " << ml::format_mean_ci(cv.f1) << "\n";
    }
    datasets.push_back({{"dataset", to_string(kind)},
                        {"rows", ds.rows()},
                        {"class_counts", counts},
                        {"folds", cc.folds},
                        {"stratified", cc.stratified},
                        {"preprocessing",
                         {{"scaling", ml::to_string(cc.preprocess.scaling)},
                          {"imputation", ml::to_string(cc.preprocess.imputation)}}},
                        {"results", std::move(results)}});
  }

  ordered_json report;
  report["provenance"] = provenance_json(config);
  report["datasets"] = std::move(datasets);
  const auto path = config.output_dir / "classify_report.json";
  write_json(path, report);
  ws.report_diagnostics(log);
  log << "wrote " << path.string() << "\n";
}

void cmd_explain(const RunConfig& config, const std::optional<std::filesystem::path>& model_path,
                 std::optional<bool> exhaustive_flag, std::ostream& log) {
  const ExplainConfig& ec = config.explain;
  const auto path = model_path.value_or(default_model_path(config, ec.dataset, ec.model));
  if (!std::filesystem::exists(path)) throw InputError("model file not found: " + path.string());
  ml::Pipeline pipeline;
  try {
    std::ifstream in(path);
    pipeline = ml::Pipeline::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid model file " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError("invalid model file " + path.string() + ": " + e.what());
  }
  const bool exhaustive = exhaustive_flag.value_or(ec.exhaustive);
  if (exhaustive && pipeline.features.size() > explain::kMaxExhaustiveFeatures)
    throw InputError("exhaustive attribution supports at most " +
                     std::to_string(explain::kMaxExhaustiveFeatures) + " features; the model has " +
                     std::to_string(pipeline.features.size()) +
                     ". Use Monte Carlo sampling (omit --exhaustive) instead");

  Workspace ws(config);
  const LabeledDataset ds = ws.dataset(ec.dataset);
  if (ds.features.columns() != pipeline.features)
    throw InputError("model features do not match the feature registry");
  const ml::Matrix x = pipeline.preprocessor.transform(to_matrix(ds.features));
  const ml::Matrix background =
      explain::sample_background(x, ec.background, derive_seed(config.seed, 0xbac6));
  const ml::ClassifierModel& model = pipeline.model;
  const explain::ModelFn f = [&model](std::span<const double> row) {
    return model.predict_proba_row(row);
  };
  const auto attributions = explain::explain_rows(
      f, background, x, {ec.permutations, exhaustive, config.workers}, config.seed);

  std::vector<std::string> ids;
  for (const auto& a : ds.features.addresses()) ids.push_back(a.prefixed());
  std::filesystem::create_directories(config.output_dir);
  const auto csv = config.output_dir / "attribution.csv";
  explain::write_attribution_csv(csv.string(), attributions, ids, pipeline.features,
                                 model.classes(), provenance(config));

  const auto table = explain::mean_abs_attribution(attributions);
  const auto summary_path = config.output_dir / "attribution_summary.csv";
  {
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + summary_path.string());
    out << "# " << provenance(config) << "\n";
    out << "rank,feature";
    for (const auto& c : model.classes()) out << ',' << c;
    out << ",total\n";
    for (std::size_t r = 0; r < table.order.size(); ++r) {
      const std::size_t j = table.order[r];
      out << r + 1 << ',' << pipeline.features[j];
      for (double v : table.mean_abs[j]) out << ',' << format_double(v);
      out << ',' << format_double(table.total(j)) << '\n';
    }
  }

  ws.report_diagnostics(log);
  log << "mean |attribution| (" << (exhaustive ? "exhaustive" : "monte carlo") << ", "
      << attributions.size() << " instances)\n";
  for (std::size_t r = 0; r < std::min(ec.top, table.order.size()); ++r) {
    const std::size_t j = table.order[r];
    log << "  " << r + 1 << ". " << pipeline.features[j] << " " << fixed(table.total(j), 4) << "\n";
  }
  log << "wrote " << csv.string() << "\n";
}

void print_registry(std::ostream& out) {
  const auto& reg = FeatureRegistry::standard();
  out << "# " << FeatureRegistry::kSchemaVersion << " (" << reg.size() << " features)\n";
  for (const auto& d : reg.defs())
    out << d.name << '\t' << to_string(d.group) << '\t' << d.definition << '\n';
}

void print_signature_specs(std::ostream& out) { out << signature_table_json().dump(2) << '\n'; }

}  // namespace botdetect::cli
