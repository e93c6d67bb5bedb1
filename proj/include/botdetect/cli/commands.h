#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "botdetect/cli/config.h"

namespace botdetect::cli {

// Each command reads its inputs, writes into config.output_dir and logs a
// short summary to `log`. Input problems raise InputError.

// features.csv for every sender in the block range.
void cmd_features(const RunConfig& config, std::ostream& log);

// cluster_report.json: every requested (algorithm, imputation, embedding, k)
// fitted on the clustering dataset and evaluated on the binary dataset, plus
// elbow (k-means) and BIC (GMM) selected k.
void cmd_cluster(const RunConfig& config, std::ostream& log);

// classify_report.json with cross-validated metrics per dataset and model,
// and one fitted pipeline per pair under models/.
void cmd_classify(const RunConfig& config, std::ostream& log);

// attribution.csv and attribution_summary.csv for the configured explain
// dataset. `model_path` defaults to the pipeline cmd_classify wrote for the
// configured model and dataset.
void cmd_explain(const RunConfig& config, const std::optional<std::filesystem::path>& model_path,
                 std::optional<bool> exhaustive, std::ostream& log);

void print_registry(std::ostream& out);
void print_signature_specs(std::ostream& out);

std::filesystem::path default_model_path(const RunConfig& config, DatasetKind dataset,
                                         ml::ClassifierKind model);

}  // namespace botdetect::cli
