// botdetect command-line entry point.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "botdetect/cli/commands.h"
#include "botdetect/cli/config.h"
#include "botdetect/cli/fixture.h"
#include "botdetect/common/error.h"

namespace {

using namespace botdetect;

struct ConfigArgs {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("-c,--config", path, "run config (JSON)");
    if (required) opt->required();
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("--out", out, "override the output directory");
    cmd->add_option("--workers", workers, "worker threads (does not change results)");
  }

  cli::RunConfig load() const {
    cli::RunConfig c = cli::load_run_config(path);
    cli::Overrides o;
    o.seed = seed;
    if (out) o.output_dir = std::filesystem::path(*out);
    o.workers = workers;
    cli::apply_overrides(c, o);
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ethereum bot detection: features, clustering, classification, attribution"};
  app.require_subcommand(1);

  ConfigArgs features_args;
  bool registry = false;
  auto* features = app.add_subcommand("features", "write features.csv for every sender in range");
  features->add_flag("--registry", registry, "print the feature registry and exit");
  features_args.attach(features, false);

  ConfigArgs cluster_args;
  auto* cluster = app.add_subcommand("cluster", "fit clusterings and write cluster_report.json");
  cluster_args.attach(cluster);

  ConfigArgs classify_args;
  auto* classify = app.add_subcommand("classify", "cross-validate classifiers");
  classify_args.attach(classify);

  ConfigArgs explain_args;
  std::optional<std::string> model_path;
  bool exhaustive = false;
  auto* explain = app.add_subcommand("explain", "Shapley attribution for a fitted model");
  explain_args.attach(explain);
  explain->add_option("--model", model_path, "pipeline JSON written by classify");
  explain->add_flag("--exhaustive", exhaustive, "exact subset enumeration (<= 12 features)");

  std::uint64_t fixture_seed = 1;
  std::uint32_t fixture_scale = 1;
  std::string fixture_out = "fixture";
  auto* fixture = app.add_subcommand("fixture", "generate a synthetic chain with labels");
  fixture->add_option("--seed", fixture_seed, "generator seed");
  fixture->add_option("--scale", fixture_scale, "population and block multiplier (>= 1)")
      ->check(CLI::PositiveNumber);
  fixture->add_option("--out", fixture_out, "output directory");

  bool list_specs = false;
  auto* decode = app.add_subcommand("decode", "ABI decoder utilities");
  decode->add_flag("--list-specs", list_specs, "print the modeled function and event tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (features->parsed()) {
      if (registry) {
        cli::print_registry(std::cout);
        return 0;
      }
      if (features_args.path.empty()) throw InputError("features: --config is required");
      cli::cmd_features(features_args.load(), std::cout);
    } else if (cluster->parsed()) {
      cli::cmd_cluster(cluster_args.load(), std::cout);
    } else if (classify->parsed()) {
      cli::cmd_classify(classify_args.load(), std::cout);
    } else if (explain->parsed()) {
      std::optional<std::filesystem::path> path;
      if (model_path) path = *model_path;
      cli::cmd_explain(explain_args.load(), path,
                       exhaustive ? std::optional<bool>(true) : std::nullopt, std::cout);
    } else if (fixture->parsed()) {
      const auto s = cli::write_fixture(fixture_out, {fixture_seed, fixture_scale});
      std::cout << "blocks: " << s.blocks << "\n"
                << "transactions: " << s.transactions << "\n"
                << "logs: " << s.logs << "\n"
                << "senders: " << s.senders << "\n"
                << "labeled bots: " << s.bots << " (" << s.test_bots << " in test blocks)\n"
                << "labeled humans: " << s.humans << " (" << s.test_humans << " in test blocks)\n"
                << "mev bots per class: " << s.mev_per_class << "\n"
                << "wrote " << fixture_out << "/run.json\n";
    } else if (decode->parsed()) {
      if (!list_specs) throw InputError("decode: nothing to do (try --list-specs)");
      cli::print_signature_specs(std::cout);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
