// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include "botdetect/abi/abi.h"
#include "botdetect/cli/commands.h"
#include "botdetect/cli/config.h"
#include "botdetect/cli/fixture.h"
#include "botdetect/dataset/dataset.h"
#include "botdetect/explain/shapley.h"
#include "botdetect/features/aggregators.h"
#include "botdetect/ml/cluster_eval.h"
#include "botdetect/ml/gmm.h"
#include "botdetect/ml/kmeans.h"
#include "botdetect/ml/metrics.h"
#include "support/support.h"

using namespace botdetect;
namespace fs = std::filesystem;

namespace {

// Collects the first few failure reasons for a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) detail_ += (detail_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { note_ += (note_.empty() ? "" : ", ") + s; }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    if (ok()) return note_;
    return std::to_string(failures_) + " failure(s): " + detail_;
  }

 private:
  int failures_ = 0;
  std::string detail_;
  std::string note_;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

void metric_oracle(Check& c) {
  Rng rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(50);
    const int clusters = 1 + static_cast<int>(rng.index(8));
    const int classes = 2 + static_cast<int>(rng.index(3));
    std::vector<int> assign(n), labels(n);
    for (auto& a : assign) a = static_cast<int>(rng.index(static_cast<std::uint64_t>(clusters)));
    for (auto& l : labels) l = static_cast<int>(rng.index(static_cast<std::uint64_t>(classes)));
    auto q = ml::cluster_quality(assign, labels, static_cast<std::size_t>(classes));
    auto o = bdtest::brute_force_quality(assign, labels, classes);
    const double err = std::max(std::abs(q.weighted_purity - o.purity),
                                std::abs(q.weighted_entropy - o.entropy));
    worst = std::max(worst, err);
    c.expect(err <= 1e-12, "instance " + std::to_string(trial) + " differs by " + fmt(err));
  }
  auto spot = [](int majority, int size) {
    std::vector<int> a(static_cast<std::size_t>(size), 0), l(static_cast<std::size_t>(size), 1);
    for (int i = 0; i < majority; ++i) l[static_cast<std::size_t>(i)] = 0;
    return ml::cluster_quality(a, l, 2).clusters.at(0);
  };
  auto s1 = spot(51, 55), s2 = spot(11, 19);
  c.expect(std::abs(s1.purity - 0.927) <= 0.001, "51/55 purity " + fmt(s1.purity));
  c.expect(std::abs(s2.purity - 0.579) <= 0.001, "11/19 purity " + fmt(s2.purity));
  c.expect(std::abs(s2.entropy - 0.982) <= 0.001, "11/19 entropy " + fmt(s2.entropy));
  c.note("max deviation " + fmt(worst) + ", 51/55 purity " + fmt(s1.purity, "%.3f") +
         ", 11/19 purity " + fmt(s2.purity, "%.3f") + " entropy " + fmt(s2.entropy, "%.3f"));
}

void benford(Check& c) {
  Rng rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::array<std::uint64_t, 9> counts{};
    for (auto& x : counts) x = rng.index(150);
    counts[rng.index(9)] += 1;
    const double p = benford_p_value_from_counts(counts).value();
    const double o = bdtest::chi2_survival_8dof(bdtest::benford_statistic(counts));
    worst = std::max(worst, std::abs(p - o));
    c.expect(std::abs(p - o) <= 1e-9, "count vector " + std::to_string(trial));
  }
  // n = 1000 drawn as exact Benford proportions.
  std::vector<U256> conforming;
  for (int d = 1; d <= 9; ++d) {
    const auto k = std::llround(1000 * std::log10(1.0 + 1.0 / d));
    for (long long i = 0; i < k; ++i) conforming.push_back(U256(d) * 1000 + U256(i));
  }
  const double p_benford = benford_p_value(std::span<const U256>(conforming)).value();
  std::vector<U256> uniform;
  for (int d = 1; d <= 9; ++d)
    for (int i = 0; i < 1000; ++i) uniform.push_back(U256(d) * 10000 + U256(i));
  const double p_uniform = benford_p_value(std::span<const U256>(uniform)).value();
  c.expect(conforming.size() == 1000, "conforming sample has " + std::to_string(conforming.size()));
  c.expect(p_benford > 0.99, "Benford data p=" + fmt(p_benford));
  c.expect(p_uniform < 1e-6, "uniform data p=" + fmt(p_uniform));
  c.note("oracle max deviation " + fmt(worst) + ", Benford p=" + fmt(p_benford) +
         ", uniform p=" + fmt(p_uniform));
}

Hash32 topic_of(const Address& a) {
  Hash32 h;
  std::copy(a.bytes.begin(), a.bytes.end(), h.bytes.begin() + 12);
  return h;
}

void abi_round_trip(Check& c) {
  Rng rng(3);
  std::size_t cycles = 0;
  for (const auto& f : function_specs()) {
    for (int trial = 0; trial < 1000; ++trial, ++cycles) {
      std::vector<bdtest::AbiValue> args;
      std::map<std::string_view, bdtest::AbiValue> named;
      for (const auto& p : f.params) {
        bdtest::AbiValue v;
        if (p.kind == ParamKind::kUint256) {
          v = bdtest::random_u256(rng);
        } else if (p.kind == ParamKind::kAddress) {
          v = bdtest::random_address(rng);
        } else {
          std::vector<Address> path(2 + rng.index(4));
          for (auto& a : path) a = bdtest::random_address(rng);
          v = path;
        }
        args.push_back(v);
        named[p.name] = v;
      }
      Transaction tx;
      tx.from = bdtest::random_address(rng);
      tx.to = bdtest::random_address(rng);
      tx.input = bdtest::encode_call(f.selector(), args);
      auto call = decode_swap_call(tx);
      const bool ok = call && call->spec == &f && call->sender == tx.from &&
                      call->amount == std::get<U256>(named.at(f.amount_param)) &&
                      call->to == std::get<Address>(named.at("to")) &&
                      call->path == std::get<std::vector<Address>>(named.at("path"));
      c.expect(ok, std::string(f.signature) + " trial " + std::to_string(trial));
    }
  }
  for (const auto& e : event_specs()) {
    for (int trial = 0; trial < 1000; ++trial, ++cycles) {
      Address a = bdtest::random_address(rng), b = bdtest::random_address(rng);
      LogEvent log;
      log.topics = {e.topic0(), topic_of(a), topic_of(b)};
      std::vector<U256> words;
      I256 s0 = bdtest::random_i256(rng), s1 = bdtest::random_i256(rng);
      auto append = [&](const Bytes& w) { log.data.insert(log.data.end(), w.begin(), w.end()); };
      if (e.kind == EventKind::kSwapV3) {
        append(bdtest::int_word(s0));
        append(bdtest::int_word(s1));
        append(bdtest::uint_word(bdtest::random_u256(rng) >> 96));
        append(bdtest::uint_word(bdtest::random_u256(rng) >> 128));
        append(bdtest::int_word(I256(rng.range(-887272, 887272))));
      } else {
        for (std::size_t i = 0; i < e.data.size(); ++i) {
          words.push_back(bdtest::random_u256(rng));
          append(bdtest::uint_word(words.back()));
        }
      }
      auto d = decode_log(log);
      bool ok = d.has_value();
      if (ok) {
        if (const auto* t = std::get_if<TransferEvent>(&d->event))
          ok = e.kind == EventKind::kTransfer && t->from == a && t->to == b && t->value == words[0];
        else if (const auto* v2 = std::get_if<SwapV2Event>(&d->event))
          ok = e.kind == EventKind::kSwapV2 && v2->sender == a && v2->to == b &&
               v2->amount0_in == words[0] && v2->amount1_in == words[1] &&
               v2->amount0_out == words[2] && v2->amount1_out == words[3];
        else if (const auto* v3 = std::get_if<SwapV3Event>(&d->event))
          ok = e.kind == EventKind::kSwapV3 && v3->sender == a && v3->recipient == b &&
               v3->amount0 == s0 && v3->amount1 == s1;
      }
      c.expect(ok, std::string(e.signature) + " trial " + std::to_string(trial));
    }
  }
  const std::vector<std::pair<std::string, std::string>> printed = {
      {"swapExactTokensForTokens(uint256,uint256,address[],address,uint256)", "38ed1739"},
      {"swapExactTokensForTokens(uint256,uint256,address[],address)", "472b43f3"},
      {"swapTokensForExactTokens(uint256,uint256,address[],address,uint256)", "8803dbee"},
      {"swapTokensForExactETH(uint256,uint256,address[],address,uint256)", "4a25d94a"},
      {"swapExactTokensForETH(uint256,uint256,address[],address,uint256)", "18cbafe5"},
      {"swapETHForExactTokens(uint256,address[],address,uint256)", "fb3bdb41"},
      {"swapExactTokensForTokensSupportingFeeOnTransferTokens(uint256,uint256,address[],address,"
       "uint256)",
       "5c11d795"},
      {"swapExactTokensForETHSupportingFeeOnTransferTokens(uint256,uint256,address[],address,"
       "uint256)",
       "791ac947"},
      {"Transfer(address,address,uint256)", "ddf252ad"},
      {"Swap(address,uint256,uint256,uint256,uint256,address)", "d78ad95f"},
      {"Swap(address,address,int256,int256,uint160,uint128,int24)", "c42079f9"},
  };
  std::size_t matched = 0;
  for (const auto& [sig, prefix] : printed) {
    auto digest = keccak256(sig);
    const bool ok = to_hex(digest.data(), 4) == prefix;
    matched += ok;
    c.expect(ok, sig + " hashes to " + to_hex(digest.data(), 4));
  }
  c.expect(function_specs().size() + event_specs().size() == printed.size(),
           "modeled table size differs from 11");
  c.note(std::to_string(cycles) + " cycles, " + std::to_string(matched) + "/11 prefixes");
}

ml::Matrix random_blobs(Rng& rng) {
  const std::size_t k = 1 + rng.index(4), d = 1 + rng.index(3), per = 10 + rng.index(25);
  ml::Matrix centers(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = rng.uniform(-8, 8);
  ml::Matrix x(static_cast<Eigen::Index>(k * per), static_cast<Eigen::Index>(d));
  const double sd = 0.5 + 2.5 * rng.uniform();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      x(i, j) = centers(i % static_cast<Eigen::Index>(k), j) + rng.normal(0, sd);
  return x;
}

void em_lloyd(Check& c) {
  Rng rng(4);
  double worst_ll = 0.0, worst_inertia = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ml::Matrix x = random_blobs(rng);
    const std::size_t k = 1 + rng.index(std::min<std::size_t>(5, static_cast<std::size_t>(x.rows())));
    ml::GmmOptions opts;
    opts.covariance = trial % 2 ? ml::CovarianceType::kFull : ml::CovarianceType::kDiagonal;
    auto g = ml::gmm_fit(x, k, static_cast<std::uint64_t>(trial), opts);
    for (std::size_t i = 1; i < g.log_likelihood_trace.size(); ++i) {
      const double drop = g.log_likelihood_trace[i - 1] - g.log_likelihood_trace[i];
      worst_ll = std::max(worst_ll, drop);
      c.expect(drop <= 1e-9, "GMM dataset " + std::to_string(trial) + " LL drops by " + fmt(drop));
    }
    auto km = ml::kmeans_fit(x, k, static_cast<std::uint64_t>(trial));
    for (std::size_t i = 1; i < km.inertia_trace.size(); ++i) {
      const double rise = km.inertia_trace[i] - km.inertia_trace[i - 1];
      worst_inertia = std::max(worst_inertia, rise);
      c.expect(rise <= 1e-9 * std::max(1.0, km.inertia_trace[i - 1]),
               "k-means dataset " + std::to_string(trial) + " inertia rises by " + fmt(rise));
    }
  }
  // Two unit Gaussians ten standard deviations apart.
  ml::Matrix x(1000, 2);
  std::vector<int> truth;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int comp = static_cast<int>(i % 2);
    truth.push_back(comp);
    x(i, 0) = rng.normal(10.0 * comp, 1.0);
    x(i, 1) = rng.normal(0.0, 1.0);
  }
  auto g = ml::gmm_fit(x, 2, 1);
  auto pred = ml::gmm_predict(g, x);
  std::size_t same = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) same += pred[i] == truth[i];
  const double acc = std::max(same, pred.size() - same) / static_cast<double>(pred.size());
  c.expect(acc >= 0.99, "two-Gaussian recovery " + fmt(acc));
  c.note("max LL drop " + fmt(worst_ll) + ", max inertia rise " + fmt(worst_inertia) +
         ", recovery " + fmt(acc, "%.4f"));
}

void classifier_sanity(Check& c) {
  auto dir = bdtest::scratch_dir("acceptance-classify");
  cli::write_fixture(dir, {1, 1});
  auto config = cli::load_run_config(dir / "run.json");
  config.classification.datasets = {DatasetKind::kBinary};
  config.classification.models = {ml::ClassifierKind::kRandomForest};
  std::ostringstream log;
  cli::cmd_classify(config, log);
  auto report = nlohmann::json::parse(slurp(config.output_dir / "classify_report.json"));
  const auto& ds = report["datasets"].at(0);
  const auto& r = ds["results"].at(0);
  c.expect(ds["folds"] == 20, "folds " + ds["folds"].dump());
  const double mean = r["accuracy"]["mean"];
  c.expect(mean >= 0.90, "accuracy " + fmt(mean));

  // t-based interval recomputed from the per-fold accuracies; 2.093024 is
  // the two-sided 95% quantile of Student's t with 19 degrees of freedom.
  std::vector<double> acc;
  for (const auto& f : r["per_fold"]) acc.push_back(f["accuracy"]);
  c.expect(acc.size() == 20, "per-fold count " + std::to_string(acc.size()));
  double m = 0;
  for (double a : acc) m += a;
  m /= static_cast<double>(acc.size());
  double ss = 0;
  for (double a : acc) ss += (a - m) * (a - m);
  const double half = 2.093024 * std::sqrt(ss / (static_cast<double>(acc.size()) - 1)) /
                      std::sqrt(static_cast<double>(acc.size()));
  c.expect(std::abs(r["accuracy"]["mean"].get<double>() - m) < 1e-12, "mean mismatch");
  c.expect(std::abs(r["accuracy"]["lo"].get<double>() - (m - half)) < 1e-6, "lo mismatch");
  c.expect(std::abs(r["accuracy"]["hi"].get<double>() - (m + half)) < 1e-6, "hi mismatch");

  const std::string formatted = r["accuracy"]["formatted"];
  char expect[64];
  std::snprintf(expect, sizeof expect, "%.2f (%.2f, %.2f)", r["accuracy"]["mean"].get<double>(),
                r["accuracy"]["lo"].get<double>(), r["accuracy"]["hi"].get<double>());
  c.expect(formatted == expect, "formatted '" + formatted + "'");
  c.expect(std::regex_match(formatted, std::regex(R"(-?\d\.\d{2} \(-?\d\.\d{2}, -?\d\.\d{2}\))")),
           "format '" + formatted + "'");
  c.expect(ml::format_mean_ci({0.83, 0.77, 0.88}) == "0.83 (0.77, 0.88)", "Table-3 style sample");
  c.note("RF accuracy " + formatted);
}

std::vector<double> sigmoid_model(std::span<const double> x) {
  const double z = 0.9 * x[0] - 0.6 * x[1] + x[2] * x[3] + 0.4 * std::sin(2 * x[4]) +
                   0.3 * x[5] * x[6] - 0.2 * x[0] * x[6];
  const double p = 1.0 / (1.0 + std::exp(-z));
  return {1 - p, p};
}

void shapley_axioms(Check& c) {
  Rng rng(6);
  double worst_eff = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 3 + rng.index(8);
    ml::Matrix bg(static_cast<Eigen::Index>(1 + rng.index(8)), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < bg.size(); ++i) bg.data()[i] = rng.uniform(-1, 1);
    bg.col(1) = bg.col(0);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform(-1, 1);
    x[1] = x[0];
    explain::ModelFn f = [](std::span<const double> r) {
      const double v = std::exp(r[0] + r[1]) + r[0] * r[1] * r[2] + r[2];
      return std::vector<double>{v, std::sin(v)};
    };
    auto a = explain::shapley_exhaustive(f, bg, x);
    for (std::size_t k = 0; k < 2; ++k) {
      double sum = a.base[k];
      for (std::size_t j = 0; j < d; ++j) sum += a.values[j][k];
      const double err = std::abs(sum - a.output[k]);
      worst_eff = std::max(worst_eff, err);
      c.expect(err <= 1e-12, "efficiency off by " + fmt(err));
      c.expect(a.values[0][k] == a.values[1][k], "symmetry not exact");
    }
  }
  double worst_mc = 0.0;
  for (int model = 0; model < 3; ++model) {
    ml::Matrix bg(25, 8);
    for (Eigen::Index i = 0; i < bg.size(); ++i) bg.data()[i] = rng.uniform(-1, 1);
    std::vector<double> x(8);
    for (auto& v : x) v = rng.uniform(-1, 1);
    auto exact = explain::shapley_exhaustive(sigmoid_model, bg, x);
    auto mc = explain::shapley_monte_carlo(sigmoid_model, bg, x, 10000, static_cast<std::uint64_t>(model));
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        const double err = std::abs(mc.values[j][k] - exact.values[j][k]);
        worst_mc = std::max(worst_mc, err);
        c.expect(err <= 0.05, "MC feature " + std::to_string(j) + " off by " + fmt(err));
      }
  }
  c.note("max efficiency error " + fmt(worst_eff) + ", max MC deviation " + fmt(worst_mc));
}

void feature_invariants(Check& c) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<U256> values(1 + rng.index(100));
    for (auto& v : values) v = U256(1 + rng.index(999'999'999)) * U256(1 + rng.index(99'999));
    const auto p = benford_p_value(std::span<const U256>(values));
    c.expect(p.value() >= 0.0 && p.value() <= 1.0, "Benford p outside [0,1]");
    std::vector<U256> scaled = values;
    const U256 factor = boost::multiprecision::pow(U256(10), static_cast<unsigned>(rng.index(50)));
    for (auto& v : scaled) v *= factor;
    c.expect(benford_p_value(std::span<const U256>(scaled)) == p, "Benford not scale-10 invariant");

    std::vector<std::int64_t> ts(2 + rng.index(80));
    for (auto& t : ts) t = rng.range(1'600'000'000, 1'600'000'000 + 30 * kSleepinessWindowSeconds);
    std::sort(ts.begin(), ts.end());
    const auto sleep = gap_based_sleepiness(ts);
    auto shifted = ts;
    const std::int64_t shift = rng.range(-10000, 10000) * kSleepinessWindowSeconds;
    for (auto& t : shifted) t += shift;
    c.expect(gap_based_sleepiness(shifted) == sleep, "sleepiness changes under window shift");

    const int domain[] = {0, 1, 2};
    std::vector<int> cats(1 + rng.index(40));
    const auto used = 1 + rng.index(3);
    for (auto& x : cats) x = static_cast<int>(rng.index(used));
    const double h = categorical_stats(cats, domain).entropy.value();
    const bool single = std::all_of(cats.begin(), cats.end(), [&](int x) { return x == cats[0]; });
    c.expect(h >= 0.0 && h <= std::log(3.0) + 1e-12, "entropy outside [0, ln 3]");
    c.expect((h == 0.0) == single, "entropy zero iff single class violated");

    std::vector<U256> tvc_values = values;
    double prev = trade_value_clustering(tvc_values).value();
    for (int i = 0; i < 5; ++i) {
      tvc_values.push_back(U256(1 + rng.index(9)) * boost::multiprecision::pow(U256(10), static_cast<unsigned>(rng.index(30))));
      const double now = trade_value_clustering(tvc_values).value();
      c.expect(now >= prev && now <= 1.0, "TVC decreased after a round append");
      prev = now;
    }

    std::vector<double> nums(1 + rng.index(30));
    for (auto& v : nums) v = rng.bernoulli(0.1) ? 4.0 : rng.uniform(-100, 100);
    auto s = numerical_stats(nums);
    c.expect(s.min.value() <= s.mean.value() && s.mean.value() <= s.max.value(), "min<=mean<=max");
    c.expect(s.min.value() <= s.q95.value() && s.q95.value() <= s.max.value(), "min<=q95<=max");
  }
  c.note("200 random cases per property");
}

void determinism(Check& c) {
  auto run = [&](const fs::path& dir) {
    fs::remove_all(dir);
    cli::write_fixture(dir, {1, 1});
    auto config = cli::load_run_config(dir / "run.json");
    std::ostringstream log;
    cli::cmd_features(config, log);
    cli::cmd_cluster(config, log);
    cli::cmd_classify(config, log);
    cli::cmd_explain(config, std::nullopt, std::nullopt, log);
    return snapshot(dir);
  };
  const auto dir = fs::temp_directory_path() / "botdetect-acceptance-pipeline";
  const auto t0 = std::chrono::steady_clock::now();
  auto first = run(dir);
  const auto t1 = std::chrono::steady_clock::now();
  auto second = run(dir);
  const double seconds = std::chrono::duration<double>(t1 - t0).count();
  c.expect(first.size() == second.size(), "file count differs");
  for (const auto& [name, bytes] : first) {
    auto it = second.find(name);
    c.expect(it != second.end() && it->second == bytes, name + " differs between runs");
  }
  for (const char* f : {"out/features.csv", "out/cluster_report.json", "out/classify_report.json",
                        "out/attribution.csv"})
    c.expect(first.contains(f), std::string(f) + " missing");
  c.expect(seconds < 60.0, "pipeline took " + fmt(seconds) + " s");
  c.note(std::to_string(first.size()) + " files identical, one run " + fmt(seconds, "%.1f") + " s");
}

void kappa(Check& c) {
  std::vector<int> a{0, 1, 2, 1, 0, 3, 3};
  c.expect(cohens_kappa(a, a) == 1.0, "perfect agreement is not 1");
  std::vector<int> constant(10, 1), balanced;
  for (int i = 0; i < 10; ++i) balanced.push_back(i % 2);
  c.expect(std::abs(cohens_kappa(constant, balanced)) <= 1e-12, "constant vs balanced not 0");

  Rng rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // Independence: counts are an outer product of the two marginals.
    const std::size_t k = 2 + rng.index(3);
    std::vector<int> r(k), s(k);
    for (auto& v : r) v = 1 + static_cast<int>(rng.index(6));
    for (auto& v : s) v = 1 + static_cast<int>(rng.index(6));
    std::vector<int> x, y;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        for (int n = 0; n < r[i] * s[j]; ++n) {
          x.push_back(static_cast<int>(i));
          y.push_back(static_cast<int>(j));
        }
    c.expect(std::abs(cohens_kappa(x, y)) <= 1e-12, "independence construction not 0");

    // Random confusion matrix against the hand formula.
    std::vector<std::vector<int>> t(k, std::vector<int>(k));
    double n = 0, diag = 0;
    std::vector<double> rows(k, 0), cols(k, 0);
    x.clear();
    y.clear();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        t[i][j] = static_cast<int>(rng.index(25)) + (i == j);
        for (int m = 0; m < t[i][j]; ++m) {
          x.push_back(static_cast<int>(i));
          y.push_back(static_cast<int>(j));
        }
        n += t[i][j];
        rows[i] += t[i][j];
        cols[j] += t[i][j];
        if (i == j) diag += t[i][j];
      }
    double pe = 0;
    for (std::size_t i = 0; i < k; ++i) pe += rows[i] * cols[i] / (n * n);
    const double hand = (diag / n - pe) / (1 - pe);
    const double err = std::abs(cohens_kappa(x, y) - hand);
    worst = std::max(worst, err);
    c.expect(err <= 1e-12, "confusion matrix " + std::to_string(trial) + " off by " + fmt(err));
  }
  c.note("max hand-formula deviation " + fmt(worst));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"metric-oracle-equivalence", metric_oracle},
      {"benford-correctness", benford},
      {"abi-round-trip", abi_round_trip},
      {"em-lloyd-guarantees", em_lloyd},
      {"classifier-sanity", classifier_sanity},
      {"shapley-axioms", shapley_axioms},
      {"feature-invariants", feature_invariants},
      {"determinism", determinism},
      {"cohens-kappa", kappa},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    failed += !c.ok();
    std::cout << (c.ok() ? "PASS " : "FAIL ") << name << " : " << c.summary() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
