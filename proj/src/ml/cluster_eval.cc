#include "botdetect/ml/cluster_eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace botdetect::ml {

double silhouette_score(const Matrix& x, std::span<const int> assignments) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (assignments.size() != n)
    throw std::invalid_argument("silhouette: assignment count mismatch");
  std::map<int, std::size_t> sizes;
  for (int a : assignments) ++sizes[a];
  if (sizes.size() < 2) throw std::invalid_argument("silhouette: needs at least 2 clusters");

  std::map<int, std::size_t> slot;
  for (const auto& [c, _] : sizes) slot.emplace(c, slot.size());
  std::vector<std::size_t> count(slot.size());
  for (const auto& [c, s] : sizes) count[slot[c]] = s;

  double total = 0.0;
  std::vector<double> sum(slot.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      sum[slot[assignments[j]]] +=
          (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).norm();
    }
    const std::size_t own = slot[assignments[i]];
    if (count[own] < 2) continue;
    const double a = sum[own] / static_cast<double>(count[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < count.size(); ++c)
      if (c != own) b = std::min(b, sum[c] / static_cast<double>(count[c]));
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

int elbow_select(std::span<const std::pair<int, double>> curve) {
  if (curve.size() < 3) throw std::invalid_argument("elbow: needs at least 3 points");
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].first <= curve[i - 1].first)
      throw std::invalid_argument("elbow: k values must ascend");
  std::size_t best = 1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double v = curve[i - 1].second - 2.0 * curve[i].second + curve[i + 1].second;
    // Relative slack so curves that are linear up to rounding tie.
    const double slack = 1e-12 * std::max({1.0, std::abs(v), std::abs(best_v)});
    if (v > best_v + slack) {
      best_v = v;
      best = i;
    }
  }
  return curve[best].first;
}

ClusterQuality cluster_quality(std::span<const int> assignments,
                               std::span<const int> labels,
                               std::size_t label_classes) {
  if (assignments.size() != labels.size())
    throw std::invalid_argument("cluster_quality: length mismatch");
  ClusterQuality q;
  if (label_classes == 0) label_classes = std::set<int>(labels.begin(), labels.end()).size();
  q.label_classes = label_classes;
  const double norm = label_classes > 1 ? std::log(static_cast<double>(label_classes)) : 0.0;

  std::map<int, std::map<int, std::size_t>> table;
  for (std::size_t i = 0; i < labels.size(); ++i) ++table[assignments[i]][labels[i]];

  const auto n = static_cast<double>(labels.size());
  for (const auto& [cluster, counts] : table) {
    ClusterStats s;
    s.cluster = cluster;
    std::size_t best = 0;
    for (const auto& [label, cnt] : counts) {
      s.size += cnt;
      if (cnt > best) {
        best = cnt;
        s.majority = label;
      }
    }
    const auto size = static_cast<double>(s.size);
    s.purity = static_cast<double>(best) / size;
    double h = 0.0;
    for (const auto& [label, cnt] : counts) {
      const double p = static_cast<double>(cnt) / size;
      h -= p * std::log(p);
    }
    s.entropy = norm > 0.0 ? h / norm : 0.0;
    q.weighted_purity += size / n * s.purity;
    q.weighted_entropy += size / n * s.entropy;
    q.clusters.push_back(s);
  }
  return q;
}

}  // namespace botdetect::ml
