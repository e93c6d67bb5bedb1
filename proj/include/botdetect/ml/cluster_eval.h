#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "botdetect/ml/matrix.h"

namespace botdetect::ml {

// Mean silhouette over all points (Euclidean). Points in singleton clusters
// score 0, as do points where both a and b are 0.
double silhouette_score(const Matrix& x, std::span<const int> assignments);

// Picks the k maximizing v(k-1) - 2 v(k) + v(k+1) over interior points.
// Ties go to the smallest k.
int elbow_select(std::span<const std::pair<int, double>> curve);

struct ClusterStats {
  int cluster = 0;
  std::size_t size = 0;
  double purity = 0.0;
  double entropy = 0.0;  // normalized to [0, 1]
  int majority = 0;      // most frequent label; ties to the lowest label
};

struct ClusterQuality {
  std::vector<ClusterStats> clusters;  // non-empty clusters, ascending id
  double weighted_purity = 0.0;
  double weighted_entropy = 0.0;
  std::size_t label_classes = 0;
};

// Purity and entropy per cluster and size-weighted overall. Labels are
// indices in [0, label_classes); entropy is divided by ln(label_classes).
// label_classes = 0 means "number of distinct labels present".
ClusterQuality cluster_quality(std::span<const int> assignments,
                               std::span<const int> labels,
                               std::size_t label_classes = 0);

}  // namespace botdetect::ml
