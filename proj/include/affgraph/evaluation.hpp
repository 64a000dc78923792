#pragma once

#include <string>
#include <vector>

#include "affgraph/embedding.hpp"

namespace affgraph {

struct VMeasure {
  double homogeneity = 0;
  double completeness = 0;
  double v = 0;
};

/// Entropy-based clustering scores (natural log, beta = 1). Each datapoint
/// with several groundtruth labels contributes one (label, cluster) pair per
/// label; points without labels are skipped.
VMeasure v_measure(const std::vector<std::vector<std::string>>& truth, const std::vector<int>& clusters);

struct PcaResult {
  std::vector<std::vector<double>> coordinates;   // one row per point, k columns
  std::vector<double> explained_variance_ratio;   // per kept component
  std::vector<std::string> warnings;
};

/// Projection onto the top-k principal components. Component signs are fixed
/// so that the largest-magnitude projected coordinate of each is positive.
PcaResult pca_project(const EmbeddingTable& points, int k);

}  // namespace affgraph
