#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "affgraph/embedding.hpp"
#include "affgraph/graphlet.hpp"

namespace affgraph {

/// 1 - cos(a, b), in [0, 2]. Throws NumericError for a zero vector.
double cosine_cost(std::span<const double> a, std::span<const double> b);

enum class Linkage { Average, Complete, Single };

std::string_view to_string(Linkage l);
Linkage linkage_from_string(std::string_view s);

/// Node ids: leaves are 0..n-1, the k-th merge creates node n+k.
struct Merge {
  int left = 0;   // child whose smallest leaf id is lower
  int right = 0;
  double height = 0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;

  double root_height() const { return merges.empty() ? 0.0 : merges.back().height; }
};

/// Dense symmetric cost matrix.
class CostMatrix {
public:
  explicit CostMatrix(std::size_t n = 0) : n_(n), data_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }

private:
  std::size_t n_;
  std::vector<double> data_;
};

CostMatrix cosine_cost_matrix(const EmbeddingTable& points);

/// Agglomerative clustering with Lance-Williams updates. Among equal-cost
/// candidate pairs the one with the lexicographically smallest pair of
/// cluster keys (smallest member leaf id) merges first.
Dendrogram hierarchical_cluster(const CostMatrix& costs, Linkage linkage = Linkage::Average);
Dendrogram hierarchical_cluster(const EmbeddingTable& points, Linkage linkage = Linkage::Average);

struct FlatClustering {
  std::vector<int> labels;  // per leaf, dense ids ordered by first leaf
  int cluster_count = 0;
};

/// Clusters are the maximal subtrees whose merge heights are all < threshold.
FlatClustering cut(const Dendrogram& d, double threshold);

enum class Criterion { BIC, AIC };

/// Spherical Gaussian mixture with one shared variance (unbiased estimate
/// over n - k degrees of freedom). Returns -inf when the within-cluster
/// scatter is 0 or every point is its own cluster.
double information_criterion(const EmbeddingTable& points, const FlatClustering& clustering, Criterion criterion);

struct ThresholdChoice {
  double threshold = 0;
  double score = 0;
  int cluster_count = 0;
};

/// Evaluates the criterion for the flat clustering below every distinct
/// merge height (and for a single cluster) and returns a threshold inside
/// the winning height interval. Clusterings with more than n/2 clusters are
/// skipped. Ties go to the smaller threshold.
ThresholdChoice select_threshold(const Dendrogram& d, const EmbeddingTable& points, Criterion criterion);

struct SedWeights {
  double c_spat = 0.5;
  double k_spat = 0.5;
};

/// Weighted label-multiset symmetric differences over object-object spatial,
/// object-object temporal, human-object spatial and human-object temporal
/// vertices.
double sed_distance(const LabeledGraph& a, const LabeledGraph& b, const SedWeights& w = {});

}  // namespace affgraph
