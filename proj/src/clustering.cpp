#include "affgraph/clustering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "affgraph/error.hpp"

namespace affgraph {

double cosine_cost(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("cosine_cost: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw NumericError("cosine_cost: zero vector");
  const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return 1.0 - cos;
}

std::string_view to_string(Linkage l) {
  switch (l) {
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Single: return "single";
  }
  return "average";
}

Linkage linkage_from_string(std::string_view s) {
  if (s == "average") return Linkage::Average;
  if (s == "complete") return Linkage::Complete;
  if (s == "single") return Linkage::Single;
  throw UsageError("unknown linkage '" + std::string(s) + "'");
}

CostMatrix cosine_cost_matrix(const EmbeddingTable& points) {
  CostMatrix m(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) m.set(i, j, cosine_cost(points[i], points[j]));
  return m;
}

Dendrogram hierarchical_cluster(const CostMatrix& costs, Linkage linkage) {
  const std::size_t n = costs.size();
  if (n < 2) throw DataError("hierarchical_cluster: need at least 2 points");
  // Slot k holds the cluster whose smallest leaf is k.
  CostMatrix d = costs;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<int> node(n);
  for (std::size_t i = 0; i < n; ++i) node[i] = static_cast<int>(i);

  Dendrogram out;
  out.leaf_count = n;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (!found || d(i, j) < best) {
          best = d(i, j);
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    const std::size_t ni = size[bi], nj = size[bj];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double v = 0;
      switch (linkage) {
        case Linkage::Average:
          v = (static_cast<double>(ni) * d(bi, k) + static_cast<double>(nj) * d(bj, k)) / static_cast<double>(ni + nj);
          break;
        case Linkage::Complete: v = std::max(d(bi, k), d(bj, k)); break;
        case Linkage::Single: v = std::min(d(bi, k), d(bj, k)); break;
      }
      d.set(bi, k, v);
    }
    out.merges.push_back({node[bi], node[bj], best, ni + nj});
    active[bj] = false;
    size[bi] = ni + nj;
    node[bi] = static_cast<int>(n + step);
  }
  return out;
}

Dendrogram hierarchical_cluster(const EmbeddingTable& points, Linkage linkage) {
  return hierarchical_cluster(cosine_cost_matrix(points), linkage);
}

FlatClustering cut(const Dendrogram& d, double threshold) {
  const std::size_t n = d.leaf_count;
  const std::size_t total = n + d.merges.size();
  // A node is pure when every merge inside it lies below the threshold.
  std::vector<bool> pure(total, true);
  std::vector<int> parent(total, -1);
  for (std::size_t k = 0; k < d.merges.size(); ++k) {
    const auto& m = d.merges[k];
    const std::size_t id = n + k;
    pure[id] = m.height < threshold && pure[static_cast<std::size_t>(m.left)] && pure[static_cast<std::size_t>(m.right)];
    parent[static_cast<std::size_t>(m.left)] = static_cast<int>(id);
    parent[static_cast<std::size_t>(m.right)] = static_cast<int>(id);
  }
  FlatClustering fc;
  fc.labels.assign(n, -1);
  std::map<std::size_t, int> cluster_of_top;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    std::size_t top = leaf;
    while (parent[top] >= 0 && pure[static_cast<std::size_t>(parent[top])]) top = static_cast<std::size_t>(parent[top]);
    auto [it, inserted] = cluster_of_top.emplace(top, fc.cluster_count);
    if (inserted) ++fc.cluster_count;
    fc.labels[leaf] = it->second;
  }
  return fc;
}

double information_criterion(const EmbeddingTable& points, const FlatClustering& clustering, Criterion criterion) {
  const std::size_t n = points.size();
  if (n == 0 || clustering.labels.size() != n) throw UsageError("information_criterion: size mismatch");
  const std::size_t dim = points.front().size();
  const std::size_t k = static_cast<std::size_t>(clustering.cluster_count);

  std::vector<std::vector<double>> mean(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(clustering.labels[i]);
    ++count[c];
    for (std::size_t j = 0; j < dim; ++j) mean[c][j] += points[i][j];
  }
  for (std::size_t c = 0; c < k; ++c)
    for (auto& x : mean[c]) x /= static_cast<double>(count[c]);
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(clustering.labels[i]);
    for (std::size_t j = 0; j < dim; ++j) {
      const double r = points[i][j] - mean[c][j];
      sse += r * r;
    }
  }
  if (sse <= 0) return -std::numeric_limits<double>::infinity();

  const double N = static_cast<double>(n), D = static_cast<double>(dim);
  if (k >= n) return -std::numeric_limits<double>::infinity();
  // Unbiased shared variance: the maximum-likelihood estimate shrinks to 0 as
  // k approaches n and drags the score with it.
  const double variance = sse / (D * (N - static_cast<double>(k)));
  double loglik = -0.5 * N * D * std::log(2.0 * std::numbers::pi * variance) - sse / (2.0 * variance);
  for (std::size_t c = 0; c < k; ++c) {
    const double nc = static_cast<double>(count[c]);
    loglik += nc * std::log(nc / N);
  }
  const double params = static_cast<double>(k) * D + 1.0 + static_cast<double>(k - 1);
  return criterion == Criterion::BIC ? -2.0 * loglik + params * std::log(N) : -2.0 * loglik + 2.0 * params;
}

ThresholdChoice select_threshold(const Dendrogram& d, const EmbeddingTable& points, Criterion criterion) {
  if (d.leaf_count < 2 || points.size() != d.leaf_count) throw UsageError("select_threshold: need >= 2 points");
  std::vector<double> heights;
  for (const auto& m : d.merges) heights.push_back(m.height);
  std::sort(heights.begin(), heights.end());
  heights.erase(std::unique(heights.begin(), heights.end()), heights.end());

  ThresholdChoice best;
  bool have = false;
  auto consider = [&](double cut_at, double reported) {
    const FlatClustering fc = cut(d, cut_at);
    // At least two points per cluster on average to estimate the spread.
    if (2 * static_cast<std::size_t>(fc.cluster_count) > d.leaf_count) return;
    const double score = information_criterion(points, fc, criterion);
    if (!have || score < best.score) {
      best = {reported, score, fc.cluster_count};
      have = true;
    }
  };
  for (std::size_t i = 0; i < heights.size(); ++i) {
    const double lower = i == 0 ? 0.0 : heights[i - 1];
    consider(heights[i], 0.5 * (lower + heights[i]));
  }
  const double root = heights.back();
  consider(std::nextafter(root, std::numeric_limits<double>::infinity()),
           std::nextafter(root, std::numeric_limits<double>::infinity()));
  return best;
}

namespace {

enum class VertexClass { ObjectSpatial, ObjectTemporal, HumanSpatial, HumanTemporal, Other };

std::array<std::map<std::string, int>, 4> class_profiles(const LabeledGraph& g) {
  std::array<std::map<std::string, int>, 4> prof;
  const auto adj = g.adjacency();
  auto is_human_spatial = [&](int v) { return g.labels[static_cast<std::size_t>(v)].starts_with("S:RCC2:"); };
  for (std::size_t v = 0; v < g.labels.size(); ++v) {
    const auto& l = g.labels[v];
    VertexClass cls = VertexClass::Other;
    switch (layer_of(l)) {
      case Layer::Spatial:
        cls = is_human_spatial(static_cast<int>(v)) ? VertexClass::HumanSpatial : VertexClass::ObjectSpatial;
        break;
      case Layer::Temporal: {
        const bool all_human = !adj[v].empty() && std::all_of(adj[v].begin(), adj[v].end(), is_human_spatial);
        cls = all_human ? VertexClass::HumanTemporal : VertexClass::ObjectTemporal;
        break;
      }
      case Layer::Entity: break;
    }
    if (cls != VertexClass::Other) ++prof[static_cast<std::size_t>(cls)][l];
  }
  return prof;
}

double multiset_difference(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
  double total = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      total += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      total += ib->second;
      ++ib;
    } else {
      total += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return total;
}

}  // namespace

double sed_distance(const LabeledGraph& a, const LabeledGraph& b, const SedWeights& w) {
  if (w.c_spat < 0 || w.c_spat > 1 || w.k_spat < 0 || w.k_spat > 1) throw UsageError("sED weights must lie in [0,1]");
  const auto pa = class_profiles(a);
  const auto pb = class_profiles(b);
  const double weights[4] = {w.c_spat, 1.0 - w.c_spat, w.k_spat, 1.0 - w.k_spat};
  double total = 0;
  for (std::size_t c = 0; c < 4; ++c) total += weights[c] * multiset_difference(pa[c], pb[c]);
  return total;
}

}  // namespace affgraph
