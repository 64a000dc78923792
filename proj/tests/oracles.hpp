#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Each one is written from the definition, without sharing code with the
// library routine it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "affgraph/clustering.hpp"
#include "affgraph/convexity.hpp"
#include "affgraph/graphlet.hpp"
#include "affgraph/temporal.hpp"

namespace oracle {

// --- binary grids -----------------------------------------------------------

/// Background regions (4-connected) that do not reach the border are holes.
inline int flood_fill_holes(const affgraph::BinaryGrid& g) {
  const int w = g.width, h = g.height;
  std::vector<int> seen(static_cast<std::size_t>(w) * h, 0);
  int holes = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (g.at(x, y) || seen[y * w + x]) continue;
      bool touches_border = false;
      std::queue<std::pair<int, int>> q;
      q.push({x, y});
      seen[y * w + x] = 1;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        if (cx == 0 || cy == 0 || cx == w - 1 || cy == h - 1) touches_border = true;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + dx[k], ny = cy + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (g.at(nx, ny) || seen[ny * w + nx]) continue;
          seen[ny * w + nx] = 1;
          q.push({nx, ny});
        }
      }
      if (!touches_border) ++holes;
    }
  return holes;
}

/// Foreground components under 8-connectivity.
inline int foreground_components(const affgraph::BinaryGrid& g) {
  const int w = g.width, h = g.height;
  std::vector<int> seen(static_cast<std::size_t>(w) * h, 0);
  int comps = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!g.at(x, y) || seen[y * w + x]) continue;
      ++comps;
      std::vector<std::pair<int, int>> stack{{x, y}};
      seen[y * w + x] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!g.at(nx, ny) || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            stack.push_back({nx, ny});
          }
      }
    }
  return comps;
}

inline affgraph::BinaryGrid random_grid(std::mt19937_64& rng, int max_side) {
  std::uniform_int_distribution<int> side(1, max_side);
  affgraph::BinaryGrid g(side(rng), side(rng));
  std::uniform_real_distribution<double> fill(0.2, 0.8);
  std::bernoulli_distribution on(fill(rng));
  for (auto& c : g.cells) c = on(rng) ? 1 : 0;
  return g;
}

// --- Allen relations --------------------------------------------------------

/// Truth value of each of the 13 relations, in AllenRelation enumerator
/// order, from the point-set reading of inclusive frame intervals.
inline std::vector<bool> allen_predicates(const affgraph::Interval& a, const affgraph::Interval& b) {
  const int as = a.start, ae = a.end, bs = b.start, be = b.end;
  return {
      ae + 1 < bs,                            // before
      be + 1 < as,                            // after
      ae + 1 == bs,                           // meets
      be + 1 == as,                           // met by
      as < bs && ae >= bs && ae < be,         // overlaps
      bs < as && be >= as && be < ae,         // overlapped by
      as == bs && ae < be,                    // starts
      as == bs && be < ae,                    // started by
      as > bs && ae < be,                     // during
      bs > as && be < ae,                     // contains
      ae == be && as > bs,                    // finishes
      ae == be && bs > as,                    // finished by
      as == bs && ae == be,                   // equals
  };
}

// --- episodes ---------------------------------------------------------------

/// Maximal runs of equal tokens in a gap-free sequence starting at frame 0.
inline std::vector<std::pair<std::string, affgraph::Interval>> maximal_runs(const std::vector<std::string>& seq) {
  std::vector<std::pair<std::string, affgraph::Interval>> runs;
  for (int i = 0; i < static_cast<int>(seq.size()); ++i) {
    if (!runs.empty() && runs.back().first == seq[i] && runs.back().second.end == i - 1)
      runs.back().second.end = i;
    else
      runs.push_back({seq[i], {i, i}});
  }
  return runs;
}

// --- graphs -----------------------------------------------------------------

/// Label-preserving isomorphism by exhaustive search over vertex bijections.
inline bool isomorphic(const affgraph::LabeledGraph& a, const affgraph::LabeledGraph& b) {
  const std::size_t n = a.labels.size();
  if (n != b.labels.size() || a.edges.size() != b.edges.size()) return false;
  std::vector<std::vector<char>> ea(n, std::vector<char>(n, 0)), eb(n, std::vector<char>(n, 0));
  for (auto [u, v] : a.edges) ea[u][v] = ea[v][u] = 1;
  for (auto [u, v] : b.edges) eb[u][v] = eb[v][u] = 1;
  std::vector<int> map(n, -1);
  std::vector<char> used(n, 0);
  std::function<bool(std::size_t)> extend = [&](std::size_t i) {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || a.labels[i] != b.labels[j]) continue;
      bool ok = true;
      for (std::size_t k = 0; k < i && ok; ++k) ok = ea[i][k] == eb[j][static_cast<std::size_t>(map[k])];
      if (!ok) continue;
      used[j] = 1;
      map[i] = static_cast<int>(j);
      if (extend(i + 1)) return true;
      used[j] = 0;
    }
    return false;
  };
  return extend(0);
}

/// Same graph with vertex ids shuffled and edge list reordered.
inline affgraph::LabeledGraph permute(const affgraph::LabeledGraph& g, std::mt19937_64& rng) {
  std::vector<int> perm(g.labels.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  affgraph::LabeledGraph out;
  out.labels.resize(g.labels.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out.labels[static_cast<std::size_t>(perm[i])] = g.labels[i];
  for (auto [u, v] : g.edges) {
    int a = perm[static_cast<std::size_t>(u)], b = perm[static_cast<std::size_t>(v)];
    if (rng() & 1) std::swap(a, b);
    out.edges.push_back({a, b});
  }
  std::shuffle(out.edges.begin(), out.edges.end(), rng);
  return out;
}

/// Rooted-subtree label of `v` unfolded `depth` levels, computed by plain
/// recursion over the neighbourhood.
inline std::string rooted_subtree(const affgraph::LabeledGraph& g, int v, int depth) {
  if (depth == 0) return g.labels[static_cast<std::size_t>(v)];
  std::vector<std::string> below;
  for (auto [a, b] : g.edges) {
    if (a == v) below.push_back(rooted_subtree(g, b, depth - 1));
    if (b == v) below.push_back(rooted_subtree(g, a, depth - 1));
  }
  std::sort(below.begin(), below.end());
  std::string s = rooted_subtree(g, v, depth - 1) + "(";
  for (std::size_t i = 0; i < below.size(); ++i) s += (i ? "," : "") + below[i];
  return s + ")";
}

inline std::multiset<std::string> wl_multiset(const affgraph::LabeledGraph& g, int depth) {
  std::multiset<std::string> out;
  for (int d = 0; d <= depth; ++d)
    for (std::size_t v = 0; v < g.labels.size(); ++v) out.insert(rooted_subtree(g, static_cast<int>(v), d));
  return out;
}

/// Random AGraphlet-shaped graph: 2 or 3 entity vertices, spatial vertices
/// wired to the anchor and one other entity, temporal vertices between pairs
/// of spatial vertices.
inline affgraph::LabeledGraph random_agraphlet(std::mt19937_64& rng, int max_spatial = 4) {
  static const char* disr[] = {"Sup", "Supi", "Cont", "Conti", "Adj", "NI"};
  static const char* rcc2[] = {"C", "DC"};
  static const char* allen[] = {"<", ">", "m", "mi", "o", "oi", "s", "si", "d", "di", "f", "fi", "="};
  affgraph::LabeledGraph g;
  const bool human = rng() % 2;
  g.labels = {"E:anchor", "E:partner"};
  if (human) g.labels.push_back("E:human");
  std::uniform_int_distribution<int> ns(1, max_spatial);
  const int spatial = ns(rng);
  std::vector<int> sv;
  for (int s = 0; s < spatial; ++s) {
    const bool with_human = human && rng() % 2;
    const int v = static_cast<int>(g.labels.size());
    g.labels.push_back(with_human ? std::string("S:RCC2:") + rcc2[rng() % 2] : std::string("S:DiSR:") + disr[rng() % 6]);
    g.edges.push_back({0, v});
    g.edges.push_back({with_human ? 2 : 1, v});
    sv.push_back(v);
  }
  for (std::size_t i = 0; i < sv.size(); ++i)
    for (std::size_t j = i + 1; j < sv.size(); ++j) {
      if (rng() % 3 == 0) continue;
      const int t = static_cast<int>(g.labels.size());
      g.labels.push_back(std::string("T:") + allen[rng() % 13]);
      g.edges.push_back({sv[i], t});
      g.edges.push_back({sv[j], t});
    }
  return g;
}

// --- clustering -------------------------------------------------------------

struct NaiveMerge {
  int left, right;
  double height;
  std::size_t size;
};

/// Textbook agglomeration: every step rescans all active cluster pairs and
/// recomputes the linkage from the leaf costs.
inline std::vector<NaiveMerge> naive_agglomerate(const affgraph::CostMatrix& c, affgraph::Linkage linkage) {
  const std::size_t n = c.size();
  struct Cluster {
    int node;
    std::vector<std::size_t> leaves;
  };
  std::vector<Cluster> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({static_cast<int>(i), {i}});
  auto link = [&](const Cluster& a, const Cluster& b) {
    double sum = 0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto i : a.leaves)
      for (auto j : b.leaves) {
        sum += c(i, j);
        lo = std::min(lo, c(i, j));
        hi = std::max(hi, c(i, j));
      }
    switch (linkage) {
      case affgraph::Linkage::Single: return lo;
      case affgraph::Linkage::Complete: return hi;
      default: return sum / static_cast<double>(a.leaves.size() * b.leaves.size());
    }
  };
  auto key = [](const Cluster& cl) { return *std::min_element(cl.leaves.begin(), cl.leaves.end()); };
  std::vector<NaiveMerge> merges;
  int next = static_cast<int>(n);
  while (active.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{n, n};
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double v = link(active[i], active[j]);
        const std::size_t ki = key(active[i]), kj = key(active[j]);
        const std::pair<std::size_t, std::size_t> k{std::min(ki, kj), std::max(ki, kj)};
        if (v < best || (v == best && k < best_key)) {
          best = v;
          best_key = k;
          bi = i;
          bj = j;
        }
      }
    Cluster a = active[bi], b = active[bj];
    if (key(b) < key(a)) std::swap(a, b);
    merges.push_back({a.node, b.node, best, a.leaves.size() + b.leaves.size()});
    Cluster merged{next++, a.leaves};
    merged.leaves.insert(merged.leaves.end(), b.leaves.begin(), b.leaves.end());
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
    active.push_back(merged);
  }
  return merges;
}

/// Multiset symmetric difference by repeated removal from a list.
inline int list_symmetric_difference(std::vector<std::string> a, std::vector<std::string> b) {
  int common = 0;
  for (const auto& x : a) {
    auto it = std::find(b.begin(), b.end(), x);
    if (it != b.end()) {
      b.erase(it);
      ++common;
    }
  }
  return static_cast<int>(a.size()) - common + static_cast<int>(b.size());
}

/// sED from the vertex lists: spatial vertices split by calculus, temporal
/// vertices counted as human-object only when every spatial neighbour is RCC2.
inline double sed(const affgraph::LabeledGraph& a, const affgraph::LabeledGraph& b, double c_spat, double k_spat) {
  auto classes = [](const affgraph::LabeledGraph& g) {
    std::vector<std::vector<std::string>> cls(4);
    for (std::size_t v = 0; v < g.labels.size(); ++v) {
      const std::string& l = g.labels[v];
      if (l.rfind("S:", 0) == 0) {
        cls[l.rfind("S:RCC2:", 0) == 0 ? 2 : 0].push_back(l);
      } else if (l.rfind("T:", 0) == 0) {
        bool any = false, all_human = true;
        for (auto [x, y] : g.edges) {
          int other = -1;
          if (x == static_cast<int>(v)) other = y;
          if (y == static_cast<int>(v)) other = x;
          if (other < 0) continue;
          any = true;
          if (g.labels[static_cast<std::size_t>(other)].rfind("S:RCC2:", 0) != 0) all_human = false;
        }
        cls[any && all_human ? 3 : 1].push_back(l);
      }
    }
    return cls;
  };
  const auto ca = classes(a), cb = classes(b);
  const double w[4] = {c_spat, 1 - c_spat, k_spat, 1 - k_spat};
  double total = 0;
  for (int k = 0; k < 4; ++k) total += w[k] * list_symmetric_difference(ca[k], cb[k]);
  return total;
}

// --- evaluation -------------------------------------------------------------

struct Scores {
  double h, c, v;
};

/// V-measure via joint and marginal entropies: H(C|K) = H(C,K) - H(K).
inline Scores v_measure(const std::vector<std::vector<std::string>>& truth, const std::vector<int>& clusters) {
  std::vector<std::pair<std::string, int>> pairs;
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (const auto& l : truth[i]) pairs.push_back({l, clusters[i]});
  const double n = static_cast<double>(pairs.size());
  auto entropy_of = [&](auto project) {
    std::map<decltype(project(pairs[0])), double> counts;
    for (const auto& p : pairs) counts[project(p)] += 1;
    double h = 0;
    for (const auto& [k, cnt] : counts) h -= cnt / n * std::log(cnt / n);
    return h;
  };
  const double hc = entropy_of([](const auto& p) { return p.first; });
  const double hk = entropy_of([](const auto& p) { return p.second; });
  const double hck = entropy_of([](const auto& p) { return p; });
  const double h = hc == 0 ? 1.0 : 1.0 - (hck - hk) / hc;
  const double c = hk == 0 ? 1.0 : 1.0 - (hck - hc) / hk;
  return {h, c, h + c == 0 ? 0.0 : 2 * h * c / (h + c)};
}

}  // namespace oracle
