#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "affgraph/clustering.hpp"
#include "oracles.hpp"

using namespace affgraph;

namespace {

EmbeddingTable random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> g(0, 1);
  EmbeddingTable pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& x : p) x = g(rng);
  return pts;
}

void check_against_naive(const CostMatrix& c, Linkage linkage) {
  const auto d = hierarchical_cluster(c, linkage);
  const auto ref = oracle::naive_agglomerate(c, linkage);
  REQUIRE(d.merges.size() == ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    CHECK(d.merges[k].left == ref[k].left);
    CHECK(d.merges[k].right == ref[k].right);
    CHECK(d.merges[k].size == ref[k].size);
    CHECK(d.merges[k].height == doctest::Approx(ref[k].height).epsilon(1e-12));
  }
}

/// Spherical Gaussian mixture score with one shared variance estimated over
/// n - k degrees of freedom, written out from the likelihood.
double score(const EmbeddingTable& pts, const FlatClustering& fc, Criterion crit) {
  const std::size_t n = pts.size(), dim = pts[0].size();
  const auto k = static_cast<std::size_t>(fc.cluster_count);
  double sse = 0, mix = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (static_cast<std::size_t>(fc.labels[i]) == c) members.push_back(i);
    for (std::size_t j = 0; j < dim; ++j) {
      double m = 0;
      for (auto i : members) m += pts[i][j];
      m /= static_cast<double>(members.size());
      for (auto i : members) sse += (pts[i][j] - m) * (pts[i][j] - m);
    }
    mix += static_cast<double>(members.size()) * std::log(static_cast<double>(members.size()) / static_cast<double>(n));
  }
  if (sse == 0) return -std::numeric_limits<double>::infinity();
  const double N = static_cast<double>(n), D = static_cast<double>(dim);
  const double var = sse / (D * (N - static_cast<double>(k)));
  double ll = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) ll += -0.5 * std::log(2 * std::numbers::pi * var);
  ll -= sse / (2 * var);
  ll += mix;
  const double p = static_cast<double>(k) * D + static_cast<double>(k);
  return crit == Criterion::BIC ? -2 * ll + p * std::log(N) : -2 * ll + 2 * p;
}

/// Best cluster count over every distinct cut of the dendrogram.
int exhaustive_best(const Dendrogram& d, const EmbeddingTable& pts, Criterion crit) {
  std::set<double> heights;
  for (const auto& m : d.merges) heights.insert(m.height);
  double best = std::numeric_limits<double>::infinity();
  int best_k = -1;
  std::vector<double> cuts(heights.begin(), heights.end());
  cuts.push_back(std::numeric_limits<double>::infinity());
  for (double t : cuts) {
    const auto fc = cut(d, t);
    if (2 * static_cast<std::size_t>(fc.cluster_count) > pts.size()) continue;
    const double s = score(pts, fc, crit);
    if (s < best) {
      best = s;
      best_k = fc.cluster_count;
    }
  }
  return best_k;
}

}  // namespace

TEST_CASE("cosine cost examples") {
  const std::vector<double> a{1, 2, 3}, x{1, 0}, y{0, 1};
  CHECK(std::abs(cosine_cost(a, a)) <= 1e-12);
  CHECK(std::abs(cosine_cost(x, y) - 1) <= 1e-12);
  const std::vector<double> neg{-1, -2, -3};
  CHECK(std::abs(cosine_cost(a, neg) - 2) <= 1e-12);
  CHECK_THROWS_AS(cosine_cost(a, std::vector<double>{0, 0, 0}), NumericError);
  CHECK_THROWS(cosine_cost(a, x));
}

TEST_CASE("cosine cost properties") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> scale(0.01, 100);
  for (int t = 0; t < 500; ++t) {
    const auto p = random_points(rng, 2, 8);
    const double c = cosine_cost(p[0], p[1]);
    CHECK(c >= 0);
    CHECK(c <= 2);
    CHECK(c == cosine_cost(p[1], p[0]));
    auto a = p[0], b = p[1];
    const double l = scale(rng), m = scale(rng);
    for (auto& v : a) v *= l;
    for (auto& v : b) v *= m;
    CHECK(std::abs(cosine_cost(a, b) - c) <= 1e-12);
  }
}

TEST_CASE("hierarchical clustering examples") {
  CostMatrix two(2);
  two.set(0, 1, 0.3);
  const auto d2 = hierarchical_cluster(two);
  REQUIRE(d2.merges.size() == 1);
  CHECK(d2.merges[0].height == 0.3);
  CHECK(d2.merges[0].size == 2);

  CostMatrix three(3);
  three.set(0, 1, 0.1);
  three.set(0, 2, 0.2);
  three.set(1, 2, 0.4);
  const auto d3 = hierarchical_cluster(three);
  CHECK(d3.merges[0].left == 0);
  CHECK(d3.merges[0].right == 1);
  CHECK(d3.merges[1].height == doctest::Approx(0.3));
  CHECK(d3.merges[1].left == 3);
  CHECK(d3.merges[1].right == 2);
}

TEST_CASE("ties merge the lowest leaf ids first") {
  CostMatrix c(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) c.set(i, j, 0.5);
  const auto d = hierarchical_cluster(c);
  CHECK(d.merges[0].left == 0);
  CHECK(d.merges[0].right == 1);
  CHECK(d.merges[1].left == 4);
  CHECK(d.merges[1].right == 2);
  check_against_naive(c, Linkage::Average);
}

TEST_CASE("merge sequence matches naive agglomeration") {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 20; ++t) {
    const auto pts = random_points(rng, 20, 5);
    const auto c = cosine_cost_matrix(pts);
    for (auto l : {Linkage::Average, Linkage::Complete, Linkage::Single}) check_against_naive(c, l);
  }
  // Coarse integer costs produce many ties.
  for (int t = 0; t < 20; ++t) {
    CostMatrix c(12);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = i + 1; j < 12; ++j) c.set(i, j, static_cast<double>(rng() % 4));
    check_against_naive(c, Linkage::Complete);
    check_against_naive(c, Linkage::Single);
  }
}

TEST_CASE("average linkage heights are non-decreasing") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 30; ++t) {
    const auto d = hierarchical_cluster(random_points(rng, 25, 4));
    for (std::size_t k = 1; k < d.merges.size(); ++k) CHECK(d.merges[k].height >= d.merges[k - 1].height - 1e-12);
  }
}

TEST_CASE("cut examples") {
  std::mt19937_64 rng(67);
  const auto d = hierarchical_cluster(random_points(rng, 10, 3));
  CHECK(cut(d, 0).cluster_count == 10);
  CHECK(cut(d, d.root_height() + 1e-9).cluster_count == 1);

  Dendrogram f;
  f.leaf_count = 3;
  f.merges = {{0, 1, 0.01, 2}, {3, 2, 0.05, 3}};
  const auto fc = cut(f, 0.02);
  CHECK(fc.cluster_count == 2);
  CHECK(fc.labels == std::vector<int>{0, 0, 1});
  // The cut is strict.
  CHECK(cut(f, 0.05).cluster_count == 2);
}

TEST_CASE("cuts are nested") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 20; ++t) {
    const auto d = hierarchical_cluster(random_points(rng, 15, 3));
    std::uniform_real_distribution<double> u(0, d.root_height() * 1.1);
    double t1 = u(rng), t2 = u(rng);
    if (t1 > t2) std::swap(t1, t2);
    const auto fine = cut(d, t1), coarse = cut(d, t2);
    CHECK(fine.cluster_count >= coarse.cluster_count);
    for (std::size_t i = 0; i < 15; ++i)
      for (std::size_t j = 0; j < 15; ++j)
        if (fine.labels[i] == fine.labels[j]) CHECK(coarse.labels[i] == coarse.labels[j]);
    // Dense ids in order of first leaf.
    int next = 0;
    for (int l : fine.labels) {
      CHECK(l <= next);
      if (l == next) ++next;
    }
  }
}

TEST_CASE("threshold selection") {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> g(0, 0.01);
  SUBCASE("two separated blobs") {
    EmbeddingTable pts;
    for (int i = 0; i < 20; ++i) pts.push_back({1 + g(rng), g(rng), g(rng)});
    for (int i = 0; i < 20; ++i) pts.push_back({g(rng), 1 + g(rng), g(rng)});
    const auto d = hierarchical_cluster(pts);
    for (auto crit : {Criterion::BIC, Criterion::AIC}) {
      const auto choice = select_threshold(d, pts, crit);
      CHECK(choice.cluster_count == 2);
      CHECK(choice.cluster_count == exhaustive_best(d, pts, crit));
      CHECK(cut(d, choice.threshold).cluster_count == 2);
      CHECK(choice.threshold > d.merges[d.merges.size() - 2].height);
      CHECK(choice.threshold < d.root_height());
    }
  }
  SUBCASE("one blob") {
    EmbeddingTable pts;
    for (int i = 0; i < 12; ++i) pts.push_back({1 + g(rng), 1 + g(rng), 1 + g(rng)});
    const auto d = hierarchical_cluster(pts);
    const auto choice = select_threshold(d, pts, Criterion::BIC);
    CHECK(choice.cluster_count == exhaustive_best(d, pts, Criterion::BIC));
    CHECK(choice.cluster_count == 1);
    CHECK(choice.threshold >= d.root_height());
  }
  SUBCASE("duplicated points") {
    EmbeddingTable pts{{1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}};
    const auto d = hierarchical_cluster(pts);
    const auto choice = select_threshold(d, pts, Criterion::AIC);
    CHECK(choice.cluster_count == 2);
    CHECK(cut(d, choice.threshold).labels == std::vector<int>{0, 0, 0, 1, 1});
  }
  SUBCASE("random data agrees with the exhaustive scan") {
    for (int t = 0; t < 20; ++t) {
      const auto pts = random_points(rng, 14, 4);
      const auto d = hierarchical_cluster(pts);
      for (auto crit : {Criterion::BIC, Criterion::AIC}) {
        const auto choice = select_threshold(d, pts, crit);
        CHECK(choice.cluster_count == exhaustive_best(d, pts, crit));
        CHECK(choice.score == doctest::Approx(score(pts, cut(d, choice.threshold), crit)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("sED examples") {
  const LabeledGraph g{{"E:anchor", "E:partner", "S:DiSR:Sup", "S:DiSR:NI", "T:m"},
                       {{0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 4}, {3, 4}}};
  CHECK(sed_distance(g, g) == 0);
  LabeledGraph extra = g;
  extra.labels.push_back("S:DiSR:Adj");
  extra.edges.push_back({0, 5});
  extra.edges.push_back({1, 5});
  CHECK(sed_distance(g, extra) == 0.5);
  CHECK(sed_distance(extra, g) == 0.5);
  SedWeights w{0.2, 0.9};
  CHECK(sed_distance(g, extra, w) == doctest::Approx(0.2));
  CHECK_THROWS_AS(sed_distance(g, g, SedWeights{1.5, 0.5}), UsageError);
}

TEST_CASE("sED matches multiset differences and is a pseudometric") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<LabeledGraph> gs;
  for (int t = 0; t < 60; ++t) gs.push_back(oracle::random_agraphlet(rng));
  for (int t = 0; t < 300; ++t) {
    const auto& a = gs[rng() % gs.size()];
    const auto& b = gs[rng() % gs.size()];
    const auto& c = gs[rng() % gs.size()];
    const SedWeights w{u(rng), u(rng)};
    const double ab = sed_distance(a, b, w);
    CHECK(ab == doctest::Approx(oracle::sed(a, b, w.c_spat, w.k_spat)).epsilon(1e-12));
    CHECK(ab == sed_distance(b, a, w));
    CHECK(sed_distance(a, oracle::permute(a, rng), w) == 0);
    CHECK(sed_distance(a, c, w) <= ab + sed_distance(b, c, w) + 1e-12);
  }
}
