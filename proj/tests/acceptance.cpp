// Acceptance checks: one PASS/FAIL line per criterion. Exits non-zero when
// any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "affgraph/clustering.hpp"
#include "affgraph/config.hpp"
#include "affgraph/convexity.hpp"
#include "affgraph/embedding.hpp"
#include "affgraph/evaluation.hpp"
#include "affgraph/pipeline.hpp"
#include "affgraph/synthetic.hpp"
#include "affgraph/temporal.hpp"
#include "disr_cases.hpp"
#include "oracles.hpp"

using namespace affgraph;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-20s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void allen_jepd() {
  const auto t0 = Clock::now();
  std::vector<Interval> all;
  for (int s = 0; s <= 6; ++s)
    for (int e = s; e <= 6; ++e) all.push_back({s, e});
  int pairs = 0, bad = 0;
  for (const auto& a : all)
    for (const auto& b : all) {
      ++pairs;
      const auto preds = oracle::allen_predicates(a, b);
      int holding = 0;
      for (bool p : preds) holding += p;
      const auto r = allen(a, b);
      if (holding != 1 || !preds[static_cast<std::size_t>(r)] || allen(b, a) != converse(r)) ++bad;
    }
  const double secs = seconds_since(t0);
  report("allen_jepd", bad == 0 && secs < 1.0, fmt("%.0f pairs, %.0f violations, %.4f s", pairs, bad, secs));
}

void disr_fixture() {
  int total = 0, ok = 0, occl = 0;
  for (const auto& c : fixture::disr_cases()) {
    const auto r = disr(c.ctx);
    ++total;
    occl += c.occlusion;
    bool good = r.forward == c.forward && r.backward == c.backward;
    if (c.occlusion) good = good && r.forward == DisrRelation::NI && r.backward == DisrRelation::NI;
    ok += good;
  }
  report("disr_fixture", total == 30 && occl == 5 && ok == total,
         fmt("%.0f/%.0f cases match (%.0f occlusion)", ok, total, occl));
}

void alg2() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> depth(0, 5000);
  int ok = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> d(2 + rng() % 20);
    for (auto& x : d) x = depth(rng);
    std::sort(d.begin(), d.end());
    const int h = 2 + static_cast<int>(rng() % 12);
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(h - 1));
    const double dmin = d.front(), dmax = d.back();
    const double slice = (dmax - dmin) / h;
    const double want = dmax - n * slice;
    const auto b = convexity_depth(d, ConvexityType::Concave, h, n);
    ok += b.dc_min == want && b.dc_max == dmax && dmin <= b.dc_min && b.dc_min <= b.dc_max;
  }
  report("alg2_bounds", ok == 1000, fmt("%.0f/1000 tuples exact", ok));
}

void contour_holes() {
  std::mt19937_64 rng(64);
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    const auto g = oracle::random_grid(rng, 64);
    ok += contour_hierarchy(g).hole_count() == static_cast<std::size_t>(oracle::flood_fill_holes(g));
  }
  report("contour_holes", ok == 200, fmt("%.0f/200 grids match flood fill", ok));
}

void wl_invariance() {
  std::mt19937_64 rng(100);
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_agraphlet(rng, 6);
    auto a = wl_tokens(g, 14), b = wl_tokens(oracle::permute(g, rng), 14);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    ok += a == b;
  }
  report("wl_invariance", ok == 100, fmt("%.0f/100 graphlets invariant", ok));
}

void clustering_oracle() {
  std::mt19937_64 rng(50);
  std::normal_distribution<double> g(0, 1);
  int ok = 0;
  for (int t = 0; t < 50; ++t) {
    EmbeddingTable pts(20, std::vector<double>(5));
    for (auto& p : pts)
      for (auto& x : p) x = g(rng);
    const auto costs = cosine_cost_matrix(pts);
    const auto d = hierarchical_cluster(costs, Linkage::Average);
    const auto ref = oracle::naive_agglomerate(costs, Linkage::Average);
    bool same = d.merges.size() == ref.size();
    for (std::size_t k = 0; same && k < ref.size(); ++k)
      same = d.merges[k].left == ref[k].left && d.merges[k].right == ref[k].right &&
             d.merges[k].size == ref[k].size && std::abs(d.merges[k].height - ref[k].height) <= 1e-12;
    ok += same;
  }
  report("clustering_oracle", ok == 50, fmt("%.0f/50 merge sequences equal", ok));
}

void v_measure_oracle() {
  std::mt19937_64 rng(500);
  const char* names[] = {"a", "b", "c", "d"};
  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<std::vector<std::string>> truth(n);
    std::vector<int> clusters(n);
    const auto k = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) {
      truth[i].push_back(names[rng() % 4]);
      clusters[i] = static_cast<int>(rng() % k);
    }
    const auto m = v_measure(truth, clusters);
    const auto o = oracle::v_measure(truth, clusters);
    worst = std::max({worst, std::abs(m.homogeneity - o.h), std::abs(m.completeness - o.c), std::abs(m.v - o.v)});
  }
  report("v_measure_oracle", worst <= 1e-9, fmt("max deviation %.3g over 500 labelings", worst));
}

void cosine() {
  const std::vector<double> a{1, 2, 3}, b{-2, 1, 0}, c{-1, -2, -3}, big{1e6, 2e6, 3e6}, tiny{1e-6, 2e-6, 3e-6};
  const double equal = cosine_cost(a, a), orth = cosine_cost(a, b), opp = cosine_cost(a, c);
  const double err = std::max({std::abs(equal), std::abs(orth - 1), std::abs(opp - 2), std::abs(cosine_cost(big, b) - orth),
                               std::abs(cosine_cost(tiny, c) - opp), std::abs(cosine_cost(big, tiny))});
  report("cosine_cost", err <= 1e-12, fmt("equal %.3g, orthogonal %.17g, opposite %.17g", equal, orth, opp));
}

struct EndToEnd {
  RunReport run;
  std::vector<GraphletRecord> corpus;
  std::vector<GroundTruthRecord> truth;
  std::vector<std::string> ids;
  EmbeddingTable vectors;
};

EndToEnd end_to_end() {
  const fs::path dir = fs::temp_directory_path() / "affgraph_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir / "scenes");
  const auto t0 = Clock::now();
  PipelineConfig cfg;
  apply_profile(cfg, "cad-like");
  cfg.seed = 7;
  cfg.train.seed = 7;
  std::vector<GroundTruthRecord> gt;
  for (const auto& s : generate_corpus(20, cfg.seed, cfg.convexity)) {
    save_scene(s.scene, dir / "scenes" / (s.scene.id + ".json"));
    gt.insert(gt.end(), s.groundtruth.begin(), s.groundtruth.end());
  }
  write_groundtruth((dir / "groundtruth.tsv").string(), gt);
  cfg.inputs = {(dir / "scenes").string()};
  cfg.groundtruth = (dir / "groundtruth.tsv").string();
  cfg.output = (dir / "out").string();

  EndToEnd e;
  e.run = run_pipeline(cfg);
  const double secs = seconds_since(t0);
  e.truth = gt;
  e.corpus = read_corpus(e.run.artifacts.at("graphlets"));
  read_embeddings(e.run.artifacts.at("embeddings"), e.ids, e.vectors);
  const auto m = e.run.metrics.value_or(VMeasure{});
  report("end_to_end", m.v >= 0.90 && m.homogeneity >= 0.95 && secs < 300,
         fmt("V %.4f, homogeneity %.4f, %.1f s", m.v, m.homogeneity, secs) +
             ", " + std::to_string(e.corpus.size()) + " graphlets, " + std::to_string(e.run.clustering.cluster_count) +
             " clusters");
  return e;
}

void baseline_ordering(const EndToEnd& e) {
  PipelineConfig cfg;
  apply_profile(cfg, "sed");
  const auto sed = cluster_corpus(e.corpus, cfg, e.truth);
  const double v_sed = sed.metrics.value_or(VMeasure{}).v, v_emb = e.run.metrics.value_or(VMeasure{}).v;
  report("baseline_ordering", v_sed < v_emb,
         fmt("sED V %.4f vs embedding V %.4f", v_sed, v_emb) + ", sED clusters " +
             std::to_string(sed.clustering.cluster_count));
}

void training_sanity(const EndToEnd& e) {
  const auto& loss = e.run.epoch_loss;
  const bool decreasing = loss.size() >= 10 && loss[9] < loss[0];
  std::map<std::string, std::vector<std::size_t>> by_form;
  std::map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < e.ids.size(); ++i) row[e.ids[i]] = i;
  for (const auto& r : e.corpus) by_form[r.canonical].push_back(row.at(r.id));
  double worst = 0;
  std::size_t pairs = 0;
  for (const auto& [form, members] : by_form)
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        worst = std::max(worst, cosine_cost(e.vectors[members[a]], e.vectors[members[b]]));
        ++pairs;
      }
  report("training_sanity", decreasing && pairs > 0 && worst < 0.05,
         fmt("loss epoch 1 %.4f, epoch 10 %.4f, max identical-pair cost %.4g", loss.empty() ? 0 : loss[0],
             loss.size() >= 10 ? loss[9] : 0, worst) +
             " over " + std::to_string(pairs) + " pairs");
}

}  // namespace

int main() {
  try {
    allen_jepd();
    disr_fixture();
    alg2();
    contour_holes();
    wl_invariance();
    clustering_oracle();
    v_measure_oracle();
    cosine();
    const auto e = end_to_end();
    baseline_ordering(e);
    training_sanity(e);
  } catch (const std::exception& ex) {
    std::printf("FAIL  %-20s %s\n", "exception", ex.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
