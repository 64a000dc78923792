#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "affgraph/temporal.hpp"
#include "oracles.hpp"

using namespace affgraph;

namespace {

std::vector<FrameToken> tokens(const std::vector<std::string>& seq, int start = 0) {
  std::vector<FrameToken> out;
  for (std::size_t i = 0; i < seq.size(); ++i) out.push_back({start + static_cast<int>(i), seq[i]});
  return out;
}

std::vector<Episode> eps(const std::vector<std::string>& seq, EpisodeOptions opts = {}) {
  return extract_episodes(tokens(seq), "a", "b", Calculus::DiSR, opts);
}

}  // namespace

TEST_CASE("allen examples") {
  CHECK(allen({1, 5}, {1, 5}) == AllenRelation::Equals);
  CHECK(allen({1, 3}, {5, 7}) == AllenRelation::Before);
  CHECK(allen({1, 3}, {4, 7}) == AllenRelation::Meets);
  CHECK(allen({1, 4}, {4, 7}) == AllenRelation::Overlaps);
  CHECK(allen({4, 7}, {1, 3}) == AllenRelation::MetBy);
  CHECK(allen({2, 3}, {1, 5}) == AllenRelation::During);
  CHECK(allen({1, 3}, {1, 5}) == AllenRelation::Starts);
  CHECK(allen({3, 5}, {1, 5}) == AllenRelation::Finishes);
  CHECK(allen({3, 3}, {3, 3}) == AllenRelation::Equals);
}

TEST_CASE("allen relations are JEPD with coherent converses") {
  std::vector<Interval> all;
  for (int s = 0; s <= 6; ++s)
    for (int e = s; e <= 6; ++e) all.push_back({s, e});
  for (const auto& a : all)
    for (const auto& b : all) {
      const auto preds = oracle::allen_predicates(a, b);
      int holding = 0;
      for (bool p : preds) holding += p;
      CHECK(holding == 1);
      const auto r = allen(a, b);
      CHECK(preds[static_cast<std::size_t>(r)]);
      CHECK(allen(b, a) == converse(r));
    }
  for (int r = 0; r < kAllenRelationCount; ++r) {
    const auto rel = static_cast<AllenRelation>(r);
    CHECK(converse(converse(rel)) == rel);
  }
}

TEST_CASE("episode extraction examples") {
  const auto e = eps({"NI", "NI", "Sup", "Sup", "Sup", "NI"});
  REQUIRE(e.size() == 3);
  CHECK(e[0].relation == "NI");
  CHECK(e[0].interval == Interval{0, 1});
  CHECK(e[1].relation == "Sup");
  CHECK(e[1].interval == Interval{2, 4});
  CHECK(e[2].interval == Interval{5, 5});

  const auto constant = eps({"Sup", "Sup", "Sup", "Sup", "Sup"});
  REQUIRE(constant.size() == 1);
  CHECK(constant[0].interval == Interval{0, 4});

  CHECK(eps({}).empty());
}

TEST_CASE("flicker absorption") {
  const std::vector<std::string> seq{"Sup", "Sup", "NI", "Sup", "Sup"};
  CHECK(eps(seq).size() == 3);
  const auto smooth = eps(seq, {1, 0});
  REQUIRE(smooth.size() == 1);
  CHECK(smooth[0].relation == "Sup");
  CHECK(smooth[0].interval == Interval{0, 4});
  // Oracle: substitute the flicker, then take maximal runs.
  const auto runs = oracle::maximal_runs({"Sup", "Sup", "Sup", "Sup", "Sup"});
  CHECK(runs.size() == smooth.size());
  // A run at the sequence edge is not flanked and stays.
  CHECK(eps({"NI", "Sup", "Sup"}, {1, 0}).size() == 2);
  // A run longer than the smoothing window stays.
  CHECK(eps({"Sup", "NI", "NI", "Sup"}, {1, 0}).size() == 3);
  CHECK(eps({"Sup", "NI", "NI", "Sup"}, {2, 0}).size() == 1);
  // Flanked by different tokens: no absorption.
  CHECK(eps({"Sup", "NI", "Adj"}, {1, 0}).size() == 3);
}

TEST_CASE("observation gaps") {
  std::vector<FrameToken> seq{{0, "Sup"}, {1, "Sup"}, {4, "Sup"}, {5, "NI"}};
  const auto split = extract_episodes(seq, "a", "b", Calculus::DiSR, {0, 1});
  REQUIRE(split.size() == 3);
  CHECK(split[0].interval == Interval{0, 1});
  CHECK(split[1].interval == Interval{4, 4});
  const auto bridged = extract_episodes(seq, "a", "b", Calculus::DiSR, {0, 2});
  REQUIRE(bridged.size() == 2);
  CHECK(bridged[0].interval == Interval{0, 4});
  CHECK(bridged[1].interval == Interval{5, 5});
  // Bridged frames take the preceding token, even if the next one differs.
  std::vector<FrameToken> change{{0, "Sup"}, {3, "NI"}};
  const auto ch = extract_episodes(change, "a", "b", Calculus::DiSR, {0, 2});
  REQUIRE(ch.size() == 2);
  CHECK(ch[0].interval == Interval{0, 2});
  CHECK(ch[1].interval == Interval{3, 3});
}

TEST_CASE("episodes match maximal runs and reconstruct the input") {
  std::mt19937_64 rng(17);
  const char* vocab[] = {"Sup", "NI", "Adj"};
  for (int t = 0; t < 300; ++t) {
    std::vector<std::string> seq(1 + rng() % 30);
    for (auto& s : seq) s = vocab[rng() % 3];
    const auto e = eps(seq);
    const auto runs = oracle::maximal_runs(seq);
    REQUIRE(e.size() == runs.size());
    std::vector<std::string> rebuilt;
    for (std::size_t i = 0; i < e.size(); ++i) {
      CHECK(e[i].relation == runs[i].first);
      CHECK(e[i].interval == runs[i].second);
      if (i) CHECK(e[i].relation != e[i - 1].relation);
      for (int f = e[i].interval.start; f <= e[i].interval.end; ++f) rebuilt.push_back(e[i].relation);
    }
    CHECK(rebuilt == seq);
  }
}

TEST_CASE("smoothing matches substitute-then-segment") {
  std::mt19937_64 rng(18);
  const char* vocab[] = {"Sup", "NI"};
  for (int t = 0; t < 300; ++t) {
    std::vector<std::string> seq(1 + rng() % 25);
    for (auto& s : seq) s = vocab[rng() % 4 == 0];
    const int k = 1 + static_cast<int>(rng() % 2);
    // Oracle: repeatedly absorb the first short flanked run.
    auto runs = oracle::maximal_runs(seq);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 1; i + 1 < runs.size(); ++i) {
        if (runs[i].second.length() <= k && runs[i - 1].first == runs[i + 1].first) {
          std::vector<std::string> flat;
          for (std::size_t j = 0; j < runs.size(); ++j)
            for (int f = runs[j].second.start; f <= runs[j].second.end; ++f)
              flat.push_back(j == i ? runs[i - 1].first : runs[j].first);
          runs = oracle::maximal_runs(flat);
          changed = true;
          break;
        }
      }
    }
    const auto e = eps(seq, {k, 0});
    REQUIRE(e.size() == runs.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      CHECK(e[i].relation == runs[i].first);
      CHECK(e[i].interval == runs[i].second);
    }
  }
}

TEST_CASE("frame-rate independence") {
  std::mt19937_64 rng(19);
  const char* vocab[] = {"C", "DC"};
  for (int t = 0; t < 100; ++t) {
    std::vector<std::string> a(1 + rng() % 12), b(a.size());
    for (auto& s : a) s = vocab[rng() % 2];
    for (auto& s : b) s = vocab[rng() % 2];
    const int k = 1 + static_cast<int>(rng() % 4);
    auto repeat = [k](const std::vector<std::string>& s) {
      std::vector<std::string> out;
      for (const auto& x : s)
        for (int i = 0; i < k; ++i) out.push_back(x);
      return out;
    };
    const auto ea = eps(a), eb = eps(b), ka = eps(repeat(a)), kb = eps(repeat(b));
    REQUIRE(ea.size() == ka.size());
    REQUIRE(eb.size() == kb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
      CHECK(ea[i].relation == ka[i].relation);
      for (std::size_t j = 0; j < eb.size(); ++j) CHECK(allen(ea[i].interval, eb[j].interval) == allen(ka[i].interval, kb[j].interval));
    }
  }
}

TEST_CASE("calculus names round-trip") {
  for (auto c : {Calculus::DiSR, Calculus::RCC2, Calculus::RCC5On}) CHECK(calculus_from_string(to_string(c)) == c);
}
