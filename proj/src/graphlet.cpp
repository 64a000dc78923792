#include "affgraph/graphlet.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <tuple>

#include <json.hpp>

#include "affgraph/error.hpp"

namespace affgraph {

std::vector<std::vector<int>> LabeledGraph::adjacency() const {
  std::vector<std::vector<int>> adj(labels.size());
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  return adj;
}

Layer layer_of(std::string_view label) {
  if (label.starts_with("E:")) return Layer::Entity;
  if (label.starts_with("S:")) return Layer::Spatial;
  if (label.starts_with("T:")) return Layer::Temporal;
  throw DataError("vertex label without layer prefix: '" + std::string(label) + "'");
}

std::string_view non_interaction_token(Calculus c) {
  switch (c) {
    case Calculus::DiSR: return "NI";
    case Calculus::RCC5On: return "DR";
    case Calculus::RCC2: return "DC";
  }
  return "NI";
}

namespace {

int temporal_gap(const Interval& a, const Interval& b) {
  return std::max({0, b.start - a.end, a.start - b.end});
}

bool canonical_episode_less(const Episode& a, const Episode& b) {
  return std::tuple(a.interval.start, static_cast<int>(a.calculus), a.relation, a.interval.end) <
         std::tuple(b.interval.start, static_cast<int>(b.calculus), b.relation, b.interval.end);
}

}  // namespace

std::vector<AGraphlet> build_agraphlets(const SceneEpisodes& input, const GraphletOptions& opts) {
  std::map<std::pair<std::string, std::string>, std::vector<const Episode*>> pairs;
  for (const auto& e : input.object_episodes) pairs[{e.first, e.second}].push_back(&e);

  // Contact frames per (object, human part).
  std::map<std::string, std::map<std::string, int>> contact;
  std::map<std::string, std::map<std::string, std::vector<const Episode*>>> human_eps;
  for (const auto& e : input.human_episodes) {
    human_eps[e.first][e.second].push_back(&e);
    auto& c = contact[e.first][e.second];
    if (e.relation == "C") c += e.interval.length();
  }

  std::vector<AGraphlet> out;
  for (const auto& [key, eps] : pairs) {
    const bool interacting = std::any_of(eps.begin(), eps.end(), [](const Episode* e) {
      return e->relation != non_interaction_token(e->calculus);
    });
    if (!interacting) continue;

    AGraphlet g;
    g.scene_id = input.scene_id;
    g.anchor = key.first;
    g.partner = key.second;

    if (!opts.human_part.empty()) {
      if (human_eps[g.anchor].count(opts.human_part)) g.human = opts.human_part;
    } else if (auto it = contact.find(g.anchor); it != contact.end()) {
      int best = 0;
      for (const auto& [hid, frames] : it->second) {
        if (frames > best) {  // map order gives the lower id on ties
          best = frames;
          g.human = hid;
        }
      }
    }

    for (const Episode* e : eps) g.episodes.push_back(*e);
    if (g.human)
      for (const Episode* e : human_eps[g.anchor][*g.human]) g.episodes.push_back(*e);
    std::stable_sort(g.episodes.begin(), g.episodes.end(), canonical_episode_less);

    auto& graph = g.graph;
    graph.labels = {std::string(kAnchorLabel), std::string(kPartnerLabel)};
    if (g.human) graph.labels.emplace_back(kHumanLabel);
    g.vertex_episode.assign(graph.labels.size(), -1);

    const int first_spatial = static_cast<int>(graph.labels.size());
    for (std::size_t i = 0; i < g.episodes.size(); ++i) {
      const auto& e = g.episodes[i];
      const int v = static_cast<int>(graph.labels.size());
      graph.labels.push_back("S:" + std::string(to_string(e.calculus)) + ":" + e.relation);
      g.vertex_episode.push_back(static_cast<int>(i));
      graph.edges.emplace_back(0, v);
      graph.edges.emplace_back(e.calculus == Calculus::RCC2 ? 2 : 1, v);
    }

    struct TemporalPair {
      int gap;
      std::size_t i, j;
    };
    std::vector<TemporalPair> tps;
    for (std::size_t i = 0; i < g.episodes.size(); ++i)
      for (std::size_t j = i + 1; j < g.episodes.size(); ++j)
        tps.push_back({temporal_gap(g.episodes[i].interval, g.episodes[j].interval), i, j});
    if (tps.size() > opts.temporal_cap) {
      std::stable_sort(tps.begin(), tps.end(), [](const TemporalPair& a, const TemporalPair& b) {
        return std::tie(a.gap, a.i, a.j) < std::tie(b.gap, b.i, b.j);
      });
      tps.resize(opts.temporal_cap);
      std::sort(tps.begin(), tps.end(),
                [](const TemporalPair& a, const TemporalPair& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    }
    for (const auto& tp : tps) {
      const int v = static_cast<int>(graph.labels.size());
      const auto rel = allen(g.episodes[tp.i].interval, g.episodes[tp.j].interval);
      graph.labels.push_back("T:" + std::string(to_string(rel)));
      g.vertex_episode.push_back(-1);
      graph.edges.emplace_back(first_spatial + static_cast<int>(tp.i), v);
      graph.edges.emplace_back(first_spatial + static_cast<int>(tp.j), v);
    }
    out.push_back(std::move(g));
  }
  return out;
}

// --- canonical form ----------------------------------------------------------

namespace {

using Coloring = std::vector<int>;

// Equitable refinement: split color classes by the multiset of neighbour
// colors until stable. New colors preserve the order of the old ones.
Coloring refine(const std::vector<std::vector<int>>& adj, Coloring colors) {
  const std::size_t n = colors.size();
  std::size_t classes = 0;
  {
    auto tmp = colors;
    std::sort(tmp.begin(), tmp.end());
    classes = static_cast<std::size_t>(std::unique(tmp.begin(), tmp.end()) - tmp.begin());
  }
  while (true) {
    std::vector<std::pair<int, std::vector<int>>> sig(n);
    for (std::size_t v = 0; v < n; ++v) {
      sig[v].first = colors[v];
      for (int u : adj[v]) sig[v].second.push_back(colors[static_cast<std::size_t>(u)]);
      std::sort(sig[v].second.begin(), sig[v].second.end());
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
    Coloring next(n);
    int c = -1;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == 0 || sig[order[k]] != sig[order[k - 1]]) ++c;
      next[order[k]] = c;
    }
    const std::size_t next_classes = static_cast<std::size_t>(c + 1);
    colors = std::move(next);
    if (next_classes == classes) return colors;
    classes = next_classes;
  }
}

std::string serialize(const LabeledGraph& g, const Coloring& pos) {
  const std::size_t n = g.labels.size();
  std::vector<std::size_t> at(n);
  for (std::size_t v = 0; v < n; ++v) at[static_cast<std::size_t>(pos[v])] = v;
  std::string s = "v=";
  for (std::size_t k = 0; k < n; ++k) {
    if (k) s += '|';
    s += g.labels[at[k]];
  }
  std::vector<std::pair<int, int>> edges;
  for (auto [a, b] : g.edges) {
    int pa = pos[static_cast<std::size_t>(a)], pb = pos[static_cast<std::size_t>(b)];
    if (pa > pb) std::swap(pa, pb);
    edges.emplace_back(pa, pb);
  }
  std::sort(edges.begin(), edges.end());
  s += ";e=";
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(edges[k].first) + "-" + std::to_string(edges[k].second);
  }
  return s;
}

void search(const LabeledGraph& g, const std::vector<std::vector<int>>& adj, Coloring colors,
            std::optional<std::string>& best) {
  colors = refine(adj, std::move(colors));
  const std::size_t n = colors.size();
  std::vector<std::size_t> cell_size(n, 0);
  for (int c : colors) ++cell_size[static_cast<std::size_t>(c)];
  int target = -1;
  for (std::size_t c = 0; c < n; ++c)
    if (cell_size[c] > 1) {
      target = static_cast<int>(c);
      break;
    }
  if (target < 0) {
    std::string s = serialize(g, colors);
    if (!best || s < *best) best = std::move(s);
    return;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (colors[v] != target) continue;
    Coloring next(n);
    for (std::size_t u = 0; u < n; ++u) next[u] = 2 * colors[u] + ((colors[u] == target && u != v) ? 1 : 0);
    search(g, adj, std::move(next), best);
  }
}

}  // namespace

std::string canonical_form(const LabeledGraph& g) {
  for (const auto& l : g.labels)
    if (l.find_first_of("|;") != std::string::npos) throw DataError("vertex label contains '|' or ';': " + l);
  const std::size_t n = g.labels.size();
  if (n == 0) return "v=;e=";
  std::vector<std::string> sorted = g.labels;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Coloring colors(n);
  for (std::size_t v = 0; v < n; ++v)
    colors[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), g.labels[v]) - sorted.begin());
  std::optional<std::string> best;
  search(g, g.adjacency(), std::move(colors), best);
  return *best;
}

LabeledGraph parse_canonical_form(std::string_view text) {
  if (!text.starts_with("v=")) throw DataError("canonical form must start with 'v='");
  const auto semi = text.find(";e=");
  if (semi == std::string_view::npos) throw DataError("canonical form lacks ';e=' section");
  LabeledGraph g;
  std::string_view vs = text.substr(2, semi - 2);
  if (!vs.empty()) {
    std::size_t start = 0;
    while (true) {
      const auto bar = vs.find('|', start);
      g.labels.emplace_back(vs.substr(start, bar == std::string_view::npos ? vs.npos : bar - start));
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
  }
  std::string_view es = text.substr(semi + 3);
  std::size_t start = 0;
  while (start < es.size()) {
    auto comma = es.find(',', start);
    if (comma == std::string_view::npos) comma = es.size();
    const std::string_view item = es.substr(start, comma - start);
    const auto dash = item.find('-');
    int a = -1, b = -1;
    if (dash == std::string_view::npos ||
        std::from_chars(item.data(), item.data() + dash, a).ec != std::errc{} ||
        std::from_chars(item.data() + dash + 1, item.data() + item.size(), b).ec != std::errc{} || a < 0 ||
        b < 0 || static_cast<std::size_t>(std::max(a, b)) >= g.labels.size())
      throw DataError("malformed edge '" + std::string(item) + "' in canonical form");
    g.edges.emplace_back(a, b);
    start = comma + 1;
  }
  return g;
}

// --- corpus files ------------------------------------------------------------

using nlohmann::json;

GraphletRecord to_record(const AGraphlet& g) {
  return {g.id(), g.scene_id, g.anchor, g.partner, g.human, canonical_form(g.graph), g.episodes};
}

std::string format_record(const GraphletRecord& r) {
  json eps = json::array();
  for (const auto& e : r.episodes)
    eps.push_back({{"first", e.first},
                   {"second", e.second},
                   {"calculus", to_string(e.calculus)},
                   {"relation", e.relation},
                   {"start", e.interval.start},
                   {"end", e.interval.end}});
  json j = {{"id", r.id},           {"scene", r.scene_id},   {"anchor", r.anchor},
            {"partner", r.partner}, {"graph", r.canonical}, {"episodes", eps}};
  j["human"] = r.human ? json(*r.human) : json(nullptr);
  return j.dump();
}

GraphletRecord parse_record(std::string_view line) {
  try {
    const json j = json::parse(line);
    GraphletRecord r;
    r.id = j.at("id").get<std::string>();
    r.scene_id = j.at("scene").get<std::string>();
    r.anchor = j.at("anchor").get<std::string>();
    r.partner = j.at("partner").get<std::string>();
    if (!j.at("human").is_null()) r.human = j.at("human").get<std::string>();
    r.canonical = j.at("graph").get<std::string>();
    for (const auto& e : j.at("episodes"))
      r.episodes.push_back({e.at("first").get<std::string>(), e.at("second").get<std::string>(),
                            calculus_from_string(e.at("calculus").get<std::string>()),
                            e.at("relation").get<std::string>(),
                            {e.at("start").get<int>(), e.at("end").get<int>()}});
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("graphlet record: ") + e.what());
  }
}

void write_corpus(const std::vector<GraphletRecord>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write graphlet corpus " + path);
  for (const auto& r : corpus) out << format_record(r) << '\n';
}

std::vector<GraphletRecord> read_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open graphlet corpus " + path);
  std::vector<GraphletRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace affgraph
