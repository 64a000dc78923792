#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affgraph/temporal.hpp"

namespace affgraph {

/// Undirected vertex-labeled graph. Labels must not contain '|' or ';'.
struct LabeledGraph {
  std::vector<std::string> labels;
  std::vector<std::pair<int, int>> edges;

  std::size_t vertex_count() const { return labels.size(); }
  std::vector<std::vector<int>> adjacency() const;
};

enum class Layer { Entity, Spatial, Temporal };

/// Layer encoded in a vertex label prefix ("E:", "S:", "T:").
Layer layer_of(std::string_view label);

inline constexpr std::string_view kAnchorLabel = "E:anchor";
inline constexpr std::string_view kPartnerLabel = "E:partner";
inline constexpr std::string_view kHumanLabel = "E:human";

/// Interaction graph of one anchor object with one partner object and
/// (optionally) one human body part. Vertex labels carry roles and relation
/// tokens only.
struct AGraphlet {
  std::string scene_id;
  std::string anchor;
  std::string partner;
  std::optional<std::string> human;

  LabeledGraph graph;
  /// For each vertex, the index into `episodes` of the spatial relation it
  /// stands for, or -1.
  std::vector<int> vertex_episode;
  std::vector<Episode> episodes;

  std::string id() const { return scene_id + "/" + anchor + "/" + partner; }
};

struct GraphletOptions {
  std::size_t temporal_cap = 256;
  /// Force this human part for every graphlet instead of picking the one
  /// with the most contact frames.
  std::string human_part;
};

/// Episodes of one scene. `object_episodes` holds both orderings of each
/// object pair; `human_episodes` pairs are (object, human part).
struct SceneEpisodes {
  std::string scene_id;
  std::vector<Episode> object_episodes;
  std::vector<Episode> human_episodes;
};

/// Token meaning "no interaction" for an object-object calculus.
std::string_view non_interaction_token(Calculus c);

/// One graphlet per ordered (anchor, partner) object pair with at least one
/// interacting episode. Output order is sorted by (anchor, partner).
std::vector<AGraphlet> build_agraphlets(const SceneEpisodes& episodes, const GraphletOptions& opts = {});

/// Canonical text of a labeled graph: identical for isomorphic graphs with
/// equal labels, different otherwise. Format: "v=<l0>|<l1>...;e=<a>-<b>,...".
std::string canonical_form(const LabeledGraph& g);
inline std::string canonical_form(const AGraphlet& g) { return canonical_form(g.graph); }

LabeledGraph parse_canonical_form(std::string_view text);

// --- corpus files ----------------------------------------------------------

struct GraphletRecord {
  std::string id;
  std::string scene_id;
  std::string anchor;
  std::string partner;
  std::optional<std::string> human;
  std::string canonical;
  std::vector<Episode> episodes;
};

GraphletRecord to_record(const AGraphlet& g);
std::string format_record(const GraphletRecord& r);
GraphletRecord parse_record(std::string_view line);

void write_corpus(const std::vector<GraphletRecord>& corpus, const std::string& path);
std::vector<GraphletRecord> read_corpus(const std::string& path);

}  // namespace affgraph
