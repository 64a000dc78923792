#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "affgraph/convexity.hpp"
#include "affgraph/qsr.hpp"
#include "affgraph/scene.hpp"

namespace affgraph {

/// Scripted interactions. Each event drives one object family:
///   PlaceOn            hand lowers a cup onto a tabletop
///   PutInto / TakeOut  hand moves a ball into / out of a bowl
///   PushAdjacent       hand pushes one box against another
///   OccludePassBehind  a far object slides behind the scene (no interaction)
enum class ScriptEvent { PlaceOn, PutInto, TakeOut, PushAdjacent, OccludePassBehind };

std::string_view to_string(ScriptEvent e);
ScriptEvent script_event_from_string(std::string_view s);

struct SyntheticScript {
  std::vector<ScriptEvent> events;
  /// Hand touches the manipulated object once more after each release.
  bool regrasp = false;
  /// Hand lets go before the object reaches its target relation.
  bool early_release = false;
  /// Uniform per-pixel depth noise amplitude in millimeters.
  double depth_jitter = 0.0;
  ConvexityParams params;
};

struct GroundTruthRecord {
  std::string scene_id;
  std::string anchor;
  std::string partner;
  std::vector<std::string> labels;

  std::string graph_id() const { return scene_id + "/" + anchor + "/" + partner; }
};

/// Expected DiSR relation of (first, second) at one frame.
struct RelationKeyEntry {
  int frame = 0;
  std::string first;
  std::string second;
  DisrRelation relation = DisrRelation::NI;
};

struct SyntheticScene {
  SceneSequence scene;
  std::vector<GroundTruthRecord> groundtruth;
  std::vector<RelationKeyEntry> relation_key;
};

/// Renders a scripted scene. Geometry and depth are laid out in units of
/// params.thresh_convex so that the scripted relation holds at every frame.
/// Throws UsageError for infeasible scripts.
SyntheticScene generate_synthetic(const SyntheticScript& script, std::uint64_t seed, const std::string& scene_id);

/// Affordance classes of the benchmark corpus.
enum class InteractionClass { Containment, Support, Adjacency };

/// `per_class` scenes of each class with seeded timing, placement, depth
/// offsets, jitter and optional passers-by. The regrasp and early-release
/// variants are left off: each yields a distinct interaction graph.
std::vector<SyntheticScene> generate_corpus(int per_class, std::uint64_t seed, const ConvexityParams& params);

void write_groundtruth(const std::string& path, const std::vector<GroundTruthRecord>& records);
std::vector<GroundTruthRecord> read_groundtruth(const std::string& path);

}  // namespace affgraph
