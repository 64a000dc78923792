#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affgraph/clustering.hpp"
#include "affgraph/config.hpp"
#include "affgraph/evaluation.hpp"
#include "affgraph/graphlet.hpp"
#include "affgraph/scene.hpp"
#include "affgraph/synthetic.hpp"
#include "affgraph/temporal.hpp"

namespace affgraph {

/// Relation of one ordered entity pair at one frame.
struct FrameRelation {
  int frame = 0;
  std::string first;
  std::string second;
  Calculus calculus = Calculus::DiSR;
  std::string relation;
  bool approximate = false;
  friend bool operator==(const FrameRelation&, const FrameRelation&) = default;
};

struct SceneRelations {
  std::string scene_id;
  std::vector<FrameRelation> relations;  // sorted by (frame, first, second)
  std::map<std::string, ConvexityType> convexity;  // per-track type of each object
  std::vector<std::string> warnings;
};

/// Per-frame object-object relations (both orderings, configured calculus)
/// and object-human RCC2 relations (object first).
SceneRelations compute_relations(const SceneSequence& scene, const PipelineConfig& cfg);

SceneEpisodes episodes_from_relations(const SceneRelations& rel, const EpisodeOptions& opts);

std::string format_relations(const SceneRelations& rel);
void write_relations(const std::string& path, const SceneRelations& rel);
SceneRelations read_relations(const std::string& path);
std::string format_episodes(const SceneEpisodes& eps);
void write_episodes(const std::string& path, const SceneEpisodes& eps);
SceneEpisodes read_episodes(const std::string& path);

/// Scene files named by `inputs`; directories contribute their *.json files
/// in name order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs);

struct EmbeddingRun {
  std::vector<std::string> ids;
  Vocabulary vocabulary;
  TrainResult result;
};

EmbeddingRun embed_corpus(const std::vector<GraphletRecord>& corpus, const TrainConfig& cfg);

/// Pairwise sED costs of the corpus graphs.
CostMatrix sed_cost_matrix(const std::vector<GraphletRecord>& corpus, const SedWeights& w);

/// Flat clustering at the configured threshold, or at the BIC/AIC choice
/// when `auto_threshold` is set (requires points). Returns the threshold used.
double choose_threshold(const Dendrogram& d, const EmbeddingTable* points, const PipelineConfig& cfg);

/// Groundtruth labels aligned with graph ids; graphs without labels get an
/// empty list.
std::vector<std::vector<std::string>> align_groundtruth(const std::vector<std::string>& ids,
                                                        const std::vector<GroundTruthRecord>& gt);

/// V-measure over the graphs that carry at least one label.
VMeasure evaluate_clusters(const std::vector<std::string>& ids, const FlatClustering& fc,
                           const std::vector<GroundTruthRecord>& gt);

struct RunReport {
  std::vector<std::string> graph_ids;
  FlatClustering clustering;
  Dendrogram dendrogram;
  double threshold = 0;
  std::optional<VMeasure> metrics;
  std::vector<double> epoch_loss;
  std::map<std::string, std::string> artifacts;  // artifact name -> path
  std::vector<std::string> warnings;
};

/// In-memory stages shared by run_pipeline and the tests.
std::vector<GraphletRecord> graphlet_corpus(const std::vector<SceneSequence>& scenes, const PipelineConfig& cfg,
                                            std::vector<std::string>* warnings = nullptr);

/// Clusters a graphlet corpus per cfg.mode and evaluates against `gt` when
/// it is non-empty. No files are written.
RunReport cluster_corpus(const std::vector<GraphletRecord>& corpus, const PipelineConfig& cfg,
                         const std::vector<GroundTruthRecord>& gt);

/// Full run from scene files to metrics, writing every intermediate artifact
/// under cfg.output.
RunReport run_pipeline(const PipelineConfig& cfg);

}  // namespace affgraph
