#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affgraph/clustering.hpp"
#include "affgraph/convexity.hpp"
#include "affgraph/embedding.hpp"
#include "affgraph/graphlet.hpp"
#include "affgraph/temporal.hpp"

namespace affgraph {

/// How graphlets are compared: learned embeddings or the set edit distance.
enum class ClusterMode { Embedding, Sed };

std::string_view to_string(ClusterMode m);

struct PipelineConfig {
  std::string profile = "cad-like";
  ConvexityParams convexity;
  Calculus calculus = Calculus::DiSR;  // object-object calculus: DiSR or RCC5On
  bool rcc5_with_on = true;
  EpisodeOptions episodes;
  GraphletOptions graphlets;
  TrainConfig train;
  ClusterMode mode = ClusterMode::Embedding;
  Linkage linkage = Linkage::Average;
  double threshold = 0.02;
  std::optional<Criterion> auto_threshold;  // pick the cut by BIC/AIC instead
  SedWeights sed;
  std::uint64_t seed = 7;
  std::vector<std::string> inputs;  // scene files or directories
  std::string groundtruth;
  std::string output = "affgraph_out";

  /// Checks numeric ranges; with `check_paths`, also that inputs exist.
  void validate(bool check_paths = false) const;
};

/// Names of the built-in presets.
std::vector<std::string> profile_names();

/// Resets `cfg` to a preset: cad-like, wnp-like, load-like (dataset depth
/// thresholds), rcc5-on and sed (baseline comparison settings).
void apply_profile(PipelineConfig& cfg, std::string_view name);

/// Sets one key. Throws UsageError for unknown keys or malformed values.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; '#' starts a comment. A `profile` key resets
/// every other setting, so it is applied before the remaining keys.
PipelineConfig parse_config(std::string_view text, std::string_view source = "<config>");
PipelineConfig load_config(const std::string& path);

/// Config from $AFFGRAPH_CONFIG when set, defaults otherwise.
PipelineConfig default_config();

/// Every key with its current value, in load order.
std::string format_config(const PipelineConfig& cfg);

}  // namespace affgraph
