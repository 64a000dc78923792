#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace affgraph {

/// Inclusive frame interval.
struct Interval {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Calculus { DiSR, RCC2, RCC5On };

std::string_view to_string(Calculus c);
Calculus calculus_from_string(std::string_view s);

struct Episode {
  std::string first;   // entity ids of the ordered pair
  std::string second;
  Calculus calculus = Calculus::DiSR;
  std::string relation;
  Interval interval;

  friend bool operator==(const Episode&, const Episode&) = default;
};

/// The thirteen interval relations. Enumerators are paired with their
/// converses, except Equals.
enum class AllenRelation {
  Before, After, Meets, MetBy, Overlaps, OverlappedBy, Starts, StartedBy,
  During, Contains, Finishes, FinishedBy, Equals
};

inline constexpr int kAllenRelationCount = 13;

std::string_view to_string(AllenRelation r);
AllenRelation converse(AllenRelation r);

/// Discrete semantics: `meets` means a.end + 1 == b.start.
AllenRelation allen(const Interval& a, const Interval& b);

struct FrameToken {
  int frame = 0;
  std::string token;
};

struct EpisodeOptions {
  /// Runs of at most this many frames flanked by the same token on both
  /// sides are absorbed into that token.
  int smoothing = 0;
  /// Observation gaps of at most this many frames inherit the preceding
  /// token; longer gaps end the episode.
  int gap_bridge = 0;
};

/// Segments a per-frame relation sequence (ascending frames) into maximal
/// episodes for one ordered pair.
std::vector<Episode> extract_episodes(std::span<const FrameToken> relations, std::string_view first,
                                      std::string_view second, Calculus calculus,
                                      const EpisodeOptions& opts = {});

}  // namespace affgraph
