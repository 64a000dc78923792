#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "affgraph/scene.hpp"

namespace affgraph {

enum class ConvexityType { Concave, Surface, Convex };

std::string_view to_string(ConvexityType t);

/// Dense row-major binary image.
struct BinaryGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  BinaryGrid() = default;
  BinaryGrid(int w, int h) : width(w), height(h), cells(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, bool v = true) { cells[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;
};

/// One node of a contour-inclusion tree. Node 0 is the image frame. Outer
/// boundaries of foreground components alternate with hole boundaries at
/// increasing depth.
struct ContourNode {
  int id = 0;
  int parent = -1;
  std::vector<int> children;
  bool hole = false;   // bounds a background region enclosed by foreground
  std::size_t area = 0;
  MaskRLE region;      // pixels of the component the contour bounds
};

struct ContourTree {
  std::vector<ContourNode> nodes;

  const ContourNode& root() const { return nodes.front(); }
  /// Number of hole contours anywhere in the tree.
  std::size_t hole_count() const;
};

struct ContourOptions {
  /// Contours whose component area is below noise_ratio * reference_area are
  /// dropped together with everything nested inside them.
  double noise_ratio = 0.0;
  /// Defaults to the grid's foreground pixel count when zero.
  std::size_t reference_area = 0;
};

/// Builds the inclusion tree of boundary contours. Foreground is 8-connected,
/// background 4-connected.
ContourTree contour_hierarchy(const BinaryGrid& region, const ContourOptions& opts = {});

struct ConvexityParams {
  double thresh_convex = 4.0;
  int sections = 5;       // h
  int deep_sections = 3;  // n
  double noise_ratio = 0.01;
  bool alg1_literal = false;  // use the inequality direction of the printed pseudocode
  bool per_frame = false;     // skip the per-track majority vote
};

/// Classifies an object from its ascending depth values and deep-region grid.
ConvexityType object_convexity(std::span<const double> sorted_depths, const BinaryGrid& deep_region,
                               const ConvexityParams& params);

struct ConcavityBounds {
  double dc_min = 0;
  double dc_max = 0;
};

/// Depth band of the concave curve: the deepest `deep_sections` of `sections`
/// equal slices of [dmin, dmax] for concave objects, the whole range otherwise.
ConcavityBounds convexity_depth(std::span<const double> sorted_depths, ConvexityType type, int sections,
                                int deep_sections);

/// Majority vote; ties resolved Concave > Surface > Convex.
ConvexityType track_convexity(std::span<const ConvexityType> per_frame);

/// Local grid over the bounding box of the pixels `entity_id` owns, marking
/// owned pixels deeper than dmin + thresh_convex.
BinaryGrid deep_region(const SemanticDepthMap& map, std::string_view entity_id, double dmin,
                       double thresh_convex);

struct FrameConvexity {
  ConvexityType type = ConvexityType::Convex;
  DepthSummary depth;
};

/// Full per-frame classification for one object; throws FullyOccludedError.
FrameConvexity classify_object_frame(const SemanticDepthMap& map, std::string_view entity_id,
                                     const ConvexityParams& params);

}  // namespace affgraph
