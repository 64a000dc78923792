#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affgraph/error.hpp"

namespace affgraph {

/// Axis-aligned box in image coordinates (origin top-left, y grows downward).
struct BoundingBox {
  double xmin = 0;
  double ymin = 0;
  double xmax = 0;
  double ymax = 0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool valid() const { return xmin < xmax && ymin < ymax; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Area of the intersection of two boxes (0 when they only touch).
double intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union; symmetric, in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b);

/// Binary mask stored as alternating background/foreground run lengths in
/// row-major order. The first run is always background (possibly empty).
class MaskRLE {
public:
  MaskRLE() = default;
  MaskRLE(int width, int height, std::vector<std::uint32_t> runs);

  /// Encodes a dense row-major 0/1 buffer of size width*height.
  static MaskRLE encode(int width, int height, std::span<const std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint32_t>& runs() const { return runs_; }

  std::size_t foreground_count() const;
  std::vector<std::uint8_t> decode() const;
  /// Row-major linear indices of foreground pixels, ascending (run order).
  std::vector<std::uint32_t> foreground_indices() const;

  friend bool operator==(const MaskRLE&, const MaskRLE&) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint32_t> runs_;
};

/// Depth readings in millimeters, parallel to the mask's foreground pixels.
/// Non-positive or non-finite entries mark missing readings.
struct DepthSample {
  std::vector<double> values;

  static bool is_missing(double v);
  friend bool operator==(const DepthSample&, const DepthSample&) = default;
};

enum class EntityKind { Object, HumanPart };

std::string_view to_string(EntityKind kind);

struct EntityObservation {
  int frame = 0;
  BoundingBox bbox;
  std::optional<MaskRLE> mask;
  std::optional<DepthSample> depth;
  double score = 1.0;

  friend bool operator==(const EntityObservation&, const EntityObservation&) = default;
};

struct Entity {
  std::string id;
  EntityKind kind = EntityKind::Object;
  std::vector<EntityObservation> observations;  // strictly increasing frames

  /// Observation at `frame`, or nullptr.
  const EntityObservation* at(int frame) const;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct SceneSequence {
  std::string id;  // not serialized; the pipeline uses the file stem
  int width = 0;
  int height = 0;
  int frame_count = 0;
  std::optional<double> fps;
  std::vector<Entity> entities;

  const Entity* find(std::string_view entity_id) const;
  std::optional<std::size_t> index_of(std::string_view entity_id) const;
};

/// Checks every type invariant; throws DataError naming entity and frame.
/// Observations are sorted by frame before checking.
void validate_scene(SceneSequence& scene);

SceneSequence parse_scene(std::string_view json_text);
SceneSequence load_scene(const std::filesystem::path& path);

/// Canonical compact JSON form (fixed key order, integral numbers printed
/// without a fraction).
std::string serialize_scene(const SceneSequence& scene);
void save_scene(const SceneSequence& scene, const std::filesystem::path& path);

// --- track association -----------------------------------------------------

struct Detection {
  EntityKind kind = EntityKind::Object;
  EntityObservation observation;
};

/// Links per-frame detections into tracks. `frames[t]` holds the unlinked
/// detections of frame t. Matching is greedy, highest IoU first, and only
/// between detections of the same kind. New tracks are named track_<k>.
SceneSequence associate_tracks(const std::vector<std::vector<Detection>>& frames, int width,
                               int height, double iou_threshold = 0.5);

// --- semantic depth map -----------------------------------------------------

/// Per-pixel ownership for one frame: every pixel belongs to at most one
/// object entity. Pixels under any human-part mask are never owned.
struct SemanticDepthMap {
  int width = 0;
  int height = 0;
  int frame = 0;
  std::vector<std::int32_t> owner;  // entity index into the scene, -1 = none
  std::vector<double> depth;        // NaN where unknown
  std::vector<std::string> entity_ids;

  std::int32_t owner_at(int x, int y) const { return owner[static_cast<std::size_t>(y) * width + x]; }
  std::size_t owned_pixel_count(std::int32_t entity_index) const;
};

SemanticDepthMap build_semantic_depth_map(const SceneSequence& scene, int frame);

struct DepthSummary {
  double dmin = 0;
  double dmax = 0;
  std::vector<double> values;  // ascending
};

/// Thrown when an entity owns no pixel with a depth reading at this frame.
class FullyOccludedError : public DataError {
public:
  using DataError::DataError;
};

DepthSummary object_depth_summary(const SemanticDepthMap& map, std::string_view entity_id);

}  // namespace affgraph
