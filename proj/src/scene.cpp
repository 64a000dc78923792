#include "affgraph/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "affgraph/error.hpp"

namespace affgraph {

using nlohmann::json;

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double h = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (w <= 0 || h <= 0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return inter / uni;
}

// --- MaskRLE ---------------------------------------------------------------

MaskRLE::MaskRLE(int width, int height, std::vector<std::uint32_t> runs)
    : width_(width), height_(height), runs_(std::move(runs)) {
  if (width <= 0 || height <= 0) throw DataError("mask has non-positive dimensions");
  const std::uint64_t total = std::accumulate(runs_.begin(), runs_.end(), std::uint64_t{0});
  if (total != static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height)) {
    throw DataError("mask run lengths sum to " + std::to_string(total) + ", expected " +
                    std::to_string(static_cast<std::uint64_t>(width) * height));
  }
}

MaskRLE MaskRLE::encode(int width, int height, std::span<const std::uint8_t> pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DataError("mask buffer size does not match dimensions");
  }
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (std::uint8_t p : pixels) {
    const std::uint8_t v = p ? 1 : 0;
    if (v != current) {
      runs.push_back(length);
      current = v;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return MaskRLE(width, height, std::move(runs));
}

std::size_t MaskRLE::foreground_count() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i < runs_.size(); i += 2) n += runs_[i];
  return n;
}

std::vector<std::uint8_t> MaskRLE::decode() const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width_) * height_, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (i % 2 == 1) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(pos), runs_[i], 1);
    pos += runs_[i];
  }
  return out;
}

std::vector<std::uint32_t> MaskRLE::foreground_indices() const {
  std::vector<std::uint32_t> out;
  out.reserve(foreground_count());
  std::uint32_t pos = 0;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (i % 2 == 1) {
      for (std::uint32_t k = 0; k < runs_[i]; ++k) out.push_back(pos + k);
    }
    pos += runs_[i];
  }
  return out;
}

bool DepthSample::is_missing(double v) { return !std::isfinite(v) || v <= 0.0; }

std::string_view to_string(EntityKind kind) {
  return kind == EntityKind::Object ? "object" : "human_part";
}

const EntityObservation* Entity::at(int frame) const {
  auto it = std::lower_bound(observations.begin(), observations.end(), frame,
                             [](const EntityObservation& o, int f) { return o.frame < f; });
  if (it == observations.end() || it->frame != frame) return nullptr;
  return &*it;
}

const Entity* SceneSequence::find(std::string_view entity_id) const {
  for (const auto& e : entities)
    if (e.id == entity_id) return &e;
  return nullptr;
}

std::optional<std::size_t> SceneSequence::index_of(std::string_view entity_id) const {
  for (std::size_t i = 0; i < entities.size(); ++i)
    if (entities[i].id == entity_id) return i;
  return std::nullopt;
}

// --- validation ------------------------------------------------------------

namespace {

std::string where(const Entity& e, int frame) {
  return "entity '" + e.id + "' frame " + std::to_string(frame);
}

}  // namespace

void validate_scene(SceneSequence& scene) {
  if (scene.width <= 0 || scene.height <= 0) throw DataError("scene: width/height must be positive");
  if (scene.frame_count < 0) throw DataError("scene: frame_count must be non-negative");
  std::vector<std::string> ids;
  for (auto& e : scene.entities) {
    if (e.id.empty()) throw DataError("scene: entity with empty id");
    ids.push_back(e.id);
    std::stable_sort(e.observations.begin(), e.observations.end(),
                     [](const auto& a, const auto& b) { return a.frame < b.frame; });
    for (std::size_t i = 0; i < e.observations.size(); ++i) {
      const auto& o = e.observations[i];
      if (i > 0 && e.observations[i - 1].frame == o.frame)
        throw DataError(where(e, o.frame) + ": duplicate observation");
      if (o.frame < 0 || o.frame >= scene.frame_count)
        throw DataError(where(e, o.frame) + ": frame outside [0, frame_count)");
      const auto& b = o.bbox;
      if (!(b.xmin < b.xmax)) throw DataError(where(e, o.frame) + ": bbox requires xmin < xmax");
      if (!(b.ymin < b.ymax)) throw DataError(where(e, o.frame) + ": bbox requires ymin < ymax");
      if (b.xmin < 0 || b.ymin < 0 || b.xmax > scene.width || b.ymax > scene.height)
        throw DataError(where(e, o.frame) + ": bbox outside frame");
      if (!(o.score >= 0.0 && o.score <= 1.0))
        throw DataError(where(e, o.frame) + ": score outside [0,1]");
      if (o.mask) {
        if (o.mask->width() != scene.width || o.mask->height() != scene.height)
          throw DataError(where(e, o.frame) + ": mask dimensions differ from frame");
        if (o.mask->foreground_count() == 0)
          throw DataError(where(e, o.frame) + ": mask has empty foreground");
      }
      if (o.depth) {
        if (!o.mask) throw DataError(where(e, o.frame) + ": depth_mm given without mask_rle");
        if (o.depth->values.size() != o.mask->foreground_count())
          throw DataError(where(e, o.frame) + ": depth_mm length " +
                          std::to_string(o.depth->values.size()) + " != mask foreground " +
                          std::to_string(o.mask->foreground_count()));
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  if (auto it = std::adjacent_find(ids.begin(), ids.end()); it != ids.end())
    throw DataError("scene: duplicate entity id '" + *it + "'");
}

// --- JSON I/O --------------------------------------------------------------

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw DataError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(path + "." + key + ": missing field");
  return *it;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw DataError(path + ": expected an integer");
  return v.get<int>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw DataError(path + ": expected a number");
  return v.get<double>();
}

EntityObservation parse_observation(const json& j, int width, int height, const std::string& path) {
  EntityObservation o;
  o.frame = as_int(require(j, "frame", path), path + ".frame");
  const auto& bb = require(j, "bbox", path);
  if (!bb.is_array() || bb.size() != 4) throw DataError(path + ".bbox: expected [xmin,ymin,xmax,ymax]");
  o.bbox = {as_number(bb[0], path + ".bbox[0]"), as_number(bb[1], path + ".bbox[1]"),
            as_number(bb[2], path + ".bbox[2]"), as_number(bb[3], path + ".bbox[3]")};
  if (!(o.bbox.xmin < o.bbox.xmax))
    throw DataError(path + ".bbox: xmin must be < xmax (frame " + std::to_string(o.frame) + ")");
  if (!(o.bbox.ymin < o.bbox.ymax))
    throw DataError(path + ".bbox: ymin must be < ymax (frame " + std::to_string(o.frame) + ")");
  o.score = as_number(require(j, "score", path), path + ".score");
  if (auto it = j.find("mask_rle"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError(path + ".mask_rle: expected an array or null");
    std::vector<std::uint32_t> runs;
    runs.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& r = (*it)[i];
      if (!r.is_number_integer() || r.get<long long>() < 0)
        throw DataError(path + ".mask_rle[" + std::to_string(i) + "]: expected a non-negative integer");
      runs.push_back(r.get<std::uint32_t>());
    }
    try {
      o.mask = MaskRLE(width, height, std::move(runs));
    } catch (const DataError& e) {
      throw DataError(path + ".mask_rle: " + e.what());
    }
  }
  if (auto it = j.find("depth_mm"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError(path + ".depth_mm: expected an array or null");
    DepthSample d;
    d.values.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i)
      d.values.push_back(as_number((*it)[i], path + ".depth_mm[" + std::to_string(i) + "]"));
    o.depth = std::move(d);
  }
  return o;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

SceneSequence parse_scene(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError("scene parse error at line " + std::to_string(line_of(json_text, e.byte)) + ": " +
                    e.what());
  }
  SceneSequence scene;
  scene.width = as_int(require(root, "width", "$"), "$.width");
  scene.height = as_int(require(root, "height", "$"), "$.height");
  scene.frame_count = as_int(require(root, "frame_count", "$"), "$.frame_count");
  if (auto it = root.find("fps"); it != root.end() && !it->is_null()) scene.fps = as_number(*it, "$.fps");
  const auto& ents = require(root, "entities", "$");
  if (!ents.is_array()) throw DataError("$.entities: expected an array");
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const std::string path = "$.entities[" + std::to_string(i) + "]";
    Entity e;
    const auto& id = require(ents[i], "id", path);
    if (!id.is_string()) throw DataError(path + ".id: expected a string");
    e.id = id.get<std::string>();
    const auto& kind = require(ents[i], "kind", path);
    if (kind == "object") e.kind = EntityKind::Object;
    else if (kind == "human_part") e.kind = EntityKind::HumanPart;
    else throw DataError(path + ".kind: expected \"object\" or \"human_part\"");
    const auto& obs = require(ents[i], "observations", path);
    if (!obs.is_array()) throw DataError(path + ".observations: expected an array");
    for (std::size_t k = 0; k < obs.size(); ++k)
      e.observations.push_back(parse_observation(obs[k], scene.width, scene.height,
                                                 path + ".observations[" + std::to_string(k) + "]"));
    scene.entities.push_back(std::move(e));
  }
  validate_scene(scene);
  return scene;
}

SceneSequence load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open scene file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    SceneSequence s = parse_scene(buf.str());
    s.id = path.stem().string();
    return s;
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

void put_number(std::string& out, double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    out += std::to_string(static_cast<long long>(v));
    return;
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void put_string(std::string& out, const std::string& s) { out += json(s).dump(); }

}  // namespace

std::string serialize_scene(const SceneSequence& scene) {
  std::string out;
  out += "{\"width\":" + std::to_string(scene.width);
  out += ",\"height\":" + std::to_string(scene.height);
  out += ",\"frame_count\":" + std::to_string(scene.frame_count);
  out += ",\"fps\":";
  if (scene.fps) put_number(out, *scene.fps);
  else out += "null";
  out += ",\"entities\":[";
  for (std::size_t i = 0; i < scene.entities.size(); ++i) {
    const auto& e = scene.entities[i];
    if (i) out += ',';
    out += "{\"id\":";
    put_string(out, e.id);
    out += ",\"kind\":\"";
    out += to_string(e.kind);
    out += "\",\"observations\":[";
    for (std::size_t k = 0; k < e.observations.size(); ++k) {
      const auto& o = e.observations[k];
      if (k) out += ',';
      out += "{\"frame\":" + std::to_string(o.frame) + ",\"bbox\":[";
      put_number(out, o.bbox.xmin);
      out += ',';
      put_number(out, o.bbox.ymin);
      out += ',';
      put_number(out, o.bbox.xmax);
      out += ',';
      put_number(out, o.bbox.ymax);
      out += "],\"score\":";
      put_number(out, o.score);
      out += ",\"mask_rle\":";
      if (o.mask) {
        out += '[';
        for (std::size_t r = 0; r < o.mask->runs().size(); ++r) {
          if (r) out += ',';
          out += std::to_string(o.mask->runs()[r]);
        }
        out += ']';
      } else {
        out += "null";
      }
      out += ",\"depth_mm\":";
      if (o.depth) {
        out += '[';
        for (std::size_t r = 0; r < o.depth->values.size(); ++r) {
          if (r) out += ',';
          put_number(out, o.depth->values[r]);
        }
        out += ']';
      } else {
        out += "null";
      }
      out += '}';
    }
    out += "]}";
  }
  out += "]}";
  return out;
}

void save_scene(const SceneSequence& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write scene file " + path.string());
  out << serialize_scene(scene) << '\n';
}

// --- track association -------------------------------------------------------

SceneSequence associate_tracks(const std::vector<std::vector<Detection>>& frames, int width,
                               int height, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw UsageError("iou_threshold must lie in (0, 1]");
  SceneSequence scene;
  scene.width = width;
  scene.height = height;
  scene.frame_count = static_cast<int>(frames.size());

  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& dets = frames[t];
    struct Candidate {
      double iou;
      std::size_t track;
      std::size_t det;
    };
    std::vector<Candidate> cands;
    for (std::size_t k = 0; k < scene.entities.size(); ++k) {
      const auto& track = scene.entities[k];
      const auto& last = track.observations.back();
      for (std::size_t d = 0; d < dets.size(); ++d) {
        if (dets[d].kind != track.kind) continue;
        const double v = iou(last.bbox, dets[d].observation.bbox);
        if (v >= iou_threshold) cands.push_back({v, k, d});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.iou != b.iou) return a.iou > b.iou;
      return std::tie(a.track, a.det) < std::tie(b.track, b.det);
    });
    std::vector<bool> track_used(scene.entities.size(), false);
    std::vector<bool> det_used(dets.size(), false);
    for (const auto& c : cands) {
      if (track_used[c.track] || det_used[c.det]) continue;
      track_used[c.track] = det_used[c.det] = true;
      EntityObservation o = dets[c.det].observation;
      o.frame = static_cast<int>(t);
      scene.entities[c.track].observations.push_back(std::move(o));
    }
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (det_used[d]) continue;
      Entity e;
      e.id = "track_" + std::to_string(scene.entities.size());
      e.kind = dets[d].kind;
      EntityObservation o = dets[d].observation;
      o.frame = static_cast<int>(t);
      e.observations.push_back(std::move(o));
      scene.entities.push_back(std::move(e));
    }
  }
  return scene;
}

// --- semantic depth map ------------------------------------------------------

std::size_t SemanticDepthMap::owned_pixel_count(std::int32_t entity_index) const {
  return static_cast<std::size_t>(std::count(owner.begin(), owner.end(), entity_index));
}

SemanticDepthMap build_semantic_depth_map(const SceneSequence& scene, int frame) {
  if (frame < 0 || frame >= scene.frame_count) throw UsageError("frame index outside the scene");
  SemanticDepthMap map;
  map.width = scene.width;
  map.height = scene.height;
  map.frame = frame;
  const std::size_t n = static_cast<std::size_t>(scene.width) * scene.height;
  map.owner.assign(n, -1);
  map.depth.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : scene.entities) map.entity_ids.push_back(e.id);

  std::vector<std::uint8_t> human(n, 0);
  std::vector<double> owner_score(n, -1.0);
  for (std::size_t i = 0; i < scene.entities.size(); ++i) {
    const auto& e = scene.entities[i];
    const auto* o = e.at(frame);
    if (!o || !o->mask) continue;
    const auto idx = o->mask->foreground_indices();
    if (e.kind == EntityKind::HumanPart) {
      for (auto p : idx) human[p] = 1;
      continue;
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto p = idx[k];
      const auto cur = map.owner[p];
      bool take = cur < 0 || o->score > owner_score[p];
      if (!take && o->score == owner_score[p]) take = e.id < scene.entities[static_cast<std::size_t>(cur)].id;
      if (!take) continue;
      map.owner[p] = static_cast<std::int32_t>(i);
      owner_score[p] = o->score;
      map.depth[p] = o->depth ? o->depth->values[k] : std::numeric_limits<double>::quiet_NaN();
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (human[p]) {
      map.owner[p] = -1;
      map.depth[p] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return map;
}

DepthSummary object_depth_summary(const SemanticDepthMap& map, std::string_view entity_id) {
  auto it = std::find(map.entity_ids.begin(), map.entity_ids.end(), entity_id);
  if (it == map.entity_ids.end()) throw DataError("unknown entity '" + std::string(entity_id) + "'");
  const auto index = static_cast<std::int32_t>(it - map.entity_ids.begin());
  DepthSummary s;
  for (std::size_t p = 0; p < map.owner.size(); ++p)
    if (map.owner[p] == index && !DepthSample::is_missing(map.depth[p])) s.values.push_back(map.depth[p]);
  if (s.values.empty())
    throw FullyOccludedError("entity '" + std::string(entity_id) + "' owns no depth pixel at frame " +
                             std::to_string(map.frame));
  std::sort(s.values.begin(), s.values.end());
  s.dmin = s.values.front();
  s.dmax = s.values.back();
  return s;
}

}  // namespace affgraph
