#include "affgraph/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "affgraph/error.hpp"

namespace affgraph {

std::string_view to_string(ScriptEvent e) {
  switch (e) {
    case ScriptEvent::PlaceOn: return "place-on";
    case ScriptEvent::PutInto: return "put-into";
    case ScriptEvent::TakeOut: return "take-out";
    case ScriptEvent::PushAdjacent: return "push-adjacent";
    case ScriptEvent::OccludePassBehind: return "occlude-pass-behind";
  }
  return "place-on";
}

ScriptEvent script_event_from_string(std::string_view s) {
  for (auto e : {ScriptEvent::PlaceOn, ScriptEvent::PutInto, ScriptEvent::TakeOut, ScriptEvent::PushAdjacent,
                 ScriptEvent::OccludePassBehind})
    if (to_string(e) == s) return e;
  throw UsageError("unknown script event '" + std::string(s) + "'");
}

namespace {

constexpr int kWidth = 128;
constexpr int kHeight = 96;
constexpr int kSlotWidth = 64;

struct Rect {
  int x = 0, y = 0, w = 0, h = 0;

  BoundingBox box() const { return {double(x), double(y), double(x + w), double(y + h)}; }
  bool inside(const Rect& o) const { return x >= o.x && y >= o.y && x + w <= o.x + o.w && y + h <= o.y + o.h; }
  bool overlaps(const Rect& o) const {
    return std::min(x + w, o.x + o.w) > std::max(x, o.x) && std::min(y + h, o.y + o.h) > std::max(y, o.y);
  }
};

enum class Family { Container, Supporter, Adjacent };

struct Snapshot {
  std::map<std::string, Rect> rects;
  bool cup_resting = false;
};

// Depth band of one object as [lo, hi] plus the depth style.
enum class Style { Bowl, Radial, RowsNearBottom, RowsNearTop };

struct Actor {
  std::string id;
  EntityKind kind = EntityKind::Object;
  double score = 0.9;
};

class Timeline {
public:
  explicit Timeline(Snapshot start) : current_(std::move(start)) {}

  void idle(int frames) {
    for (int i = 0; i < frames; ++i) frames_.push_back(current_);
  }

  // Moves the listed rects linearly to their targets over `frames` frames.
  // `hand_follow` frames of those carry the hand along with `follow_target`.
  void move(const std::map<std::string, Rect>& targets, int frames,
            const std::function<void(Snapshot&)>& after_each = {}) {
    std::map<std::string, Rect> from;
    for (const auto& [id, _] : targets) from[id] = current_.rects.at(id);
    for (int k = 1; k <= frames; ++k) {
      const double t = static_cast<double>(k) / frames;
      for (const auto& [id, to] : targets) {
        Rect r = from[id];
        r.x = static_cast<int>(std::lround(from[id].x + t * (to.x - from[id].x)));
        r.y = static_cast<int>(std::lround(from[id].y + t * (to.y - from[id].y)));
        current_.rects[id] = r;
      }
      if (after_each) after_each(current_);
      frames_.push_back(current_);
    }
  }

  Snapshot& current() { return current_; }
  std::vector<Snapshot>& frames() { return frames_; }

private:
  Snapshot current_;
  std::vector<Snapshot> frames_;
};

// Hand pose touching the top row of `r`.
Rect grasp_top(const Rect& r, const Rect& hand) { return {r.x + 1, r.y - hand.h + 1, hand.w, hand.h}; }
// Hand pose touching the left column of `r`.
Rect grasp_left(const Rect& r, const Rect& hand) { return {r.x - hand.w + 1, r.y + 2, hand.w, hand.h}; }

struct FamilyLayout {
  Family family;
  int origin = 0;
  double base = 0;  // depth base in mm
  // Container
  Rect bowl, ball_out, ball_in, ball_away;
  // Supporter
  Rect table, cup_air, cup_rest;
  // Adjacent
  Rect box_a, box_a_pushed, box_b;
};

}  // namespace

SyntheticScene generate_synthetic(const SyntheticScript& script, std::uint64_t seed, const std::string& scene_id) {
  const ConvexityParams& p = script.params;
  const double u = p.thresh_convex;
  if (!(u > 0)) throw UsageError("synthetic: thresh_convex must be positive");
  if (p.alg1_literal) throw UsageError("synthetic: scripted geometry assumes the default convexity semantics");
  if (!(p.deep_sections >= 1 && p.deep_sections < p.sections)) throw UsageError("synthetic: need 1 <= n < h");
  if (script.depth_jitter < 0 || script.depth_jitter > 0.1 * u)
    throw UsageError("synthetic: depth jitter must lie in [0, 0.1 * thresh_convex]");
  if (script.events.empty()) throw UsageError("synthetic: empty script");

  // Containee band: centered in the bowl's concave band [dc_min, dc_max].
  const double bowl_depth = 3.0 * u;
  const double band = bowl_depth * p.deep_sections / p.sections;
  const double margin = 0.1 * band + 2 * script.depth_jitter;
  const double ball_range = std::min(0.75 * u, band - 2 * margin);
  if (ball_range < 0.05 * u)
    throw UsageError("synthetic: concave band too narrow for a containee with these h, n");
  const double ball_mid = bowl_depth - band / 2;

  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  // Families in order of first use, one screen half each.
  std::vector<FamilyLayout> layouts;
  bool passerby = false;
  auto family_of = [](ScriptEvent e) {
    switch (e) {
      case ScriptEvent::PlaceOn: return Family::Supporter;
      case ScriptEvent::PutInto:
      case ScriptEvent::TakeOut: return Family::Container;
      default: return Family::Adjacent;
    }
  };
  bool put_into_seen = false;
  for (auto e : script.events) {
    if (e == ScriptEvent::OccludePassBehind) {
      passerby = true;
      continue;
    }
    if (e == ScriptEvent::TakeOut && !put_into_seen) throw UsageError("synthetic: take-out requires an earlier put-into");
    if (e == ScriptEvent::PutInto) {
      if (put_into_seen) throw UsageError("synthetic: only one put-into per script");
      put_into_seen = true;
    }
    const Family f = family_of(e);
    if (std::none_of(layouts.begin(), layouts.end(), [&](const FamilyLayout& l) { return l.family == f; })) {
      if (layouts.size() == 2) throw UsageError("synthetic: at most two object families per scene");
      FamilyLayout l;
      l.family = f;
      l.origin = static_cast<int>(layouts.size()) * kSlotWidth;
      layouts.push_back(l);
    }
  }

  Snapshot start;
  std::vector<Actor> actors;
  const Rect hand_home{kWidth / 2 - 2, 4, 3, 4};
  for (auto& l : layouts) {
    const int o = l.origin;
    // Depth bases are far apart so unrelated families never overlap in depth.
    l.base = 1000.0 + 20.0 * u * static_cast<int>(l.family) + uniform(0.0, 2.0 * u);
    switch (l.family) {
      case Family::Container: {
        const int bx = o + uniform_int(18, 24);
        l.bowl = {bx, 50, 20, 14};
        l.ball_out = {bx - 12, 55, 5, 5};
        l.ball_in = {bx + uniform_int(6, 9), 55, 5, 5};
        l.ball_away = {bx + 26, 55, 5, 5};
        start.rects["bowl"] = l.bowl;
        start.rects["ball"] = l.ball_out;
        actors.push_back({"bowl", EntityKind::Object, 0.9});
        actors.push_back({"ball", EntityKind::Object, 0.95});
        break;
      }
      case Family::Supporter: {
        const int tx = o + uniform_int(8, 12);
        l.table = {tx, 60, 44, 20};
        const int cx = tx + uniform_int(6, 30);
        l.cup_air = {cx, 30, 6, 8};
        l.cup_rest = {cx, 54, 6, 8};
        start.rects["table"] = l.table;
        start.rects["cup"] = l.cup_air;
        actors.push_back({"table", EntityKind::Object, 0.9});
        actors.push_back({"cup", EntityKind::Object, 0.95});
        break;
      }
      case Family::Adjacent: {
        const int ax = o + uniform_int(6, 12);
        l.box_a = {ax, 60, 8, 8};
        l.box_a_pushed = {ax + 12, 60, 8, 8};
        l.box_b = {ax + 18, 58, 8, 10};
        start.rects["box_a"] = l.box_a;
        start.rects["box_b"] = l.box_b;
        actors.push_back({"box_a", EntityKind::Object, 0.9});
        actors.push_back({"box_b", EntityKind::Object, 0.85});
        break;
      }
    }
  }
  if (passerby) {
    start.rects["passerby"] = {0, 44, 4, 48};
    actors.push_back({"passerby", EntityKind::Object, 0.6});
  }
  start.rects["hand"] = hand_home;
  actors.push_back({"hand", EntityKind::HumanPart, 0.99});

  auto layout_for = [&](Family f) -> FamilyLayout& {
    return *std::find_if(layouts.begin(), layouts.end(), [&](const FamilyLayout& l) { return l.family == f; });
  };

  Timeline tl(start);
  tl.idle(uniform_int(3, 5));

  // Carries `object` to `target` with the hand attached; with early release
  // the hand lets go halfway and the object finishes the motion alone.
  auto carry = [&](const std::string& object, const Rect& target, bool from_left) {
    const Rect hand = tl.current().rects.at("hand");
    auto grip = [&](const Rect& r) { return from_left ? grasp_left(r, hand) : grasp_top(r, hand); };
    tl.move({{"hand", grip(tl.current().rects.at(object))}}, uniform_int(5, 8));
    const int frames = uniform_int(8, 12);
    const Rect from = tl.current().rects.at(object);
    const int held = script.early_release ? frames / 2 : frames;
    for (int k = 1; k <= frames; ++k) {
      const double t = static_cast<double>(k) / frames;
      Rect r = from;
      r.x = static_cast<int>(std::lround(from.x + t * (target.x - from.x)));
      r.y = static_cast<int>(std::lround(from.y + t * (target.y - from.y)));
      auto& snap = tl.current();
      snap.rects[object] = r;
      if (k <= held) {
        snap.rects["hand"] = grip(r);
      } else {
        Rect h = snap.rects["hand"];
        h.y = std::max(hand_home.y, h.y - 3);
        snap.rects["hand"] = h;
      }
      tl.frames().push_back(snap);
    }
    tl.move({{"hand", hand_home}}, uniform_int(4, 7));
    if (script.regrasp) {
      tl.idle(uniform_int(1, 3));
      tl.move({{"hand", grip(tl.current().rects.at(object))}}, uniform_int(3, 5));
      tl.idle(2);
      tl.move({{"hand", hand_home}}, uniform_int(3, 5));
    }
  };

  for (auto e : script.events) {
    switch (e) {
      case ScriptEvent::PutInto: carry("ball", layout_for(Family::Container).ball_in, false); break;
      case ScriptEvent::TakeOut: carry("ball", layout_for(Family::Container).ball_away, false); break;
      case ScriptEvent::PlaceOn: carry("cup", layout_for(Family::Supporter).cup_rest, false); break;
      case ScriptEvent::PushAdjacent: carry("box_a", layout_for(Family::Adjacent).box_a_pushed, true); break;
      case ScriptEvent::OccludePassBehind: break;
    }
    tl.idle(uniform_int(2, 4));
  }
  tl.idle(uniform_int(4, 6));

  auto& frames = tl.frames();
  const int frame_count = static_cast<int>(frames.size());
  if (passerby) {
    for (int t = 0; t < frame_count; ++t) {
      Rect r = frames[static_cast<std::size_t>(t)].rects["passerby"];
      r.x = static_cast<int>(std::lround(static_cast<double>(t) * (kWidth - r.w) / std::max(1, frame_count - 1)));
      frames[static_cast<std::size_t>(t)].rects["passerby"] = r;
    }
  }
  for (auto& f : frames)
    if (auto it = f.rects.find("cup"); it != f.rects.end())
      f.cup_resting = it->second.overlaps(layout_for(Family::Supporter).table);

  // --- rasterize --------------------------------------------------------------
  const double far_base = 1000.0 + 100.0 * u;
  auto depth_at = [&](const std::string& id, const Snapshot& snap, int lx, int ly) -> double {
    const Rect& r = snap.rects.at(id);
    const double fy = r.h > 1 ? static_cast<double>(ly) / (r.h - 1) : 0.0;
    if (id == "bowl") {
      const double b = layout_for(Family::Container).base;
      if (lx == 0 || ly == 0 || lx == r.w - 1 || ly == r.h - 1) return b;
      if (lx < 4 || ly < 4 || lx >= r.w - 4 || ly >= r.h - 4) return b + bowl_depth;
      return b + 0.5 * u;
    }
    if (id == "ball") {
      const double b = layout_for(Family::Container).base;
      const double cx = (r.w - 1) / 2.0, cy = (r.h - 1) / 2.0;
      const double dist = std::hypot(lx - cx, ly - cy) / std::hypot(cx, cy);
      return b + ball_mid - ball_range / 2 + ball_range * dist;
    }
    if (id == "table") return layout_for(Family::Supporter).base + 5.0 * u * (1.0 - fy);
    if (id == "cup") {
      const double b = layout_for(Family::Supporter).base;
      return snap.cup_resting ? b + 4.5 * u + 0.75 * u * fy : b - 3.0 * u + 0.75 * u * fy;
    }
    if (id == "box_a") return layout_for(Family::Adjacent).base + 0.75 * u * fy;
    if (id == "box_b") return layout_for(Family::Adjacent).base + 0.4 * u + 0.75 * u * fy;
    if (id == "passerby") return far_base + 0.5 * u * fy;
    return 0.0;
  };

  SyntheticScene out;
  SceneSequence& scene = out.scene;
  scene.id = scene_id;
  scene.width = kWidth;
  scene.height = kHeight;
  scene.frame_count = frame_count;
  scene.fps = 15.0;
  std::uniform_real_distribution<double> noise(-script.depth_jitter, script.depth_jitter);
  for (const auto& a : actors) {
    Entity e;
    e.id = a.id;
    e.kind = a.kind;
    for (int t = 0; t < frame_count; ++t) {
      const Snapshot& snap = frames[static_cast<std::size_t>(t)];
      const Rect& r = snap.rects.at(a.id);
      if (r.x < 0 || r.y < 0 || r.x + r.w > kWidth || r.y + r.h > kHeight)
        throw UsageError("synthetic: entity '" + a.id + "' leaves the frame");
      std::vector<std::uint8_t> px(static_cast<std::size_t>(kWidth) * kHeight, 0);
      DepthSample depth;
      for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x) px[static_cast<std::size_t>(y) * kWidth + x] = 1;
      // Depth values follow row-major foreground order.
      for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x) {
          double d = depth_at(a.id, snap, x - r.x, y - r.y);
          if (script.depth_jitter > 0) d += noise(rng);
          depth.values.push_back(d);
        }
      EntityObservation o;
      o.frame = t;
      o.bbox = r.box();
      o.score = a.score;
      o.mask = MaskRLE::encode(kWidth, kHeight, px);
      if (a.kind == EntityKind::Object) o.depth = std::move(depth);
      e.observations.push_back(std::move(o));
    }
    scene.entities.push_back(std::move(e));
  }
  validate_scene(scene);

  // --- expected relations -----------------------------------------------------
  std::vector<std::string> objects;
  for (const auto& a : actors)
    if (a.kind == EntityKind::Object) objects.push_back(a.id);
  for (int t = 0; t < frame_count; ++t) {
    const Snapshot& snap = frames[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < objects.size(); ++i)
      for (std::size_t j = i + 1; j < objects.size(); ++j) {
        const auto& a = objects[i];
        const auto& b = objects[j];
        DisrRelation rel = DisrRelation::NI;
        if (a == "bowl" && b == "ball" && snap.rects.at(b).inside(snap.rects.at(a))) rel = DisrRelation::Cont;
        if (a == "table" && b == "cup" && snap.cup_resting) rel = DisrRelation::Sup;
        if (a == "box_a" && b == "box_b" && snap.rects.at(a).overlaps(snap.rects.at(b))) rel = DisrRelation::Adj;
        out.relation_key.push_back({t, a, b, rel});
      }
  }

  for (const auto& l : layouts) {
    switch (l.family) {
      case Family::Container:
        out.groundtruth.push_back({scene_id, "bowl", "ball", {"can-contain"}});
        out.groundtruth.push_back({scene_id, "ball", "bowl", {"containable"}});
        break;
      case Family::Supporter:
        out.groundtruth.push_back({scene_id, "table", "cup", {"can-support"}});
        out.groundtruth.push_back({scene_id, "cup", "table", {"supportable"}});
        break;
      case Family::Adjacent:
        out.groundtruth.push_back({scene_id, "box_a", "box_b", {"adjacent"}});
        out.groundtruth.push_back({scene_id, "box_b", "box_a", {"adjacent"}});
        break;
    }
  }
  return out;
}

std::vector<SyntheticScene> generate_corpus(int per_class, std::uint64_t seed, const ConvexityParams& params) {
  std::vector<SyntheticScene> out;
  std::mt19937_64 rng(seed);
  const struct {
    InteractionClass cls;
    const char* name;
  } classes[] = {{InteractionClass::Containment, "containment"},
                 {InteractionClass::Support, "support"},
                 {InteractionClass::Adjacency, "adjacency"}};
  for (const auto& c : classes) {
    for (int i = 0; i < per_class; ++i) {
      SyntheticScript s;
      s.params = params;
      switch (c.cls) {
        case InteractionClass::Containment: s.events = {ScriptEvent::PutInto}; break;
        case InteractionClass::Support: s.events = {ScriptEvent::PlaceOn}; break;
        case InteractionClass::Adjacency: s.events = {ScriptEvent::PushAdjacent}; break;
      }
      if (std::bernoulli_distribution(0.5)(rng)) s.events.push_back(ScriptEvent::OccludePassBehind);
      s.depth_jitter = std::uniform_real_distribution<double>(0.0, 0.05 * params.thresh_convex)(rng);
      char id[64];
      std::snprintf(id, sizeof id, "%s_%02d", c.name, i);
      out.push_back(generate_synthetic(s, rng(), id));
    }
  }
  return out;
}

void write_groundtruth(const std::string& path, const std::vector<GroundTruthRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write groundtruth " + path);
  for (const auto& r : records) {
    out << r.scene_id << '\t' << r.anchor << '\t' << r.partner << '\t';
    for (std::size_t i = 0; i < r.labels.size(); ++i) out << (i ? "," : "") << r.labels[i];
    out << '\n';
  }
}

std::vector<GroundTruthRecord> read_groundtruth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open groundtruth " + path);
  std::vector<GroundTruthRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    GroundTruthRecord r;
    std::string labels;
    if (cols.size() == 4) {
      r.scene_id = cols[0];
      r.anchor = cols[1];
      r.partner = cols[2];
      labels = cols[3];
    } else if (cols.size() == 2) {
      // graph id form: scene/anchor/partner
      const auto a = cols[0].find('/');
      const auto b = cols[0].rfind('/');
      if (a == std::string::npos || a == b)
        throw DataError(path + ":" + std::to_string(lineno) + ": graph id must be scene/anchor/partner");
      r.scene_id = cols[0].substr(0, a);
      r.anchor = cols[0].substr(a + 1, b - a - 1);
      r.partner = cols[0].substr(b + 1);
      labels = cols[1];
    } else {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 2 or 4 tab-separated columns");
    }
    std::stringstream ls(labels);
    std::string l;
    while (std::getline(ls, l, ','))
      if (!l.empty()) r.labels.push_back(l);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace affgraph
