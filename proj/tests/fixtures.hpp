#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "affgraph/scene.hpp"

namespace fixture {

/// Observation covering the pixel rectangle [x0,x1) x [y0,y1) with a depth
/// chosen per pixel (no depth when `depth` is empty).
inline affgraph::EntityObservation rect(int frame, int width, int height, int x0, int y0, int x1, int y1,
                                        std::function<double(int, int)> depth = {}, double score = 1.0) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height, 0);
  affgraph::DepthSample d;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) px[static_cast<std::size_t>(y) * width + x] = 1;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (px[static_cast<std::size_t>(y) * width + x] && depth) d.values.push_back(depth(x, y));
  affgraph::EntityObservation o;
  o.frame = frame;
  o.bbox = {double(x0), double(y0), double(x1), double(y1)};
  o.mask = affgraph::MaskRLE::encode(width, height, px);
  if (depth) o.depth = d;
  o.score = score;
  return o;
}

inline std::function<double(int, int)> flat(double v) {
  return [v](int, int) { return v; };
}

inline affgraph::Entity entity(std::string id, affgraph::EntityKind kind,
                               std::vector<affgraph::EntityObservation> obs) {
  return {std::move(id), kind, std::move(obs)};
}

inline affgraph::SceneSequence scene(int width, int height, int frames, std::vector<affgraph::Entity> ents) {
  affgraph::SceneSequence s;
  s.id = "fixture";
  s.width = width;
  s.height = height;
  s.frame_count = frames;
  s.entities = std::move(ents);
  return s;
}

}  // namespace fixture
