#include "affgraph/convexity.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>

namespace affgraph {

std::string_view to_string(ConvexityType t) {
  switch (t) {
    case ConvexityType::Concave: return "concave";
    case ConvexityType::Surface: return "surface";
    case ConvexityType::Convex: return "convex";
  }
  return "convex";
}

std::size_t BinaryGrid::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

std::size_t ContourTree::hole_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const ContourNode& n) { return n.hole; }));
}

namespace {

constexpr std::array<std::array<int, 2>, 4> kN4{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<std::array<int, 2>, 8> kN8{
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

}  // namespace

ContourTree contour_hierarchy(const BinaryGrid& region, const ContourOptions& opts) {
  // Work on a copy padded with one background pixel so that all background
  // touching the border forms a single component (the frame).
  const int W = region.width + 2;
  const int H = region.height + 2;
  std::vector<std::uint8_t> fg(static_cast<std::size_t>(W) * H, 0);
  for (int y = 0; y < region.height; ++y)
    for (int x = 0; x < region.width; ++x)
      fg[static_cast<std::size_t>(y + 1) * W + x + 1] = region.at(x, y) ? 1 : 0;

  std::vector<int> comp(fg.size(), -1);
  std::vector<bool> comp_is_fg;
  std::vector<std::vector<std::size_t>> comp_pixels;

  for (std::size_t start = 0; start < fg.size(); ++start) {
    if (comp[start] >= 0) continue;
    const int label = static_cast<int>(comp_is_fg.size());
    const bool is_fg = fg[start] != 0;
    comp_is_fg.push_back(is_fg);
    comp_pixels.emplace_back();
    std::deque<std::size_t> queue{start};
    comp[start] = label;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      comp_pixels.back().push_back(p);
      const int px = static_cast<int>(p % W), py = static_cast<int>(p / W);
      auto visit = [&](int dx, int dy) {
        const int nx = px + dx, ny = py + dy;
        if (nx < 0 || ny < 0 || nx >= W || ny >= H) return;
        const std::size_t q = static_cast<std::size_t>(ny) * W + nx;
        if (comp[q] >= 0 || (fg[q] != 0) != is_fg) return;
        comp[q] = label;
        queue.push_back(q);
      };
      if (is_fg)
        for (auto [dx, dy] : kN8) visit(dx, dy);
      else
        for (auto [dx, dy] : kN4) visit(dx, dy);
    }
  }

  // Region adjacency (4-neighbourhood across the fg/bg boundary). Under the
  // 8/4 connectivity pairing this graph is a tree rooted at the outer frame.
  const std::size_t nc = comp_is_fg.size();
  std::vector<std::vector<int>> adj(nc);
  for (std::size_t p = 0; p < fg.size(); ++p) {
    const int px = static_cast<int>(p % W), py = static_cast<int>(p / W);
    for (auto [dx, dy] : {std::array<int, 2>{1, 0}, std::array<int, 2>{0, 1}}) {
      const int nx = px + dx, ny = py + dy;
      if (nx >= W || ny >= H) continue;
      const std::size_t q = static_cast<std::size_t>(ny) * W + nx;
      if (comp[p] != comp[q]) {
        adj[static_cast<std::size_t>(comp[p])].push_back(comp[q]);
        adj[static_cast<std::size_t>(comp[q])].push_back(comp[p]);
      }
    }
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  const std::size_t reference = opts.reference_area ? opts.reference_area : region.count();
  const double min_area = opts.noise_ratio * static_cast<double>(reference);

  auto make_region = [&](std::size_t c) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(region.width) * region.height, 0);
    for (std::size_t p : comp_pixels[c]) {
      const int x = static_cast<int>(p % W) - 1, y = static_cast<int>(p / W) - 1;
      if (x >= 0 && y >= 0 && x < region.width && y < region.height)
        px[static_cast<std::size_t>(y) * region.width + x] = 1;
    }
    return MaskRLE::encode(std::max(region.width, 1), std::max(region.height, 1),
                           region.width > 0 && region.height > 0 ? std::span<const std::uint8_t>(px)
                                                                  : std::span<const std::uint8_t>());
  };

  ContourTree tree;
  ContourNode root;
  root.id = 0;
  root.area = static_cast<std::size_t>(region.width) * region.height;
  tree.nodes.push_back(std::move(root));

  // Breadth-first walk from the frame component (index 0 is the padded corner).
  const int frame_comp = comp[0];
  std::vector<int> node_of(nc, -1);
  std::vector<bool> seen(nc, false);
  node_of[static_cast<std::size_t>(frame_comp)] = 0;
  seen[static_cast<std::size_t>(frame_comp)] = true;
  std::deque<int> queue{frame_comp};
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (int n : adj[static_cast<std::size_t>(c)]) {
      if (seen[static_cast<std::size_t>(n)]) continue;
      seen[static_cast<std::size_t>(n)] = true;
      const int parent_node = node_of[static_cast<std::size_t>(c)];
      if (parent_node < 0) continue;  // inside a pruned subtree
      const std::size_t area = comp_pixels[static_cast<std::size_t>(n)].size();
      if (static_cast<double>(area) < min_area) {
        queue.push_back(n);
        continue;
      }
      ContourNode node;
      node.id = static_cast<int>(tree.nodes.size());
      node.parent = parent_node;
      node.hole = !comp_is_fg[static_cast<std::size_t>(n)];
      node.area = area;
      node.region = make_region(static_cast<std::size_t>(n));
      tree.nodes[static_cast<std::size_t>(parent_node)].children.push_back(node.id);
      node_of[static_cast<std::size_t>(n)] = node.id;
      tree.nodes.push_back(std::move(node));
      queue.push_back(n);
    }
  }
  return tree;
}

ConvexityType object_convexity(std::span<const double> sorted_depths, const BinaryGrid& deep_region,
                               const ConvexityParams& params) {
  if (sorted_depths.empty()) throw DataError("object_convexity: empty depth distribution");
  const auto [lo, hi] = std::minmax_element(sorted_depths.begin(), sorted_depths.end());
  const double range = *hi - *lo;

  auto has_child_contour = [&] {
    ContourOptions opts;
    opts.noise_ratio = params.noise_ratio;
    opts.reference_area = sorted_depths.size();
    return contour_hierarchy(deep_region, opts).hole_count() > 0;
  };

  if (params.alg1_literal) {
    if (range < params.thresh_convex && has_child_contour()) return ConvexityType::Concave;
    if (range < params.thresh_convex) return ConvexityType::Surface;
    return ConvexityType::Convex;
  }
  if (range > params.thresh_convex) return has_child_contour() ? ConvexityType::Concave : ConvexityType::Surface;
  return ConvexityType::Convex;
}

ConcavityBounds convexity_depth(std::span<const double> sorted_depths, ConvexityType type, int sections,
                                int deep_sections) {
  if (sorted_depths.empty()) throw DataError("convexity_depth: empty depth distribution");
  if (!(deep_sections >= 1 && deep_sections < sections))
    throw UsageError("convexity_depth requires 1 <= n < h");
  const auto [lo, hi] = std::minmax_element(sorted_depths.begin(), sorted_depths.end());
  const double dmin = *lo, dmax = *hi;
  if (type != ConvexityType::Concave) return {dmin, dmax};
  const double slice = (dmax - dmin) / sections;
  return {dmax - deep_sections * slice, dmax};
}

ConvexityType track_convexity(std::span<const ConvexityType> per_frame) {
  if (per_frame.empty()) throw DataError("track_convexity: no classifications");
  std::array<std::size_t, 3> votes{};
  for (auto t : per_frame) ++votes[static_cast<std::size_t>(t)];
  // Enum order is the tie-break priority.
  std::size_t best = 0;
  for (std::size_t i = 1; i < votes.size(); ++i)
    if (votes[i] > votes[best]) best = i;
  return static_cast<ConvexityType>(best);
}

BinaryGrid deep_region(const SemanticDepthMap& map, std::string_view entity_id, double dmin,
                       double thresh_convex) {
  auto it = std::find(map.entity_ids.begin(), map.entity_ids.end(), entity_id);
  if (it == map.entity_ids.end()) throw DataError("unknown entity '" + std::string(entity_id) + "'");
  const auto index = static_cast<std::int32_t>(it - map.entity_ids.begin());
  int x0 = std::numeric_limits<int>::max(), y0 = x0, x1 = -1, y1 = -1;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.owner_at(x, y) == index) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) return {};
  BinaryGrid grid(x1 - x0 + 1, y1 - y0 + 1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * map.width + x;
      if (map.owner[p] == index && !DepthSample::is_missing(map.depth[p]) && map.depth[p] > dmin + thresh_convex)
        grid.set(x - x0, y - y0);
    }
  return grid;
}

FrameConvexity classify_object_frame(const SemanticDepthMap& map, std::string_view entity_id,
                                     const ConvexityParams& params) {
  FrameConvexity out;
  out.depth = object_depth_summary(map, entity_id);
  const BinaryGrid grid = deep_region(map, entity_id, out.depth.dmin, params.thresh_convex);
  out.type = object_convexity(out.depth.values, grid, params);
  return out;
}

}  // namespace affgraph
