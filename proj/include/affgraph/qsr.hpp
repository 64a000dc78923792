#pragma once

#include <optional>
#include <string_view>

#include "affgraph/convexity.hpp"
#include "affgraph/scene.hpp"

namespace affgraph {

enum class Rcc2Relation { C, DC };
enum class DisrRelation { Sup, Supi, Cont, Conti, Adj, NI };
enum class Rcc5OnRelation { DR, PO, PP, PPi, EQ, On, Oni };

std::string_view to_string(Rcc2Relation r);
std::string_view to_string(DisrRelation r);
std::string_view to_string(Rcc5OnRelation r);

DisrRelation converse(DisrRelation r);
Rcc5OnRelation converse(Rcc5OnRelation r);

struct Rcc2Result {
  Rcc2Relation relation = Rcc2Relation::DC;
  bool approximate = false;  // decided on boxes because a mask was missing
};

/// Connected iff the masks share at least one foreground pixel.
Rcc2Relation rcc2(const MaskRLE& a, const MaskRLE& b);
/// Mask test when both masks exist, otherwise box overlap (flagged).
Rcc2Result rcc2(const EntityObservation& a, const EntityObservation& b);

/// Boxes share interior area.
bool overlap_2d(const BoundingBox& a, const BoundingBox& b);
/// `a` lies inside `b`, boundary contact allowed.
bool part_2d(const BoundingBox& a, const BoundingBox& b);

/// `a` rests on `b`: overlapping, x-extent of `a` inside `b`, and both the
/// top and bottom edges of `a` at or above those of `b` (image y-down).
bool on(const BoundingBox& a, const BoundingBox& b);

struct DepthRange {
  double dmin = 0;
  double dmax = 0;
};

/// Staggered depth overlap. Symmetric.
bool dpo(const DepthRange& a, const DepthRange& b);
/// Depth range of `a` inside the concave band of `b`.
bool dpp(const DepthRange& a, const ConcavityBounds& b);

/// Everything the DiSR predicates need to know about one object at one frame.
struct ObjectFrameState {
  BoundingBox bbox;
  std::optional<DepthRange> depth;
  std::optional<ConcavityBounds> bounds;
  ConvexityType type = ConvexityType::Convex;
};

struct PairFrameContext {
  ObjectFrameState first;
  ObjectFrameState second;
};

struct DisrResult {
  DisrRelation forward = DisrRelation::NI;   // (first, second)
  DisrRelation backward = DisrRelation::NI;  // (second, first)
  bool approximate = false;                  // some depth input was missing
};

/// Raw DiSR predicates for one ordered pair, evaluated independently.
struct DisrPredicates {
  bool sup = false;       // Sup(first, second)
  bool sup_inv = false;   // Sup(second, first)
  bool cont = false;      // Cont(first, second)
  bool cont_inv = false;  // Cont(second, first)
  bool adj = false;
};

DisrPredicates disr_predicates(const PairFrameContext& ctx);

/// Resolves the raw predicates to one relation per direction using the
/// priority Cont > Conti > Sup > Supi > Adj > NI.
DisrResult disr(const PairFrameContext& ctx);

struct Rcc5OnOptions {
  bool with_on = true;
  /// When false, On/Oni only refine partial overlap instead of overriding
  /// every base relation.
  bool on_overrides = true;
};

Rcc5OnRelation rcc5_on(const BoundingBox& a, const BoundingBox& b, const Rcc5OnOptions& opts = {});

}  // namespace affgraph
