#include "affgraph/qsr.hpp"

#include <algorithm>

namespace affgraph {

std::string_view to_string(Rcc2Relation r) { return r == Rcc2Relation::C ? "C" : "DC"; }

std::string_view to_string(DisrRelation r) {
  switch (r) {
    case DisrRelation::Sup: return "Sup";
    case DisrRelation::Supi: return "Supi";
    case DisrRelation::Cont: return "Cont";
    case DisrRelation::Conti: return "Conti";
    case DisrRelation::Adj: return "Adj";
    case DisrRelation::NI: return "NI";
  }
  return "NI";
}

std::string_view to_string(Rcc5OnRelation r) {
  switch (r) {
    case Rcc5OnRelation::DR: return "DR";
    case Rcc5OnRelation::PO: return "PO";
    case Rcc5OnRelation::PP: return "PP";
    case Rcc5OnRelation::PPi: return "PPi";
    case Rcc5OnRelation::EQ: return "EQ";
    case Rcc5OnRelation::On: return "On";
    case Rcc5OnRelation::Oni: return "Oni";
  }
  return "DR";
}

DisrRelation converse(DisrRelation r) {
  switch (r) {
    case DisrRelation::Sup: return DisrRelation::Supi;
    case DisrRelation::Supi: return DisrRelation::Sup;
    case DisrRelation::Cont: return DisrRelation::Conti;
    case DisrRelation::Conti: return DisrRelation::Cont;
    default: return r;
  }
}

Rcc5OnRelation converse(Rcc5OnRelation r) {
  switch (r) {
    case Rcc5OnRelation::PP: return Rcc5OnRelation::PPi;
    case Rcc5OnRelation::PPi: return Rcc5OnRelation::PP;
    case Rcc5OnRelation::On: return Rcc5OnRelation::Oni;
    case Rcc5OnRelation::Oni: return Rcc5OnRelation::On;
    default: return r;
  }
}

Rcc2Relation rcc2(const MaskRLE& a, const MaskRLE& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DataError("rcc2: masks on different grids");
  // Walk both run lists in lockstep looking for a shared foreground span.
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::size_t ia = 0, ib = 0;
  std::uint64_t end_a = ra.empty() ? 0 : ra[0], end_b = rb.empty() ? 0 : rb[0];
  std::uint64_t pos = 0;
  const std::uint64_t total = static_cast<std::uint64_t>(a.width()) * a.height();
  while (pos < total) {
    while (ia < ra.size() && end_a <= pos) {
      ++ia;
      if (ia < ra.size()) end_a += ra[ia];
    }
    while (ib < rb.size() && end_b <= pos) {
      ++ib;
      if (ib < rb.size()) end_b += rb[ib];
    }
    if (ia >= ra.size() || ib >= rb.size()) break;
    if (ia % 2 == 1 && ib % 2 == 1) return Rcc2Relation::C;
    pos = std::min(end_a, end_b);
  }
  return Rcc2Relation::DC;
}

Rcc2Result rcc2(const EntityObservation& a, const EntityObservation& b) {
  if (a.mask && b.mask) return {rcc2(*a.mask, *b.mask), false};
  return {overlap_2d(a.bbox, b.bbox) ? Rcc2Relation::C : Rcc2Relation::DC, true};
}

bool overlap_2d(const BoundingBox& a, const BoundingBox& b) { return intersection_area(a, b) > 0.0; }

bool part_2d(const BoundingBox& a, const BoundingBox& b) {
  return a.xmin >= b.xmin && a.xmax <= b.xmax && a.ymin >= b.ymin && a.ymax <= b.ymax;
}

bool on(const BoundingBox& a, const BoundingBox& b) {
  // y-up original: ymax_a >= ymax_b (top edges), ymin_a >= ymin_b (bottom
  // edges). In y-down coordinates "higher" means smaller y.
  return overlap_2d(a, b) && a.ymin <= b.ymin && a.ymax <= b.ymax && a.xmax <= b.xmax && a.xmin >= b.xmin;
}

bool dpo(const DepthRange& a, const DepthRange& b) {
  return (a.dmax >= b.dmin && a.dmax < b.dmax && a.dmin < b.dmin) ||
         (b.dmax >= a.dmin && b.dmax < a.dmax && b.dmin < a.dmin);
}

bool dpp(const DepthRange& a, const ConcavityBounds& b) {
  return a.dmax > b.dc_min && a.dmax <= b.dc_max && a.dmin >= b.dc_min && a.dmin < b.dc_max;
}

namespace {

// Sup(x, y) = (DPO(x,y) and Surface(x)) or On(y, x)
bool supports(const ObjectFrameState& x, const ObjectFrameState& y) {
  const bool depth_part = x.depth && y.depth && x.type == ConvexityType::Surface && dpo(*x.depth, *y.depth);
  return depth_part || on(y.bbox, x.bbox);
}

// Cont(x, y) = P(y, x) and Concave(x) and DPP(y, x)
bool contains(const ObjectFrameState& x, const ObjectFrameState& y) {
  if (x.type != ConvexityType::Concave || !part_2d(y.bbox, x.bbox)) return false;
  if (!y.depth || !x.bounds) return false;
  return dpp(*y.depth, *x.bounds);
}

}  // namespace

DisrPredicates disr_predicates(const PairFrameContext& ctx) {
  const auto& a = ctx.first;
  const auto& b = ctx.second;
  DisrPredicates p;
  p.sup = supports(a, b);
  p.sup_inv = supports(b, a);
  p.cont = contains(a, b);
  p.cont_inv = contains(b, a);
  const bool depth_overlap = a.depth && b.depth && dpo(*a.depth, *b.depth);
  p.adj = overlap_2d(a.bbox, b.bbox) && depth_overlap && !p.cont && !p.cont_inv && !p.sup && !p.sup_inv;
  return p;
}

DisrResult disr(const PairFrameContext& ctx) {
  const DisrPredicates p = disr_predicates(ctx);
  DisrResult r;
  r.approximate = !ctx.first.depth || !ctx.second.depth;
  if (p.cont) r.forward = DisrRelation::Cont;
  else if (p.cont_inv) r.forward = DisrRelation::Conti;
  else if (p.sup) r.forward = DisrRelation::Sup;
  else if (p.sup_inv) r.forward = DisrRelation::Supi;
  else if (p.adj) r.forward = DisrRelation::Adj;
  else r.forward = DisrRelation::NI;
  r.backward = converse(r.forward);
  return r;
}

Rcc5OnRelation rcc5_on(const BoundingBox& a, const BoundingBox& b, const Rcc5OnOptions& opts) {
  Rcc5OnRelation base;
  if (a == b) base = Rcc5OnRelation::EQ;
  else if (!overlap_2d(a, b)) base = Rcc5OnRelation::DR;
  else if (part_2d(a, b)) base = Rcc5OnRelation::PP;
  else if (part_2d(b, a)) base = Rcc5OnRelation::PPi;
  else base = Rcc5OnRelation::PO;
  if (!opts.with_on) return base;
  if (!opts.on_overrides && base != Rcc5OnRelation::PO) return base;
  if (on(a, b)) return Rcc5OnRelation::On;
  if (on(b, a)) return Rcc5OnRelation::Oni;
  return base;
}

}  // namespace affgraph
