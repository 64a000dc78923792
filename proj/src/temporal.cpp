#include "affgraph/temporal.hpp"

#include "affgraph/error.hpp"

namespace affgraph {

std::string_view to_string(Calculus c) {
  switch (c) {
    case Calculus::DiSR: return "DiSR";
    case Calculus::RCC2: return "RCC2";
    case Calculus::RCC5On: return "RCC5On";
  }
  return "DiSR";
}

Calculus calculus_from_string(std::string_view s) {
  if (s == "DiSR" || s == "disr") return Calculus::DiSR;
  if (s == "RCC2" || s == "rcc2") return Calculus::RCC2;
  if (s == "RCC5On" || s == "rcc5_on") return Calculus::RCC5On;
  throw UsageError("unknown calculus '" + std::string(s) + "'");
}

std::string_view to_string(AllenRelation r) {
  switch (r) {
    case AllenRelation::Before: return "<";
    case AllenRelation::After: return ">";
    case AllenRelation::Meets: return "m";
    case AllenRelation::MetBy: return "mi";
    case AllenRelation::Overlaps: return "o";
    case AllenRelation::OverlappedBy: return "oi";
    case AllenRelation::Starts: return "s";
    case AllenRelation::StartedBy: return "si";
    case AllenRelation::During: return "d";
    case AllenRelation::Contains: return "di";
    case AllenRelation::Finishes: return "f";
    case AllenRelation::FinishedBy: return "fi";
    case AllenRelation::Equals: return "=";
  }
  return "=";
}

AllenRelation converse(AllenRelation r) {
  if (r == AllenRelation::Equals) return r;
  const int v = static_cast<int>(r);
  return static_cast<AllenRelation>(v % 2 == 0 ? v + 1 : v - 1);
}

AllenRelation allen(const Interval& a, const Interval& b) {
  if (a.start > a.end || b.start > b.end) throw DataError("allen: interval with start > end");
  if (a.end + 1 < b.start) return AllenRelation::Before;
  if (b.end + 1 < a.start) return AllenRelation::After;
  if (a.end + 1 == b.start) return AllenRelation::Meets;
  if (b.end + 1 == a.start) return AllenRelation::MetBy;
  if (a.start == b.start && a.end == b.end) return AllenRelation::Equals;
  if (a.start == b.start) return a.end < b.end ? AllenRelation::Starts : AllenRelation::StartedBy;
  if (a.end == b.end) return a.start > b.start ? AllenRelation::Finishes : AllenRelation::FinishedBy;
  if (a.start > b.start && a.end < b.end) return AllenRelation::During;
  if (a.start < b.start && a.end > b.end) return AllenRelation::Contains;
  return a.start < b.start ? AllenRelation::Overlaps : AllenRelation::OverlappedBy;
}

namespace {

struct Run {
  std::string token;
  int start;
  int end;
};

// Absorbs short flicker runs sandwiched between two runs of the same token.
void smooth(std::vector<Run>& runs, int smoothing) {
  if (smoothing <= 0) return;
  std::vector<Run> out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    Run r = runs[i];
    if (!out.empty() && i + 1 < runs.size() && r.end - r.start + 1 <= smoothing &&
        out.back().token == runs[i + 1].token && r.token != out.back().token) {
      out.back().end = runs[i + 1].end;
      ++i;
      continue;
    }
    if (!out.empty() && out.back().token == r.token) {
      out.back().end = r.end;
      continue;
    }
    out.push_back(std::move(r));
  }
  runs = std::move(out);
}

}  // namespace

std::vector<Episode> extract_episodes(std::span<const FrameToken> relations, std::string_view first,
                                      std::string_view second, Calculus calculus, const EpisodeOptions& opts) {
  std::vector<Episode> episodes;
  if (relations.empty()) return episodes;

  // Split into segments of observed frames; a gap wider than gap_bridge ends
  // the current segment, narrower gaps extend the preceding token.
  std::vector<std::vector<Run>> segments(1);
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const auto& r = relations[i];
    if (i > 0 && r.frame <= relations[i - 1].frame)
      throw DataError("extract_episodes: frames must be strictly ascending");
    auto& seg = segments.back();
    if (!seg.empty()) {
      const int gap = r.frame - seg.back().end - 1;
      if (gap > opts.gap_bridge) {
        segments.emplace_back();
      } else if (gap > 0) {
        seg.back().end = r.frame - 1;
      }
    }
    auto& cur = segments.back();
    if (!cur.empty() && cur.back().token == r.token && cur.back().end + 1 == r.frame) {
      cur.back().end = r.frame;
    } else {
      cur.push_back({r.token, r.frame, r.frame});
    }
  }

  for (auto& seg : segments) {
    smooth(seg, opts.smoothing);
    for (auto& run : seg)
      episodes.push_back({std::string(first), std::string(second), calculus, std::move(run.token),
                          {run.start, run.end}});
  }
  return episodes;
}

}  // namespace affgraph
