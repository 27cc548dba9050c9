#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "khora/geom.hpp"

namespace khora {

struct SegRef {
  std::uint32_t strand = 0, seg = 0;
  bool operator==(const SegRef&) const = default;
  auto operator<=>(const SegRef&) const = default;
};

struct Crossing {
  Pt at;
  SegRef over, under;
};

// Annular link diagram: closed polylines around the axis (the origin),
// with every pairwise segment intersection accounted for in crossings.
struct AnnularDiagram {
  std::vector<std::vector<Pt>> strands;
  std::vector<Crossing> crossings;

  Seg segment(const SegRef& r) const;
  std::size_t total_segments() const;

  nlohmann::json to_json() const;
  static AnnularDiagram from_json(const nlohmann::json& j);
};

struct Violation {
  std::string what;
};

// Checks every diagram invariant; collects problems instead of throwing, so
// malformed geometry still produces a readable report.
std::vector<Violation> validate(const AnnularDiagram& d);
void require_valid(const AnnularDiagram& d);  // throws ValidationError

// Smallest squared distance from any crossing to the rest of the diagram:
// other crossings, the origin, polyline vertices, non-incident segments.
// Crossing disks of half that radius are pairwise disjoint and clean.
Rat min_feature_dist2(const AnnularDiagram& d);

struct StateCircles {
  std::vector<std::vector<Pt>> circles;
  std::vector<long> winding;
  std::vector<char> essential;  // = winding odd
};

// Shared combinatorics for resolving the crossings of one diagram in all
// 2^n ways: strands cut into arcs at trimmed crossing passages, with exact
// winding contributions per arc and per connector chord.
struct SmoothingPlan {
  explicit SmoothingPlan(const AnnularDiagram& d);  // d assumed valid

  struct Arc {
    std::vector<Pt> pts;  // forward polyline, first/last are trim points
    long wind = 0;
  };

  // slots at a crossing: 0 over-in, 1 over-out, 2 under-in, 3 under-out
  struct CrossEnds {
    Pt trim[4];
    std::uint32_t arc[4];     // arc attached at each slot
    std::uint8_t arc_end[4];  // 0 = its start, 1 = its finish
    std::uint8_t partner[2][4];  // partner slot under smoothing 0 / 1
  };

  std::vector<Arc> arcs;
  std::vector<CrossEnds> cross_ends;
  std::vector<std::vector<Pt>> free_loops;  // strands missing every crossing
  std::vector<long> free_winds;

  std::size_t n_crossings() const { return cross_ends.size(); }

  struct Trace {
    std::size_t circles = 0;
    std::vector<long> windings;        // per circle
    std::vector<std::uint32_t> label;  // arc -> circle id (free loops after)
  };
  Trace trace(const std::vector<int>& state) const;

  StateCircles realize(const std::vector<int>& state) const;
};

// convenience wrapper: build a plan and realize one state
StateCircles smooth(const AnnularDiagram& d, const std::vector<int>& state);

}  // namespace khora
