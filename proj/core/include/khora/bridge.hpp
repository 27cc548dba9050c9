#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "khora/complex.hpp"
#include "khora/geom.hpp"

namespace khora {

// A bridge diagram in the plane, axis at the origin. The sorted tau list cuts
// out the horizontal bridges [tau_{2i+1}, tau_{2i}] x {0}; arcs are embedded
// polylines whose endpoints exhaust the tau points and whose interiors cross
// bridges transversally. An intravergent diagram is half-turn symmetric with
// one bridge and one arc through the origin; any other diagram must keep the
// origin off every bridge and arc.
struct PointLabel {
  std::uint32_t arc = 0, bridge = 0, index = 0;  // index counts along the arc
  std::string label;
};

struct BridgeDiagram {
  std::vector<Rat> tau;  // strictly decreasing, even count, never zero
  std::vector<std::vector<Pt>> arcs;
  bool intravergent = false;
  std::vector<PointLabel> labels;

  std::size_t n_bridges() const { return tau.size() / 2; }
  Seg bridge_seg(std::size_t i) const;  // {(tau_{2i+1},0),(tau_{2i},0)}

  nlohmann::json to_json() const;
  static BridgeDiagram from_json(const nlohmann::json& j);
};

struct BridgeCheck {
  // intravergent only: arc i maps to mirror_arc[i] under z -> -z
  std::vector<std::uint32_t> mirror_arc;
  std::uint32_t central_arc = 0;     // the arc through the origin
  std::uint32_t central_bridge = 0;  // the bridge through the origin
};

// Structural validation; throws ValidationError with a reason. The returned
// bookkeeping is meaningful only when d.intravergent.
BridgeCheck validate_bridge(const BridgeDiagram& d);

// One intersection point of an arc with a bridge. Endpoint intersections are
// shared endpoints of the two; interior ones are transversal crossings and
// get doubled when generators are enumerated. label comes from d.labels or
// is synthesized from the (arc, bridge, index) triple.
struct BridgePoint {
  std::uint32_t arc = 0, bridge = 0;
  Pt at;
  bool endpoint = false;
  std::string label;
  std::uint32_t seg = 0;  // arc segment carrying the point
  Rat t;                  // parameter in [0,1] along that segment
};

// A generator: one intersection point per arc, hitting each bridge exactly
// once. Interior points carry a doubling bit (0 = the lower of the two).
struct BridgeGenerator {
  std::vector<std::uint32_t> choice;  // per arc, index into points
  std::vector<int> bit;               // per arc: -1 endpoint, else 0/1
  std::string name;                   // concat of point tokens in arc order
};

struct GeneratorList {
  std::vector<BridgePoint> points;
  std::vector<BridgeGenerator> gens;  // sorted by name
  // intravergent: generators fixed by the symmetry (central arc pinned to
  // the origin, the rest in mirror pairs with equal bits)
  std::vector<std::uint32_t> symmetric;
  // otherwise: the endpoint intersection nearest the origin, marking the
  // type-f side of the splitting (unset when nearest is ambiguous)
  std::uint32_t distinguished = 0;
  bool has_distinguished = false;

  std::optional<std::uint32_t> find(const std::string& name) const;
};

GeneratorList enumerate_generators(const BridgeDiagram& d);

struct WindingOptions {
  // count signed crossings with the segment [far_base, origin] instead of
  // the rightgoing axis ray; for a base outside the diagram both give the
  // same value, which makes a usable independent probe
  std::optional<Pt> far_base;
};

// Twice the winding number about the axis of the loop that slides generator
// x to generator y: arc paths from x's point to y's point, closed up along
// the bridges. Only differences are meaningful at this point; see
// normalize_winding for the pinned absolute grading.
long long relative_winding(const BridgeDiagram& d, const GeneratorList& g,
                           std::uint32_t x, std::uint32_t y,
                           const WindingOptions& opt = {});

enum class ResolutionTag { none, zero, one };

// Bridge-side chain data: fixture gradings and differential entries over
// F2[U], with the U exponent of every entry forced by the winding gap
// (w(dst) - w(src)) / 2, which validation requires to be nonnegative.
struct BridgeComplex {
  BridgeDiagram diagram;
  GeneratorList gens;
  std::vector<long long> grading;  // per generator
  std::vector<long long> w;        // winding per generator
  bool w_absolute = false;         // set once normalize_winding anchored it
  ResolutionTag tag = ResolutionTag::none;

  struct Entry {
    std::uint32_t src = 0, dst = 0;
    long long uexp = 0;
  };
  std::vector<Entry> entries;

  GradedComplexF2 full() const;     // U = 1
  GradedComplexF2 annular() const;  // entries with uexp == 0
  // generator indices containing the distinguished point (type f)
  std::vector<std::uint32_t> type_f() const;
};

// data: {"gradings": {name: int, ...}, "diff": [[src, dst], ...],
//        "resolution": "zero" | "one" (optional)}
// Validates: every generator graded, arrows raise the grading by one, U
// exponents nonnegative, d^2 = 0 at U = 1, and for tagged complexes the
// type-f direction rule (zero: no winding-preserving arrow out of type f;
// one: none into type f).
BridgeComplex load_differential(const BridgeDiagram& d, const GeneratorList& g,
                                const nlohmann::json& data);

// Pins the additive constant of the winding grading by requiring the annular
// homology, block by winding value, to be symmetric under w -> -w. Falls
// back to the generator count profile when the homology vanishes. Throws
// when no shift works.
BridgeComplex normalize_winding(const BridgeComplex& c);

// Splitting along the distinguished point: C = generators of type f,
// N = the rest.
struct TypeFSplit {
  std::vector<std::uint32_t> c_part, n_part;
};
TypeFSplit typef_split(const BridgeComplex& c);

// The chain map filling the axis-moving mapping cone: identity on type-N
// generators under the name bijection, zero on type-C. Both complexes must
// share the tau pattern and generator names, c0 tagged zero and c1 tagged
// one. c_shift records the change of the C-to-N winding gap from the zero
// side to the one side; it is validated to be the constant -2.
struct AxisMap {
  GradedComplexF2 from, to;  // annular complexes, owned here
  std::vector<std::vector<std::uint32_t>> images;
  long long c_shift = -2;

  // views into this object; keep it alive while the map is in use
  ChainMapF2 chain_map() const;
};
AxisMap axis_moving_map(const BridgeComplex& c0, const BridgeComplex& c1);

// Cone of the axis-moving map against its predicted splitting: the type-f
// part of the zero side is a subcomplex, the type-f part of the one side a
// quotient complex, and the cone homology should match their direct sum with
// the quotient part moved up one degree.
struct ConeReport {
  std::map<int, std::size_t> cone_ranks;
  std::map<int, std::size_t> c0_ranks;          // type-f subcomplex, zero side
  std::map<int, std::size_t> c1_shifted_ranks;  // type-f quotient, up one
  bool split_matches = false;
  // the zigzag d_{into f} o (name bijection) o d_{out of f} at U = 1
  bool composite_vanishes = false;
};
ConeReport cone_split_check(const BridgeComplex& c0, const BridgeComplex& c1);

// Fixed-set complex of an intravergent diagram: symmetric generators with
// the central-arc doubling bit as the extra Morse direction. corr maps the
// two quotient resolutions onto the two bit classes:
//   {"zero": {c0 type-f name: symmetric name with bit 0, ...},
//    "one":  {...bit 1...},
//    "gradings": {symmetric name: int, ...},
//    "diff": [[src, dst], ...] (optional)}
// Gradings on the two sides need not line up degreewise, so the cone
// comparison is by total rank.
struct FixedSetReport {
  GradedComplexF2 complex;  // symmetric generators only
  std::map<int, std::size_t> ranks;
  std::map<int, std::size_t> cone_ranks;
  bool rank_totals_match = false;
  bool lambda_pairing_ok = false;  // bit-1 partner one degree above, each pair
  std::size_t n_lambda0 = 0, n_lambda1 = 0;
};
FixedSetReport fixed_set_complex(const BridgeDiagram& intra,
                                 const GeneratorList& intra_gens,
                                 const BridgeComplex& c0,
                                 const BridgeComplex& c1,
                                 const nlohmann::json& corr);

// Resolving the central crossing of an intravergent diagram both ways and
// passing to the z -> z^2 quotient. The resolved diagrams stay half-turn
// symmetric with the origin freed; the quotients are computed by squaring
// the symmetry-orbit representatives, refining the polylines until the
// image validates with the predicted crossing inventory.
struct CentralResolutions {
  BridgeDiagram periodic_zero, periodic_one;
  BridgeDiagram quotient_zero, quotient_one;
};
CentralResolutions central_resolutions(const BridgeDiagram& d);

// Bridge/arc incidence fingerprint, invariant under redrawing: per arc, the
// endpoint bridges and interior-crossing bridges by position rank, plus
// which arc carries the innermost endpoint. Sorted so arc order is
// immaterial.
using IncidenceSignature = std::vector<std::string>;
IncidenceSignature incidence_signature(const BridgeDiagram& d);
bool same_incidence(const BridgeDiagram& a, const BridgeDiagram& b);

}  // namespace khora
