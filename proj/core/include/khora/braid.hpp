#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "khora/diagram.hpp"

namespace khora {

// sigma: index in [1, strands-1], sign +-1. rho: the innermost strand carries
// around the axis, sign +-1, index ignored.
struct BraidLetter {
  bool rho = false;
  int index = 0;
  int sign = +1;
  bool operator==(const BraidLetter&) const = default;
};

struct AnnularBraidWord {
  int strands = 1;
  std::vector<BraidLetter> letters;

  // "s1 s2^-1 r r^-1"; strands = 0 infers max sigma index + 1 (at least 1)
  static AnnularBraidWord parse(const std::string& text, int strands = 0);
  std::string str() const;
  // permutation of levels 1..n induced by the word (sigma letters swap)
  std::vector<int> permutation() const;
};

AnnularBraidWord free_reduce(AnnularBraidWord w);

enum class MarkovKind { conjugate, stabilize, destabilize };
struct MarkovMove {
  MarkovKind kind;
  int index = 0;  // conjugate: which sigma
  int sign = +1;  // stabilize: sign of the new sigma_n
};

AnnularBraidWord apply_markov(const AnnularBraidWord& w, const MarkovMove& m);

// Standard annular closure: strand level j runs along the square of radius j,
// braid time sweeping once around the axis counterclockwise. Each sigma letter
// contributes one crossing between neighbouring squares; each rho letter dips
// inside the innermost square and wraps the axis once. Always validates.
AnnularDiagram braid_closure(const AnnularBraidWord& w);

// How strand `to` is traversed by the image of the source strand under
// (x,y) -> (-x,-y): vertex k maps to rev ? rot - k : rot + k (mod length).
struct StrandImage {
  std::uint32_t to = 0;
  std::uint32_t rot = 0;
  bool rev = false;
};

struct PeriodicCertificate {
  bool symmetric = false;
  std::vector<StrandImage> strands;
  std::vector<std::uint32_t> crossing_pair;
  std::optional<Pt> witness;  // a point whose image the diagram is missing
};

// Is the diagram setwise invariant under the half-turn (x,y) -> (-x,-y)?
// Vertex lists must match exactly up to rotation and reversal.
PeriodicCertificate check_periodic(const AnnularDiagram& d);

// Quotient of a half-turn symmetric diagram under z -> z^2, one strand kept
// per orbit and crossings transported along the pairing. Segments are
// subdivided (up to 12 doublings) until the image is in general position.
AnnularDiagram quotient_periodic(const AnnularDiagram& d,
                                 const PeriodicCertificate& cert);
AnnularDiagram quotient_periodic(const AnnularDiagram& d);

}  // namespace khora
