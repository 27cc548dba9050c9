#include "khora/braid.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "khora/util.hpp"

namespace khora {

// ---------------------------------------------------------------- words

AnnularBraidWord AnnularBraidWord::parse(const std::string& text, int strands) {
  AnnularBraidWord w;
  std::istringstream in(text);
  std::string tok;
  int max_index = 0;
  while (in >> tok) {
    BraidLetter l;
    std::string base = tok;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      base = tok.substr(0, caret);
      std::string exp = tok.substr(caret + 1);
      if (exp == "-1")
        l.sign = -1;
      else if (exp != "1")
        throw ValidationError(cat("bad braid token '", tok, "'"));
    }
    if (base == "r") {
      l.rho = true;
    } else if (base.size() >= 2 && base[0] == 's') {
      std::size_t used = 0;
      try {
        l.index = std::stoi(base.substr(1), &used);
      } catch (const std::exception&) {
        throw ValidationError(cat("bad braid token '", tok, "'"));
      }
      if (used != base.size() - 1 || l.index < 1)
        throw ValidationError(cat("bad braid token '", tok, "'"));
      max_index = std::max(max_index, l.index);
    } else {
      throw ValidationError(cat("bad braid token '", tok, "'"));
    }
    w.letters.push_back(l);
  }
  w.strands = strands > 0 ? strands : std::max(1, max_index + 1);
  for (const auto& l : w.letters)
    if (!l.rho && l.index >= w.strands)
      throw ValidationError(cat("sigma index ", l.index, " needs at least ",
                                l.index + 1, " strands, have ", w.strands));
  return w;
}

std::string AnnularBraidWord::str() const {
  std::string out;
  for (const auto& l : letters) {
    if (!out.empty()) out += ' ';
    out += l.rho ? "r" : cat("s", l.index);
    if (l.sign < 0) out += "^-1";
  }
  return out;
}

std::vector<int> AnnularBraidWord::permutation() const {
  // occupant[level] = starting level of the strand currently at `level`
  std::vector<int> occupant(strands);
  for (int i = 0; i < strands; ++i) occupant[i] = i;
  for (const auto& l : letters)
    if (!l.rho) std::swap(occupant[l.index - 1], occupant[l.index]);
  std::vector<int> p(strands);
  for (int i = 0; i < strands; ++i) p[occupant[i]] = i;
  return p;
}

AnnularBraidWord free_reduce(AnnularBraidWord w) {
  std::vector<BraidLetter> out;
  for (const auto& l : w.letters) {
    if (!out.empty() && out.back().rho == l.rho && out.back().index == l.index &&
        out.back().sign == -l.sign)
      out.pop_back();
    else
      out.push_back(l);
  }
  w.letters = std::move(out);
  return w;
}

AnnularBraidWord apply_markov(const AnnularBraidWord& w, const MarkovMove& m) {
  AnnularBraidWord out = w;
  switch (m.kind) {
    case MarkovKind::conjugate: {
      if (m.index < 1 || m.index >= w.strands)
        throw ValidationError(cat("cannot conjugate by sigma_", m.index, " on ",
                                  w.strands, " strands"));
      int cs = m.sign < 0 ? -1 : +1;
      out.letters.clear();
      out.letters.push_back({false, m.index, cs});
      out.letters.insert(out.letters.end(), w.letters.begin(), w.letters.end());
      out.letters.push_back({false, m.index, -cs});
      return free_reduce(std::move(out));
    }
    case MarkovKind::stabilize:
      out.strands = w.strands + 1;
      out.letters.push_back({false, w.strands, m.sign < 0 ? -1 : +1});
      return out;
    case MarkovKind::destabilize: {
      if (w.strands < 2)
        throw ValidationError("destabilization needs at least two strands");
      int top = w.strands - 1;
      int seen = -1;
      for (std::size_t i = 0; i < w.letters.size(); ++i)
        if (!w.letters[i].rho && w.letters[i].index == top) {
          if (seen >= 0)
            throw ValidationError(
                cat("destabilization needs a unique sigma_", top, " letter"));
          seen = static_cast<int>(i);
        }
      if (seen < 0)
        throw ValidationError(cat("no sigma_", top, " letter to destabilize"));
      out.letters.erase(out.letters.begin() + seen);
      out.strands = w.strands - 1;
      return out;
    }
  }
  throw std::logic_error("unknown markov move");
}

// ------------------------------------------------------------- closure
//
// Strand level j follows the square with corners (+-j, +-j), parametrized
// counterclockwise by a fraction f in [0,1) starting at (j, 0); the point at
// fraction f is j*usq(f). Braid time runs with f, one full turn for the whole
// word, letter t acting inside the window [t/L, (t+1)/L). Each letter's
// geometry lives in a corner-free sub-window of its window, which keeps sigma
// chords inside one axis-parallel band between neighbouring squares.
//
// rho letters wrap the axis on a small square of slot-specific radius below
// 1/2, reached by spokes from the innermost square. Radii shrink as the slot
// index grows, so the only meetings among this machinery are spokes of later
// letters passing over wraps of earlier ones; consistently crossing
// "spoke over wrap" realizes the braid with depth playing the role of time.
// A positive rho closes its wrap with a kink whose late leg crosses over the
// entry spoke near radius one; a negative rho is embedded.

namespace {

const Rat kBreak[6] = {Rat(0),      Rat(1, 8), Rat(3, 8),
                       Rat(5, 8),   Rat(7, 8), Rat(1)};
const Pt kCorner[6] = {{Rat(1), Rat(0)},   {Rat(1), Rat(1)},  {Rat(-1), Rat(1)},
                       {Rat(-1), Rat(-1)}, {Rat(1), Rat(-1)}, {Rat(1), Rat(0)}};
const Rat kCornerFrac[4] = {Rat(1, 8), Rat(3, 8), Rat(5, 8), Rat(7, 8)};

// point of the unit square at fraction f in [0, 1)
Pt usq(const Rat& f) {
  for (int k = 0; k < 5; ++k)
    if (f < kBreak[k + 1]) {
      Rat t = (f - kBreak[k]) / (kBreak[k + 1] - kBreak[k]);
      return kCorner[k] + t * (kCorner[k + 1] - kCorner[k]);
    }
  throw std::logic_error("square fraction out of range");
}

struct SlotGeom {
  Rat a, b;     // corner-free action sub-window
  Rat delta;    // angular margin for rho wrap ends
  Rat radius;   // wrap radius for rho letters
};

SlotGeom slot_geom(int t, int L) {
  Rat lo(t, L), hi(t + 1, L);
  std::vector<Rat> bps{lo};
  for (const Rat& c : kCornerFrac)
    if (lo < c && c < hi) bps.push_back(c);
  bps.push_back(hi);
  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 < bps.size(); ++i)
    if (bps[i + 1] - bps[i] > bps[best + 1] - bps[best]) best = i;
  Rat g0 = bps[best], quarter = (bps[best + 1] - g0) / 4;
  SlotGeom g;
  g.a = g0 + quarter;
  g.b = bps[best + 1] - quarter;
  g.delta = quarter / 2;
  g.radius = Rat(L - t, 2 * (L + 1));
  return g;
}

enum class SegKind { track, chord_over, chord_under, spoke_in, spoke_out, wrap };

struct SegTag {
  SegKind kind = SegKind::track;
  int slot = -1;
};

struct TaggedStrand {
  std::vector<Pt> pts;
  std::vector<SegTag> tags;  // tags[i] describes the segment arriving at pts[i]
  void emit(Pt p, SegKind k, int slot) {
    pts.push_back(std::move(p));
    tags.push_back({k, slot});
  }
};

}  // namespace

AnnularDiagram braid_closure(const AnnularBraidWord& w) {
  int n = w.strands;
  if (n < 1) throw ValidationError("braid needs at least one strand");
  for (const auto& l : w.letters)
    if (!l.rho && (l.index < 1 || l.index >= n))
      throw ValidationError(cat("sigma index ", l.index, " out of range"));

  int L = static_cast<int>(w.letters.size());
  std::vector<SlotGeom> slots;
  for (int t = 0; t < L; ++t) slots.push_back(slot_geom(t, L));

  auto at_level = [](int level, const Rat& f) { return Rat(level) * usq(f); };

  std::vector<TaggedStrand> built;
  std::vector<char> used(n + 1, 0);
  for (int j0 = 1; j0 <= n; ++j0) {
    if (used[j0]) continue;
    TaggedStrand b;
    int level = j0;
    do {
      used[level] = 1;
      Rat f(0);
      for (int t = 0; t < L; ++t) {
        const BraidLetter& l = w.letters[t];
        bool acts = l.rho ? level == 1
                          : (level == l.index || level == l.index + 1);
        if (!acts) continue;
        const SlotGeom& g = slots[t];
        for (const Rat& c : kCornerFrac)
          if (f < c && c < g.a) b.emit(at_level(level, c), SegKind::track, -1);
        b.emit(at_level(level, g.a), SegKind::track, -1);
        if (!l.rho) {
          int exit = level == l.index ? l.index + 1 : l.index;
          bool over = (level == l.index) == (l.sign > 0);
          b.emit(at_level(exit, g.b),
                 over ? SegKind::chord_over : SegKind::chord_under, t);
          level = exit;
        } else if (l.sign > 0) {
          const Rat& r = g.radius;
          b.emit(r * usq(g.a), SegKind::spoke_in, t);
          for (const Rat& c : kCornerFrac)
            if (c > g.a) b.emit(r * usq(c), SegKind::wrap, t);
          for (const Rat& c : kCornerFrac)
            if (c < g.a - g.delta) b.emit(r * usq(c), SegKind::wrap, t);
          b.emit(r * usq(g.a - g.delta), SegKind::wrap, t);
          b.emit(Rat(7, 8) * usq(g.a - g.delta / 2), SegKind::spoke_out, t);
          b.emit(at_level(1, g.b), SegKind::spoke_out, t);
        } else {
          const Rat& r = g.radius;
          b.emit(r * usq(g.a), SegKind::spoke_in, t);
          for (auto c = std::rbegin(kCornerFrac); c != std::rend(kCornerFrac); ++c)
            if (*c < g.a) b.emit(r * usq(*c), SegKind::wrap, t);
          for (auto c = std::rbegin(kCornerFrac); c != std::rend(kCornerFrac); ++c)
            if (*c > g.a + g.delta) b.emit(r * usq(*c), SegKind::wrap, t);
          b.emit(r * usq(g.a + g.delta), SegKind::wrap, t);
          b.emit(at_level(1, g.b), SegKind::spoke_out, t);
        }
        f = g.b;
      }
      for (const Rat& c : kCornerFrac)
        if (f < c) b.emit(at_level(level, c), SegKind::track, -1);
    } while (level != j0);
    built.push_back(std::move(b));
  }

  AnnularDiagram d;
  for (auto& b : built) d.strands.push_back(b.pts);

  // every proper intersection is expected and its tags dictate over/under
  auto tag_of = [&](std::uint32_t s, std::uint32_t k) {
    const auto& b = built[s];
    return b.tags[(k + 1) % b.tags.size()];
  };
  std::vector<SegRef> all;
  for (std::uint32_t s = 0; s < d.strands.size(); ++s)
    for (std::uint32_t k = 0; k < d.strands[s].size(); ++k) all.push_back({s, k});
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      SegRef a = all[i], bb = all[j];
      if (a.strand == bb.strand) {
        std::uint32_t len = static_cast<std::uint32_t>(d.strands[a.strand].size());
        std::uint32_t diff = (bb.seg - a.seg + len) % len;
        if (diff == 1 || diff == len - 1) continue;
      }
      SegMeet m = classify_meet(d.segment(a), d.segment(bb));
      if (m == SegMeet::none) continue;
      if (m != SegMeet::proper)
        throw std::logic_error("braid closure: non-transverse meeting");
      SegTag ta = tag_of(a.strand, a.seg), tb = tag_of(bb.strand, bb.seg);
      bool a_over;
      auto is_spoke = [](SegKind k) {
        return k == SegKind::spoke_in || k == SegKind::spoke_out;
      };
      if (ta.kind == SegKind::chord_over && tb.kind == SegKind::chord_under &&
          ta.slot == tb.slot)
        a_over = true;
      else if (ta.kind == SegKind::chord_under && tb.kind == SegKind::chord_over &&
               ta.slot == tb.slot)
        a_over = false;
      else if (is_spoke(ta.kind) && tb.kind == SegKind::wrap)
        a_over = true;
      else if (ta.kind == SegKind::wrap && is_spoke(tb.kind))
        a_over = false;
      else if (ta.kind == SegKind::spoke_out && tb.kind == SegKind::spoke_in &&
               ta.slot == tb.slot)
        a_over = true;
      else if (ta.kind == SegKind::spoke_in && tb.kind == SegKind::spoke_out &&
               ta.slot == tb.slot)
        a_over = false;
      else
        throw std::logic_error("braid closure: unexpected crossing pair");
      auto at = proper_intersection(d.segment(a), d.segment(bb));
      d.crossings.push_back({*at, a_over ? a : bb, a_over ? bb : a});
    }
  std::sort(d.crossings.begin(), d.crossings.end(),
            [](const Crossing& x, const Crossing& y) {
              return PtLess{}(x.at, y.at);
            });
  return d;
}

// ------------------------------------------------------- periodicity

PeriodicCertificate check_periodic(const AnnularDiagram& d) {
  PeriodicCertificate cert;
  cert.strands.resize(d.strands.size());

  for (std::uint32_t i = 0; i < d.strands.size(); ++i) {
    const auto& S = d.strands[i];
    std::uint32_t m = static_cast<std::uint32_t>(S.size());
    bool found = false;
    for (std::uint32_t j = 0; j < d.strands.size() && !found; ++j) {
      const auto& T = d.strands[j];
      if (T.size() != m) continue;
      for (std::uint32_t rot = 0; rot < m && !found; ++rot) {
        if (!(T[rot] == -S[0])) continue;
        bool fwd = true, rev = true;
        for (std::uint32_t k = 0; k < m && (fwd || rev); ++k) {
          Pt img = -S[k];
          if (fwd && !(T[(rot + k) % m] == img)) fwd = false;
          if (rev && !(T[(rot + m - k) % m] == img)) rev = false;
        }
        if (fwd) {
          cert.strands[i] = {j, rot, false};
          found = true;
        } else if (rev) {
          cert.strands[i] = {j, rot, true};
          found = true;
        }
      }
    }
    if (!found) {
      cert.witness = -S[0];
      return cert;
    }
  }

  // the pairing must square to the identity strand-wise
  for (std::uint32_t i = 0; i < d.strands.size(); ++i)
    if (cert.strands[cert.strands[i].to].to != i) {
      cert.witness = -d.strands[i][0];
      return cert;
    }

  auto map_ref = [&](const SegRef& r) {
    const StrandImage& M = cert.strands[r.strand];
    std::uint32_t m = static_cast<std::uint32_t>(d.strands[r.strand].size());
    std::uint32_t k = M.rev ? (M.rot + 2 * m - r.seg - 1) % m : (M.rot + r.seg) % m;
    return SegRef{M.to, k};
  };

  cert.crossing_pair.assign(d.crossings.size(), 0);
  std::map<Pt, std::uint32_t, PtLess> by_at;
  for (std::uint32_t c = 0; c < d.crossings.size(); ++c)
    by_at[d.crossings[c].at] = c;
  for (std::uint32_t c = 0; c < d.crossings.size(); ++c) {
    Pt want = -d.crossings[c].at;
    auto it = by_at.find(want);
    if (it == by_at.end()) {
      cert.witness = want;
      return cert;
    }
    const Crossing& img = d.crossings[it->second];
    if (!(map_ref(d.crossings[c].over) == img.over &&
          map_ref(d.crossings[c].under) == img.under)) {
      cert.witness = want;
      return cert;
    }
    cert.crossing_pair[c] = it->second;
  }

  cert.symmetric = true;
  return cert;
}

AnnularDiagram quotient_periodic(const AnnularDiagram& d,
                                 const PeriodicCertificate& cert) {
  if (!cert.symmetric)
    throw ValidationError("quotient requires a half-turn symmetric diagram");

  auto square_pt = [](const Pt& p) { return square_cx(p); };

  // one kept range of vertices per strand orbit
  struct Kept {
    std::uint32_t src = 0;
    std::uint32_t nsegs = 0;  // original segments src[0..nsegs-1]
  };
  std::vector<Kept> kept;
  std::vector<int> kept_of(d.strands.size(), -1);
  for (std::uint32_t i = 0; i < d.strands.size(); ++i) {
    const StrandImage& M = cert.strands[i];
    std::uint32_t m = static_cast<std::uint32_t>(d.strands[i].size());
    if (M.to == i) {
      if (M.rev || m % 2 != 0 || M.rot != m / 2)
        throw ValidationError(
            "self-paired strand is not an exact half rotation");
      kept_of[i] = static_cast<int>(kept.size());
      kept.push_back({i, m / 2});
    } else if (M.to > i) {
      kept_of[i] = static_cast<int>(kept.size());
      kept.push_back({i, m});
    }
  }

  // express an original segment reference inside a kept range, together with
  // the point the crossing occupies on it
  auto to_kept = [&](SegRef r, Pt at) -> std::pair<SegRef, Pt> {
    if (kept_of[r.strand] < 0) {
      const StrandImage& M = cert.strands[r.strand];
      std::uint32_t m = static_cast<std::uint32_t>(d.strands[r.strand].size());
      r = {M.to, M.rev ? (M.rot + 2 * m - r.seg - 1) % m : (M.rot + r.seg) % m};
      at = -at;
    }
    const Kept& K = kept[kept_of[r.strand]];
    if (r.seg >= K.nsegs) {
      // other half of a self-paired strand
      std::uint32_t m = static_cast<std::uint32_t>(d.strands[r.strand].size());
      r.seg = (r.seg + m / 2) % m;
      at = -at;
    }
    return {SegRef{static_cast<std::uint32_t>(kept_of[r.strand]), r.seg}, at};
  };

  for (int depth = 0; depth <= 12; ++depth) {
    std::uint32_t parts = 1u << depth;
    std::size_t total = 0;
    for (const Kept& K : kept) total += std::size_t{K.nsegs} * parts;
    if (total > 60000)
      throw ValidationError(
          cat("quotient subdivision at depth ", depth, " needs ", total,
              " vertices; giving up"));

    AnnularDiagram out;
    for (const Kept& K : kept) {
      const auto& S = d.strands[K.src];
      std::uint32_t m = static_cast<std::uint32_t>(S.size());
      std::vector<Pt> img;
      for (std::uint32_t seg = 0; seg < K.nsegs; ++seg) {
        const Pt& a = S[seg];
        Pt dir = S[(seg + 1) % m] - a;
        for (std::uint32_t p = 0; p < parts; ++p)
          img.push_back(square_pt(a + Rat(p, parts) * dir));
      }
      out.strands.push_back(std::move(img));
    }

    bool ok = true;
    std::vector<char> taken(d.crossings.size(), 0);
    for (std::uint32_t c = 0; c < d.crossings.size() && ok; ++c) {
      if (taken[c]) continue;
      taken[c] = taken[cert.crossing_pair[c]] = 1;
      const Crossing& cr = d.crossings[c];
      auto [over, pov] = to_kept(cr.over, cr.at);
      auto [under, pun] = to_kept(cr.under, cr.at);
      // locate the subdivided chords containing the crossing point; when the
      // point sits exactly on a subdivision vertex both neighbours qualify
      auto sub = [&](const SegRef& r, const Pt& at_pt) {
        const auto& S = d.strands[kept[r.strand].src];
        std::uint32_t m = static_cast<std::uint32_t>(S.size());
        Pt a = S[r.seg];
        Pt dir = S[(r.seg + 1) % m] - a;
        Rat scaled = parts * dot(at_pt - a, dir) / norm2(dir);
        std::uint32_t idx = 0;
        while (idx + 1 < parts && Rat(idx + 1) <= scaled) ++idx;
        std::vector<SegRef> cand{{r.strand, r.seg * parts + idx}};
        if (idx > 0 && Rat(idx) == scaled)
          cand.push_back({r.strand, r.seg * parts + idx - 1});
        return cand;
      };
      std::optional<Crossing> made;
      bool ambiguous = false;
      for (const SegRef& so : sub(over, pov))
        for (const SegRef& su : sub(under, pun))
          if (auto hit = proper_intersection(out.segment(so), out.segment(su))) {
            if (made) ambiguous = true;
            made = Crossing{*hit, so, su};
          }
      if (!made || ambiguous) {
        ok = false;  // chords too coarse to reproduce this crossing cleanly
        break;
      }
      out.crossings.push_back(*made);
    }
    if (ok) {
      std::sort(out.crossings.begin(), out.crossings.end(),
                [](const Crossing& x, const Crossing& y) {
                  return PtLess{}(x.at, y.at);
                });
      if (validate(out).empty()) return out;
    }
  }
  throw ValidationError(
      "quotient image not in general position after 12 subdivision doublings");
}

AnnularDiagram quotient_periodic(const AnnularDiagram& d) {
  auto cert = check_periodic(d);
  if (!cert.symmetric)
    throw ValidationError(cat(
        "diagram is not half-turn symmetric; missing the image of ",
        cert.witness ? to_string(*cert.witness) : std::string("a point")));
  return quotient_periodic(d, cert);
}

}  // namespace khora
