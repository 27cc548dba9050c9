#include "khora/bridge.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <utility>

#include "khora/util.hpp"

namespace khora {

namespace {

const Pt kOrigin{};

struct ArcMeet {
  std::uint32_t bridge = 0, seg = 0;
  Rat t;
  Pt at;
  bool endpoint = false;
};

struct Analysis {
  BridgeCheck check;
  std::vector<std::vector<ArcMeet>> meets;  // per arc, in traversal order
};

Rat seg_param(const Seg& s, const Pt& p) {
  Pt d = s.b - s.a;
  if (d.x != 0) return (p.x - s.a.x) / d.x;
  return (p.y - s.a.y) / d.y;
}

Pt touch_point(const Seg& s, const Seg& t) {
  if (on_segment(s.a, t)) return s.a;
  if (on_segment(s.b, t)) return s.b;
  if (on_segment(t.a, s)) return t.a;
  return t.b;
}

Analysis analyze(const BridgeDiagram& d) {
  const std::size_t nt = d.tau.size();
  if (nt == 0 || nt % 2 != 0)
    throw ValidationError("bridge diagram needs a positive even tau count");
  for (std::size_t i = 0; i + 1 < nt; ++i)
    if (!(d.tau[i] > d.tau[i + 1]))
      throw ValidationError("tau values must be strictly decreasing");
  for (const Rat& t : d.tau)
    if (t == 0) throw ValidationError("tau values must avoid the origin");
  const std::size_t nb = nt / 2;
  if (d.arcs.size() != nb)
    throw ValidationError(
        cat("expected ", nb, " arcs for ", nb, " bridges, got ", d.arcs.size()));

  std::optional<std::uint32_t> central_b;
  for (std::size_t i = 0; i < nb; ++i) {
    Seg s = d.bridge_seg(i);
    if (s.a.x < 0 && s.b.x > 0) central_b = static_cast<std::uint32_t>(i);
  }
  if (d.intravergent && !central_b)
    throw ValidationError("intravergent diagram needs a bridge through the origin");
  if (!d.intravergent && central_b)
    throw ValidationError("origin may not lie on a bridge");
  if (d.intravergent) {
    for (std::size_t i = 0; i < nt; ++i)
      if (d.tau[i] != -d.tau[nt - 1 - i])
        throw ValidationError("intravergent tau list must be symmetric");
  }

  std::set<Rat> tau_set(d.tau.begin(), d.tau.end());

  // polyline sanity, endpoint bookkeeping
  std::map<Rat, int> end_use;
  for (std::size_t a = 0; a < d.arcs.size(); ++a) {
    const auto& arc = d.arcs[a];
    if (arc.size() < 2)
      throw ValidationError(cat("arc ", a, " needs at least two vertices"));
    for (std::size_t i = 0; i + 1 < arc.size(); ++i)
      if (arc[i] == arc[i + 1])
        throw ValidationError(cat("arc ", a, " repeats a vertex"));
    for (const Pt* e : {&arc.front(), &arc.back()}) {
      if (e->y != 0 || !tau_set.count(e->x))
        throw ValidationError(cat("arc ", a, " must end at tau points"));
      end_use[e->x] += 1;
    }
    const std::size_t ns = arc.size() - 1;
    for (std::size_t i = 0; i < ns; ++i) {
      Seg si{arc[i], arc[i + 1]};
      for (std::size_t j = i + 1; j < ns; ++j) {
        Seg sj{arc[j], arc[j + 1]};
        SegMeet m = classify_meet(si, sj);
        if (j == i + 1) {
          if (m != SegMeet::touch)
            throw ValidationError(cat("arc ", a, " folds back on itself"));
        } else if (m != SegMeet::none) {
          throw ValidationError(cat("arc ", a, " is not embedded"));
        }
      }
    }
  }
  for (const Rat& t : d.tau)
    if (end_use[t] != 1)
      throw ValidationError(
          cat("tau point ", to_string(t), " must meet exactly one arc end"));

  // arcs pairwise disjoint
  for (std::size_t a = 0; a < d.arcs.size(); ++a)
    for (std::size_t b = a + 1; b < d.arcs.size(); ++b)
      for (std::size_t i = 0; i + 1 < d.arcs[a].size(); ++i)
        for (std::size_t j = 0; j + 1 < d.arcs[b].size(); ++j)
          if (classify_meet(Seg{d.arcs[a][i], d.arcs[a][i + 1]},
                            Seg{d.arcs[b][j], d.arcs[b][j + 1]}) != SegMeet::none)
            throw ValidationError(cat("arcs ", a, " and ", b, " intersect"));

  // origin on an arc: only the intravergent central crossing may do that
  std::optional<std::pair<std::uint32_t, std::uint32_t>> origin_seg;
  for (std::size_t a = 0; a < d.arcs.size(); ++a) {
    const auto& arc = d.arcs[a];
    for (const Pt& v : arc)
      if (v == kOrigin)
        throw ValidationError(cat("arc ", a, " has a vertex at the origin"));
    for (std::size_t i = 0; i + 1 < arc.size(); ++i)
      if (on_segment(kOrigin, Seg{arc[i], arc[i + 1]})) {
        if (!d.intravergent || origin_seg)
          throw ValidationError(cat("arc ", a, " passes through the origin"));
        origin_seg = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(i)};
      }
  }
  if (d.intravergent && !origin_seg)
    throw ValidationError("intravergent diagram needs an arc through the origin");

  // arc / bridge meets
  Analysis an;
  an.meets.resize(d.arcs.size());
  for (std::size_t a = 0; a < d.arcs.size(); ++a) {
    const auto& arc = d.arcs[a];
    for (std::size_t i = 0; i + 1 < arc.size(); ++i) {
      Seg seg{arc[i], arc[i + 1]};
      for (std::size_t b = 0; b < nb; ++b) {
        Seg br = d.bridge_seg(b);
        switch (classify_meet(seg, br)) {
          case SegMeet::none:
            break;
          case SegMeet::overlap:
            throw ValidationError(cat("arc ", a, " runs along bridge ", b));
          case SegMeet::proper: {
            Pt p = *proper_intersection(seg, br);
            if (p == kOrigin &&
                !(d.intravergent && b == *central_b &&
                  origin_seg == std::pair{static_cast<std::uint32_t>(a),
                                          static_cast<std::uint32_t>(i)}))
              throw ValidationError("crossing at the origin outside the central pair");
            an.meets[a].push_back({static_cast<std::uint32_t>(b),
                                   static_cast<std::uint32_t>(i), seg_param(seg, p),
                                   p, false});
            break;
          }
          case SegMeet::touch: {
            Pt p = touch_point(seg, br);
            bool arc_end = (p == arc.front() || p == arc.back());
            bool bridge_end = (p == br.a || p == br.b);
            if (!arc_end || !bridge_end)
              throw ValidationError(cat("arc ", a, " touches bridge ", b,
                                        " away from a shared endpoint"));
            bool at_front = (p == arc.front());
            an.meets[a].push_back({static_cast<std::uint32_t>(b),
                                   static_cast<std::uint32_t>(i),
                                   Rat(at_front ? 0 : 1), p, true});
            break;
          }
        }
      }
    }
  }
  for (auto& ms : an.meets)
    std::sort(ms.begin(), ms.end(), [](const ArcMeet& x, const ArcMeet& y) {
      return std::pair(x.seg, x.t) < std::pair(y.seg, y.t);
    });

  // intravergent symmetry of the arc system
  if (d.intravergent) {
    const std::size_t na = d.arcs.size();
    an.check.mirror_arc.assign(na, static_cast<std::uint32_t>(na));
    std::optional<std::uint32_t> self_mirror;
    for (std::size_t i = 0; i < na; ++i) {
      std::vector<Pt> neg(d.arcs[i].size());
      for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -d.arcs[i][k];
      std::vector<Pt> rev(neg.rbegin(), neg.rend());
      for (std::size_t j = 0; j < na; ++j)
        if (d.arcs[j] == neg || d.arcs[j] == rev) {
          an.check.mirror_arc[i] = static_cast<std::uint32_t>(j);
          break;
        }
      if (an.check.mirror_arc[i] == na)
        throw ValidationError(cat("arc ", i, " has no mirror partner"));
      if (an.check.mirror_arc[i] == i) {
        if (self_mirror)
          throw ValidationError("more than one self-symmetric arc");
        self_mirror = static_cast<std::uint32_t>(i);
      }
    }
    for (std::size_t i = 0; i < na; ++i)
      if (an.check.mirror_arc[an.check.mirror_arc[i]] != i)
        throw ValidationError("arc mirror pairing is not an involution");
    if (!self_mirror)
      throw ValidationError("intravergent diagram needs a self-symmetric arc");
    if (*self_mirror != origin_seg->first)
      throw ValidationError("the self-symmetric arc must pass through the origin");
    an.check.central_arc = *self_mirror;
    an.check.central_bridge = *central_b;
  }

  return an;
}

// signed crossings of p->q against the chosen reference ray
long long seg_count(const Pt& p, const Pt& q, const WindingOptions& opt) {
  if (p == q) return 0;
  if (on_segment(kOrigin, Seg{p, q}))
    throw ValidationError("winding path meets the origin");
  if (!opt.far_base) return ray_cross(p, q);
  const Pt& f = *opt.far_base;
  if (f == kOrigin) throw ValidationError("far base must differ from the origin");
  auto side = [&](const Pt& z) {
    int s = sgn(cross(f, z));
    return s == 0 ? 1 : s;
  };
  int sp = side(p), sq = side(q);
  if (sp == sq) return 0;
  Rat denom = cross(f, q - p);
  Rat tt = -cross(f, p) / denom;
  Pt z = p + tt * (q - p);
  Rat u = dot(z, f) / norm2(f);
  if (u <= 0 || u >= 1) return 0;
  return sq;
}

std::string synth_label(std::uint32_t a, std::uint32_t b, std::uint32_t i) {
  return cat("a", a, "b", b, "p", i);
}

}  // namespace

Seg BridgeDiagram::bridge_seg(std::size_t i) const {
  return Seg{Pt{tau[2 * i + 1], Rat(0)}, Pt{tau[2 * i], Rat(0)}};
}

nlohmann::json BridgeDiagram::to_json() const {
  nlohmann::json j;
  j["tau"] = nlohmann::json::array();
  for (const Rat& t : tau) j["tau"].push_back(rat_to_json(t));
  j["arcs"] = nlohmann::json::array();
  for (const auto& arc : arcs) {
    nlohmann::json ja = nlohmann::json::array();
    for (const Pt& p : arc) ja.push_back(pt_to_json(p));
    j["arcs"].push_back(std::move(ja));
  }
  j["intravergent"] = intravergent;
  if (!labels.empty()) {
    j["labels"] = nlohmann::json::array();
    for (const auto& l : labels)
      j["labels"].push_back({{"arc", l.arc},
                             {"bridge", l.bridge},
                             {"index", l.index},
                             {"label", l.label}});
  }
  return j;
}

BridgeDiagram BridgeDiagram::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("tau") || !j.contains("arcs"))
    throw ValidationError("bridge diagram json needs tau and arcs");
  BridgeDiagram d;
  for (const auto& t : j.at("tau")) d.tau.push_back(rat_from_json(t));
  for (const auto& ja : j.at("arcs")) {
    std::vector<Pt> arc;
    for (const auto& p : ja) arc.push_back(pt_from_json(p));
    d.arcs.push_back(std::move(arc));
  }
  d.intravergent = j.value("intravergent", false);
  if (j.contains("labels"))
    for (const auto& l : j.at("labels"))
      d.labels.push_back({l.at("arc").get<std::uint32_t>(),
                          l.at("bridge").get<std::uint32_t>(),
                          l.at("index").get<std::uint32_t>(),
                          l.at("label").get<std::string>()});
  return d;
}

BridgeCheck validate_bridge(const BridgeDiagram& d) { return analyze(d).check; }

std::optional<std::uint32_t> GeneratorList::find(const std::string& name) const {
  auto it = std::lower_bound(
      gens.begin(), gens.end(), name,
      [](const BridgeGenerator& g, const std::string& n) { return g.name < n; });
  if (it == gens.end() || it->name != name) return std::nullopt;
  return static_cast<std::uint32_t>(it - gens.begin());
}

GeneratorList enumerate_generators(const BridgeDiagram& d) {
  Analysis an = analyze(d);
  const std::size_t na = d.arcs.size();
  const std::size_t nb = d.n_bridges();
  if (nb > 60) throw BudgetError(cat("too many bridges: ", nb));

  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::string> lab;
  for (const auto& l : d.labels) {
    auto key = std::make_tuple(l.arc, l.bridge, l.index);
    if (lab.count(key)) throw ValidationError(cat("duplicate label entry ", l.label));
    lab[key] = l.label;
  }

  GeneratorList out;
  std::vector<std::vector<std::uint32_t>> arc_pts(na);
  std::set<std::string> label_seen;
  {
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> used_keys;
    for (std::size_t a = 0; a < na; ++a) {
      std::map<std::uint32_t, std::uint32_t> per_bridge;
      for (const ArcMeet& m : an.meets[a]) {
        std::uint32_t idx = per_bridge[m.bridge]++;
        auto key = std::make_tuple(static_cast<std::uint32_t>(a), m.bridge, idx);
        used_keys.insert(key);
        std::string label = lab.count(key)
                                ? lab[key]
                                : synth_label(static_cast<std::uint32_t>(a), m.bridge, idx);
        if (!label_seen.insert(label).second)
          throw ValidationError(cat("label ", label, " is not unique"));
        arc_pts[a].push_back(static_cast<std::uint32_t>(out.points.size()));
        out.points.push_back({static_cast<std::uint32_t>(a), m.bridge, m.at,
                              m.endpoint, label, m.seg, m.t});
      }
    }
    for (const auto& [key, label] : lab)
      if (!used_keys.count(key))
        throw ValidationError(cat("label ", label, " refers to no intersection"));
  }

  if (!d.intravergent) {
    // endpoint nearest the origin, skipped on a tie
    std::optional<Rat> best;
    std::uint32_t best_idx = 0;
    bool tie = false;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
      if (!out.points[i].endpoint) continue;
      Rat ax = out.points[i].at.x < 0 ? -out.points[i].at.x : out.points[i].at.x;
      if (!best || ax < *best) {
        best = ax;
        best_idx = static_cast<std::uint32_t>(i);
        tie = false;
      } else if (ax == *best) {
        tie = true;
      }
    }
    if (best && !tie) {
      out.distinguished = best_idx;
      out.has_distinguished = true;
    }
  }

  // perfect matchings of arcs onto bridges, expanded over doubling bits
  std::vector<std::uint32_t> pick(na);
  std::uint64_t used = 0;
  auto emit = [&]() {
    std::vector<std::uint32_t> doubled;
    for (std::size_t a = 0; a < na; ++a)
      if (!out.points[pick[a]].endpoint) doubled.push_back(static_cast<std::uint32_t>(a));
    for (std::uint64_t mask = 0; mask < (1ull << doubled.size()); ++mask) {
      BridgeGenerator g;
      g.choice.assign(pick.begin(), pick.end());
      g.bit.assign(na, -1);
      for (std::size_t k = 0; k < doubled.size(); ++k)
        g.bit[doubled[k]] = (mask >> k) & 1 ? 1 : 0;
      for (std::size_t a = 0; a < na; ++a) {
        g.name += out.points[g.choice[a]].label;
        if (g.bit[a] >= 0) g.name += static_cast<char>('0' + g.bit[a]);
      }
      out.gens.push_back(std::move(g));
    }
  };
  auto rec = [&](auto&& self, std::size_t a) -> void {
    if (a == na) {
      emit();
      return;
    }
    for (std::uint32_t idx : arc_pts[a]) {
      std::uint32_t b = out.points[idx].bridge;
      if (used & (1ull << b)) continue;
      used |= 1ull << b;
      pick[a] = idx;
      self(self, a + 1);
      used &= ~(1ull << b);
    }
  };
  rec(rec, 0);

  std::sort(out.gens.begin(), out.gens.end(),
            [](const BridgeGenerator& x, const BridgeGenerator& y) {
              return x.name < y.name;
            });
  for (std::size_t i = 0; i + 1 < out.gens.size(); ++i)
    if (out.gens[i].name == out.gens[i + 1].name)
      throw ValidationError(cat("generator name ", out.gens[i].name, " is not unique"));

  if (d.intravergent) {
    for (std::size_t gi = 0; gi < out.gens.size(); ++gi) {
      const auto& g = out.gens[gi];
      bool sym = true;
      for (std::size_t a = 0; a < na && sym; ++a) {
        std::uint32_t m = an.check.mirror_arc[a];
        const BridgePoint& p = out.points[g.choice[a]];
        const BridgePoint& q = out.points[g.choice[m]];
        if (q.at != -p.at || g.bit[a] != g.bit[m]) sym = false;
      }
      if (sym) out.symmetric.push_back(static_cast<std::uint32_t>(gi));
    }
  }

  return out;
}

long long relative_winding(const BridgeDiagram& d, const GeneratorList& g,
                           std::uint32_t x, std::uint32_t y,
                           const WindingOptions& opt) {
  if (x >= g.gens.size() || y >= g.gens.size())
    throw ValidationError("generator index out of range");
  const BridgeGenerator& gx = g.gens[x];
  const BridgeGenerator& gy = g.gens[y];
  const std::size_t na = d.arcs.size();
  long long total = 0;

  // along each arc, from x's point to y's point
  for (std::size_t a = 0; a < na; ++a) {
    if (gx.choice[a] == gy.choice[a]) continue;
    const BridgePoint& from = g.points[gx.choice[a]];
    const BridgePoint& to = g.points[gy.choice[a]];
    bool fwd = std::pair(from.seg, from.t) < std::pair(to.seg, to.t);
    const BridgePoint& lo = fwd ? from : to;
    const BridgePoint& hi = fwd ? to : from;
    std::vector<Pt> path;
    path.push_back(lo.at);
    for (std::uint32_t s = lo.seg + 1; s <= hi.seg; ++s) path.push_back(d.arcs[a][s]);
    path.push_back(hi.at);
    long long c = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      c += seg_count(path[i], path[i + 1], opt);
    total += fwd ? c : -c;
  }

  // back along each bridge, from y's point to x's point
  std::vector<const BridgePoint*> bx(d.n_bridges(), nullptr), by(d.n_bridges(), nullptr);
  for (std::size_t a = 0; a < na; ++a) {
    bx[g.points[gx.choice[a]].bridge] = &g.points[gx.choice[a]];
    by[g.points[gy.choice[a]].bridge] = &g.points[gy.choice[a]];
  }
  for (std::size_t b = 0; b < d.n_bridges(); ++b) {
    if (!bx[b] || !by[b])
      throw ValidationError("generator misses a bridge");
    if (bx[b] == by[b] || bx[b]->at == by[b]->at) continue;
    total += seg_count(by[b]->at, bx[b]->at, opt);
  }

  return 2 * total;
}

GradedComplexF2 BridgeComplex::full() const {
  std::vector<Generator> gs;
  gs.reserve(gens.gens.size());
  for (std::size_t i = 0; i < gens.gens.size(); ++i)
    gs.push_back({gens.gens[i].name, static_cast<int>(grading[i]), {{"w", w[i]}}});
  std::vector<std::pair<std::string, std::string>> arrows;
  for (const Entry& e : entries)
    arrows.emplace_back(gens.gens[e.src].name, gens.gens[e.dst].name);
  return GradedComplexF2::make(std::move(gs), arrows);
}

GradedComplexF2 BridgeComplex::annular() const {
  std::vector<Generator> gs;
  gs.reserve(gens.gens.size());
  for (std::size_t i = 0; i < gens.gens.size(); ++i)
    gs.push_back({gens.gens[i].name, static_cast<int>(grading[i]), {{"w", w[i]}}});
  std::vector<std::pair<std::string, std::string>> arrows;
  for (const Entry& e : entries)
    if (e.uexp == 0)
      arrows.emplace_back(gens.gens[e.src].name, gens.gens[e.dst].name);
  return GradedComplexF2::make(std::move(gs), arrows);
}

std::vector<std::uint32_t> BridgeComplex::type_f() const {
  if (!gens.has_distinguished)
    throw ValidationError("no distinguished point to split along");
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < gens.gens.size(); ++i) {
    const auto& ch = gens.gens[i].choice;
    if (std::find(ch.begin(), ch.end(), gens.distinguished) != ch.end())
      out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

BridgeComplex load_differential(const BridgeDiagram& d, const GeneratorList& g,
                                const nlohmann::json& data) {
  if (!data.is_object() || !data.contains("gradings"))
    throw ValidationError("differential data needs a gradings table");
  BridgeComplex c;
  c.diagram = d;
  c.gens = g;
  const std::size_t n = g.gens.size();

  c.grading.assign(n, 0);
  std::vector<bool> seen(n, false);
  for (const auto& [name, v] : data.at("gradings").items()) {
    auto idx = g.find(name);
    if (!idx) throw ValidationError(cat("grading for unknown generator ", name));
    if (!v.is_number_integer())
      throw ValidationError(cat("grading of ", name, " must be an integer"));
    c.grading[*idx] = v.get<long long>();
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i])
      throw ValidationError(cat("generator ", g.gens[i].name, " has no grading"));

  c.w.assign(n, 0);
  if (!d.intravergent)
    for (std::size_t i = 1; i < n; ++i)
      c.w[i] = relative_winding(d, g, 0, static_cast<std::uint32_t>(i));

  if (data.contains("resolution")) {
    std::string r = data.at("resolution").get<std::string>();
    if (r == "zero")
      c.tag = ResolutionTag::zero;
    else if (r == "one")
      c.tag = ResolutionTag::one;
    else
      throw ValidationError(cat("unknown resolution tag ", r));
  }

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen_arrows;
  for (const auto& e : data.value("diff", nlohmann::json::array())) {
    if (!e.is_array() || e.size() != 2)
      throw ValidationError("differential entries are [src, dst] pairs");
    auto si = g.find(e[0].get<std::string>());
    auto di = g.find(e[1].get<std::string>());
    if (!si || !di)
      throw ValidationError(cat("differential references unknown generator"));
    if (c.grading[*di] != c.grading[*si] + 1)
      throw ValidationError(cat("arrow ", g.gens[*si].name, " -> ", g.gens[*di].name,
                                " does not raise the grading by one"));
    long long dw = c.w[*di] - c.w[*si];
    if (dw % 2 != 0)
      throw ValidationError("winding gap with odd parity");
    if (dw < 0)
      throw ValidationError(cat("arrow ", g.gens[*si].name, " -> ", g.gens[*di].name,
                                " lowers the winding"));
    if (!seen_arrows.insert({*si, *di}).second)
      throw ValidationError("duplicate differential entry");
    c.entries.push_back({*si, *di, dw / 2});
  }
  std::sort(c.entries.begin(), c.entries.end(),
            [](const BridgeComplex::Entry& a, const BridgeComplex::Entry& b) {
              return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
            });

  c.full().validate();  // unique names, degree step, d^2 = 0 at U = 1

  if (c.tag != ResolutionTag::none) {
    std::vector<std::uint32_t> tf = c.type_f();
    std::vector<bool> is_f(n, false);
    for (std::uint32_t i : tf) is_f[i] = true;
    for (const auto& e : c.entries) {
      if (e.uexp != 0) continue;
      if (c.tag == ResolutionTag::zero && is_f[e.src] && !is_f[e.dst])
        throw ValidationError("zero resolution cannot leave the type-f part");
      if (c.tag == ResolutionTag::one && !is_f[e.src] && is_f[e.dst])
        throw ValidationError("one resolution cannot enter the type-f part");
    }
  }

  return c;
}

BridgeComplex normalize_winding(const BridgeComplex& c) {
  if (c.diagram.intravergent)
    throw ValidationError("winding normalization lives on the quotient side");
  const std::size_t n = c.gens.gens.size();
  if (n == 0) throw ValidationError("nothing to normalize");

  // annular homology rank per winding block; blocks are subcomplexes
  std::map<long long, std::size_t> profile;
  {
    std::map<long long, std::vector<std::uint32_t>> block;
    for (std::size_t i = 0; i < n; ++i)
      block[c.w[i]].push_back(static_cast<std::uint32_t>(i));
    for (const auto& [wv, idxs] : block) {
      std::vector<Generator> gs;
      std::set<std::uint32_t> in_block(idxs.begin(), idxs.end());
      for (std::uint32_t i : idxs)
        gs.push_back({c.gens.gens[i].name, static_cast<int>(c.grading[i]), {}});
      std::vector<std::pair<std::string, std::string>> arrows;
      for (const auto& e : c.entries)
        if (e.uexp == 0 && in_block.count(e.src))
          arrows.emplace_back(c.gens.gens[e.src].name, c.gens.gens[e.dst].name);
      auto sub = GradedComplexF2::make(std::move(gs), arrows);
      std::size_t total = 0;
      for (const auto& [deg, r] : sub.homology_ranks()) total += r;
      if (total) profile[wv] = total;
    }
    if (profile.empty())
      for (const auto& [wv, idxs] : block) profile[wv] = idxs.size();
  }

  long long lo = profile.begin()->first;
  long long hi = profile.rbegin()->first;
  if ((lo + hi) % 2 != 0)
    throw ValidationError("no symmetric normalization of the winding grading");
  for (const auto& [wv, r] : profile) {
    auto it = profile.find(lo + hi - wv);
    if (it == profile.end() || it->second != r)
      throw ValidationError("no symmetric normalization of the winding grading");
  }

  BridgeComplex out = c;
  long long shift = -(lo + hi) / 2;
  for (auto& wv : out.w) wv += shift;
  out.w_absolute = true;
  return out;
}

TypeFSplit typef_split(const BridgeComplex& c) {
  TypeFSplit s;
  s.c_part = c.type_f();
  std::set<std::uint32_t> in_c(s.c_part.begin(), s.c_part.end());
  for (std::uint32_t i = 0; i < c.gens.gens.size(); ++i)
    if (!in_c.count(i)) s.n_part.push_back(i);
  return s;
}

ChainMapF2 AxisMap::chain_map() const { return ChainMapF2{&from, &to, images}; }

AxisMap axis_moving_map(const BridgeComplex& c0, const BridgeComplex& c1) {
  if (c0.tag != ResolutionTag::zero || c1.tag != ResolutionTag::one)
    throw ValidationError("axis map wants a zero-tagged and a one-tagged complex");
  if (c0.diagram.tau != c1.diagram.tau)
    throw ValidationError("axis map endpoints disagree on the tau pattern");
  const std::size_t n = c0.gens.gens.size();
  if (n != c1.gens.gens.size())
    throw ValidationError("generator counts differ");
  for (std::size_t i = 0; i < n; ++i)
    if (c0.gens.gens[i].name != c1.gens.gens[i].name)
      throw ValidationError("generator names do not correspond");

  std::set<std::string> f0, f1;
  for (std::uint32_t i : c0.type_f()) f0.insert(c0.gens.gens[i].name);
  for (std::uint32_t i : c1.type_f()) f1.insert(c1.gens.gens[i].name);
  if (f0 != f1) throw ValidationError("type-f parts do not correspond");

  // the winding gap from type C to type N grows by exactly 2 across the move
  if (!f0.empty() && f0.size() < n) {
    std::optional<long long> fc, fn;
    for (std::size_t i = 0; i < n; ++i) {
      long long delta = c1.w[i] - c0.w[i];
      auto& slot = f0.count(c0.gens.gens[i].name) ? fc : fn;
      if (!slot)
        slot = delta;
      else if (*slot != delta)
        throw ValidationError("winding shift is not constant on a type class");
    }
    if (*fc - *fn != 2)
      throw ValidationError(cat("type-f winding gap moved by ", *fc - *fn,
                                " instead of 2"));
  }

  AxisMap am;
  am.from = c0.annular();
  am.to = c1.annular();
  am.c_shift = -2;
  am.images.resize(am.from.gens.size());
  for (std::size_t i = 0; i < am.from.gens.size(); ++i)
    if (!f0.count(am.from.gens[i].id))
      am.images[i] = {am.to.index_of(am.from.gens[i].id)};
  am.chain_map().validate();  // degrees agree on type N, squares commute
  return am;
}

namespace {

std::map<int, std::size_t> part_homology(const BridgeComplex& c,
                                         const std::vector<std::uint32_t>& part) {
  std::set<std::uint32_t> in_part(part.begin(), part.end());
  std::vector<Generator> gs;
  for (std::uint32_t i : part)
    gs.push_back({c.gens.gens[i].name, static_cast<int>(c.grading[i]), {}});
  std::vector<std::pair<std::string, std::string>> arrows;
  for (const auto& e : c.entries)
    if (e.uexp == 0 && in_part.count(e.src) && in_part.count(e.dst))
      arrows.emplace_back(c.gens.gens[e.src].name, c.gens.gens[e.dst].name);
  return GradedComplexF2::make(std::move(gs), arrows).homology_ranks();
}

}  // namespace

ConeReport cone_split_check(const BridgeComplex& c0, const BridgeComplex& c1) {
  AxisMap am = axis_moving_map(c0, c1);
  ChainMapF2 f = am.chain_map();
  ConeReport rep;
  rep.cone_ranks = mapping_cone(f).homology_ranks();

  TypeFSplit s0 = typef_split(c0);
  TypeFSplit s1 = typef_split(c1);
  rep.c0_ranks = part_homology(c0, s0.c_part);  // subcomplex by the zero rule
  for (const auto& [deg, r] : part_homology(c1, s1.c_part))  // quotient complex
    rep.c1_shifted_ranks[deg + 1] = r;

  std::map<int, std::size_t> want = rep.c0_ranks;
  for (const auto& [deg, r] : rep.c1_shifted_ranks) want[deg] += r;
  for (auto it = want.begin(); it != want.end();)
    it = it->second == 0 ? want.erase(it) : std::next(it);
  rep.split_matches = (want == rep.cone_ranks);

  // zigzag out of the zero-side type-f part and back in on the one side
  std::set<std::uint32_t> f0(s0.c_part.begin(), s0.c_part.end());
  std::set<std::uint32_t> f1(s1.c_part.begin(), s1.c_part.end());
  rep.composite_vanishes = true;
  for (std::uint32_t x : s0.c_part) {
    std::map<std::uint32_t, int> parity;
    for (const auto& e0 : c0.entries) {
      if (e0.src != x || f0.count(e0.dst)) continue;
      for (const auto& e1 : c1.entries)
        if (e1.src == e0.dst && f1.count(e1.dst)) parity[e1.dst] ^= 1;
    }
    for (const auto& [dst, p] : parity)
      if (p) rep.composite_vanishes = false;
  }
  return rep;
}

FixedSetReport fixed_set_complex(const BridgeDiagram& intra,
                                 const GeneratorList& intra_gens,
                                 const BridgeComplex& c0,
                                 const BridgeComplex& c1,
                                 const nlohmann::json& corr) {
  if (!intra.intravergent)
    throw ValidationError("fixed-set complex wants an intravergent diagram");
  BridgeCheck chk = validate_bridge(intra);
  if (!corr.is_object() || !corr.contains("zero") || !corr.contains("one") ||
      !corr.contains("gradings"))
    throw ValidationError("correspondence needs zero, one and gradings tables");

  FixedSetReport rep;
  std::map<std::string, int> sym_bit;  // symmetric generator name -> central bit
  for (std::uint32_t gi : intra_gens.symmetric) {
    const auto& g = intra_gens.gens[gi];
    sym_bit[g.name] = g.bit[chk.central_arc];
    if (g.bit[chk.central_arc] == 0)
      ++rep.n_lambda0;
    else
      ++rep.n_lambda1;
  }

  for (int cls : {0, 1}) {
    const BridgeComplex& side = cls == 0 ? c0 : c1;
    const auto& table = corr.at(cls == 0 ? "zero" : "one");
    std::set<std::string> want_keys;
    for (std::uint32_t i : side.type_f()) want_keys.insert(side.gens.gens[i].name);
    std::set<std::string> got_values;
    std::set<std::string> got_keys;
    for (const auto& [k, v] : table.items()) {
      got_keys.insert(k);
      std::string name = v.get<std::string>();
      auto it = sym_bit.find(name);
      if (it == sym_bit.end() || it->second != cls)
        throw ValidationError(cat(name, " is not a symmetric generator of class ", cls));
      if (!got_values.insert(name).second)
        throw ValidationError(cat("correspondence repeats ", name));
    }
    if (got_keys != want_keys)
      throw ValidationError(cat("correspondence keys must be the type-f names of side ",
                                cls));
    if (got_values.size() != (cls == 0 ? rep.n_lambda0 : rep.n_lambda1))
      throw ValidationError(cat("correspondence misses symmetric generators of class ",
                                cls));
  }

  std::map<std::string, long long> grading;
  for (const auto& [name, v] : corr.at("gradings").items()) {
    if (!sym_bit.count(name))
      throw ValidationError(cat("grading for non-symmetric generator ", name));
    if (!v.is_number_integer())
      throw ValidationError(cat("grading of ", name, " must be an integer"));
    grading[name] = v.get<long long>();
  }
  if (grading.size() != sym_bit.size())
    throw ValidationError("every symmetric generator needs a grading");

  // the two lifts of each symmetric pair sit in adjacent degrees, bit 0 below
  rep.lambda_pairing_ok = true;
  for (std::uint32_t gi : intra_gens.symmetric) {
    const auto& g = intra_gens.gens[gi];
    if (g.bit[chk.central_arc] != 0) continue;
    for (std::uint32_t gj : intra_gens.symmetric) {
      const auto& h = intra_gens.gens[gj];
      if (h.bit[chk.central_arc] != 1 || h.choice != g.choice) continue;
      bool match = true;
      for (std::size_t a = 0; a < g.bit.size(); ++a)
        if (a != chk.central_arc && g.bit[a] != h.bit[a]) match = false;
      if (match && grading.at(h.name) != grading.at(g.name) + 1)
        rep.lambda_pairing_ok = false;
    }
  }

  std::vector<Generator> gs;
  for (const auto& [name, bit] : sym_bit)
    gs.push_back({name, static_cast<int>(grading.at(name)), {{"bit", bit}}});
  std::vector<std::pair<std::string, std::string>> arrows;
  for (const auto& e : corr.value("diff", nlohmann::json::array())) {
    if (!e.is_array() || e.size() != 2)
      throw ValidationError("fixed-set differential entries are [src, dst] pairs");
    arrows.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  rep.complex = GradedComplexF2::make(std::move(gs), arrows);
  rep.complex.validate();
  rep.ranks = rep.complex.homology_ranks();

  rep.cone_ranks = cone_split_check(c0, c1).cone_ranks;
  std::size_t a = 0, b = 0;
  for (const auto& [deg, r] : rep.ranks) a += r;
  for (const auto& [deg, r] : rep.cone_ranks) b += r;
  rep.rank_totals_match = (a == b);
  return rep;
}

namespace {

// quotient of a half-turn symmetric (origin-free) diagram under z -> z^2,
// with uniform 3^k refinement until the polyline image validates and shows
// the crossing inventory the symmetry predicts
BridgeDiagram quotient_of(const BridgeDiagram& per) {
  Analysis an = analyze(per);
  const std::size_t na = per.arcs.size();
  const std::size_t nb = per.n_bridges();

  // arc orbit representatives
  std::vector<std::uint32_t> mirror(na, static_cast<std::uint32_t>(na));
  for (std::size_t i = 0; i < na; ++i) {
    std::vector<Pt> neg(per.arcs[i].size());
    for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -per.arcs[i][k];
    std::vector<Pt> rev(neg.rbegin(), neg.rend());
    for (std::size_t j = 0; j < na; ++j)
      if (per.arcs[j] == neg || per.arcs[j] == rev)
        mirror[i] = static_cast<std::uint32_t>(j);
  }
  std::vector<std::uint32_t> reps;
  for (std::size_t i = 0; i < na; ++i) {
    if (mirror[i] >= na || mirror[i] == i)
      throw ValidationError("diagram is not freely half-turn symmetric");
    if (i < mirror[i]) reps.push_back(static_cast<std::uint32_t>(i));
  }

  // positive bridges map onto the quotient bridges, in order
  std::vector<std::uint32_t> pos;
  std::vector<std::uint32_t> img(nb, static_cast<std::uint32_t>(nb));
  for (std::size_t b = 0; b < nb; ++b)
    if (per.bridge_seg(b).a.x > 0) pos.push_back(static_cast<std::uint32_t>(b));
  for (std::size_t r = 0; r < pos.size(); ++r) {
    img[pos[r]] = static_cast<std::uint32_t>(r);
    Seg s = per.bridge_seg(pos[r]);
    for (std::size_t b = 0; b < nb; ++b) {
      Seg m = per.bridge_seg(b);
      if (m.a == -s.b && m.b == -s.a) img[b] = static_cast<std::uint32_t>(r);
    }
  }
  for (std::size_t b = 0; b < nb; ++b)
    if (img[b] >= nb) throw ValidationError("bridge has no mirror partner");

  BridgeDiagram q;
  for (std::uint32_t b : pos) {
    Seg s = per.bridge_seg(b);
    q.tau.push_back(s.b.x * s.b.x);
    q.tau.push_back(s.a.x * s.a.x);
  }

  // per representative arc: interior crossings per quotient bridge, endpoint pair
  std::vector<std::map<std::uint32_t, std::size_t>> want_interior(reps.size());
  std::vector<std::multiset<std::uint32_t>> want_ends(reps.size());
  for (std::size_t r = 0; r < reps.size(); ++r)
    for (const ArcMeet& m : an.meets[reps[r]]) {
      if (m.endpoint)
        want_ends[r].insert(img[m.bridge]);
      else
        ++want_interior[r][img[m.bridge]];
    }

  for (int k = 0; k <= 5; ++k) {
    long long pieces = 1;
    for (int i = 0; i < k; ++i) pieces *= 3;
    BridgeDiagram cand = q;
    for (std::uint32_t r : reps) {
      const auto& arc = per.arcs[r];
      std::vector<Pt> im;
      for (std::size_t i = 0; i + 1 < arc.size(); ++i)
        for (long long j = 0; j < pieces; ++j) {
          Pt p = arc[i] + (Rat(j) / pieces) * (arc[i + 1] - arc[i]);
          Pt s = square_cx(p);
          if (im.empty() || im.back() != s) im.push_back(s);
        }
      Pt last = square_cx(arc.back());
      if (im.empty() || im.back() != last) im.push_back(last);
      cand.arcs.push_back(std::move(im));
    }
    try {
      Analysis qa = analyze(cand);
      bool ok = true;
      for (std::size_t r = 0; r < reps.size() && ok; ++r) {
        std::map<std::uint32_t, std::size_t> got_interior;
        std::multiset<std::uint32_t> got_ends;
        for (const ArcMeet& m : qa.meets[r]) {
          if (m.endpoint)
            got_ends.insert(m.bridge);
          else
            ++got_interior[m.bridge];
        }
        if (got_interior != want_interior[r] || got_ends != want_ends[r]) ok = false;
      }
      if (ok) return cand;
    } catch (const ValidationError&) {
      // refine and retry
    }
  }
  throw ValidationError("quotient image did not stabilize under refinement");
}

}  // namespace

CentralResolutions central_resolutions(const BridgeDiagram& d) {
  if (!d.intravergent)
    throw ValidationError("central resolutions want an intravergent diagram");
  Analysis an = analyze(d);
  const std::uint32_t ca = an.check.central_arc;

  // the segment of the central arc through the origin
  std::optional<std::uint32_t> oseg;
  for (const ArcMeet& m : an.meets[ca])
    if (!m.endpoint && m.at == kOrigin) oseg = m.seg;
  if (!oseg) throw ValidationError("central crossing not found");
  const auto& carc = d.arcs[ca];
  Pt vs = carc[*oseg];
  if (carc[*oseg + 1] != -vs)
    throw ValidationError("central segment is not symmetric");

  Rat min_tau = d.tau.front() < 0 ? -d.tau.front() : d.tau.front();
  for (const Rat& t : d.tau) {
    Rat a = t < 0 ? -t : t;
    if (a < min_tau) min_tau = a;
  }
  Rat cheb = std::max(vs.x < 0 ? -vs.x : vs.x, vs.y < 0 ? -vs.y : vs.y);
  Rat eps = min_tau / 2;
  Rat del = std::min(eps, Rat(cheb / 2));

  auto build = [&](const Rat& e, const Rat& dl, bool zero) {
    BridgeDiagram r;
    r.tau = d.tau;
    r.tau.push_back(e);
    r.tau.push_back(-e);
    std::sort(r.tau.begin(), r.tau.end(), std::greater<Rat>());

    Pt t_in = (dl / cheb) * vs;
    // the half arriving at the origin joins the west stub on the zero side
    Pt stub_in = Pt{vs.y > 0 ? (zero ? -e : e) : (zero ? e : -e), Rat(0)};
    std::vector<Pt> incoming(carc.begin(), carc.begin() + *oseg + 1);
    incoming.push_back(t_in);
    incoming.push_back(stub_in);
    std::vector<Pt> outgoing;
    outgoing.push_back(-stub_in);
    outgoing.push_back(-t_in);
    outgoing.insert(outgoing.end(), carc.begin() + *oseg + 1, carc.end());

    for (std::size_t a = 0; a < d.arcs.size(); ++a)
      r.arcs.push_back(a == ca ? incoming : d.arcs[a]);
    r.arcs.push_back(std::move(outgoing));
    return r;
  };

  for (int attempt = 0; attempt < 12; ++attempt) {
    BridgeDiagram pz = build(eps, del, true);
    BridgeDiagram po = build(eps, del, false);
    try {
      validate_bridge(pz);
      validate_bridge(po);
      CentralResolutions out;
      out.quotient_zero = quotient_of(pz);
      out.quotient_one = quotient_of(po);
      out.periodic_zero = std::move(pz);
      out.periodic_one = std::move(po);
      return out;
    } catch (const ValidationError&) {
      eps /= 2;
      del /= 2;
    }
  }
  throw ValidationError("central resolution did not stabilize");
}

IncidenceSignature incidence_signature(const BridgeDiagram& d) {
  Analysis an = analyze(d);

  // innermost endpoint, by distance to the origin
  std::optional<Rat> best;
  for (const Rat& t : d.tau) {
    Rat a = t < 0 ? -t : t;
    if (!best || a < *best) best = a;
  }

  IncidenceSignature sig;
  for (std::size_t a = 0; a < d.arcs.size(); ++a) {
    std::vector<std::uint32_t> ends, interior;
    bool innermost = false;
    for (const ArcMeet& m : an.meets[a]) {
      if (m.endpoint) {
        ends.push_back(m.bridge);
        Rat ax = m.at.x < 0 ? -m.at.x : m.at.x;
        if (ax == *best) innermost = true;
      } else {
        interior.push_back(m.bridge);
      }
    }
    std::sort(ends.begin(), ends.end());
    std::sort(interior.begin(), interior.end());
    std::string tok = "E";
    for (std::uint32_t b : ends) tok += cat(b, ",");
    tok += "|I";
    for (std::uint32_t b : interior) tok += cat(b, ",");
    if (innermost) tok += "|D";
    sig.push_back(std::move(tok));
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

bool same_incidence(const BridgeDiagram& a, const BridgeDiagram& b) {
  return incidence_signature(a) == incidence_signature(b);
}

}  // namespace khora
