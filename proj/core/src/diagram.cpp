#include "khora/diagram.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "khora/util.hpp"

namespace khora {

Seg AnnularDiagram::segment(const SegRef& r) const {
  const auto& s = strands[r.strand];
  return {s[r.seg], s[(r.seg + 1) % s.size()]};
}

std::size_t AnnularDiagram::total_segments() const {
  std::size_t n = 0;
  for (const auto& s : strands) n += s.size();
  return n;
}

nlohmann::json AnnularDiagram::to_json() const {
  nlohmann::json j;
  j["strands"] = nlohmann::json::array();
  for (const auto& s : strands) {
    nlohmann::json js = nlohmann::json::array();
    for (const auto& p : s) js.push_back(pt_to_json(p));
    j["strands"].push_back(std::move(js));
  }
  j["crossings"] = nlohmann::json::array();
  for (const auto& c : crossings) {
    nlohmann::json jc;
    jc["at"] = pt_to_json(c.at);
    jc["over"] = {c.over.strand, c.over.seg};
    jc["under"] = {c.under.strand, c.under.seg};
    j["crossings"].push_back(std::move(jc));
  }
  return j;
}

AnnularDiagram AnnularDiagram::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("strands"))
    throw ValidationError("diagram json: want {\"strands\":[...],\"crossings\":[...]}");
  AnnularDiagram d;
  for (const auto& js : j.at("strands")) {
    std::vector<Pt> s;
    for (const auto& jp : js) s.push_back(pt_from_json(jp));
    d.strands.push_back(std::move(s));
  }
  if (j.contains("crossings"))
    for (const auto& jc : j.at("crossings")) {
      Crossing c;
      c.at = pt_from_json(jc.at("at"));
      auto ref = [](const nlohmann::json& r) {
        if (!r.is_array() || r.size() != 2)
          throw ValidationError("crossing ref: want [strand, seg]");
        return SegRef{r[0].get<std::uint32_t>(), r[1].get<std::uint32_t>()};
      };
      c.over = ref(jc.at("over"));
      c.under = ref(jc.at("under"));
      d.crossings.push_back(c);
    }
  return d;
}

static std::pair<SegRef, SegRef> norm_pair(SegRef a, SegRef b) {
  if (b < a) std::swap(a, b);
  return {a, b};
}

std::vector<Violation> validate(const AnnularDiagram& d) {
  std::vector<Violation> out;
  auto add = [&](std::string w) { out.push_back({std::move(w)}); };
  const Pt origin{};

  for (std::size_t i = 0; i < d.strands.size(); ++i) {
    const auto& s = d.strands[i];
    if (s.size() < 3) {
      add(cat("strand ", i, " has fewer than 3 vertices"));
      continue;
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] == s[(k + 1) % s.size()])
        add(cat("strand ", i, " has a zero-length segment at vertex ", k));
      if (s[k] == origin)
        add(cat("strand ", i, " vertex ", k, " sits on the axis"));
    }
  }
  if (!out.empty()) return out;  // geometry below assumes sane polylines

  std::vector<SegRef> all;
  for (std::uint32_t i = 0; i < d.strands.size(); ++i)
    for (std::uint32_t k = 0; k < d.strands[i].size(); ++k) all.push_back({i, k});

  for (const auto& r : all) {
    Seg s = d.segment(r);
    if (strictly_inside(origin, s) || s.a == origin)
      add(cat("strand ", r.strand, " segment ", r.seg, " meets the axis"));
  }

  std::map<std::pair<SegRef, SegRef>, Pt> proper;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      SegRef a = all[i], b = all[j];
      bool adjacent = false;
      if (a.strand == b.strand) {
        std::uint32_t L = static_cast<std::uint32_t>(d.strands[a.strand].size());
        std::uint32_t diff = (b.seg - a.seg + L) % L;
        adjacent = (diff == 1 || diff == L - 1);
      }
      SegMeet m = classify_meet(d.segment(a), d.segment(b));
      if (adjacent) {
        if (m == SegMeet::overlap)
          add(cat("strand ", a.strand, " folds back onto itself at segment ", a.seg));
        else if (m == SegMeet::proper)
          add(cat("adjacent segments of strand ", a.strand, " cross near segment ", a.seg));
        continue;
      }
      switch (m) {
        case SegMeet::none:
          break;
        case SegMeet::proper: {
          auto at = proper_intersection(d.segment(a), d.segment(b));
          proper[norm_pair(a, b)] = *at;
          break;
        }
        case SegMeet::touch:
          add(cat("vertex incidence or tangency between (", a.strand, ",", a.seg,
                  ") and (", b.strand, ",", b.seg, ")"));
          break;
        case SegMeet::overlap:
          add(cat("overlapping segments (", a.strand, ",", a.seg, ") and (",
                  b.strand, ",", b.seg, ")"));
          break;
      }
    }

  // triple points: two proper intersections at one location
  {
    std::map<Pt, int, PtLess> count;
    for (const auto& [pr, pt] : proper) {
      (void)pr;
      ++count[pt];
    }
    for (const auto& [pt, n] : count)
      if (n > 1) add(cat("triple point at ", to_string(pt)));
  }

  std::map<std::pair<SegRef, SegRef>, std::size_t> claimed;
  for (std::size_t ci = 0; ci < d.crossings.size(); ++ci) {
    const auto& c = d.crossings[ci];
    auto in_range = [&](const SegRef& r) {
      return r.strand < d.strands.size() && r.seg < d.strands[r.strand].size();
    };
    if (!in_range(c.over) || !in_range(c.under)) {
      add(cat("crossing ", ci, " references a segment out of range"));
      continue;
    }
    if (c.over == c.under) {
      add(cat("crossing ", ci, " lists the same segment twice"));
      continue;
    }
    auto key = norm_pair(c.over, c.under);
    auto it = proper.find(key);
    if (it == proper.end()) {
      add(cat("crossing ", ci, " at ", to_string(c.at),
              " does not correspond to a transverse intersection"));
      continue;
    }
    if (it->second != c.at)
      add(cat("crossing ", ci, " location ", to_string(c.at),
              " disagrees with the actual intersection ", to_string(it->second)));
    if (++claimed[key] > 1) add(cat("crossing ", ci, " duplicates another crossing"));
  }
  for (const auto& [key, pt] : proper)
    if (!claimed.count(key))
      add(cat("undeclared crossing at ", to_string(pt), " between (", key.first.strand,
              ",", key.first.seg, ") and (", key.second.strand, ",", key.second.seg, ")"));

  return out;
}

void require_valid(const AnnularDiagram& d) {
  auto v = validate(d);
  if (v.empty()) return;
  std::string msg = "invalid diagram:";
  for (std::size_t i = 0; i < v.size() && i < 5; ++i) msg += "\n  " + v[i].what;
  if (v.size() > 5) msg += cat("\n  (", v.size() - 5, " more)");
  throw ValidationError(msg);
}

Rat min_feature_dist2(const AnnularDiagram& d) {
  if (d.crossings.empty()) return Rat(0);
  bool first = true;
  Rat best(0);
  auto consider = [&](const Rat& v) {
    if (first || v < best) {
      best = v;
      first = false;
    }
  };
  for (std::size_t i = 0; i < d.crossings.size(); ++i) {
    const Pt& at = d.crossings[i].at;
    consider(norm2(at));  // axis
    for (std::size_t j = 0; j < d.crossings.size(); ++j)
      if (j != i) consider(dist2(at, d.crossings[j].at));
    for (std::uint32_t s = 0; s < d.strands.size(); ++s)
      for (std::uint32_t k = 0; k < d.strands[s].size(); ++k) {
        consider(dist2(at, d.strands[s][k]));
        SegRef r{s, k};
        if (r == d.crossings[i].over || r == d.crossings[i].under) continue;
        consider(dist2_point_seg(at, d.segment(r)));
      }
  }
  return best;
}

SmoothingPlan::SmoothingPlan(const AnnularDiagram& d) {
  Rat m2 = min_feature_dist2(d);

  struct Event {
    std::uint32_t crossing;
    int role;  // 0 over, 1 under
    std::uint32_t seg;
    Rat t;
  };
  std::vector<std::vector<Event>> events(d.strands.size());
  for (std::uint32_t ci = 0; ci < d.crossings.size(); ++ci) {
    const auto& c = d.crossings[ci];
    for (int role = 0; role < 2; ++role) {
      SegRef r = role == 0 ? c.over : c.under;
      Seg s = d.segment(r);
      Pt dir = s.b - s.a;
      Rat t = dot(c.at - s.a, dir) / norm2(dir);
      events[r.strand].push_back({ci, role, r.seg, t});
    }
  }

  cross_ends.resize(d.crossings.size());

  for (std::uint32_t si = 0; si < d.strands.size(); ++si) {
    auto& ev = events[si];
    const auto& poly = d.strands[si];
    std::uint32_t L = static_cast<std::uint32_t>(poly.size());
    if (ev.empty()) {
      free_loops.push_back(poly);
      free_winds.push_back(winding(poly));
      continue;
    }
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
      if (a.seg != b.seg) return a.seg < b.seg;
      return a.t < b.t;
    });

    // trim points for each passage on this strand
    std::vector<Pt> tin(ev.size()), tout(ev.size());
    for (std::size_t e = 0; e < ev.size(); ++e) {
      Seg s = {poly[ev[e].seg], poly[(ev[e].seg + 1) % L]};
      Pt dir = s.b - s.a;
      Rat tau(1);
      while (tau * tau * norm2(dir) >= m2 / 4) tau /= 2;
      Pt at = s.a + ev[e].t * dir;
      tin[e] = at - tau * dir;
      tout[e] = at + tau * dir;
      auto& ce = cross_ends[ev[e].crossing];
      int base = ev[e].role == 0 ? 0 : 2;
      ce.trim[base] = tin[e];       // in slot
      ce.trim[base + 1] = tout[e];  // out slot
    }

    for (std::size_t e = 0; e < ev.size(); ++e) {
      std::size_t f = (e + 1) % ev.size();
      Arc arc;
      arc.pts.push_back(tout[e]);
      bool direct = ev.size() > 1 && ev[f].seg == ev[e].seg && ev[f].t > ev[e].t;
      if (!direct) {
        std::uint32_t nverts = ((ev[f].seg - ev[e].seg - 1 + L) % L) + 1;
        for (std::uint32_t k = 1; k <= nverts; ++k)
          arc.pts.push_back(poly[(ev[e].seg + k) % L]);
      }
      arc.pts.push_back(tin[f]);
      for (std::size_t p = 0; p + 1 < arc.pts.size(); ++p)
        arc.wind += ray_cross(arc.pts[p], arc.pts[p + 1]);

      std::uint32_t id = static_cast<std::uint32_t>(arcs.size());
      auto& out_ce = cross_ends[ev[e].crossing];
      int out_slot = (ev[e].role == 0 ? 1 : 3);
      out_ce.arc[out_slot] = id;
      out_ce.arc_end[out_slot] = 0;
      auto& in_ce = cross_ends[ev[f].crossing];
      int in_slot = (ev[f].role == 0 ? 0 : 2);
      in_ce.arc[in_slot] = id;
      in_ce.arc_end[in_slot] = 1;
      arcs.push_back(std::move(arc));
    }
  }

  // pairings: slots sorted by outgoing direction; smoothing 0 joins each
  // slot to its clockwise neighbour, smoothing 1 to its counterclockwise one
  for (std::uint32_t ci = 0; ci < d.crossings.size(); ++ci) {
    const auto& c = d.crossings[ci];
    Seg so = d.segment(c.over), su = d.segment(c.under);
    Pt dir_o = so.b - so.a, dir_u = su.b - su.a;
    Pt outdir[4] = {-dir_o, dir_o, -dir_u, dir_u};
    int order[4] = {0, 1, 2, 3};
    std::sort(order, order + 4,
              [&](int a, int b) { return angle_less(outdir[a], outdir[b]); });
    for (int p = 0; p < 4; ++p) {
      int slot = order[p];
      if (slot >= 2) continue;  // drive the pairing from the over slots
      int cw = order[(p + 3) % 4];
      int ccw = order[(p + 1) % 4];
      // over and under slots must alternate around the crossing
      if (cw < 2 || ccw < 2)
        throw std::logic_error("smoothing plan: slots do not alternate");
      auto& pr = cross_ends[ci].partner;
      pr[0][slot] = static_cast<std::uint8_t>(cw);
      pr[0][cw] = static_cast<std::uint8_t>(slot);
      pr[1][slot] = static_cast<std::uint8_t>(ccw);
      pr[1][ccw] = static_cast<std::uint8_t>(slot);
    }
  }
}

namespace {
struct Walker {
  const SmoothingPlan& plan;
  const std::vector<int>& state;
  // attachment lookup: arc, end -> (crossing, slot)
  std::vector<std::array<std::pair<std::uint32_t, int>, 2>> attach;

  Walker(const SmoothingPlan& p, const std::vector<int>& st) : plan(p), state(st) {
    attach.resize(plan.arcs.size());
    for (std::uint32_t c = 0; c < plan.cross_ends.size(); ++c)
      for (int slot = 0; slot < 4; ++slot) {
        const auto& ce = plan.cross_ends[c];
        attach[ce.arc[slot]][ce.arc_end[slot]] = {c, slot};
      }
  }

  template <class Visit>
  void run(Visit&& visit_arc_and_connector) const {
    std::vector<char> done(plan.arcs.size(), 0);
    for (std::uint32_t a0 = 0; a0 < plan.arcs.size(); ++a0) {
      if (done[a0]) continue;
      std::uint32_t arc = a0;
      int enter = 0;
      bool fresh_circle = true;
      do {
        done[arc] = 1;
        int exit_end = 1 - enter;
        auto [c, slot] = attach[arc][exit_end];
        int p = plan.cross_ends[c].partner[state[c]][slot];
        visit_arc_and_connector(arc, enter, c, slot, p, fresh_circle);
        fresh_circle = false;
        enter = plan.cross_ends[c].arc_end[p];
        arc = plan.cross_ends[c].arc[p];
      } while (!(arc == a0 && enter == 0));
    }
  }
};
}  // namespace

SmoothingPlan::Trace SmoothingPlan::trace(const std::vector<int>& state) const {
  if (state.size() != cross_ends.size())
    throw ValidationError("resolution state length does not match crossing count");
  for (int b : state)
    if (b != 0 && b != 1) throw ValidationError("resolution state bits must be 0 or 1");

  Trace tr;
  tr.label.assign(arcs.size(), 0);
  Walker w(*this, state);
  long cur = 0;
  w.run([&](std::uint32_t arc, int enter, std::uint32_t c, int slot, int p, bool fresh) {
    if (fresh) {
      if (tr.circles > 0) tr.windings.push_back(cur);
      cur = 0;
      ++tr.circles;
    }
    tr.label[arc] = static_cast<std::uint32_t>(tr.circles - 1);
    cur += enter == 0 ? arcs[arc].wind : -arcs[arc].wind;
    cur += ray_cross(cross_ends[c].trim[slot], cross_ends[c].trim[p]);
  });
  if (tr.circles > 0) tr.windings.push_back(cur);

  for (std::size_t f = 0; f < free_loops.size(); ++f) {
    ++tr.circles;
    tr.windings.push_back(free_winds[f]);
  }
  return tr;
}

StateCircles SmoothingPlan::realize(const std::vector<int>& state) const {
  if (state.size() != cross_ends.size())
    throw ValidationError("resolution state length does not match crossing count");

  StateCircles sc;
  Walker w(*this, state);
  std::vector<Pt> cur;
  long curw = 0;
  auto flush = [&] {
    if (!cur.empty()) {
      sc.circles.push_back(std::move(cur));
      sc.winding.push_back(curw);
      cur.clear();
      curw = 0;
    }
  };
  w.run([&](std::uint32_t arc, int enter, std::uint32_t c, int slot, int p, bool fresh) {
    if (fresh) flush();
    const auto& pts = arcs[arc].pts;
    if (enter == 0)
      cur.insert(cur.end(), pts.begin(), pts.end());
    else
      cur.insert(cur.end(), pts.rbegin(), pts.rend());
    curw += enter == 0 ? arcs[arc].wind : -arcs[arc].wind;
    curw += ray_cross(cross_ends[c].trim[slot], cross_ends[c].trim[p]);
  });
  flush();

  for (std::size_t f = 0; f < free_loops.size(); ++f) {
    sc.circles.push_back(free_loops[f]);
    sc.winding.push_back(free_winds[f]);
  }
  for (long wv : sc.winding) sc.essential.push_back((wv % 2 + 2) % 2 == 1);
  return sc;
}

StateCircles smooth(const AnnularDiagram& d, const std::vector<int>& state) {
  return SmoothingPlan(d).realize(state);
}

}  // namespace khora
