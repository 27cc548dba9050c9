#include "khora/khovanov.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <stdexcept>

#include "khora/braid.hpp"
#include "khora/util.hpp"

namespace khora {

namespace {

std::string state_str(std::uint32_t s, int c) {
  std::string out(static_cast<std::size_t>(c), '0');
  for (int i = 0; i < c; ++i)
    if (s >> i & 1u) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

std::string gen_id(const std::string& state, std::uint64_t mask,
                   std::size_t circles) {
  std::string out = state;
  out += '|';
  for (std::size_t ci = 0; ci < circles; ++ci)
    out += (mask >> ci & 1u) ? 'x' : '1';
  return out;
}

}  // namespace

KhComplex build_cube(const AnnularDiagram& d, const CubeOptions& opt) {
  require_valid(d);
  int c = static_cast<int>(d.crossings.size());
  if (c > opt.max_crossings) {
    throw BudgetError(cat("cube of ", c, " crossings exceeds the budget of ",
                          opt.max_crossings, ": 2^", c,
                          " states and at least 2^", c + 1,
                          " generators; raise max_crossings to proceed"));
  }

  KhComplex kc;
  for (const auto& cr : d.crossings) {
    Seg o = d.segment(cr.over), u = d.segment(cr.under);
    (sgn(cross(o.b - o.a, u.b - u.a)) > 0 ? kc.n_pos : kc.n_neg) += 1;
  }

  SmoothingPlan plan(d);
  std::uint32_t nstates = 1u << c;
  std::size_t nfree = plan.free_loops.size();

  std::vector<SmoothingPlan::Trace> traces(nstates);
  parallel_for(nstates, [&](std::size_t s) {
    std::vector<int> bits(static_cast<std::size_t>(c), 0);
    for (int i = 0; i < c; ++i) bits[static_cast<std::size_t>(i)] = s >> i & 1;
    traces[s] = plan.trace(bits);
  });

  for (const auto& t : traces)
    if (t.circles > 62)
      throw BudgetError(cat("a state smooths into ", t.circles,
                            " circles; labelings do not fit a machine word"));

  // one generator per (state, labeling); ids sort states then labels
  std::vector<std::vector<Generator>> gens_by_state(nstates);
  std::vector<std::vector<std::pair<std::string, std::string>>> arrows_by_state(
      nstates);
  parallel_for(nstates, [&](std::size_t s) {
    const auto& t0 = traces[s];
    std::size_t m0 = t0.circles;
    std::string sstr = state_str(static_cast<std::uint32_t>(s), c);
    int j = std::popcount(static_cast<std::uint32_t>(s)) - kc.n_neg;
    long long qbase = static_cast<long long>(m0) +
                      std::popcount(static_cast<std::uint32_t>(s)) + kc.n_pos -
                      2 * kc.n_neg;
    for (std::uint64_t mask = 0; mask < (1ull << m0); ++mask) {
      long long q = qbase - 2 * std::popcount(mask);
      long long k = 0;
      for (std::size_t ci = 0; ci < m0; ++ci)
        if (t0.windings[ci] % 2 != 0) k += (mask >> ci & 1u) ? -1 : +1;
      gens_by_state[s].push_back(
          {gen_id(sstr, mask, m0), j, {{"q", q}, {"k", k}}});
    }

    // edges s -> s | 2^i, labels transported along matched circles
    for (int i = 0; i < c; ++i) {
      if (s >> i & 1u) continue;
      std::size_t s1 = s | (1ull << i);
      const auto& t1 = traces[s1];
      std::size_t m1 = t1.circles;
      std::string sstr1 = state_str(static_cast<std::uint32_t>(s1), c);
      std::size_t nac0 = m0 - nfree, nac1 = m1 - nfree;

      const auto& ends = plan.cross_ends[static_cast<std::size_t>(i)];
      std::vector<std::uint32_t> inc0, inc1;
      for (int p = 0; p < 4; ++p) {
        inc0.push_back(t0.label[ends.arc[p]]);
        inc1.push_back(t1.label[ends.arc[p]]);
      }
      auto uniq = [](std::vector<std::uint32_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      };
      uniq(inc0);
      uniq(inc1);
      if (inc0.size() + inc1.size() != 3)
        throw std::logic_error("resolution change is not a merge or a split");

      std::vector<std::uint32_t> to1(m0, UINT32_MAX);
      for (std::size_t a = 0; a < plan.arcs.size(); ++a) {
        std::uint32_t g0 = t0.label[a];
        if (to1[g0] != UINT32_MAX) continue;
        if (std::find(inc0.begin(), inc0.end(), g0) != inc0.end()) continue;
        to1[g0] = t1.label[a];
      }
      for (std::size_t f = 0; f < nfree; ++f)
        to1[nac0 + f] = static_cast<std::uint32_t>(nac1 + f);
      for (std::size_t g0 = 0; g0 < m0; ++g0) {
        if (std::find(inc0.begin(), inc0.end(), g0) != inc0.end()) continue;
        if (to1[g0] == UINT32_MAX ||
            t0.windings[g0] != t1.windings[to1[g0]])
          throw std::logic_error("circle mismatch across a cube edge");
      }

      for (std::uint64_t mask = 0; mask < (1ull << m0); ++mask) {
        std::uint64_t base = 0;
        for (std::size_t g0 = 0; g0 < m0; ++g0)
          if (to1[g0] != UINT32_MAX && (mask >> g0 & 1u))
            base |= 1ull << to1[g0];
        std::string src = gen_id(sstr, mask, m0);
        auto arrow = [&](std::uint64_t dst_mask) {
          arrows_by_state[s].emplace_back(src, gen_id(sstr1, dst_mask, m1));
        };
        if (inc0.size() == 2) {  // merge
          bool xa = mask >> inc0[0] & 1u, xb = mask >> inc0[1] & 1u;
          if (xa && xb) continue;  // x.x = 0
          std::uint64_t dst = base;
          if (xa || xb) dst |= 1ull << inc1[0];
          arrow(dst);
        } else {  // split
          std::uint32_t ca = inc1[0], cb = inc1[1];
          if (mask >> inc0[0] & 1u) {
            arrow(base | 1ull << ca | 1ull << cb);
          } else {
            arrow(base | 1ull << cb);
            arrow(base | 1ull << ca);
          }
        }
      }
    }
  });

  std::vector<Generator> gens;
  std::vector<std::pair<std::string, std::string>> arrows;
  for (std::uint32_t s = 0; s < nstates; ++s) {
    gens.insert(gens.end(), gens_by_state[s].begin(), gens_by_state[s].end());
    arrows.insert(arrows.end(), arrows_by_state[s].begin(),
                  arrows_by_state[s].end());
  }
  kc.full = GradedComplexF2::make(std::move(gens), arrows);

  kc.k_min = kc.k_max = kc.full.gens.empty() ? 0 : kc.full.gens[0].aux.at("k");
  for (const auto& g : kc.full.gens) {
    long long k = g.aux.at("k");
    kc.k_min = std::min(kc.k_min, k);
    kc.k_max = std::max(kc.k_max, k);
  }

  kc.annular = kc.full;
  kc.annular.diff.clear();
  for (auto [u, v] : kc.full.diff) {
    const Generator& gu = kc.full.gens[u];
    const Generator& gv = kc.full.gens[v];
    if (gv.degree != gu.degree + 1 || gv.aux.at("q") != gu.aux.at("q"))
      throw std::logic_error(cat("cube edge breaks the grading laws: ", gu.id,
                                 " -> ", gv.id));
    long long dk = gv.aux.at("k") - gu.aux.at("k");
    if (dk != 0 && dk != -2)
      throw std::logic_error(cat("cube edge drops k by ", -dk, ": ", gu.id,
                                 " -> ", gv.id));
    if (dk == 0) kc.annular.diff.push_back({u, v});
  }
  return kc;
}

// the differential preserves q, so homology splits into q-blocks; the annular
// differential preserves (q, k) and splits further
std::map<std::pair<int, long long>, std::size_t> kh_ranks(const KhComplex& c) {
  std::map<long long, std::vector<std::uint32_t>> sectors;
  for (std::uint32_t i = 0; i < c.full.gens.size(); ++i)
    sectors[c.full.gens[i].aux.at("q")].push_back(i);
  std::map<std::pair<int, long long>, std::size_t> out;
  for (const auto& [q, idx] : sectors) {
    GradedComplexF2 sub;
    std::vector<std::uint32_t> pos(c.full.gens.size(), UINT32_MAX);
    for (std::uint32_t n = 0; n < idx.size(); ++n) {
      pos[idx[n]] = n;
      sub.gens.push_back(c.full.gens[idx[n]]);
    }
    for (auto [u, v] : c.full.diff)
      if (pos[u] != UINT32_MAX && pos[v] != UINT32_MAX)
        sub.diff.push_back({pos[u], pos[v]});
    for (const auto& [deg, rank] : sub.homology_ranks())
      if (rank) out[{deg, q}] = rank;
  }
  return out;
}

std::map<std::tuple<int, long long, long long>, std::size_t> akh_ranks(
    const KhComplex& c) {
  std::map<std::pair<long long, long long>, std::vector<std::uint32_t>> sectors;
  for (std::uint32_t i = 0; i < c.annular.gens.size(); ++i)
    sectors[{c.annular.gens[i].aux.at("q"), c.annular.gens[i].aux.at("k")}]
        .push_back(i);
  std::map<std::tuple<int, long long, long long>, std::size_t> out;
  for (const auto& [qk, idx] : sectors) {
    GradedComplexF2 sub;
    std::vector<std::uint32_t> pos(c.annular.gens.size(), UINT32_MAX);
    for (std::uint32_t n = 0; n < idx.size(); ++n) {
      pos[idx[n]] = n;
      sub.gens.push_back(c.annular.gens[idx[n]]);
    }
    for (auto [u, v] : c.annular.diff)
      if (pos[u] != UINT32_MAX && pos[v] != UINT32_MAX)
        sub.diff.push_back({pos[u], pos[v]});
    for (const auto& [deg, rank] : sub.homology_ranks())
      if (rank) out[{deg, qk.first, qk.second}] = rank;
  }
  return out;
}

std::map<std::pair<int, long long>, std::size_t> kh_ranks(
    const AnnularDiagram& d, const CubeOptions& opt) {
  return kh_ranks(build_cube(d, opt));
}

std::map<std::tuple<int, long long, long long>, std::size_t> akh_ranks(
    const AnnularDiagram& d, const CubeOptions& opt) {
  return akh_ranks(build_cube(d, opt));
}

SpectralPages akh_to_kh_pages(const KhComplex& c) {
  std::map<std::string, int> levels;
  for (const auto& g : c.full.gens) {
    long long spread = c.k_max - g.aux.at("k");
    if (spread % 2 != 0)
      throw std::logic_error("annular gradings of one complex differ in parity");
    levels[g.id] = static_cast<int>(spread / 2);
  }
  auto fc = FilteredComplexF2::make(c.full, levels);
  fc.validate();
  return spectral_pages(fc);
}

SpectralPages akh_to_kh_pages(const AnnularDiagram& d, const CubeOptions& opt) {
  return akh_to_kh_pages(build_cube(d, opt));
}

std::map<long long, long long> graded_euler(const KhComplex& c) {
  std::map<long long, long long> e;
  for (const auto& [jq, rank] : kh_ranks(c)) {
    long long term = (jq.first & 1) ? -static_cast<long long>(rank)
                                    : static_cast<long long>(rank);
    e[jq.second] += term;
    if (e[jq.second] == 0) e.erase(jq.second);
  }
  return e;
}

std::string laurent_str(const std::map<long long, long long>& p) {
  if (p.empty()) return "0";
  std::string out;
  for (const auto& [ex, co] : p) {
    if (out.empty())
      out += co < 0 ? "-" : "";
    else
      out += co < 0 ? " - " : " + ";
    long long a = std::llabs(co);
    if (a != 1 || ex == 0) out += std::to_string(a);
    if (ex != 0) {
      if (a != 1) out += "*";
      out += "q";
      if (ex != 1) out += cat("^", ex);
    }
  }
  return out;
}

long long determinant(const KhComplex& c) {
  // reduced polynomial: euler characteristic times q over 1 + q^2
  std::map<long long, long long> num;
  for (const auto& [ex, co] : graded_euler(c)) num[ex + 1] = co;
  std::map<long long, long long> quo;
  std::size_t guard = 0;
  while (!num.empty()) {
    if (++guard > 100000)
      throw std::logic_error(
          "euler characteristic is not divisible by the unknot factor");
    auto it = num.begin();
    long long ex = it->first, co = it->second;
    quo[ex] = co;
    num.erase(it);
    auto up = num.try_emplace(ex + 2, 0).first;
    up->second -= co;
    if (up->second == 0) num.erase(up);
  }
  long long re = 0, im = 0;
  for (const auto& [ex, co] : quo) {
    switch (((ex % 4) + 4) % 4) {
      case 0: re += co; break;
      case 1: im += co; break;
      case 2: re -= co; break;
      case 3: im -= co; break;
    }
  }
  if (re != 0 && im != 0)
    throw std::logic_error("reduced polynomial mixes exponent parities");
  return std::llabs(re + im);
}

long long determinant(const AnnularDiagram& d, const CubeOptions& opt) {
  return determinant(build_cube(d, opt));
}

PeriodicRankReport periodic_rank_check(const AnnularDiagram& d,
                                       const CubeOptions& opt) {
  auto cert = check_periodic(d);
  if (!cert.symmetric)
    throw ValidationError(
        "periodic rank check requires a half-turn symmetric diagram");
  auto quot = quotient_periodic(d, cert);

  PeriodicRankReport r;
  auto big = build_cube(d, opt);
  for (const auto& [jq, rank] : kh_ranks(big)) r.kh_total += rank;
  for (const auto& [jqk, rank] : akh_ranks(big)) r.akh_total += rank;
  for (const auto& [jqk, rank] : akh_ranks(quot, opt)) r.quotient_akh += rank;
  r.kh_bound_holds = r.kh_total >= r.quotient_akh;
  r.akh_bound_holds = r.akh_total >= r.quotient_akh;
  return r;
}

}  // namespace khora
