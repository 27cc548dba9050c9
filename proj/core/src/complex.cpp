#include "khora/complex.hpp"

#include <algorithm>
#include <stdexcept>

#include "khora/util.hpp"

namespace khora {

GradedComplexF2 GradedComplexF2::make(
    std::vector<Generator> generators,
    const std::vector<std::pair<std::string, std::string>>& arrows) {
  GradedComplexF2 c;
  std::sort(generators.begin(), generators.end(),
            [](const Generator& a, const Generator& b) { return a.id < b.id; });
  for (std::size_t i = 0; i + 1 < generators.size(); ++i)
    if (generators[i].id == generators[i + 1].id)
      throw ValidationError(cat("complex: duplicate generator id '", generators[i].id, "'"));
  c.gens = std::move(generators);
  c.diff.reserve(arrows.size());
  for (const auto& [s, t] : arrows) c.diff.emplace_back(c.index_of(s), c.index_of(t));
  std::sort(c.diff.begin(), c.diff.end());
  for (std::size_t i = 0; i + 1 < c.diff.size(); ++i)
    if (c.diff[i] == c.diff[i + 1])
      throw ValidationError(cat("complex: duplicate differential entry ",
                                c.gens[c.diff[i].first].id, " -> ",
                                c.gens[c.diff[i].second].id));
  return c;
}

std::uint32_t GradedComplexF2::index_of(const std::string& id) const {
  auto it = std::lower_bound(
      gens.begin(), gens.end(), id,
      [](const Generator& g, const std::string& s) { return g.id < s; });
  if (it == gens.end() || it->id != id)
    throw ValidationError(cat("complex: unknown generator id '", id, "'"));
  return static_cast<std::uint32_t>(it - gens.begin());
}

bool GradedComplexF2::has(const std::string& id) const {
  auto it = std::lower_bound(
      gens.begin(), gens.end(), id,
      [](const Generator& g, const std::string& s) { return g.id < s; });
  return it != gens.end() && it->id == id;
}

std::vector<std::vector<std::uint32_t>> GradedComplexF2::adjacency() const {
  std::vector<std::vector<std::uint32_t>> out(gens.size());
  for (const auto& [s, t] : diff) out[s].push_back(t);
  return out;  // diff is sorted, so each list comes out sorted
}

void GradedComplexF2::validate() const {
  for (std::size_t i = 0; i + 1 < gens.size(); ++i)
    if (gens[i].id >= gens[i + 1].id)
      throw ValidationError("complex: generators not sorted/unique by id");
  for (const auto& [s, t] : diff) {
    if (s >= gens.size() || t >= gens.size())
      throw ValidationError("complex: differential index out of range");
    if (gens[t].degree != gens[s].degree + 1)
      throw ValidationError(cat("complex: arrow ", gens[s].id, " -> ", gens[t].id,
                                " does not raise degree by one"));
  }
  // d^2 = 0: count two-step paths mod 2 from every source
  auto adj = adjacency();
  std::map<std::uint32_t, int> hits;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    hits.clear();
    for (auto m : adj[g])
      for (auto t : adj[m]) hits[t] ^= 1;
    for (const auto& [t, parity] : hits)
      if (parity)
        throw ValidationError(cat("complex: d^2 != 0 from ", gens[g].id, " to ", gens[t].id));
  }
}

nlohmann::json GradedComplexF2::to_json() const {
  nlohmann::json j;
  j["generators"] = nlohmann::json::array();
  for (const auto& g : gens) {
    nlohmann::json jg;
    jg["id"] = g.id;
    jg["degree"] = g.degree;
    jg["aux"] = nlohmann::json::object();
    for (const auto& [k, v] : g.aux) jg["aux"][k] = v;
    j["generators"].push_back(std::move(jg));
  }
  j["differential"] = nlohmann::json::array();
  for (const auto& [s, t] : diff)
    j["differential"].push_back({gens[s].id, gens[t].id});
  return j;
}

GradedComplexF2 GradedComplexF2::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("generators") || !j.contains("differential"))
    throw ValidationError("complex json: want {\"generators\":[...],\"differential\":[...]}");
  std::vector<Generator> gens;
  for (const auto& jg : j.at("generators")) {
    Generator g;
    g.id = jg.at("id").get<std::string>();
    g.degree = jg.at("degree").get<int>();
    if (jg.contains("aux"))
      for (const auto& [k, v] : jg.at("aux").items())
        g.aux[k] = v.get<long long>();
    gens.push_back(std::move(g));
  }
  std::vector<std::pair<std::string, std::string>> arrows;
  for (const auto& ja : j.at("differential")) {
    if (!ja.is_array() || ja.size() != 2)
      throw ValidationError("complex json: differential entries are [src, dst] pairs");
    arrows.emplace_back(ja[0].get<std::string>(), ja[1].get<std::string>());
  }
  return make(std::move(gens), arrows);
}

std::vector<int> GradedComplexF2::degrees() const {
  std::vector<int> out;
  for (const auto& g : gens) out.push_back(g.degree);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> GradedComplexF2::gens_in_degree(int d) const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].degree == d) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::size_t GradedComplexF2::diff_rank(int d) const {
  auto dst = gens_in_degree(d + 1);
  std::vector<std::uint32_t> pos(gens.size(), 0);
  for (std::size_t k = 0; k < dst.size(); ++k) pos[dst[k]] = static_cast<std::uint32_t>(k);

  SparseRows rows;
  auto adj = adjacency();
  for (auto s : gens_in_degree(d)) {
    if (adj[s].empty()) continue;
    std::vector<std::uint32_t> r;
    for (auto t : adj[s]) r.push_back(pos[t]);
    rows.push_back(std::move(r));
  }
  return f2_rank(rows, dst.size());
}

std::map<int, std::size_t> GradedComplexF2::homology_ranks() const {
  validate();
  std::map<int, std::size_t> out;
  for (int d : degrees()) {
    std::size_t n = gens_in_degree(d).size();
    std::size_t r_out = diff_rank(d);
    std::size_t r_in = diff_rank(d - 1);
    std::size_t h = n - r_out - r_in;
    if (h) out[d] = h;
  }
  return out;
}

BitMatrix GradedComplexF2::homology_reps(int d) const {
  auto dom = gens_in_degree(d);
  auto dst = gens_in_degree(d + 1);
  auto src = gens_in_degree(d - 1);
  std::vector<std::uint32_t> pos(gens.size(), 0);
  for (std::size_t k = 0; k < dom.size(); ++k) pos[dom[k]] = static_cast<std::uint32_t>(k);
  std::vector<std::uint32_t> dpos(gens.size(), 0);
  for (std::size_t k = 0; k < dst.size(); ++k) dpos[dst[k]] = static_cast<std::uint32_t>(k);

  auto adj = adjacency();
  // cocycles: kernel of the block written with target rows, source columns
  BitMatrix m(dst.size(), dom.size());
  for (std::size_t c = 0; c < dom.size(); ++c)
    for (auto t : adj[dom[c]]) m.set(dpos[t], c);
  BitMatrix ker = kernel_basis(m);

  Eliminator boundaries;
  for (auto s : src) {
    std::vector<std::uint32_t> img;
    for (auto t : adj[s]) img.push_back(pos[t]);
    boundaries.add(std::move(img));
  }

  BitMatrix reps(0, dom.size());
  for (std::size_t k = 0; k < ker.rows; ++k) {
    if (boundaries.add(ker.row_support(k))) reps.append_row(ker.row_support(k));
  }
  return reps;
}

void ChainMapF2::validate() const {
  if (!src || !dst) throw ValidationError("chain map: missing endpoint complexes");
  if (images.size() != src->gens.size())
    throw ValidationError("chain map: one image list per source generator required");
  for (std::size_t i = 0; i < images.size(); ++i)
    for (auto j : images[i]) {
      if (j >= dst->gens.size())
        throw ValidationError("chain map: image index out of range");
      if (dst->gens[j].degree != src->gens[i].degree)
        throw ValidationError(cat("chain map: image of ", src->gens[i].id,
                                  " is not degree-preserving"));
    }
  auto adj_a = src->adjacency();
  auto adj_b = dst->adjacency();
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::vector<std::uint32_t> fd;  // f(da)
    for (auto m : adj_a[i]) fd = support_xor(fd, images[m]);
    std::vector<std::uint32_t> df;  // d(fa)
    for (auto j : images[i]) df = support_xor(df, adj_b[j]);
    if (fd != df)
      throw ValidationError(cat("chain map: does not commute with the differential at ",
                                src->gens[i].id));
  }
}

GradedComplexF2 mapping_cone(const ChainMapF2& f) {
  f.validate();
  const GradedComplexF2& a = *f.src;
  const GradedComplexF2& b = *f.dst;
  std::vector<Generator> gens;
  gens.reserve(a.gens.size() + b.gens.size());
  for (const auto& g : a.gens) gens.push_back({"a:" + g.id, g.degree, g.aux});
  for (const auto& g : b.gens) gens.push_back({"b:" + g.id, g.degree + 1, g.aux});

  std::vector<std::pair<std::string, std::string>> arrows;
  for (const auto& [s, t] : a.diff)
    arrows.emplace_back("a:" + a.gens[s].id, "a:" + a.gens[t].id);
  for (const auto& [s, t] : b.diff)
    arrows.emplace_back("b:" + b.gens[s].id, "b:" + b.gens[t].id);
  for (std::size_t i = 0; i < f.images.size(); ++i)
    for (auto j : f.images[i])
      arrows.emplace_back("a:" + a.gens[i].id, "b:" + b.gens[j].id);
  return GradedComplexF2::make(std::move(gens), arrows);
}

FilteredComplexF2 FilteredComplexF2::make(GradedComplexF2 c,
                                          const std::map<std::string, int>& levels) {
  FilteredComplexF2 fc;
  fc.level.resize(c.gens.size());
  for (std::size_t i = 0; i < c.gens.size(); ++i) {
    auto it = levels.find(c.gens[i].id);
    if (it == levels.end())
      throw ValidationError(cat("filtration: no level for generator '", c.gens[i].id, "'"));
    fc.level[i] = it->second;
  }
  fc.complex = std::move(c);
  return fc;
}

FilteredComplexF2 FilteredComplexF2::from_aux(GradedComplexF2 c, const std::string& key,
                                              int sign, long long offset) {
  FilteredComplexF2 fc;
  fc.level.resize(c.gens.size());
  for (std::size_t i = 0; i < c.gens.size(); ++i) {
    auto it = c.gens[i].aux.find(key);
    if (it == c.gens[i].aux.end())
      throw ValidationError(cat("filtration: generator '", c.gens[i].id,
                                "' is missing aux grading '", key, "'"));
    long long v = sign * it->second + offset;
    fc.level[i] = static_cast<int>(v);
  }
  fc.complex = std::move(c);
  return fc;
}

void FilteredComplexF2::validate() const {
  complex.validate();
  if (level.size() != complex.gens.size())
    throw ValidationError("filtration: level vector length mismatch");
  for (const auto& [s, t] : complex.diff)
    if (level[t] < level[s])
      throw ValidationError(cat("filtration: differential drops the level on ",
                                complex.gens[s].id, " -> ", complex.gens[t].id));
}

std::size_t SpectralPages::total_rank(std::size_t r) const {
  const auto& t = table(r);
  std::size_t sum = 0;
  for (const auto& [k, v] : t) sum += v;
  return sum;
}

const std::map<std::pair<int, int>, std::size_t>& SpectralPages::table(std::size_t r) const {
  if (r == 0 || r > pages.size())
    throw std::out_of_range("spectral pages: no such page");
  return pages[r - 1];
}

namespace {

// Everything below works degree by degree in local coordinates: position
// within gens_in_degree(d).
struct SpectralScratch {
  std::vector<int> degs;
  std::map<int, std::vector<std::uint32_t>> loc;      // degree -> global indices
  std::map<int, std::vector<int>> lvl;                // degree -> local levels
  std::map<int, SparseRows> block;                    // degree d -> rows per local src, local dst coords
  int max_level = 0;

  explicit SpectralScratch(const FilteredComplexF2& fc) {
    degs = fc.complex.degrees();
    std::vector<std::uint32_t> pos(fc.complex.gens.size(), 0);
    for (int d : degs) {
      auto l = fc.complex.gens_in_degree(d);
      for (std::size_t k = 0; k < l.size(); ++k) pos[l[k]] = static_cast<std::uint32_t>(k);
      loc[d] = std::move(l);
    }
    int lo = 0, hi = 0;
    bool first = true;
    for (int d : degs) {
      auto& lv = lvl[d];
      for (auto g : loc[d]) {
        lv.push_back(fc.level[g]);
        if (first || fc.level[g] < lo) lo = fc.level[g];
        if (first || fc.level[g] > hi) hi = fc.level[g];
        first = false;
      }
    }
    if (!first) {
      for (auto& [d, lv] : lvl)
        for (auto& v : lv) v -= lo;
      max_level = hi - lo;
      level_base = lo;
    }
    auto adj = fc.complex.adjacency();
    for (int d : degs) {
      auto& rows = block[d];
      rows.resize(loc[d].size());
      for (std::size_t k = 0; k < loc[d].size(); ++k)
        for (auto t : adj[loc[d][k]]) rows[k].push_back(pos[t]);
    }
  }

  int level_base = 0;

  std::size_t n_of(int d) const {
    auto it = loc.find(d);
    return it == loc.end() ? 0 : it->second.size();
  }

  // Basis of {x in F_t C^d : dx in F_{t+q} C^{d+1}} as rows over n_of(d).
  BitMatrix basis_A(int q, int t, int d) const {
    std::size_t n = n_of(d);
    BitMatrix empty(0, n);
    if (n == 0) return empty;
    const auto& levels = lvl.at(d);
    std::vector<std::uint32_t> dom;
    for (std::size_t i = 0; i < n; ++i)
      if (levels[i] >= t) dom.push_back(static_cast<std::uint32_t>(i));
    if (dom.empty()) return empty;

    int target_min = t + q;
    std::size_t n1 = n_of(d + 1);
    std::vector<std::uint32_t> bad;  // target coordinates that must vanish
    if (n1) {
      const auto& tl = lvl.at(d + 1);
      for (std::size_t i = 0; i < n1; ++i)
        if (tl[i] < target_min) bad.push_back(static_cast<std::uint32_t>(i));
    }

    std::vector<std::uint32_t> badpos(n1, 0);
    for (std::size_t k = 0; k < bad.size(); ++k) badpos[bad[k]] = static_cast<std::uint32_t>(k);
    std::vector<char> isbad(n1, 0);
    for (auto b : bad) isbad[b] = 1;

    BitMatrix m(bad.size(), dom.size());
    const auto& rows = block.at(d);
    for (std::size_t c = 0; c < dom.size(); ++c)
      for (auto tt : rows[dom[c]])
        if (isbad[tt]) m.set(badpos[tt], c);
    BitMatrix ker = kernel_basis(m);

    BitMatrix out(0, n);
    for (std::size_t k = 0; k < ker.rows; ++k) {
      out.append_row();
      for (auto c : ker.row_support(k)) out.set(out.rows - 1, dom[c]);
    }
    return out;
  }

  std::vector<std::uint32_t> image_of(const std::vector<std::uint32_t>& v, int d) const {
    std::vector<std::uint32_t> out;
    const auto& rows = block.at(d);
    for (auto i : v) out = support_xor(out, rows[i]);
    return out;
  }
};

}  // namespace

SpectralPages spectral_pages(const FilteredComplexF2& fc, std::size_t max_r) {
  fc.validate();
  SpectralScratch sc(fc);

  std::size_t r_stable_bound = static_cast<std::size_t>(sc.max_level) + 1;
  std::size_t r_top = r_stable_bound;
  if (max_r && max_r < r_top) r_top = max_r;

  // bases of A_{r-1} from the previous round, keyed (level, degree)
  std::map<std::pair<int, int>, BitMatrix> prev;
  for (int s = 0; s <= sc.max_level; ++s)
    for (int d : sc.degs) prev[{s, d}] = sc.basis_A(0, s, d);

  auto prev_or_fresh = [&](int q, int t, int d) -> BitMatrix {
    if (t >= 0 && t <= sc.max_level) {
      auto it = prev.find({t, d});
      if (it != prev.end()) return it->second;
      return BitMatrix(0, sc.n_of(d));
    }
    if (t > sc.max_level) return BitMatrix(0, sc.n_of(d));
    return sc.basis_A(q, t, d);  // t < 0: whole complex on the domain side
  };

  SpectralPages out;
  for (std::size_t r = 1; r <= r_top; ++r) {
    std::map<std::pair<int, int>, BitMatrix> cur;
    std::map<std::pair<int, int>, std::size_t> table;
    int q = static_cast<int>(r);
    for (int s = 0; s <= sc.max_level; ++s)
      for (int d : sc.degs) {
        cur[{s, d}] = sc.basis_A(q, s, d);
        std::size_t num = cur[{s, d}].rows;
        if (num == 0) continue;

        SparseRows denom;
        BitMatrix upper = prev_or_fresh(q - 1, s + 1, d);
        for (std::size_t k = 0; k < upper.rows; ++k)
          denom.push_back(upper.row_support(k));
        if (sc.n_of(d - 1)) {
          BitMatrix lower = prev_or_fresh(q - 1, s - q + 1, d - 1);
          for (std::size_t k = 0; k < lower.rows; ++k) {
            auto img = sc.image_of(lower.row_support(k), d - 1);
            if (!img.empty()) denom.push_back(std::move(img));
          }
        }
        std::size_t dim = num - f2_rank(denom, sc.n_of(d));
        if (dim) table[{d, s + sc.level_base}] = dim;
      }
    out.pages.push_back(std::move(table));
    prev = std::move(cur);
  }

  // pages are subquotients of their predecessors, so once a page matches the
  // provably stable one everything in between matches too
  if (r_top == r_stable_bound && !out.pages.empty()) {
    std::size_t stable = r_stable_bound;
    while (stable > 1 && out.pages[stable - 2] == out.pages[r_stable_bound - 1]) --stable;
    out.stable_page = stable;
    out.pages.resize(stable);
  } else {
    out.stable_page = 0;  // truncated by max_r before stabilization
  }
  return out;
}

}  // namespace khora
