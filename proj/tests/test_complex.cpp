#include <doctest.h>

#include <random>

#include "khora/complex.hpp"
#include "khora/util.hpp"

using namespace khora;

static GradedComplexF2 two_layer(int n0, int n1,
                                 const std::vector<std::pair<int, int>>& arrows) {
  std::vector<Generator> gens;
  std::vector<std::pair<std::string, std::string>> named;
  for (int i = 0; i < n0; ++i) gens.push_back({"x" + std::to_string(i), 0, {}});
  for (int i = 0; i < n1; ++i) gens.push_back({"y" + std::to_string(i), 1, {}});
  for (auto [s, t] : arrows)
    named.emplace_back("x" + std::to_string(s), "y" + std::to_string(t));
  return GradedComplexF2::make(std::move(gens), named);
}

TEST_CASE("homology of tiny pinned complexes") {
  // two generators, no differential
  auto c0 = two_layer(2, 0, {});
  CHECK(c0.homology_ranks() == std::map<int, std::size_t>{{0, 2}});
  // x -> y kills both
  auto c1 = two_layer(1, 1, {{0, 0}});
  CHECK(c1.homology_ranks().empty());
  // all-ones 2x2: one class survives on each side
  auto c2 = two_layer(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(c2.homology_ranks() == std::map<int, std::size_t>{{0, 1}, {1, 1}});
}

TEST_CASE("structural validation rejects bad complexes") {
  std::vector<Generator> gens = {{"x", 0, {}}, {"z", 2, {}}};
  auto bad_step = GradedComplexF2::make(std::move(gens), {{"x", "z"}});
  CHECK_THROWS_AS(bad_step.validate(), ValidationError);

  // x -> y -> z is not a complex over F2
  std::vector<Generator> g2 = {{"x", 0, {}}, {"y", 1, {}}, {"z", 2, {}}};
  auto bad_sq = GradedComplexF2::make(std::move(g2), {{"x", "y"}, {"y", "z"}});
  CHECK_THROWS_AS(bad_sq.validate(), ValidationError);

  // doubled arrow via a second path is fine: d^2 counts mod 2
  std::vector<Generator> g3 = {{"x", 0, {}}, {"y0", 1, {}}, {"y1", 1, {}}, {"z", 2, {}}};
  auto ok = GradedComplexF2::make(
      std::move(g3), {{"x", "y0"}, {"x", "y1"}, {"y0", "z"}, {"y1", "z"}});
  CHECK_NOTHROW(ok.validate());

  CHECK_THROWS_AS(GradedComplexF2::make({{"x", 0, {}}, {"x", 0, {}}}, {}),
                  ValidationError);
}

TEST_CASE("json round trip is byte stable and lexicographically ordered") {
  std::vector<Generator> gens = {{"b", 1, {{"q", 3}}}, {"a", 0, {{"q", 1}, {"k", -1}}}};
  auto c = GradedComplexF2::make(std::move(gens), {{"a", "b"}});
  CHECK(c.gens[0].id == "a");  // sorted on construction
  auto j = c.to_json();
  auto c2 = GradedComplexF2::from_json(j);
  CHECK(c2.to_json().dump() == j.dump());
  CHECK(j["generators"][0]["id"] == "a");
  CHECK(j["generators"][0]["aux"]["k"] == -1);
  CHECK(j["differential"][0] == nlohmann::json({"a", "b"}));
}

// random three-layer complex with d^2 = 0 by construction: the 0->1 block is
// built from kernel vectors of the 1->2 block
static GradedComplexF2 random_complex(std::mt19937& rng, int n0, int n1, int n2) {
  BitMatrix d1(n2, n1);  // rows = targets, cols = sources
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n1; ++j)
      if (rng() % 3 == 0) d1.set(i, j);
  BitMatrix ker = kernel_basis(d1);

  std::vector<Generator> gens;
  std::vector<std::pair<std::string, std::string>> arrows;
  for (int i = 0; i < n0; ++i) gens.push_back({"x" + std::to_string(i), 0, {}});
  for (int i = 0; i < n1; ++i) gens.push_back({"y" + std::to_string(i), 1, {}});
  for (int i = 0; i < n2; ++i) gens.push_back({"z" + std::to_string(i), 2, {}});

  for (int c = 0; c < n0; ++c) {
    std::vector<int> img(n1, 0);
    for (std::size_t k = 0; k < ker.rows; ++k)
      if (rng() % 2)
        for (int j = 0; j < n1; ++j) img[j] ^= ker.get(k, j) ? 1 : 0;
    for (int j = 0; j < n1; ++j)
      if (img[j]) arrows.emplace_back("x" + std::to_string(c), "y" + std::to_string(j));
  }
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n2; ++i)
      if (d1.get(i, j)) arrows.emplace_back("y" + std::to_string(j), "z" + std::to_string(i));
  return GradedComplexF2::make(std::move(gens), arrows);
}

TEST_CASE("homology representatives really represent") {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 40; ++trial) {
    auto c = random_complex(rng, 4 + rng() % 4, 4 + rng() % 4, 3 + rng() % 3);
    c.validate();
    auto ranks = c.homology_ranks();
    for (int d = 0; d <= 2; ++d) {
      BitMatrix reps = c.homology_reps(d);
      std::size_t want = ranks.count(d) ? ranks[d] : 0;
      CHECK(reps.rows == want);

      // each rep is a cocycle
      auto dom = c.gens_in_degree(d);
      auto adj = c.adjacency();
      for (std::size_t k = 0; k < reps.rows; ++k) {
        std::vector<std::uint32_t> img;
        for (std::size_t i = 0; i < dom.size(); ++i)
          if (reps.get(k, i)) img = support_xor(img, adj[dom[i]]);
        CHECK(img.empty());
      }
    }
  }
}

TEST_CASE("mapping cone conventions") {
  std::mt19937 rng(5);
  auto a = random_complex(rng, 5, 6, 4);

  SUBCASE("cone of the identity is acyclic") {
    ChainMapF2 id{&a, &a, {}};
    id.images.resize(a.gens.size());
    for (std::size_t i = 0; i < a.gens.size(); ++i)
      id.images[i] = {static_cast<std::uint32_t>(i)};
    auto cone = mapping_cone(id);
    cone.validate();
    CHECK(cone.homology_ranks().empty());
  }

  SUBCASE("cone of the zero map stacks source in place, target one up") {
    auto b = random_complex(rng, 4, 5, 3);
    ChainMapF2 zero{&a, &b, {}};
    zero.images.resize(a.gens.size());
    auto cone = mapping_cone(zero);
    cone.validate();
    auto ra = a.homology_ranks();
    auto rb = b.homology_ranks();
    std::map<int, std::size_t> want;
    for (auto [d, r] : ra) want[d] += r;
    for (auto [d, r] : rb) want[d + 1] += r;
    std::map<int, std::size_t> cleaned;
    for (auto [d, r] : want)
      if (r) cleaned[d] = r;
    CHECK(cone.homology_ranks() == cleaned);
  }

  SUBCASE("non chain maps are rejected") {
    auto b = two_layer(1, 1, {{0, 0}});
    auto z = two_layer(1, 1, {});
    // x has zero differential upstairs but lands on the source of x -> y
    ChainMapF2 f{&z, &b, {}};
    f.images.resize(2);
    f.images[z.index_of("x0")] = {b.index_of("x0")};
    CHECK_THROWS_AS(mapping_cone(f), ValidationError);
  }
}

TEST_CASE("spectral pages on pinned examples") {
  SUBCASE("trivial filtration reproduces homology at page one") {
    std::mt19937 rng(17);
    auto c = random_complex(rng, 5, 6, 4);
    auto want = c.homology_ranks();
    std::map<std::string, int> lv;
    for (const auto& g : c.gens) lv[g.id] = 7;
    auto fc = FilteredComplexF2::make(std::move(c), lv);
    auto sp = spectral_pages(fc);
    CHECK(sp.stable_page == 1);
    std::map<int, std::size_t> got;
    for (const auto& [key, v] : sp.table(1)) {
      CHECK(key.second == 7);
      got[key.first] = v;
    }
    CHECK(got == want);
  }

  SUBCASE("one arrow across adjacent levels dies on page two") {
    std::vector<Generator> gens = {{"x", 0, {}}, {"y", 1, {}}};
    auto c = GradedComplexF2::make(std::move(gens), {{"x", "y"}});
    auto fc = FilteredComplexF2::make(std::move(c), {{"x", 0}, {"y", 1}});
    auto sp = spectral_pages(fc);
    CHECK(sp.total_rank(1) == 2);
    CHECK(sp.stable_page == 2);
    CHECK(sp.total_rank(2) == 0);
    CHECK(sp.table(1).at({0, 0}) == 1);
    CHECK(sp.table(1).at({1, 1}) == 1);
  }

  SUBCASE("level-decreasing differential is rejected") {
    std::vector<Generator> gens = {{"x", 0, {}}, {"y", 1, {}}};
    auto c = GradedComplexF2::make(std::move(gens), {{"x", "y"}});
    auto fc = FilteredComplexF2::make(std::move(c), {{"x", 1}, {"y", 0}});
    CHECK_THROWS_AS(spectral_pages(fc), ValidationError);
  }
}

// random filtered complex: levels forced monotone along the differential
static FilteredComplexF2 random_filtered(std::mt19937& rng) {
  auto c = random_complex(rng, 3 + rng() % 4, 4 + rng() % 4, 2 + rng() % 4);
  std::map<std::string, int> lv;
  for (const auto& g : c.gens) lv[g.id] = rng() % 3;
  // push levels up along arrows until monotone
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [s, t] : c.diff) {
      if (lv[c.gens[t].id] < lv[c.gens[s].id]) {
        lv[c.gens[t].id] = lv[c.gens[s].id];
        changed = true;
      }
    }
  }
  return FilteredComplexF2::make(std::move(c), lv);
}

TEST_CASE("spectral invariants on random filtered complexes") {
  std::mt19937 rng(90210);
  for (int trial = 0; trial < 30; ++trial) {
    auto fc = random_filtered(rng);
    auto sp = spectral_pages(fc);
    REQUIRE(sp.stable_page >= 1);

    // non-increasing total rank
    for (std::size_t r = 1; r < sp.stable_page; ++r)
      CHECK(sp.total_rank(r) >= sp.total_rank(r + 1));

    // stable page collapsed over level = plain homology
    std::map<int, std::size_t> collapsed;
    for (const auto& [key, v] : sp.table(sp.stable_page)) collapsed[key.first] += v;
    std::map<int, std::size_t> cleaned;
    for (auto [d, v] : collapsed)
      if (v) cleaned[d] = v;
    CHECK(cleaned == fc.complex.homology_ranks());

    // page one = homology of the associated graded, level by level
    std::map<std::pair<int, int>, std::size_t> gr_want;
    std::map<int, std::vector<std::size_t>> by_level;
    for (std::size_t i = 0; i < fc.complex.gens.size(); ++i)
      by_level[fc.level[i]].push_back(i);
    for (const auto& [lvlv, idxs] : by_level) {
      std::vector<Generator> gens;
      std::vector<std::pair<std::string, std::string>> arrows;
      for (auto i : idxs) gens.push_back(fc.complex.gens[i]);
      for (const auto& [s, t] : fc.complex.diff)
        if (fc.level[s] == lvlv && fc.level[t] == lvlv)
          arrows.emplace_back(fc.complex.gens[s].id, fc.complex.gens[t].id);
      auto gr = GradedComplexF2::make(std::move(gens), arrows);
      for (auto [d, v] : gr.homology_ranks()) gr_want[{d, lvlv}] = v;
    }
    CHECK(sp.table(1) == gr_want);
  }
}

TEST_CASE("levels can be read off an aux grading") {
  std::vector<Generator> gens = {{"x", 0, {{"k", 3}}}, {"y", 1, {{"k", 1}}}};
  auto c = GradedComplexF2::make(std::move(gens), {{"x", "y"}});

  // level = (k_max - k) / 2 style renormalization: sign -1, offset 3
  auto fc = FilteredComplexF2::from_aux(c, "k", -1, 3);
  CHECK(fc.level[fc.complex.index_of("x")] == 0);
  CHECK(fc.level[fc.complex.index_of("y")] == 2);
  CHECK_NOTHROW(fc.validate());

  CHECK_THROWS_AS(FilteredComplexF2::from_aux(c, "zz"), ValidationError);
}
