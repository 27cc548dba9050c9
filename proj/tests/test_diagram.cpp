#include "khora/diagram.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "khora/util.hpp"

using namespace khora;

namespace {

std::vector<Pt> poly(std::initializer_list<std::pair<int, int>> pts) {
  std::vector<Pt> out;
  for (auto [x, y] : pts) out.push_back({Rat(x), Rat(y)});
  return out;
}

bool mentions(const std::vector<Violation>& vs, const std::string& needle) {
  for (const auto& v : vs)
    if (v.what.find(needle) != std::string::npos) return true;
  return false;
}

// square with corners at (+-r, +-r) shifted by (cx, cy), CCW from bottom-right
std::vector<Pt> square(int cx, int cy, int r) {
  return {{Rat(cx + r), Rat(cy - r)},
          {Rat(cx + r), Rat(cy + r)},
          {Rat(cx - r), Rat(cy + r)},
          {Rat(cx - r), Rat(cy - r)}};
}

// one strand winding twice around the axis, closed up through a single
// self-crossing at (1,-2); over strand runs south-to-north there
AnnularDiagram double_loop() {
  AnnularDiagram d;
  d.strands.push_back(poly({{1, 1},
                            {-1, 1},
                            {-1, -2},
                            {3, -2},
                            {3, 2},
                            {-3, 2},
                            {-3, -3},
                            {1, -3}}));
  d.crossings.push_back({{Rat(1), Rat(-2)}, {0, 7}, {0, 2}});
  return d;
}

// two square strands clasped through two crossings: an essential square
// around the axis and an inessential one to its right
AnnularDiagram clasp() {
  AnnularDiagram d;
  d.strands.push_back(square(0, 0, 2));
  std::vector<Pt> s2 = {{Rat(1), Rat(-3, 2)},
                        {Rat(5), Rat(-3, 2)},
                        {Rat(5), Rat(5, 2)},
                        {Rat(1), Rat(5, 2)}};
  d.strands.push_back(s2);
  d.crossings.push_back({{Rat(2), Rat(-3, 2)}, {0, 0}, {1, 0}});
  d.crossings.push_back({{Rat(1), Rat(2)}, {1, 3}, {0, 1}});
  return d;
}

long ray_parity(const AnnularDiagram& d) {
  long total = 0;
  for (const auto& s : d.strands) total += winding(s);
  return ((total % 2) + 2) % 2;
}

std::size_t essential_count(const StateCircles& sc) {
  std::size_t n = 0;
  for (char e : sc.essential) n += e != 0;
  return n;
}

// realized circles must form a crossing-free valid diagram on their own
void check_embedded(const StateCircles& sc) {
  AnnularDiagram d;
  d.strands = sc.circles;
  auto vs = validate(d);
  CAPTURE(vs.empty() ? "" : vs.front().what);
  CHECK(vs.empty());
}

}  // namespace

TEST_CASE("crossingless unknots validate and smooth") {
  AnnularDiagram around;
  around.strands.push_back(square(0, 0, 1));
  CHECK(validate(around).empty());
  auto sc = smooth(around, {});
  REQUIRE(sc.circles.size() == 1);
  CHECK(sc.winding[0] == 1);
  CHECK(sc.essential[0]);

  AnnularDiagram aside;
  aside.strands.push_back(square(5, 0, 1));
  CHECK(validate(aside).empty());
  auto sc2 = smooth(aside, {});
  REQUIRE(sc2.circles.size() == 1);
  CHECK(sc2.winding[0] == 0);  // winds about its own center, not the axis
  CHECK_FALSE(sc2.essential[0]);
}

TEST_CASE("validation failures carry readable reports") {
  SUBCASE("too few vertices") {
    AnnularDiagram d;
    d.strands.push_back(poly({{1, 0}, {2, 0}}));
    CHECK(mentions(validate(d), "fewer than 3"));
  }
  SUBCASE("zero-length segment") {
    AnnularDiagram d;
    d.strands.push_back(poly({{1, 0}, {1, 0}, {2, 1}}));
    CHECK(mentions(validate(d), "zero-length"));
  }
  SUBCASE("vertex on the axis") {
    AnnularDiagram d;
    d.strands.push_back(poly({{0, 0}, {2, 0}, {2, 2}}));
    CHECK(mentions(validate(d), "axis"));
  }
  SUBCASE("segment through the axis") {
    AnnularDiagram d;
    d.strands.push_back(poly({{-1, -1}, {1, 1}, {1, -1}}));
    CHECK(mentions(validate(d), "axis"));
  }
  SUBCASE("two strands sharing a vertex") {
    AnnularDiagram d;
    d.strands.push_back(square(0, 0, 1));
    d.strands.push_back(poly({{1, 1}, {4, 1}, {4, 4}}));
    CHECK(mentions(validate(d), "vertex incidence"));
  }
  SUBCASE("overlapping collinear segments") {
    AnnularDiagram d;
    d.strands.push_back(square(0, 0, 1));
    d.strands.push_back(poly({{1, -2}, {1, 2}, {6, 2}, {6, -2}}));
    CHECK(mentions(validate(d), "overlap"));
  }
  SUBCASE("fold-back within one strand") {
    AnnularDiagram d;
    d.strands.push_back(poly({{1, 1}, {5, 1}, {3, 1}, {3, 4}}));
    CHECK(mentions(validate(d), "folds back"));
  }
  SUBCASE("undeclared crossing") {
    AnnularDiagram d = clasp();
    d.crossings.clear();
    CHECK(mentions(validate(d), "undeclared crossing"));
  }
  SUBCASE("crossing at the wrong point") {
    AnnularDiagram d = clasp();
    d.crossings[0].at = {Rat(2), Rat(-1)};
    CHECK(mentions(validate(d), "disagrees"));
  }
  SUBCASE("crossing with out-of-range segment") {
    AnnularDiagram d = clasp();
    d.crossings[0].over = {7, 0};
    CHECK(mentions(validate(d), "out of range"));
  }
  SUBCASE("duplicated crossing") {
    AnnularDiagram d = clasp();
    d.crossings.push_back(d.crossings[0]);
    CHECK(mentions(validate(d), "duplicates"));
  }
  SUBCASE("require_valid throws") {
    AnnularDiagram d;
    d.strands.push_back(poly({{0, 0}, {2, 0}, {2, 2}}));
    CHECK_THROWS_AS(require_valid(d), ValidationError);
  }
}

TEST_CASE("diagram json round trip") {
  AnnularDiagram d = clasp();
  auto j = d.to_json();
  AnnularDiagram back = AnnularDiagram::from_json(j);
  CHECK(back.to_json().dump() == j.dump());
  CHECK(back.strands == d.strands);
  CHECK(back.crossings.size() == d.crossings.size());
  CHECK_THROWS_AS(AnnularDiagram::from_json(nlohmann::json::array()), ValidationError);
}

TEST_CASE("double loop smooths into the hand-traced circles") {
  AnnularDiagram d = double_loop();
  REQUIRE(validate(d).empty());
  CHECK(min_feature_dist2(d) == Rat(1));

  SmoothingPlan plan(d);
  CHECK(plan.n_crossings() == 1);
  CHECK(plan.arcs.size() == 2);

  // 0-smoothing merges the two laps into one null-homotopic circle
  auto s0 = plan.realize({0});
  REQUIRE(s0.circles.size() == 1);
  CHECK(s0.winding[0] == 0);
  CHECK_FALSE(s0.essential[0]);
  check_embedded(s0);

  // 1-smoothing splits into two circles, one lap each
  auto s1 = plan.realize({1});
  REQUIRE(s1.circles.size() == 2);
  CHECK(s1.winding[0] == 1);
  CHECK(s1.winding[1] == 1);
  CHECK(s1.essential[0]);
  CHECK(s1.essential[1]);
  check_embedded(s1);

  // trace agrees with realize, and realize's windings match a recount
  for (int bit : {0, 1}) {
    auto tr = plan.trace({bit});
    auto sc = plan.realize({bit});
    CHECK(tr.circles == sc.circles.size());
    REQUIRE(tr.windings.size() == sc.circles.size());
    for (std::size_t i = 0; i < sc.circles.size(); ++i) {
      CHECK(tr.windings[i] == sc.winding[i]);
      CHECK(winding(sc.circles[i]) == sc.winding[i]);
    }
  }
}

TEST_CASE("clasp diagram: all four states hand-checked") {
  AnnularDiagram d = clasp();
  REQUIRE(validate(d).empty());
  CHECK(min_feature_dist2(d) == Rat(1, 4));

  SmoothingPlan plan(d);
  REQUIRE(plan.n_crossings() == 2);

  auto sorted_windings = [](const StateCircles& sc) {
    auto w = sc.winding;
    std::sort(w.begin(), w.end());
    return w;
  };

  auto s00 = plan.realize({0, 0});
  CHECK(s00.circles.size() == 2);
  CHECK(sorted_windings(s00) == std::vector<long>{0, 1});

  auto s11 = plan.realize({1, 1});
  CHECK(s11.circles.size() == 2);
  CHECK(sorted_windings(s11) == std::vector<long>{0, 1});

  auto s10 = plan.realize({1, 0});
  CHECK(s10.circles.size() == 1);
  CHECK(s10.winding[0] == -1);

  auto s01 = plan.realize({0, 1});
  CHECK(s01.circles.size() == 1);
  CHECK(s01.winding[0] == -1);

  long parity = ray_parity(d);
  CHECK(parity == 1);
  for (const auto* sc : {&s00, &s01, &s10, &s11}) {
    check_embedded(*sc);
    CHECK(essential_count(*sc) % 2 == static_cast<std::size_t>(parity));
  }
}

TEST_CASE("state circle counts move by one along cube edges") {
  for (const AnnularDiagram& d : {double_loop(), clasp()}) {
    SmoothingPlan plan(d);
    std::size_t n = plan.n_crossings();
    long parity = ray_parity(d);
    for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
      std::vector<int> bits(n);
      for (std::size_t c = 0; c < n; ++c) bits[c] = (s >> c) & 1;
      auto tr = plan.trace(bits);
      CHECK(static_cast<long>(essential_count(plan.realize(bits))) % 2 == parity);
      for (std::size_t c = 0; c < n; ++c) {
        auto flipped = bits;
        flipped[c] ^= 1;
        auto tr2 = plan.trace(flipped);
        long delta = static_cast<long>(tr2.circles) - static_cast<long>(tr.circles);
        CHECK((delta == 1 || delta == -1));
      }
    }
  }
}

TEST_CASE("smoothing rejects malformed states") {
  AnnularDiagram d = double_loop();
  CHECK_THROWS_AS(smooth(d, {}), ValidationError);
  CHECK_THROWS_AS(smooth(d, {0, 1}), ValidationError);
  SmoothingPlan plan(d);
  CHECK_THROWS_AS(plan.trace({2}), ValidationError);
}
