#include <doctest.h>

#include <algorithm>
#include <random>

#include "khora/geom.hpp"

using namespace khora;

static Pt P(long long x, long long y) { return {Rat(x), Rat(y)}; }
static Pt Pq(long long xn, long long xd, long long yn, long long yd) {
  return {Rat(xn, xd), Rat(yn, yd)};
}

TEST_CASE("winding around the origin") {
  std::vector<Pt> ccw = {P(1, -1), P(1, 1), P(-1, 1), P(-1, -1)};
  CHECK(winding(ccw) == 1);
  std::vector<Pt> cw(ccw.rbegin(), ccw.rend());
  CHECK(winding(cw) == -1);

  // square that misses the origin entirely
  std::vector<Pt> off = {P(2, 1), P(4, 1), P(4, 3), P(2, 3)};
  CHECK(winding(off) == 0);

  // vertex exactly on the positive ray: the upper-endpoint rule keeps the
  // count at one full turn
  std::vector<Pt> touch = {P(1, 0), P(0, 1), P(-1, 0), P(0, -1)};
  CHECK(winding(touch) == 1);

  // doubled loop winds twice
  std::vector<Pt> twice;
  for (int rep = 0; rep < 2; ++rep)
    for (auto& p : ccw) twice.push_back(p);
  CHECK(winding(twice) == 2);

  CHECK(winding(ccw, P(5, 5)) == 0);
  CHECK(winding(ccw, Pq(1, 2, 1, 2)) == 1);
}

TEST_CASE("segment meet classification") {
  CHECK(classify_meet({P(0, -1), P(0, 1)}, {P(-1, 0), P(1, 0)}) == SegMeet::proper);
  CHECK(classify_meet({P(0, 0), P(1, 0)}, {P(0, 1), P(1, 1)}) == SegMeet::none);
  // shared endpoint
  CHECK(classify_meet({P(0, 0), P(1, 1)}, {P(1, 1), P(2, 0)}) == SegMeet::touch);
  // endpoint in the middle of the other
  CHECK(classify_meet({P(0, 0), P(2, 0)}, {P(1, 0), P(1, 2)}) == SegMeet::touch);
  // collinear overlap
  CHECK(classify_meet({P(0, 0), P(2, 0)}, {P(1, 0), P(3, 0)}) == SegMeet::overlap);
  // collinear, disjoint
  CHECK(classify_meet({P(0, 0), P(1, 0)}, {P(2, 0), P(3, 0)}) == SegMeet::none);
  // collinear, touching in one point
  CHECK(classify_meet({P(0, 0), P(1, 0)}, {P(1, 0), P(3, 0)}) == SegMeet::touch);

  auto at = proper_intersection({P(0, -2), P(0, 2)}, {P(-1, -1), P(1, 1)});
  REQUIRE(at.has_value());
  CHECK(*at == P(0, 0));
  CHECK(!proper_intersection({P(0, 0), P(1, 1)}, {P(1, 1), P(2, 0)}).has_value());
}

TEST_CASE("distances are exact") {
  CHECK(dist2_point_seg(P(0, 3), {P(-1, 0), P(1, 0)}) == Rat(9));
  CHECK(dist2_point_seg(P(5, 0), {P(-1, 0), P(1, 0)}) == Rat(16));
  CHECK(dist2_point_seg(Pq(1, 2, 1, 1), {P(0, 0), P(1, 0)}) == Rat(1));
  CHECK(dist2_seg_seg({P(0, 0), P(1, 0)}, {P(0, 2), P(1, 2)}) == Rat(4));
  CHECK(dist2_seg_seg({P(0, -1), P(0, 1)}, {P(-1, 0), P(1, 0)}) == Rat(0));
}

TEST_CASE("angle order is a strict cyclic order") {
  std::vector<Pt> dirs = {P(1, 0), P(2, 1), P(0, 1), P(-1, 1), P(-1, 0),
                          P(-1, -1), P(0, -1), P(1, -1)};
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      CHECK(angle_less(dirs[i], dirs[j]) == (i < j));
    }
  // scaling does not matter
  CHECK(!angle_less(P(1, 1), P(50, 50)));
  CHECK(!angle_less(P(50, 50), P(1, 1)));
}

TEST_CASE("complex squaring doubles winding") {
  // an octagon around the origin, squared vertexwise with subdivision,
  // winds twice
  std::vector<Pt> oct = {P(2, 0),  P(2, 2),  P(0, 2),  P(-2, 2),
                         P(-2, 0), P(-2, -2), P(0, -2), P(2, -2)};
  std::vector<Pt> img;
  for (auto& p : oct) img.push_back(square_cx(p));
  CHECK(winding(img) == 2);
  CHECK(square_cx(P(0, 1)) == P(-1, 0));
  CHECK(square_cx(Pq(1, 2, 0, 1)) == Pq(1, 4, 0, 1));
}

TEST_CASE("rational json round trip") {
  Rat r(-22, 7);
  CHECK(rat_from_json(rat_to_json(r)) == r);
  CHECK(rat_to_json(r)[0] == "-22");
  CHECK(rat_to_json(r)[1] == "7");
  CHECK(rat_from_json(nlohmann::json(5)) == Rat(5));
  CHECK(rat_from_json(nlohmann::json("3/4")) == Rat(3, 4));
  Pt p = Pq(1, 3, -5, 1);
  CHECK(pt_from_json(pt_to_json(p)) == p);
}

TEST_CASE("ray crossing sign convention") {
  // upward through the positive axis
  CHECK(ray_cross(P(1, -1), P(1, 1)) == 1);
  CHECK(ray_cross(P(1, 1), P(1, -1)) == -1);
  // left of the origin: no crossing
  CHECK(ray_cross(P(-1, -1), P(-1, 1)) == 0);
  // reversal is always the negative
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    Pt a = P((int)(rng() % 9) - 4, (int)(rng() % 9) - 4);
    Pt b = P((int)(rng() % 9) - 4, (int)(rng() % 9) - 4);
    if ((a.x == 0 && a.y == 0) || (b.x == 0 && b.y == 0)) continue;
    if (a == b) continue;
    // skip segments through the origin
    if (on_segment(P(0, 0), {a, b})) continue;
    CHECK(ray_cross(a, b) == -ray_cross(b, a));
  }
}
