#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace khora {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

int sgn(const Rat& v);

struct Pt {
  Rat x, y;
  bool operator==(const Pt&) const = default;
};

Pt operator+(const Pt& a, const Pt& b);
Pt operator-(const Pt& a, const Pt& b);
Pt operator-(const Pt& a);
Pt operator*(const Rat& s, const Pt& a);

Rat cross(const Pt& a, const Pt& b);
Rat dot(const Pt& a, const Pt& b);
Rat norm2(const Pt& a);
Rat dist2(const Pt& a, const Pt& b);

// z -> z^2 on the plane seen as C
Pt square_cx(const Pt& p);

struct PtLess {
  bool operator()(const Pt& a, const Pt& b) const {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  }
};

// CCW order of directions starting at the positive x-axis; nonzero vectors
bool angle_less(const Pt& a, const Pt& b);

struct Seg {
  Pt a, b;
};

bool collinear(const Pt& a, const Pt& b, const Pt& c);
bool on_segment(const Pt& p, const Seg& s);       // endpoints included
bool strictly_inside(const Pt& p, const Seg& s);  // endpoints excluded

enum class SegMeet { none, proper, touch, overlap };
SegMeet classify_meet(const Seg& s, const Seg& t);
std::optional<Pt> proper_intersection(const Seg& s, const Seg& t);

Rat dist2_point_seg(const Pt& p, const Seg& s);
Rat dist2_seg_seg(const Seg& s, const Seg& t);

// Signed crossing of the oriented segment p->q with the horizontal ray going
// right from base. A point exactly on the ray line counts as above it, so a
// vertex on the ray never registers twice. +1 = upward pass, -1 = downward.
// Requires that neither p nor q equals base and the segment misses base.
int ray_cross(const Pt& p, const Pt& q, const Pt& base = {});

// winding number of a closed polyline around base (not on the polyline)
long winding(const std::vector<Pt>& loop, const Pt& base = {});

std::string to_string(const Rat& r);
std::string to_string(const Pt& p);

// JSON forms: a rational is ["num","den"] (decimal strings), a point is
// [rational, rational]
nlohmann::json rat_to_json(const Rat& r);
Rat rat_from_json(const nlohmann::json& j);
nlohmann::json pt_to_json(const Pt& p);
Pt pt_from_json(const nlohmann::json& j);

}  // namespace khora
