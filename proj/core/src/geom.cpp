#include "khora/geom.hpp"

#include <algorithm>

#include "khora/util.hpp"

namespace khora {

int sgn(const Rat& v) {
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

Pt operator+(const Pt& a, const Pt& b) { return {a.x + b.x, a.y + b.y}; }
Pt operator-(const Pt& a, const Pt& b) { return {a.x - b.x, a.y - b.y}; }
Pt operator-(const Pt& a) { return {-a.x, -a.y}; }
Pt operator*(const Rat& s, const Pt& a) { return {s * a.x, s * a.y}; }

Rat cross(const Pt& a, const Pt& b) { return a.x * b.y - a.y * b.x; }
Rat dot(const Pt& a, const Pt& b) { return a.x * b.x + a.y * b.y; }
Rat norm2(const Pt& a) { return dot(a, a); }
Rat dist2(const Pt& a, const Pt& b) { return norm2(a - b); }

Pt square_cx(const Pt& p) { return {p.x * p.x - p.y * p.y, 2 * p.x * p.y}; }

bool angle_less(const Pt& a, const Pt& b) {
  auto half = [](const Pt& v) { return (v.y < 0 || (v.y == 0 && v.x < 0)) ? 1 : 0; };
  int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0;
}

bool collinear(const Pt& a, const Pt& b, const Pt& c) {
  return cross(b - a, c - a) == 0;
}

bool on_segment(const Pt& p, const Seg& s) {
  if (!collinear(s.a, s.b, p)) return false;
  return dot(p - s.a, p - s.b) <= 0;
}

bool strictly_inside(const Pt& p, const Seg& s) {
  if (!collinear(s.a, s.b, p)) return false;
  return dot(p - s.a, p - s.b) < 0;
}

SegMeet classify_meet(const Seg& s, const Seg& t) {
  Rat d1 = cross(t.b - t.a, s.a - t.a);
  Rat d2 = cross(t.b - t.a, s.b - t.a);
  Rat d3 = cross(s.b - s.a, t.a - s.a);
  Rat d4 = cross(s.b - s.a, t.b - s.a);
  int s1 = sgn(d1), s2 = sgn(d2), s3 = sgn(d3), s4 = sgn(d4);

  if (s1 * s2 < 0 && s3 * s4 < 0) return SegMeet::proper;

  if (s1 == 0 && s2 == 0) {  // collinear (s3, s4 are then 0 too)
    // project on the dominant axis of t's direction
    Pt dir = t.b - t.a;
    auto coord = [&](const Pt& p) {
      return (dir.x != 0 ? (dir.x < 0 ? -p.x : p.x) : (dir.y < 0 ? -p.y : p.y));
    };
    Rat lo_s = std::min(coord(s.a), coord(s.b)), hi_s = std::max(coord(s.a), coord(s.b));
    Rat lo_t = std::min(coord(t.a), coord(t.b)), hi_t = std::max(coord(t.a), coord(t.b));
    Rat lo = std::max(lo_s, lo_t), hi = std::min(hi_s, hi_t);
    if (lo > hi) return SegMeet::none;
    if (lo == hi) return SegMeet::touch;
    return SegMeet::overlap;
  }

  if (s1 * s2 > 0 || s3 * s4 > 0) return SegMeet::none;

  // some endpoint sits exactly on the other segment
  if ((s1 == 0 && on_segment(s.a, t)) || (s2 == 0 && on_segment(s.b, t)) ||
      (s3 == 0 && on_segment(t.a, s)) || (s4 == 0 && on_segment(t.b, s)))
    return SegMeet::touch;
  return SegMeet::none;
}

std::optional<Pt> proper_intersection(const Seg& s, const Seg& t) {
  if (classify_meet(s, t) != SegMeet::proper) return std::nullopt;
  Pt r = s.b - s.a, v = t.b - t.a;
  Rat denom = cross(r, v);
  Rat u = cross(t.a - s.a, v) / denom;
  return s.a + u * r;
}

Rat dist2_point_seg(const Pt& p, const Seg& s) {
  Pt d = s.b - s.a;
  Rat len2 = norm2(d);
  if (len2 == 0) return dist2(p, s.a);
  Rat t = dot(p - s.a, d) / len2;
  if (t < 0) t = 0;
  if (t > 1) t = 1;
  return dist2(p, s.a + t * d);
}

Rat dist2_seg_seg(const Seg& s, const Seg& t) {
  if (classify_meet(s, t) != SegMeet::none) return Rat(0);
  Rat best = dist2_point_seg(s.a, t);
  best = std::min(best, dist2_point_seg(s.b, t));
  best = std::min(best, dist2_point_seg(t.a, s));
  best = std::min(best, dist2_point_seg(t.b, s));
  return best;
}

int ray_cross(const Pt& p, const Pt& q, const Pt& base) {
  Pt r = p - base, s = q - base;
  bool up_r = r.y >= 0, up_s = s.y >= 0;
  if (up_r == up_s) return 0;
  // exact x coordinate of the axis crossing
  Rat t = r.y / (r.y - s.y);
  Rat x = r.x + t * (s.x - r.x);
  if (x <= 0) return 0;
  return up_s ? 1 : -1;
}

long winding(const std::vector<Pt>& loop, const Pt& base) {
  long w = 0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    w += ray_cross(loop[i], loop[(i + 1) % loop.size()], base);
  return w;
}

std::string to_string(const Rat& r) {
  BigInt num = numerator(r), den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_string(const Pt& p) {
  return "(" + to_string(p.x) + ", " + to_string(p.y) + ")";
}

nlohmann::json rat_to_json(const Rat& r) {
  return nlohmann::json::array({numerator(r).str(), denominator(r).str()});
}

Rat rat_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return Rat(j.get<std::string>());
  if (j.is_array() && j.size() == 2) {
    BigInt num(j[0].get<std::string>());
    BigInt den(j[1].get<std::string>());
    if (den == 0) throw ValidationError("rational with zero denominator");
    return Rat(num, den);
  }
  throw ValidationError("rational: want [\"num\",\"den\"], a string, or an integer");
}

nlohmann::json pt_to_json(const Pt& p) {
  return nlohmann::json::array({rat_to_json(p.x), rat_to_json(p.y)});
}

Pt pt_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("point: want [x, y]");
  return {rat_from_json(j[0]), rat_from_json(j[1])};
}

}  // namespace khora
