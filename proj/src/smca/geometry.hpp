#pragma once

#include <cmath>

namespace smca {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Counter-clockwise rotation.
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr bool contains(double v) const { return v >= lo && v <= hi; }
  constexpr double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  constexpr double center() const { return 0.5 * (lo + hi); }
  friend constexpr bool operator==(Interval, Interval) = default;
};

// Closest point parameter u in [0,1] on segment a->b to point p.
inline double closest_parameter(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return 0.0;
  const double u = dot(p - a, ab) / len2;
  return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
}

inline Vec2 lerp(Vec2 a, Vec2 b, double u) { return a + u * (b - a); }

}  // namespace smca
