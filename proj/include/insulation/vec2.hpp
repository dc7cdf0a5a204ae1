#pragma once

#include <cmath>

namespace insulation {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product; positive when b is counter-clockwise from a.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

inline Vec2 normalized(const Vec2& a) {
  const double n = norm(a);
  return {a.x / n, a.y / n};
}

/// Outward normal of an edge traversed counter-clockwise (the tangent rotated clockwise).
constexpr Vec2 right_normal(const Vec2& tangent) { return {tangent.y, -tangent.x}; }

constexpr Vec2 lerp(const Vec2& a, const Vec2& b, double s) {
  return {(1.0 - s) * a.x + s * b.x, (1.0 - s) * a.y + s * b.y};
}

}  // namespace insulation
