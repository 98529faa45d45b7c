#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fermi {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Outward unit normal of a curve parametrized by normal angle, and the
// counter-clockwise tangent.
inline Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline Vec2 unit_perp(double theta) { return {-std::sin(theta), std::cos(theta)}; }

inline double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

// Distance between two positions on a circle of circumference `period`.
inline double circular_distance(double a, double b, double period) {
  double d = std::fmod(std::fabs(a - b), period);
  return std::min(d, period - d);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v, double slack = 0.0) const { return v >= lo - slack && v <= hi + slack; }
  bool intersects(const Interval& o, double slack = 0.0) const {
    return lo <= o.hi + slack && o.lo <= hi + slack;
  }
};

inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator+(Interval a, double s) { return {a.lo + s, a.hi + s}; }
inline Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval signed_interval(int sign, Interval a) { return sign >= 0 ? a : Interval{-a.hi, -a.lo}; }
inline Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

// Orthonormal frame attached to a normal angle psi: n is the outward normal
// u(psi), t the tangent u_perp(psi).
struct Frame {
  double psi = 0.0;
  Vec2 t{0.0, 1.0};
  Vec2 n{1.0, 0.0};

  static Frame at(double psi) { return Frame{psi, unit_perp(psi), unit(psi)}; }
  double coord_t(Vec2 p) const { return dot(p, t); }
  double coord_n(Vec2 p) const { return dot(p, n); }
};

// Projections of a planar set onto the two axes of a frame.
struct FrameBox {
  Interval t;
  Interval n;
};

inline FrameBox operator+(const FrameBox& a, const FrameBox& b) { return {a.t + b.t, a.n + b.n}; }
inline FrameBox signed_box(int sign, const FrameBox& b) {
  return {signed_interval(sign, b.t), signed_interval(sign, b.n)};
}

}  // namespace fermi
