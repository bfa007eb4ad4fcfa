// Copyright 2026 The psv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace psv {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle onto (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

/// Rectangle centered on `center`, long axis along `heading`.
struct OrientedBox {
  Vec2 center;
  double heading{0.0};
  double length{0.0};
  double width{0.0};

  std::array<Vec2, 4> corners() const;
};

/// Separating-axis overlap test. Touching boxes (penetration below 1e-9 m) do not overlap.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

/// Andrew's monotone chain; counter-clockwise, no collinear points, no repeat of the first point.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

struct BoundingRect {
  Vec2 center;
  double rotation{0.0};  // direction of the long side
  double length{0.0};    // long side
  double width{0.0};     // short side
};

/// Minimum-area enclosing rectangle of a convex polygon (one side is flush with a hull edge).
/// Hulls with fewer than 3 vertices yield their axis-aligned/segment box.
BoundingRect min_area_rect(std::span<const Vec2> hull);

struct Projection {
  std::size_t segment{0};  // index of the segment's first vertex
  double arclength{0.0};   // from polyline start
  double lateral{0.0};     // signed, positive to the left of travel direction
  double distance{0.0};    // |lateral| unless the projection clamps to an end
  Vec2 point;
  double heading{0.0};     // heading of the matched segment
};

/// Closest point on a polyline (>= 2 vertices).
Projection project_onto_polyline(std::span<const Vec2> polyline, const Vec2& p);

/// Cumulative arclength at each vertex.
std::vector<double> cumulative_arclength(std::span<const Vec2> polyline);

/// Segment intersection including endpoints touching.
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

}  // namespace psv
