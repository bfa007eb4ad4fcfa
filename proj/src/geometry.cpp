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

#include "psv/geometry.hpp"

#include <algorithm>
#include <limits>

namespace psv {

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 ax = unit(heading) * (0.5 * length);
  const Vec2 ay = unit(heading + std::numbers::pi / 2.0) * (0.5 * width);
  return {center + ax + ay, center - ax + ay, center - ax - ay, center + ax - ay};
}

namespace {

// Projects the box onto `axis` and returns [min, max].
std::pair<double, double> project(const std::array<Vec2, 4>& corners, const Vec2& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : corners) {
    const double d = dot(c, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

constexpr double kTouchTolerance = 1e-9;  // m

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  // Cheap reject on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  if ((a.center - b.center).squared_norm() >= (ra + rb) * (ra + rb)) return false;

  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes{unit(a.heading), unit(a.heading + std::numbers::pi / 2.0),
                                 unit(b.heading), unit(b.heading + std::numbers::pi / 2.0)};
  for (const auto& axis : axes) {
    const auto [a_lo, a_hi] = project(ca, axis);
    const auto [b_lo, b_hi] = project(cb, axis);
    if (a_hi <= b_lo + kTouchTolerance || b_hi <= a_lo + kTouchTolerance) return false;
  }
  return true;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](const Vec2& l, const Vec2& r) {
    return l.x < r.x || (l.x == r.x && l.y < r.y);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;

  std::vector<Vec2> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = points.rbegin() + 1; it != points.rend(); ++it) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], *it - hull[k - 2]) <= 0.0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

BoundingRect min_area_rect(std::span<const Vec2> hull) {
  if (hull.empty()) return {};
  if (hull.size() < 3) {
    const Vec2 a = hull.front();
    const Vec2 b = hull.back();
    const Vec2 d = b - a;
    return {(a + b) * 0.5, d.squared_norm() > 0.0 ? std::atan2(d.y, d.x) : 0.0, d.norm(), 0.0};
  }

  BoundingRect best;
  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 edge = hull[(i + 1) % hull.size()] - hull[i];
    const double len = edge.norm();
    if (len == 0.0) continue;
    const Vec2 u = edge * (1.0 / len);
    const Vec2 v{-u.y, u.x};
    double u_lo = std::numeric_limits<double>::infinity(), u_hi = -u_lo;
    double v_lo = u_lo, v_hi = -u_lo;
    for (const auto& p : hull) {
      u_lo = std::min(u_lo, dot(p, u));
      u_hi = std::max(u_hi, dot(p, u));
      v_lo = std::min(v_lo, dot(p, v));
      v_hi = std::max(v_hi, dot(p, v));
    }
    const double area = (u_hi - u_lo) * (v_hi - v_lo);
    if (area < best_area) {
      best_area = area;
      const Vec2 c = u * (0.5 * (u_lo + u_hi)) + v * (0.5 * (v_lo + v_hi));
      const double du = u_hi - u_lo;
      const double dv = v_hi - v_lo;
      if (du >= dv) {
        best = {c, std::atan2(u.y, u.x), du, dv};
      } else {
        best = {c, std::atan2(v.y, v.x), dv, du};
      }
    }
  }
  return best;
}

Projection project_onto_polyline(std::span<const Vec2> polyline, const Vec2& p) {
  Projection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  double s0 = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Vec2 a = polyline[i];
    const Vec2 d = polyline[i + 1] - a;
    const double len2 = d.squared_norm();
    const double len = std::sqrt(len2);
    double u = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const Vec2 q = a + d * u;
    const double d2 = (p - q).squared_norm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.segment = i;
      best.arclength = s0 + u * len;
      best.point = q;
      best.heading = std::atan2(d.y, d.x);
      best.distance = std::sqrt(d2);
      best.lateral = len > 0.0 ? cross(d, p - a) / len : 0.0;
    }
    s0 += len;
  }
  return best;
}

std::vector<double> cumulative_arclength(std::span<const Vec2> polyline) {
  std::vector<double> s(polyline.size(), 0.0);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    s[i] = s[i - 1] + (polyline[i] - polyline[i - 1]).norm();
  }
  return s;
}

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const double d1 = cross(a1 - a0, b0 - a0);
  const double d2 = cross(a1 - a0, b1 - a0);
  const double d3 = cross(b1 - b0, a0 - b0);
  const double d4 = cross(b1 - b0, a1 - b0);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  return (d1 == 0 && on_segment(a0, a1, b0)) || (d2 == 0 && on_segment(a0, a1, b1)) ||
         (d3 == 0 && on_segment(b0, b1, a0)) || (d4 == 0 && on_segment(b0, b1, a1));
}

}  // namespace psv
