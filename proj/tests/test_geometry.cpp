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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "psv/geometry.hpp"

using namespace psv;

namespace {

bool point_in_convex(const std::array<Vec2, 4>& poly, const Vec2& p) {
  // corners() is counter-clockwise
  for (int i = 0; i < 4; ++i) {
    if (cross(poly[(i + 1) % 4] - poly[i], p - poly[i]) < 0.0) return false;
  }
  return true;
}

// Independent of SAT: convex polygons intersect iff edges cross or one holds a vertex of the other.
bool overlap_oracle(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners(), cb = b.corners();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (segments_intersect(ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4])) return true;
    }
  }
  return point_in_convex(ca, cb[0]) || point_in_convex(cb, ca[0]);
}

}  // namespace

TEST_CASE("wrap_angle maps onto (-pi, pi]") {
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3.0 * std::numbers::pi / 2.0) == doctest::Approx(-std::numbers::pi / 2.0));
  CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
}

TEST_CASE("box corners are counter-clockwise around the center") {
  const OrientedBox b{{1.0, 2.0}, 0.3, 4.0, 2.0};
  const auto c = b.corners();
  double area = 0.0;
  for (int i = 0; i < 4; ++i) area += cross(c[i], c[(i + 1) % 4]);
  CHECK(area / 2.0 == doctest::Approx(8.0));
}

TEST_CASE("separating axis test on a rotated corner") {
  const OrientedBox a{{0.0, 0.0}, 0.0, 2.0, 2.0};
  const double d = std::numbers::sqrt2;
  const double q = std::numbers::pi / 4.0;
  // Diamond corner pokes 5 cm into the square.
  CHECK(boxes_overlap(a, {{1.0 + d - 0.05, 0.0}, q, 2.0, 2.0}));
  CHECK_FALSE(boxes_overlap(a, {{1.0 + d + 0.05, 0.0}, q, 2.0, 2.0}));
  // Bounding boxes overlap near the square's corner, the shapes do not.
  CHECK_FALSE(boxes_overlap(a, {{1.9, 1.9}, q, 2.0, 2.0}));
  // Touching edges are not an overlap.
  CHECK_FALSE(boxes_overlap(a, {{2.0, 0.0}, 0.0, 2.0, 2.0}));
}

TEST_CASE("separating axis test agrees with an edge-intersection oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), ang(-3.2, 3.2), len(0.5, 5.0);
  int overlaps = 0;
  for (int i = 0; i < 2000; ++i) {
    const OrientedBox a{{pos(rng), pos(rng)}, ang(rng), len(rng), len(rng)};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), len(rng), len(rng)};
    const bool expected = overlap_oracle(a, b);
    overlaps += expected;
    CHECK(boxes_overlap(a, b) == expected);
    CHECK(boxes_overlap(b, a) == expected);
  }
  CHECK(overlaps > 100);
}

TEST_CASE("convex hull contains every point and is strictly convex") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pts(40);
    for (auto& p : pts) p = {g(rng), g(rng)};
    const auto hull = convex_hull(pts);
    REQUIRE(hull.size() >= 3);
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Vec2 a = hull[i], b = hull[(i + 1) % hull.size()], c = hull[(i + 2) % hull.size()];
      CHECK(cross(b - a, c - b) > 0.0);
      CHECK(std::find(pts.begin(), pts.end(), a) != pts.end());
      for (const auto& p : pts) CHECK(cross(b - a, p - a) >= -1e-9);
    }
  }
}

TEST_CASE("convex hull of collinear points keeps the extremes") {
  const auto hull = convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  REQUIRE(hull.size() == 2);
  CHECK(hull[0] == Vec2{0, 0});
  CHECK(hull[1] == Vec2{3, 3});
}

TEST_CASE("minimum-area rectangle matches a brute-force angle sweep") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts(25);
    for (auto& p : pts) p = {u(rng), 0.3 * u(rng)};
    for (auto& p : pts) p = rotate(p, trial * 0.37);
    const auto hull = convex_hull(pts);
    const auto r = min_area_rect(hull);
    double brute = std::numeric_limits<double>::infinity();
    for (double th = 0.0; th < std::numbers::pi; th += 1e-4) {
      double lo_x = 1e9, hi_x = -1e9, lo_y = 1e9, hi_y = -1e9;
      for (const auto& p : hull) {
        const Vec2 q = rotate(p, -th);
        lo_x = std::min(lo_x, q.x), hi_x = std::max(hi_x, q.x);
        lo_y = std::min(lo_y, q.y), hi_y = std::max(hi_y, q.y);
      }
      brute = std::min(brute, (hi_x - lo_x) * (hi_y - lo_y));
    }
    CHECK(r.length >= r.width);
    CHECK(r.length * r.width <= brute + 1e-6);
    CHECK(r.length * r.width >= brute * (1.0 - 1e-3));
    for (const auto& p : pts) {
      const Vec2 q = rotate(p - r.center, -r.rotation);
      CHECK(std::abs(q.x) <= 0.5 * r.length + 1e-7);
      CHECK(std::abs(q.y) <= 0.5 * r.width + 1e-7);
    }
  }
}

TEST_CASE("polyline projection matches dense sampling") {
  const std::vector<Vec2> line{{0, 0}, {10, 0}, {10, 10}, {20, 15}};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 25.0);
  const auto cum = cumulative_arclength(line);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{u(rng), u(rng)};
    double best = 1e18;
    for (std::size_t s = 0; s + 1 < line.size(); ++s) {
      for (int k = 0; k <= 2000; ++k) best = std::min(best, (line[s] + (line[s + 1] - line[s]) * (k / 2000.0) - p).norm());
    }
    const auto proj = project_onto_polyline(line, p);
    CHECK(proj.distance == doctest::Approx(best).epsilon(1e-3));
    CHECK((proj.point - p).norm() == doctest::Approx(proj.distance));
    CHECK(proj.arclength >= 0.0);
    CHECK(proj.arclength <= cum.back() + 1e-9);
  }
  const auto left = project_onto_polyline(line, {5.0, 2.0});
  CHECK(left.lateral == doctest::Approx(2.0));
  CHECK(left.arclength == doctest::Approx(5.0));
}

TEST_CASE("segment intersection") {
  CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  CHECK(segments_intersect({0, 0}, {1, 0}, {1, 0}, {1, 5}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {2, 0}, {3, 0}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 1}, {0, 1}, {0.4, 0.6 + 1e-3}));
}
