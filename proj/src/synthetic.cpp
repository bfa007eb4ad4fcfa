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

#include "psv/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "psv/error.hpp"

namespace psv {

namespace {

constexpr double kLaneWidth = 3.5;
constexpr double kRoadLength = 260.0;
constexpr double kPointSpacing = 2.0;

// Reference line: straight along +x, or a left-hand arc of the given radius starting at the origin.
struct Reference {
  double radius{0.0};  // 0: straight

  Vec2 point(double s, double offset) const {
    if (radius == 0.0) return {s, offset};
    const double a = s / radius;
    const double r = radius - offset;
    return {r * std::sin(a), radius - r * std::cos(a)};
  }
  double heading(double s) const { return radius == 0.0 ? 0.0 : s / radius; }
};

std::vector<Vec2> polyline(const Reference& ref, double offset) {
  std::vector<Vec2> pts;
  for (double s = -20.0; s <= kRoadLength + 1e-9; s += kPointSpacing) pts.push_back(ref.point(s, offset));
  return pts;
}

}  // namespace

Scenario synthetic_scenario(std::uint64_t seed, const SyntheticOptions& options, const std::string& id) {
  if (options.min_objects < 0 || options.max_objects < options.min_objects) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic_scenario: bad object count range");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  Reference ref;
  if (options.shape == RoadShape::kCurve) ref.radius = uniform(90.0, 220.0);

  Scenario sc;
  sc.id = id.empty() ? "synthetic_" + std::to_string(seed) : id;
  const double limit = uniform(11.0, 16.0);
  for (int lane = 0; lane < 2; ++lane) {
    Centerline c;
    c.id = lane + 1;
    c.points = polyline(ref, lane * kLaneWidth);
    c.speed_limit.assign(c.points.size(), limit);
    c.neighbors = {lane == 0 ? 2 : 1};
    sc.road_graph.centerlines.push_back(std::move(c));
  }
  sc.road_graph.boundaries.push_back({polyline(ref, -0.5 * kLaneWidth), BoundaryClass::kCurb});
  sc.road_graph.boundaries.push_back({polyline(ref, 0.5 * kLaneWidth), BoundaryClass::kDashed});
  sc.road_graph.boundaries.push_back({polyline(ref, 1.5 * kLaneWidth), BoundaryClass::kCurb});
  sc.road_graph.target_lane_id = std::uniform_int_distribution<int>(1, 2)(rng);
  for (auto& c : sc.road_graph.centerlines) {
    c.curvature_velocity = curvature_velocity(c.points, c.speed_limit, sc.road_graph.max_lateral_acceleration);
  }

  const double ego_s = 10.0;
  const Vec2 ego_p = ref.point(ego_s, 0.0);
  sc.ego.x = ego_p.x;
  sc.ego.y = ego_p.y;
  sc.ego.heading = ref.heading(ego_s);
  sc.ego.velocity = uniform(4.0, 10.0);

  const int count = std::uniform_int_distribution<int>(options.min_objects, options.max_objects)(rng);
  std::vector<std::pair<double, int>> occupied;  // (arclength, lane)
  for (int i = 0; i < count; ++i) {
    TrafficObject o;
    o.id = i + 1;
    const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    int lane = 0;
    double s = 0.0;
    if (kind == 0) {  // lead vehicle
      s = ego_s + uniform(15.0, 45.0);
      o.velocity = uniform(0.0, 8.0);
    } else if (kind == 1) {  // parked
      s = ego_s + uniform(20.0, 60.0);
      o.is_static = true;
    } else {  // neighbor lane
      lane = 1;
      s = ego_s + uniform(-15.0, 40.0);
      o.velocity = uniform(3.0, 12.0);
    }
    bool clash = false;
    for (const auto& [os, ol] : occupied) clash |= ol == lane && std::abs(os - s) < 8.0;
    if (lane == 0 && std::abs(s - ego_s) < 8.0) clash = true;
    if (clash) continue;
    occupied.emplace_back(s, lane);
    o.position = ref.point(s, lane * kLaneWidth);
    o.heading = ref.heading(s);
    sc.objects.push_back(o);
  }
  if (static_cast<int>(sc.objects.size()) < options.min_objects) {
    // Fallback keeps the requested minimum: a lead vehicle far ahead.
    TrafficObject o;
    o.id = static_cast<int>(sc.objects.size()) + 100;
    const double s = ego_s + 70.0 + 10.0 * sc.objects.size();
    o.position = ref.point(s, 0.0);
    o.heading = ref.heading(s);
    o.velocity = 5.0;
    sc.objects.push_back(o);
  }
  if (options.stream_duration > 0.0) sc.stream = StreamSpec{options.stream_duration, {}, {}};
  validate(sc);
  return sc;
}

}  // namespace psv
