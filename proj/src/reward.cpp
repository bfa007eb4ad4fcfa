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
#include <cmath>
#include <limits>
#include <unordered_map>

#include "psv/error.hpp"
#include "psv/planner.hpp"

namespace psv {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "abs_acceleration", "abs_jerk",          "lateral_acceleration", "speed_deviation",
    "lateral_offset",   "heading_misalignment", "on_target_lane",    "boundary_crossing",
    "collision",        "object_proximity",  "time_gap_shortfall"};

bool overlaps_any(const VehicleState& s, std::span<const ObjectPrediction> predictions, const Extent& ego) {
  const OrientedBox ego_box{{s.x, s.y}, s.heading, ego.length, ego.width};
  for (const auto& p : predictions) {
    if (p.samples.empty()) continue;
    const auto& pose = p.at(s.t);
    if (boxes_overlap(ego_box, {{pose.x, pose.y}, pose.heading, p.extent.length, p.extent.width})) return true;
  }
  return false;
}

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames.at(f); }

bool is_object_feature(Feature f) { return f == kCollision || f == kObjectProximity || f == kTimeGapShortfall; }

double policy_value(std::span<const double> step_rewards, double gamma, double dt) {
  double v = 0.0;
  for (std::size_t i = 0; i < step_rewards.size(); ++i) {
    const double discount = gamma == 1.0 ? 1.0 : std::pow(gamma, static_cast<double>(i) * dt);
    v += discount * step_rewards[i] * dt;
  }
  return v;
}

CollisionResult collision_check(std::span<const VehicleState> samples,
                                std::span<const ObjectPrediction> predictions, const Extent& ego_extent) {
  for (const auto& s : samples) {
    if (overlaps_any(s, predictions, ego_extent)) return {true, s.t};
  }
  return {};
}

RewardContext::RewardContext(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
                             const RewardConfig& config, double wheelbase, bool object_features)
    : scenario_(&scenario),
      predictions_(predictions),
      config_(config),
      wheelbase_(wheelbase),
      object_features_(object_features) {
  if (!(config.gamma > 0.0 && config.gamma <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "reward gamma must be in (0, 1]");
  }
  for (double w : config.weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "reward weights must be finite");
  }
  std::unordered_map<long long, Cell> cells;
  auto insert = [&](const Vec2& a, const Vec2& b, auto&& add) {
    const auto x0 = static_cast<long long>(std::floor(std::min(a.x, b.x) / cell_size_));
    const auto x1 = static_cast<long long>(std::floor(std::max(a.x, b.x) / cell_size_));
    const auto y0 = static_cast<long long>(std::floor(std::min(a.y, b.y) / cell_size_));
    const auto y1 = static_cast<long long>(std::floor(std::max(a.y, b.y) / cell_size_));
    for (long long cx = x0; cx <= x1; ++cx) {
      for (long long cy = y0; cy <= y1; ++cy) add(cells[key(cx, cy)]);
    }
  };
  const auto& g = scenario.road_graph;
  for (std::uint32_t li = 0; li < g.centerlines.size(); ++li) {
    const auto& pts = g.centerlines[li].points;
    for (std::uint32_t si = 0; si + 1 < pts.size(); ++si) {
      insert(pts[si], pts[si + 1], [&](Cell& c) { c.lane_segments.emplace_back(li, si); });
    }
  }
  for (std::uint32_t bi = 0; bi < g.boundaries.size(); ++bi) {
    if (g.boundaries[bi].kind == BoundaryClass::kDashed) continue;
    const auto& pts = g.boundaries[bi].points;
    for (std::uint32_t si = 0; si + 1 < pts.size(); ++si) {
      insert(pts[si], pts[si + 1], [&](Cell& c) { c.boundary_segments.emplace_back(bi, si); });
    }
  }
  cells_.assign(std::make_move_iterator(cells.begin()), std::make_move_iterator(cells.end()));
  std::sort(cells_.begin(), cells_.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
}

const RewardContext::Cell* RewardContext::cell(long long cx, long long cy) const {
  const long long k = key(cx, cy);
  const auto it = std::lower_bound(cells_.begin(), cells_.end(), k,
                                   [](const auto& entry, long long v) { return entry.first < v; });
  return it != cells_.end() && it->first == k ? &it->second : nullptr;
}

namespace {

struct SegmentHit {
  double d2;
  double u;
};

SegmentHit closest_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 d = b - a;
  const double len2 = d.squared_norm();
  const double u = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return {(p - (a + d * u)).squared_norm(), u};
}

}  // namespace

RewardContext::LaneQuery RewardContext::nearest_lane(const Vec2& p) const {
  const auto& lanes = scenario_->road_graph.centerlines;
  std::uint32_t best_lane = 0, best_seg = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_u = 0.0;
  auto consider = [&](std::uint32_t li, std::uint32_t si) {
    const auto& pts = lanes[li].points;
    const auto hit = closest_on_segment(pts[si], pts[si + 1], p);
    // Lane/segment order breaks distance ties so the answer is independent of cell layout.
    if (hit.d2 < best_d2 || (hit.d2 == best_d2 && std::pair(li, si) < std::pair(best_lane, best_seg))) {
      best_d2 = hit.d2;
      best_lane = li;
      best_seg = si;
      best_u = hit.u;
    }
  };
  const auto cx = static_cast<long long>(std::floor(p.x / cell_size_));
  const auto cy = static_cast<long long>(std::floor(p.y / cell_size_));
  for (long long dx = -1; dx <= 1; ++dx) {
    for (long long dy = -1; dy <= 1; ++dy) {
      if (const Cell* c = cell(cx + dx, cy + dy)) {
        for (const auto& [li, si] : c->lane_segments) consider(li, si);
      }
    }
  }
  if (best_d2 > cell_size_ * cell_size_) {
    for (std::uint32_t li = 0; li < lanes.size(); ++li) {
      for (std::uint32_t si = 0; si + 1 < lanes[li].points.size(); ++si) consider(li, si);
    }
  }

  const auto& lane = lanes[best_lane];
  const Vec2 a = lane.points[best_seg];
  const Vec2 d = lane.points[best_seg + 1] - a;
  const double len = d.norm();
  LaneQuery q;
  q.lane = &lane;
  q.projection.segment = best_seg;
  q.projection.point = a + d * best_u;
  q.projection.distance = std::sqrt(best_d2);
  q.projection.heading = std::atan2(d.y, d.x);
  q.projection.lateral = len > 0.0 ? cross(d, p - a) / len : 0.0;
  q.projection.arclength = 0.0;  // not needed by the reward
  q.curvature_velocity = lane.curvature_velocity[best_seg] * (1.0 - best_u) +
                         lane.curvature_velocity[best_seg + 1] * best_u;
  return q;
}

bool RewardContext::crosses_hard_boundary(const Vec2& a, const Vec2& b) const {
  const auto& bounds = scenario_->road_graph.boundaries;
  const auto x0 = static_cast<long long>(std::floor(std::min(a.x, b.x) / cell_size_));
  const auto x1 = static_cast<long long>(std::floor(std::max(a.x, b.x) / cell_size_));
  const auto y0 = static_cast<long long>(std::floor(std::min(a.y, b.y) / cell_size_));
  const auto y1 = static_cast<long long>(std::floor(std::max(a.y, b.y) / cell_size_));
  for (long long cx = x0; cx <= x1; ++cx) {
    for (long long cy = y0; cy <= y1; ++cy) {
      const Cell* c = cell(cx, cy);
      if (!c) continue;
      for (const auto& [bi, si] : c->boundary_segments) {
        const auto& pts = bounds[bi].points;
        if (segments_intersect(a, b, pts[si], pts[si + 1])) return true;
      }
    }
  }
  return false;
}

RewardResult evaluate_reward(const Transition& transition, const RewardContext& ctx) {
  const auto& samples = transition.samples;
  const auto& cfg = ctx.config();
  const auto& scenario = ctx.scenario();
  const bool objects = ctx.object_features() && !ctx.predictions().empty();

  RewardResult out;
  const std::size_t n = samples.size() > 0 ? samples.size() - 1 : 0;
  out.rewards.resize(n);
  out.features.resize(n);
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const auto& s = samples[k];
    const auto& prev = samples[k - 1];
    FeatureVector f{};
    f[kAbsAcceleration] = std::abs(s.acceleration);
    f[kAbsJerk] = std::abs(s.acceleration - prev.acceleration) / kSampleStep;
    f[kLateralAcceleration] = std::abs(s.velocity * s.velocity * std::tan(s.wheel_angle) / ctx.wheelbase());

    const Vec2 p{s.x, s.y};
    const auto lane = ctx.nearest_lane(p);
    f[kSpeedDeviation] = std::abs(s.velocity - lane.curvature_velocity);
    f[kLateralOffset] = lane.projection.distance;
    f[kHeadingMisalignment] = std::abs(wrap_angle(s.heading - lane.projection.heading));
    f[kOnTargetLane] = lane.lane->id == scenario.road_graph.target_lane_id ? 1.0 : 0.0;
    f[kBoundaryCrossing] = ctx.crosses_hard_boundary({prev.x, prev.y}, p) ? 1.0 : 0.0;

    if (objects) {
      const OrientedBox ego_box{p, s.heading, scenario.ego_extent.length, scenario.ego_extent.width};
      double nearest = std::numeric_limits<double>::infinity();
      double shortfall = 0.0;
      bool hit = false;
      for (const auto& pred : ctx.predictions()) {
        if (pred.samples.empty()) continue;
        const auto& pose = pred.at(s.t);
        const Vec2 op{pose.x, pose.y};
        const OrientedBox obj_box{op, pose.heading, pred.extent.length, pred.extent.width};
        if (!hit && boxes_overlap(ego_box, obj_box)) hit = true;
        nearest = std::min(nearest, (op - p).norm());
        const Vec2 rel = rotate(op - p, -s.heading);
        if (rel.x > 0.0 && std::abs(rel.y) < cfg.lane_half_width) {
          const double gap = rel.x - 0.5 * (scenario.ego_extent.length + pred.extent.length);
          const double time_gap = gap / std::max(s.velocity, 1.0);
          shortfall = std::max(shortfall, std::clamp(cfg.time_gap - time_gap, 0.0, cfg.time_gap));
        }
      }
      f[kCollision] = hit ? 1.0 : 0.0;
      f[kObjectProximity] = std::isfinite(nearest) ? 1.0 / std::max(nearest, 1.0) : 0.0;
      f[kTimeGapShortfall] = shortfall;
      if (hit && !out.collision.collides) out.collision = {true, s.t};
    }

    double r = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) r += cfg.weights[i] * f[i];
    out.rewards[k - 1] = r;
    out.features[k - 1] = f;
  }
  return out;
}

}  // namespace psv
