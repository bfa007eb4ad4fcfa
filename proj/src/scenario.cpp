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

#include "psv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "psv/error.hpp"

namespace psv {

const Centerline* RoadGraph::find(int lane_id) const {
  for (const auto& c : centerlines) {
    if (c.id == lane_id) return &c;
  }
  return nullptr;
}

const PredictedPose& ObjectPrediction::at(double t) const {
  const auto i = std::clamp<long>(std::lround(t / kSampleStep), 0, static_cast<long>(samples.size()) - 1);
  return samples[static_cast<std::size_t>(i)];
}

int horizon_sample_count(double horizon) {
  return static_cast<int>(std::floor(horizon / kSampleStep + 1e-9)) + 1;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kValidation, "invalid field '" + field + "': " + why);
}

void validate_polyline(const std::vector<Vec2>& pts, const std::string& field) {
  if (pts.size() < 2) invalid(field, "polyline needs at least 2 points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y)) invalid(field, "non-finite point");
    if (i > 0 && pts[i] == pts[i - 1]) {
      invalid(field + "[" + std::to_string(i) + "]", "duplicate consecutive point");
    }
  }
}

}  // namespace

void validate(const Scenario& s) {
  const auto& g = s.road_graph;
  if (g.centerlines.empty()) invalid("road_graph.centerlines", "at least one centerline required");
  std::set<int> ids;
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x, min_y = min_x, max_y = -min_x;
  for (std::size_t i = 0; i < g.centerlines.size(); ++i) {
    const auto& c = g.centerlines[i];
    const std::string field = "road_graph.centerlines[" + std::to_string(i) + "]";
    if (!ids.insert(c.id).second) invalid(field + ".id", "duplicate lane id " + std::to_string(c.id));
    validate_polyline(c.points, field + ".points");
    if (c.speed_limit.size() != c.points.size()) invalid(field + ".speed_limit", "one value per point required");
    if (c.curvature_velocity.size() != c.points.size()) {
      invalid(field + ".curvature_velocity", "one value per point required");
    }
    for (double v : c.speed_limit) {
      if (!(v > 0.0) || !std::isfinite(v)) invalid(field + ".speed_limit", "must be positive");
    }
    for (const auto& p : c.points) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  for (std::size_t i = 0; i < g.centerlines.size(); ++i) {
    const auto& c = g.centerlines[i];
    const std::string field = "road_graph.centerlines[" + std::to_string(i) + "]";
    for (int s_id : c.successors) {
      if (!ids.count(s_id)) invalid(field + ".successors", "unknown lane id " + std::to_string(s_id));
    }
    for (int n_id : c.neighbors) {
      if (!ids.count(n_id)) invalid(field + ".neighbors", "unknown lane id " + std::to_string(n_id));
    }
  }
  for (std::size_t i = 0; i < g.boundaries.size(); ++i) {
    validate_polyline(g.boundaries[i].points, "road_graph.boundaries[" + std::to_string(i) + "].points");
  }
  if (!ids.count(g.target_lane_id)) {
    invalid("road_graph.target_lane_id", "lane " + std::to_string(g.target_lane_id) + " does not exist");
  }
  if (!(g.max_lateral_acceleration > 0.0)) invalid("road_graph.max_lateral_acceleration", "must be positive");

  std::set<int> object_ids;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    const std::string field = "objects[" + std::to_string(i) + "]";
    if (!object_ids.insert(o.id).second) invalid(field + ".id", "duplicate object id");
    if (!(o.extent.length > 0.0)) invalid(field + ".length", "must be positive");
    if (!(o.extent.width > 0.0)) invalid(field + ".width", "must be positive");
    if (o.is_static && o.velocity != 0.0) invalid(field + ".velocity", "static objects must have zero velocity");
    if (o.velocity < 0.0) invalid(field + ".velocity", "must be non-negative");
  }

  if (!(s.horizon > 0.0)) invalid("horizon", "must be positive");
  if (s.ego.velocity < 0.0) invalid("ego.velocity", "must be non-negative");
  if (!(s.ego_extent.length > 0.0) || !(s.ego_extent.width > 0.0)) invalid("ego.extent", "must be positive");
  constexpr double margin = 50.0;
  if (s.ego.x < min_x - margin || s.ego.x > max_x + margin || s.ego.y < min_y - margin ||
      s.ego.y > max_y + margin) {
    invalid("ego", "outside the road graph region");
  }
  if (s.stream && !(s.stream->duration >= 0.0)) invalid("stream.duration", "must be non-negative");
}

std::vector<double> polyline_curvature(std::span<const Vec2> pts) {
  std::vector<double> kappa(pts.size(), 0.0);
  if (pts.size() < 3) return kappa;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i - 1], b = pts[i], c = pts[i + 1];
    const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
    const double denom = ab * bc * ca;
    kappa[i] = denom > 0.0 ? 2.0 * std::abs(cross(b - a, c - a)) / denom : 0.0;
  }
  kappa.front() = kappa[1];
  kappa.back() = kappa[pts.size() - 2];
  return kappa;
}

std::vector<double> curvature_velocity(std::span<const Vec2> points, std::span<const double> speed_limit,
                                       double a_lat_max) {
  if (!(a_lat_max > 0.0)) throw Error(ErrorCode::kInvalidArgument, "curvature_velocity: a_lat_max must be positive");
  const auto kappa = polyline_curvature(points);
  std::vector<double> v(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double limit = speed_limit[i];
    v[i] = kappa[i] < 1e-6 ? limit : std::min(limit, std::sqrt(a_lat_max / kappa[i]));
  }
  return v;
}

std::optional<LaneMatch> match_lane(const RoadGraph& graph, const Vec2& p, double heading,
                                    double max_distance, double max_heading_error) {
  std::optional<LaneMatch> best;
  for (const auto& c : graph.centerlines) {
    const auto proj = project_onto_polyline(c.points, p);
    if (proj.distance > max_distance) continue;
    if (std::abs(wrap_angle(heading - proj.heading)) > max_heading_error) continue;
    if (!best || proj.distance < best->projection.distance) best = LaneMatch{&c, proj};
  }
  return best;
}

LaneMatch nearest_lane(const RoadGraph& graph, const Vec2& p) {
  LaneMatch best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : graph.centerlines) {
    const auto proj = project_onto_polyline(c.points, p);
    if (proj.distance < best_d) {
      best_d = proj.distance;
      best = {&c, proj};
    }
  }
  return best;
}

PredictedPose advance_along_lane(const RoadGraph& graph, const LaneMatch& match, double distance) {
  const Centerline* lane = match.lane;
  double s = match.projection.arclength + distance;
  const double lateral = match.projection.lateral;
  std::set<int> visited{lane->id};
  for (;;) {
    const auto cum = cumulative_arclength(lane->points);
    if (s <= cum.back() || lane->successors.empty() || !visited.insert(lane->successors.front()).second) {
      // Locate segment; past the end extrapolate along the last one.
      std::size_t seg = 0;
      while (seg + 2 < lane->points.size() && cum[seg + 1] < s) ++seg;
      const Vec2 a = lane->points[seg];
      const Vec2 d = lane->points[seg + 1] - a;
      const double len = d.norm();
      const double heading = std::atan2(d.y, d.x);
      const Vec2 on_lane = a + d * ((s - cum[seg]) / len);
      const Vec2 pos = on_lane + unit(heading + std::numbers::pi / 2.0) * lateral;
      return {pos.x, pos.y, heading, 0.0};
    }
    s -= cum.back();
    lane = graph.find(lane->successors.front());
  }
}

std::vector<ObjectPrediction> predict_objects(const Scenario& scenario, double horizon) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "predict_objects: horizon must be positive");
  const int n = horizon_sample_count(horizon);
  std::vector<ObjectPrediction> out;
  out.reserve(scenario.objects.size());
  for (const auto& o : scenario.objects) {
    ObjectPrediction pred;
    pred.object_id = o.id;
    pred.extent = o.extent;
    pred.is_static = o.is_static;
    pred.samples.reserve(n);
    const auto lane = (o.is_static || o.velocity == 0.0)
                          ? std::nullopt
                          : match_lane(scenario.road_graph, o.position, o.heading, kLaneCaptureDistance,
                                       kLaneCaptureHeading);
    for (int k = 0; k < n; ++k) {
      const double t = k * kSampleStep;
      if (o.is_static || o.velocity == 0.0) {
        pred.samples.push_back({o.position.x, o.position.y, o.heading, t});
      } else if (lane) {
        auto pose = advance_along_lane(scenario.road_graph, *lane, o.velocity * t);
        pose.t = t;
        pred.samples.push_back(pose);
      } else {
        const Vec2 p = o.position + unit(o.heading) * (o.velocity * t);
        pred.samples.push_back({p.x, p.y, o.heading, t});
      }
    }
    out.push_back(std::move(pred));
  }
  return out;
}

}  // namespace psv
