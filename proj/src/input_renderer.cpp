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

#include "psv/input_renderer.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace psv {

float encode_direction(double heading, double ego_heading) {
  const double rel = wrap_angle(heading - ego_heading);
  return static_cast<float>((rel + std::numbers::pi) / (2.0 * std::numbers::pi));
}

std::vector<std::pair<int, float>> lane_levels(const Scenario& scenario) {
  const auto& g = scenario.road_graph;
  std::set<int> reachable;
  std::deque<int> queue{nearest_lane(g, {scenario.ego.x, scenario.ego.y}).lane->id};
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    if (!reachable.insert(id).second) continue;
    const Centerline* c = g.find(id);
    for (int s : c->successors) queue.push_back(s);
    for (int n : c->neighbors) queue.push_back(n);
  }
  std::vector<int> others;
  for (int id : reachable) {
    if (id != g.target_lane_id) others.push_back(id);
  }
  std::vector<std::pair<int, float>> out;
  for (const auto& c : g.centerlines) {
    float level = 0.0f;
    if (c.id == g.target_lane_id) {
      level = 1.0f;
    } else if (const auto it = std::find(others.begin(), others.end(), c.id); it != others.end()) {
      const auto k = static_cast<double>(it - others.begin());
      level = static_cast<float>(0.2 + 0.7 * (k + 1.0) / (others.size() + 1.0));
    }
    out.emplace_back(c.id, level);
  }
  return out;
}

namespace {

std::array<Vec2, 4> pixel_corners(const OrientedBox& box, const Viewport& vp) {
  auto c = box.corners();
  for (auto& p : c) p = vp.to_pixel(p);
  return c;
}

float normalize(double v, double lo, double hi) {
  return static_cast<float>(std::clamp((v - lo) / (hi - lo), 0.0, 1.0));
}

}  // namespace

InputLayers render_input_layers(const Scenario& scenario, const Viewport& vp, const InputRenderConfig& cfg) {
  InputLayers layers;
  for (auto& l : layers) l = Image(vp.width_px, vp.height_px);
  const double ego_heading = scenario.ego.heading;
  const auto levels = lane_levels(scenario);

  for (std::size_t li = 0; li < scenario.road_graph.centerlines.size(); ++li) {
    const auto& c = scenario.road_graph.centerlines[li];
    const float lane_level = levels[li].second;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
      const Vec2 a = vp.to_pixel(c.points[i]);
      const Vec2 b = vp.to_pixel(c.points[i + 1]);
      const Vec2 d = c.points[i + 1] - c.points[i];
      const double speed = std::min(c.speed_limit[i], c.curvature_velocity[i]);
      draw_thick_segment(layers[kVelocityChannel], a, b, cfg.centerline_width_px, normalize(speed, 0.0, cfg.max_speed));
      draw_thick_segment(layers[kDirectionChannel], a, b, cfg.centerline_width_px,
                         encode_direction(std::atan2(d.y, d.x), ego_heading));
      if (lane_level > 0.0f) draw_thick_segment(layers[kLaneChannel], a, b, cfg.centerline_width_px, lane_level);
    }
  }

  for (const auto& b : scenario.road_graph.boundaries) {
    const float level = b.kind == BoundaryClass::kCurb    ? cfg.curb_level
                        : b.kind == BoundaryClass::kSolid ? cfg.solid_level
                                                          : cfg.dashed_level;
    for (std::size_t i = 0; i + 1 < b.points.size(); ++i) {
      draw_thick_segment(layers[kStaticChannel], vp.to_pixel(b.points[i]), vp.to_pixel(b.points[i + 1]),
                         cfg.boundary_width_px, level);
    }
  }

  for (const auto& o : scenario.objects) {
    const auto corners = pixel_corners(o.box(), vp);
    fill_convex(layers[kVelocityChannel], corners, normalize(o.velocity, 0.0, cfg.max_speed));
    fill_convex(layers[kDirectionChannel], corners, encode_direction(o.heading, ego_heading));
    fill_convex(layers[kLaneChannel], corners, normalize(o.acceleration, -cfg.accel_range, cfg.accel_range));
    if (o.is_static) fill_convex(layers[kStaticChannel], corners, 1.0f);
  }

  const auto ego = pixel_corners(scenario.ego_box(), vp);
  draw_outline(layers[kVelocityChannel], ego, cfg.ego_outline_px, normalize(scenario.ego.velocity, 0.0, cfg.max_speed));
  draw_outline(layers[kDirectionChannel], ego, cfg.ego_outline_px, encode_direction(ego_heading, ego_heading));
  draw_outline(layers[kLaneChannel], ego, cfg.ego_outline_px,
               normalize(scenario.ego.acceleration, -cfg.accel_range, cfg.accel_range));
  return layers;
}

InputImageStack render_inputs(const Scenario& scenario, const Viewport& viewport, const InputRenderConfig& config) {
  const auto layers = render_input_layers(scenario, viewport, config);
  InputImageStack stack;
  stack.viewport = viewport;
  stack.square = square_transform_for(viewport);
  for (std::size_t c = 0; c < kInputChannels; ++c) stack.channels[c] = square_resize(layers[c], stack.square);
  return stack;
}

}  // namespace psv
