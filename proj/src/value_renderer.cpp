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

#include "psv/value_renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psv/error.hpp"
#include "psv/parallel.hpp"
#include "psv/stack_io.hpp"

namespace psv {

std::optional<int> temporal_layer(double t) {
  constexpr double eps = 1e-9;
  if (t <= eps || t > kLayerCount * kLayerInterval + eps) return std::nullopt;
  const int l = static_cast<int>(std::ceil(t / kLayerInterval - eps));
  return std::clamp(l, 1, kLayerCount);
}

PolicyDistribution maxent_distribution(std::span<const double> values, const std::vector<bool>& collides,
                                       const ValueRenderConfig& config) {
  if (values.size() != collides.size()) {
    throw Error(ErrorCode::kInvalidArgument, "maxent_distribution: values and collision flags differ in length");
  }
  if (!(config.beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "maxent_distribution: beta must be positive");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (collides[i]) continue;
    ++free_count;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  if (free_count == 0) throw Error(ErrorCode::kBlocked, "maxent_distribution: every policy collides");

  const double sign = config.value_is_cost ? -1.0 : 1.0;
  const double span = hi - lo;
  std::vector<double> logits(values.size(), -std::numeric_limits<double>::infinity());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (collides[i]) continue;
    const double v = config.normalize_values ? (span > 0.0 ? (values[i] - lo) / span : 0.0) : values[i];
    logits[i] = sign * config.beta * v;
    max_logit = std::max(max_logit, logits[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!collides[i]) sum += std::exp(logits[i] - max_logit);
  }
  const double log_z = max_logit + std::log(sum);

  PolicyDistribution d;
  d.beta = config.beta;
  d.log_partition = log_z;
  d.probabilities.assign(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!collides[i]) d.probabilities[i] = std::exp(logits[i] - log_z);
  }
  return d;
}

PolicyDistribution maxent_distribution(const PolicySet& policies, const ValueRenderConfig& config) {
  std::vector<double> values;
  std::vector<bool> collides;
  values.reserve(policies.size());
  for (const auto& p : policies.policies) {
    values.push_back(p.value);
    collides.push_back(p.collides);
  }
  return maxent_distribution(values, collides, config);
}

namespace {

void draw_piece(Image& layer, const Vec2& a, const Vec2& b, float p, const Viewport& vp) {
  const Vec2 pa = vp.to_pixel(a);
  const Vec2 pb = vp.to_pixel(b);
  const double w = vp.width_px, h = vp.height_px;
  if ((pa.x < 0 && pb.x < 0) || (pa.y < 0 && pb.y < 0) || (pa.x >= w && pb.x >= w) || (pa.y >= h && pb.y >= h)) {
    return;
  }
  bresenham(static_cast<int>(std::floor(pa.x)), static_cast<int>(std::floor(pa.y)),
            static_cast<int>(std::floor(pb.x)), static_cast<int>(std::floor(pb.y)),
            [&](int x, int y) { layer.put_max(x, y, p); });
}

// Splits the segment a -> b at layer boundaries; each piece goes to the layer of its end time.
// Only pieces landing in `only_layer` (1-based) are drawn.
void draw_segment(LayerStack& layers, const VehicleState& a, const VehicleState& b, float p, const Viewport& vp,
                  int only_layer) {
  constexpr double eps = 1e-9;
  Vec2 start{a.x, a.y};
  double t_start = a.t;
  const Vec2 end{b.x, b.y};
  const double dt = b.t - a.t;
  for (int l = 1; l < kLayerCount; ++l) {
    const double boundary = l * kLayerInterval;
    if (boundary > a.t + eps && boundary < b.t - eps) {
      const double u = (boundary - a.t) / dt;
      const Vec2 cut = Vec2{a.x, a.y} + (end - Vec2{a.x, a.y}) * u;
      if (l == only_layer) draw_piece(layers[l - 1], start, cut, p, vp);
      start = cut;
      t_start = boundary;
    }
  }
  if (const auto l = temporal_layer(b.t); l && *l == only_layer && b.t > t_start) {
    draw_piece(layers[*l - 1], start, end, p, vp);
  }
}

LayerStack empty_layers(const Viewport& vp) {
  LayerStack layers;
  for (auto& l : layers) l = Image(vp.width_px, vp.height_px);
  return layers;
}

}  // namespace

LayerStack rasterize_max(std::span<const std::vector<VehicleState>> paths, std::span<const double> probabilities,
                         const Viewport& viewport) {
  if (paths.size() != probabilities.size()) {
    throw Error(ErrorCode::kInvalidArgument, "render_value_layers: distribution does not match the policy list");
  }
  auto layers = empty_layers(viewport);
  for (int l = 1; l <= kLayerCount; ++l) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto p = static_cast<float>(probabilities[i]);
      if (!(p > 0.0f)) continue;
      const auto& path = paths[i];
      for (std::size_t k = 1; k < path.size(); ++k) draw_segment(layers, path[k - 1], path[k], p, viewport, l);
    }
  }
  return layers;
}

void normalize_layers(LayerStack& layers) {
  float m = 0.0f;
  for (const auto& l : layers) {
    for (float v : l.pixels()) m = std::max(m, v);
  }
  if (!(m > 0.0f)) return;
  for (auto& l : layers) {
    for (float& v : l.pixels()) {
      if (v > 0.0f) {
        const double q = static_cast<double>(v) / m;
        v = static_cast<float>(std::clamp(1.0 - (1.0 - kValueCutoff) * (1.0 - q), double{kValueCutoff}, 1.0));
      }
    }
  }
}

LayerStack render_value_layers(std::span<const std::vector<VehicleState>> paths, std::span<const double> probabilities,
                               const Viewport& viewport, const ValueRenderConfig&) {
  auto layers = rasterize_max(paths, probabilities, viewport);
  normalize_layers(layers);
  return layers;
}

LayerStack render_value_layers(const PolicySet& policies, const PolicyDistribution& distribution,
                               const Viewport& viewport, const ValueRenderConfig& config) {
  if (distribution.probabilities.size() != policies.size()) {
    throw Error(ErrorCode::kInvalidArgument, "render_value_layers: distribution does not match the policy set");
  }
  // A node's pixels carry the max probability of any policy sharing it.
  std::vector<float> node_p(policies.nodes.size(), 0.0f);
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const int leaf = policies.policies[i].leaf;
    node_p[leaf] = std::max(node_p[leaf], static_cast<float>(distribution.probabilities[i]));
  }
  for (std::size_t n = policies.nodes.size(); n-- > 0;) {
    const int parent = policies.nodes[n].parent;
    if (parent >= 0) node_p[parent] = std::max(node_p[parent], node_p[n]);
  }

  auto layers = empty_layers(viewport);
  parallel_for(kLayerCount, std::min(kLayerCount, resolve_workers(config.workers)), [&](std::size_t li) {
    const int layer = static_cast<int>(li) + 1;
    const double lo = (layer - 1) * kLayerInterval - 1e-6, hi = layer * kLayerInterval + 1e-6;
    for (std::size_t n = 0; n < policies.nodes.size(); ++n) {
      const float p = node_p[n];
      if (!(p > 0.0f)) continue;
      const auto& node = policies.nodes[n];
      if (node.samples.empty()) continue;
      const VehicleState* prev = node.parent < 0 ? &policies.initial_state : &policies.nodes[node.parent].samples.back();
      if (node.samples.back().t < lo || prev->t > hi) continue;
      for (const auto& s : node.samples) {
        draw_segment(layers, *prev, s, p, viewport, layer);
        prev = &s;
      }
    }
  });
  normalize_layers(layers);
  return layers;
}

LayerStack render_object_layers(std::span<const ObjectPrediction> predictions, const Viewport& viewport) {
  auto layers = empty_layers(viewport);
  for (const auto& pred : predictions) {
    for (const auto& s : pred.samples) {
      const auto l = temporal_layer(s.t);
      if (!l) continue;
      auto corners = OrientedBox{{s.x, s.y}, s.heading, pred.extent.length, pred.extent.width}.corners();
      for (auto& c : corners) c = viewport.to_pixel(c);
      fill_convex(layers[*l - 1], corners, 1.0f);
    }
  }
  return layers;
}

std::array<Image, 2 * kLayerCount> to_square_target(const ValueImageSequence& sequence, const Viewport& input_viewport,
                                                    const SquareTransform& square) {
  if (!(sequence.viewport == input_viewport) || square.src_width != input_viewport.width_px ||
      square.src_height != input_viewport.height_px) {
    throw Error(ErrorCode::kMismatch, "to_square_target: sequence viewport does not match the paired input");
  }
  std::array<Image, 2 * kLayerCount> out;
  for (int l = 0; l < kLayerCount; ++l) {
    out[l] = square_resize(sequence.value_layers[l], square);
    out[kLayerCount + l] = square_resize(sequence.object_layers[l], square);
  }
  return out;
}

std::vector<Vec2> reachable_points(const PolicySet& policies) {
  std::vector<Vec2> out{{policies.initial_state.x, policies.initial_state.y}};
  for (const auto& n : policies.nodes) {
    for (const auto& s : n.samples) out.push_back({s.x, s.y});
  }
  return out;
}

ValueImageSequence render_sequence(std::span<const ObjectPrediction> predictions, const PolicySet& policies,
                                   const Viewport& viewport, const ValueRenderConfig& config) {
  ValueImageSequence seq;
  seq.viewport = viewport;
  seq.value_layers = render_value_layers(policies, maxent_distribution(policies, config), viewport, config);
  seq.object_layers = render_object_layers(predictions, viewport);
  return seq;
}

ValueImageSequence render_sequence(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
                                   const PolicySet& policies, const ValueRenderConfig& config) {
  return render_sequence(predictions, policies, fit_viewport(scenario, reachable_points(policies)), config);
}

namespace {

std::vector<std::string> sequence_channel_names() {
  std::vector<std::string> names;
  for (int l = 1; l <= kLayerCount; ++l) names.push_back("value_" + std::to_string(l));
  for (int l = 1; l <= kLayerCount; ++l) names.push_back("object_" + std::to_string(l));
  return names;
}

}  // namespace

void save_sequence(const ValueImageSequence& sequence, const std::filesystem::path& prefix,
                   const std::string& scenario_id, double timestamp) {
  std::vector<Image> channels(sequence.value_layers.begin(), sequence.value_layers.end());
  channels.insert(channels.end(), sequence.object_layers.begin(), sequence.object_layers.end());
  StackMeta meta;
  meta.kind = "sequence";
  meta.frame = Frame::kViewport;
  meta.viewport = sequence.viewport;
  meta.square = square_transform_for(sequence.viewport);
  meta.scenario_id = scenario_id;
  meta.timestamp = timestamp;
  meta.channel_names = sequence_channel_names();
  save_stack(prefix, channels, meta);
}

ValueImageSequence load_sequence(const std::filesystem::path& prefix) {
  auto stack = load_stack(prefix);
  if (stack.channels.size() != 2 * kLayerCount) {
    throw Error(ErrorCode::kMismatch, "load_sequence: expected 12 channels, found " + std::to_string(stack.channels.size()));
  }
  ValueImageSequence seq;
  seq.viewport = stack.meta.viewport;
  for (int l = 0; l < 2 * kLayerCount; ++l) {
    Image img = stack.meta.frame == Frame::kSquare ? inverse_square_resize(stack.channels[l], stack.meta.square)
                                                   : std::move(stack.channels[l]);
    if (img.width() != seq.viewport.width_px || img.height() != seq.viewport.height_px) {
      throw Error(ErrorCode::kMismatch, "load_sequence: channel size does not match the viewport");
    }
    (l < kLayerCount ? seq.value_layers[l] : seq.object_layers[l - kLayerCount]) = std::move(img);
  }
  return seq;
}

}  // namespace psv
