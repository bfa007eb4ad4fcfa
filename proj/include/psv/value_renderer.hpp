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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "psv/image.hpp"
#include "psv/input_renderer.hpp"
#include "psv/planner.hpp"
#include "psv/viewport.hpp"

namespace psv {

inline constexpr int kLayerCount = 6;
inline constexpr double kLayerInterval = 1.1;  // s
inline constexpr float kValueCutoff = 0.1f;

/// l in 1..6 with (l-1)*1.1 < t <= l*1.1; none outside (0, 6.6]. Times within 1e-9 s of a
/// boundary count as on it.
std::optional<int> temporal_layer(double t);

struct ValueRenderConfig {
  double beta{10.0};
  bool value_is_cost{false};     // true: P ~ exp(-beta V)
  bool normalize_values{true};   // min-max normalize V over the non-colliding set first
  int workers{0};
};

struct PolicyDistribution {
  std::vector<double> probabilities;  // one per policy, 0 for colliding ones
  double beta{0.0};
  double log_partition{0.0};
};

/// MaxEnt distribution over the non-colliding subset. Throws Error(kBlocked) if every policy
/// collides.
PolicyDistribution maxent_distribution(std::span<const double> values, const std::vector<bool>& collides,
                                       const ValueRenderConfig& config = {});
PolicyDistribution maxent_distribution(const PolicySet& policies, const ValueRenderConfig& config = {});

using LayerStack = std::array<Image, kLayerCount>;

/// Per-pixel max of policy probabilities along Bresenham segments between consecutive 0.2 s
/// samples, split at layer boundaries and drawn into the layer of their end time; then divided
/// by the global max and remapped onto [0.1, 1]. Untouched pixels stay 0.
LayerStack render_value_layers(std::span<const std::vector<VehicleState>> paths,
                               std::span<const double> probabilities, const Viewport& viewport,
                               const ValueRenderConfig& config = {});
/// Same result as rendering every policy path, computed once per search-tree node.
LayerStack render_value_layers(const PolicySet& policies, const PolicyDistribution& distribution,
                               const Viewport& viewport, const ValueRenderConfig& config = {});

/// Raw per-pixel max probabilities (before normalization); exposed for testing.
LayerStack rasterize_max(std::span<const std::vector<VehicleState>> paths, std::span<const double> probabilities,
                         const Viewport& viewport);
void normalize_layers(LayerStack& layers);

/// Binary occupancy of predicted object footprints per temporal layer.
LayerStack render_object_layers(std::span<const ObjectPrediction> predictions, const Viewport& viewport);

struct ValueImageSequence {
  LayerStack value_layers;
  LayerStack object_layers;
  Viewport viewport;
};

/// 12 square-frame channels: value layers 1-6 then object layers 1-6. Throws Error(kMismatch)
/// when the sequence viewport differs from the paired input viewport.
std::array<Image, 2 * kLayerCount> to_square_target(const ValueImageSequence& sequence, const Viewport& input_viewport,
                                                    const SquareTransform& square);

/// All positions visited by the policy set.
std::vector<Vec2> reachable_points(const PolicySet& policies);

/// Convenience pipeline: viewport from the reachable set, MaxEnt, value and object layers.
ValueImageSequence render_sequence(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
                                   const PolicySet& policies, const ValueRenderConfig& config = {});
ValueImageSequence render_sequence(std::span<const ObjectPrediction> predictions, const PolicySet& policies,
                                   const Viewport& viewport, const ValueRenderConfig& config = {});

void save_sequence(const ValueImageSequence& sequence, const std::filesystem::path& prefix,
                   const std::string& scenario_id = {}, double timestamp = 0.0);
/// Accepts viewport-frame sequences and square-frame stacks (value and object channels are
/// mapped back through the inverse square resize).
ValueImageSequence load_sequence(const std::filesystem::path& prefix);

}  // namespace psv
