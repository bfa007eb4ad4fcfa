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

#include <span>
#include <vector>

#include "psv/planner.hpp"
#include "psv/value_renderer.hpp"

namespace psv {

inline constexpr double kShapingEpsilon = 1e-6;

enum class ShapingMode { kShaped, kValuesOnly, kRewardOnly };

/// Nearest-pixel value of the layer containing t; 0 outside the raster or the horizon.
float pixel_lookup(double x, double y, double t, const ValueImageSequence& sequence);

/// log(max(pixel, epsilon)) at one sample.
double shaping_term(const VehicleState& state, const ValueImageSequence& sequence, double epsilon = kShapingEpsilon);

/// Sum of shaping_term * 0.2 s over the samples after the parent state.
double shaping_reward(const Transition& transition, const ValueImageSequence& sequence,
                      double epsilon = kShapingEpsilon);

/// F of every policy of an existing set, accumulated per search-tree node.
std::vector<double> shaping_scores(const PolicySet& policies, const ValueImageSequence& sequence,
                                   double epsilon = kShapingEpsilon);

/// Index of the policy with the highest F (ties: lowest index); -1 for an empty set.
int select_by_shaping(const PolicySet& policies, const ValueImageSequence& sequence,
                      double epsilon = kShapingEpsilon);

struct ShapedPlanResult {
  PolicySet policies;
  int selected{-1};  // -1 when every policy collides
  Policy policy;
};

/// shaped: R + weight * F with predictions; values_only: F alone, no predictions or object
/// features; reward_only: R with predictions (sequence unused).
ShapedPlanResult plan_with_psvn(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
                                const ValueImageSequence& sequence, const PlannerConfig& config,
                                ShapingMode mode, double weight = 1.0, double epsilon = kShapingEpsilon);

ShapingMode parse_shaping_mode(const std::string& name);

}  // namespace psv
