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

#include "psv/shaped_planner.hpp"

#include <algorithm>
#include <cmath>

#include "psv/error.hpp"

namespace psv {

float pixel_lookup(double x, double y, double t, const ValueImageSequence& sequence) {
  const auto layer = temporal_layer(t);
  if (!layer) return 0.0f;
  int px = 0, py = 0;
  if (!sequence.viewport.pixel_index({x, y}, px, py)) return 0.0f;
  return sequence.value_layers[*layer - 1].get(px, py);
}

double shaping_term(const VehicleState& s, const ValueImageSequence& sequence, double epsilon) {
  return std::log(std::max(static_cast<double>(pixel_lookup(s.x, s.y, s.t, sequence)), epsilon));
}

double shaping_reward(const Transition& transition, const ValueImageSequence& sequence, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.1)) throw Error(ErrorCode::kInvalidArgument, "shaping epsilon must be in (0, 0.1)");
  double f = 0.0;
  for (std::size_t k = 1; k < transition.samples.size(); ++k) {
    f += shaping_term(transition.samples[k], sequence, epsilon) * kSampleStep;
  }
  return f;
}

std::vector<double> shaping_scores(const PolicySet& policies, const ValueImageSequence& sequence, double epsilon) {
  // Parents precede children in the node arena.
  std::vector<double> node_f(policies.nodes.size(), 0.0);
  for (std::size_t n = 0; n < policies.nodes.size(); ++n) {
    const auto& node = policies.nodes[n];
    double f = node.parent < 0 ? 0.0 : node_f[node.parent];
    for (const auto& s : node.samples) f += shaping_term(s, sequence, epsilon) * kSampleStep;
    node_f[n] = f;
  }
  std::vector<double> out;
  out.reserve(policies.size());
  for (const auto& p : policies.policies) out.push_back(node_f[p.leaf]);
  return out;
}

int select_by_shaping(const PolicySet& policies, const ValueImageSequence& sequence, double epsilon) {
  const auto f = shaping_scores(policies, sequence, epsilon);
  if (f.empty()) return -1;
  return static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
}

ShapedPlanResult plan_with_psvn(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
                                const ValueImageSequence& sequence, const PlannerConfig& config, ShapingMode mode,
                                double weight, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.1)) throw Error(ErrorCode::kInvalidArgument, "shaping epsilon must be in (0, 0.1)");
  PlanOptions options;
  std::span<const ObjectPrediction> preds = predictions;
  switch (mode) {
    case ShapingMode::kShaped:
      options.extra_term = [&sequence, weight, epsilon](const VehicleState& s) {
        return weight * shaping_term(s, sequence, epsilon);
      };
      break;
    case ShapingMode::kValuesOnly:
      options.base_reward = false;
      options.object_features = false;
      preds = {};
      options.extra_term = [&sequence, epsilon](const VehicleState& s) { return shaping_term(s, sequence, epsilon); };
      break;
    case ShapingMode::kRewardOnly:
      break;
  }
  ShapedPlanResult out;
  out.policies = plan(scenario, preds, config, options);
  out.selected = out.policies.best();
  if (out.selected >= 0) out.policy = out.policies.policy(out.selected);
  return out;
}

ShapingMode parse_shaping_mode(const std::string& name) {
  if (name == "shaped") return ShapingMode::kShaped;
  if (name == "values_only") return ShapingMode::kValuesOnly;
  if (name == "reward_only") return ShapingMode::kRewardOnly;
  throw Error(ErrorCode::kInvalidArgument, "unknown planning mode '" + name + "'");
}

}  // namespace psv
