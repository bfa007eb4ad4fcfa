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
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psv/kinematics.hpp"
#include "psv/scenario.hpp"

namespace psv {

/// Reward features. Each feature is non-negative (indicators are 0/1); the reward of a sample
/// is the weighted sum, higher is better.
enum Feature : std::size_t {
  // motion
  kAbsAcceleration,
  kAbsJerk,
  kLateralAcceleration,
  kSpeedDeviation,
  // infrastructure
  kLateralOffset,
  kHeadingMisalignment,
  kOnTargetLane,
  kBoundaryCrossing,
  // objects
  kCollision,
  kObjectProximity,
  kTimeGapShortfall,
  kFeatureCount,
};

std::string_view feature_name(Feature f);
bool is_object_feature(Feature f);

using FeatureVector = std::array<double, kFeatureCount>;

struct RewardConfig {
  FeatureVector weights{-0.1, -0.05, -0.2, -0.3, -0.5, -1.0, 1.0, -10.0, 0.0, -2.0, -1.0};
  double gamma{1.0};            // discount per second, in (0, 1]
  double time_gap{2.0};         // s, shortfall reference
  double lane_half_width{2.0};  // m, same-lane test for the time-gap feature
};

struct PruneConfig {
  double bin_x{1.0};
  double bin_y{1.0};
  double bin_heading{0.1};
  double bin_velocity{0.5};
  std::size_t max_states{2000};
};

struct PlannerConfig {
  DynamicsLimits dynamics;
  std::vector<double> layer_durations{2.2, 2.2, 2.2};
  PruneConfig prune;
  RewardConfig reward;
  double sub_step{kDefaultSubStep};
  int workers{0};  // 0: PSV_WORKERS or hardware concurrency
};

PlannerConfig load_planner_config(const std::filesystem::path& path);
PlannerConfig parse_planner_config(const std::string& text);
std::string dump_planner_config(const PlannerConfig& config);

/// Riemann sum  sum_i gamma^(i dt) r_i dt.
double policy_value(std::span<const double> step_rewards, double gamma, double dt = kSampleStep);

struct CollisionResult {
  bool collides{false};
  double first_time{0.0};
};

/// Separating-axis test of the ego footprint against every prediction at the matching 0.2 s
/// timestamp. Predictions shorter than the samples hold their last pose.
CollisionResult collision_check(std::span<const VehicleState> samples,
                                std::span<const ObjectPrediction> predictions, const Extent& ego_extent);

/// Spatial lookup structures shared by all reward evaluations of one planning call.
class RewardContext {
 public:
  RewardContext(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
                const RewardConfig& config, double wheelbase, bool object_features = true);

  const Scenario& scenario() const { return *scenario_; }
  std::span<const ObjectPrediction> predictions() const { return predictions_; }
  const RewardConfig& config() const { return config_; }
  bool object_features() const { return object_features_; }
  double wheelbase() const { return wheelbase_; }

  struct LaneQuery {
    const Centerline* lane{nullptr};
    Projection projection;
    double curvature_velocity{0.0};
  };
  LaneQuery nearest_lane(const Vec2& p) const;
  bool crosses_hard_boundary(const Vec2& a, const Vec2& b) const;

 private:
  struct Cell {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> lane_segments;      // (lane index, segment)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary_segments;  // (boundary index, segment)
  };
  long long key(long long cx, long long cy) const { return cx * 1000003LL + cy; }
  const Cell* cell(long long cx, long long cy) const;

  const Scenario* scenario_;
  std::span<const ObjectPrediction> predictions_;
  RewardConfig config_;
  double wheelbase_;
  bool object_features_;
  double cell_size_{8.0};
  std::vector<std::pair<long long, Cell>> cells_;  // sorted by key
};

struct RewardResult {
  std::vector<double> rewards;  // one per sample after the parent
  std::vector<FeatureVector> features;
  CollisionResult collision;
};

RewardResult evaluate_reward(const Transition& transition, const RewardContext& context);

/// Candidate handed to pruning: a frontier state and its partial value.
struct PruneCandidate {
  VehicleState state;
  double value{0.0};
  bool collides{false};
};

/// Buckets candidates by (x, y, heading, velocity), keeps the best of each bucket, then caps the
/// survivors by value. Returns candidate indices ordered best first. Ordering is total
/// (value, then lexicographic state, then index) so results do not depend on input order.
std::vector<std::size_t> prune(std::span<const PruneCandidate> candidates, const PruneConfig& config);

struct SearchNode {
  int parent{-1};  // -1: child of the initial state
  int layer{0};
  std::vector<VehicleState> samples;  // excludes the parent's last sample
  std::vector<double> step_rewards;
  double partial_value{0.0};
  bool collides{false};
  double first_collision_time{0.0};
};

/// A complete policy with its states materialized.
struct Policy {
  std::vector<VehicleState> samples;  // t = 0 .. H every 0.2 s
  std::vector<double> step_rewards;   // samples.size() - 1 entries
  double value{0.0};
  bool collides{false};
  double first_collision_time{0.0};
};

struct PolicyRef {
  int leaf{0};
  double value{0.0};
  bool collides{false};
  double first_collision_time{0.0};
};

struct PolicySet {
  std::string scenario_id;
  VehicleState initial_state;
  PlannerConfig config;
  std::vector<SearchNode> nodes;
  std::vector<PolicyRef> policies;
  std::size_t visited_states{0};
  bool blocked{false};  // every policy collides

  std::size_t size() const { return policies.size(); }
  std::vector<VehicleState> samples(std::size_t i) const;
  std::vector<double> step_rewards(std::size_t i) const;
  Policy policy(std::size_t i) const;
  /// Index of the best non-colliding policy by value (ties: lowest index); -1 if blocked/empty.
  int best() const;
};

/// Optional per-sample additive reward term (e.g. reward shaping).
using SampleRewardTerm = std::function<double(const VehicleState&)>;

struct PlanOptions {
  bool base_reward{true};       // false: the motion/infrastructure/object reward R is dropped
  bool object_features{true};   // false: object features and collision checks are disabled
  SampleRewardTerm extra_term;  // added to every step reward when set
};

PolicySet plan(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
               const PlannerConfig& config, const PlanOptions& options = {});

/// JSON summary of a policy set: per-policy values and collision flags plus the samples of
/// `selected` (-1: none).
std::string dump_policy_set(const PolicySet& policies, int selected);
void save_policy_set(const PolicySet& policies, int selected, const std::filesystem::path& path);

}  // namespace psv
