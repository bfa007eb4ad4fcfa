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
#include <string>
#include <vector>

#include "psv/planner.hpp"
#include "psv/value_renderer.hpp"

namespace psv {

inline constexpr double kOtgThresholdSquared = 2.0;  // m^2

/// Minimum |t_ego - t_obj| over sample pairs whose centers are closer than sqrt(threshold);
/// +infinity when no pair qualifies.
double otg(std::span<const VehicleState> policy, std::span<const ObjectPrediction> predictions,
           double threshold_squared = kOtgThresholdSquared);

/// Arc length of the sampled path.
double progress(std::span<const VehicleState> policy);

enum class Metric { kOtg, kProgress };

inline constexpr int kMatrixBins = 8;

/// OTG bins [0,1) .. [6,7), then [7, inf]; progress bins [0,10) .. [60,70), then >= 70.
int metric_bin(Metric metric, double value);

struct ConfusionMatrix {
  Metric metric{Metric::kOtg};
  std::array<std::array<int, kMatrixBins>, kMatrixBins> counts{};  // [reward bin][values bin]
  int skipped{0};
  int total() const;
};

/// One pair per scenario: (reward_only metric, values_only metric). Pairs with a missing side
/// are counted in `skipped`.
ConfusionMatrix confusion_matrix(std::span<const std::pair<std::optional<double>, std::optional<double>>> pairs,
                                 Metric metric);

enum class ValueSource { kOracle, kInferred };

struct BenchmarkConfig {
  PlannerConfig planner;
  ValueRenderConfig render;
  ValueSource source{ValueSource::kOracle};
  std::filesystem::path inferred_dir;
  double otg_threshold_squared{kOtgThresholdSquared};
  int workers{0};  // scenario-level parallelism
};

struct ScenarioResult {
  std::string scenario_id;
  bool ok{false};
  std::string error;
  std::optional<double> reward_otg, values_otg;
  std::optional<double> reward_progress, values_progress;
};

struct BenchmarkReport {
  std::vector<ScenarioResult> results;  // sorted by scenario id
  ConfusionMatrix otg_matrix{Metric::kOtg};
  ConfusionMatrix progress_matrix{Metric::kProgress};
  std::vector<std::string> warnings;
  double values_otg_at_least_1s_rate{0.0};      // OTG >= 1 s or infinite
  double values_progress_at_least_reward_rate{0.0};
  double mean_reward_progress{0.0};
  double mean_values_progress{0.0};
  int values_otg_zero_count{0};
};

/// Oracle-rendered (or inferred) values for one scenario, with the reward_only plan it came from.
struct ScenarioEvaluation {
  ScenarioResult result;
  std::optional<Policy> reward_policy;
  std::optional<Policy> values_policy;
};
ScenarioEvaluation evaluate_scenario(const Scenario& scenario, const BenchmarkConfig& config,
                                     const ValueImageSequence* inferred = nullptr);

BenchmarkReport run_benchmark(std::span<const Scenario> scenarios, const BenchmarkConfig& config);
/// Loads every *.json scenario of the directory (sorted by file name).
BenchmarkReport run_benchmark(const std::filesystem::path& scenario_dir, const BenchmarkConfig& config);

std::string report_to_json(const BenchmarkReport& report);
std::string report_to_text(const BenchmarkReport& report);
/// Writes report.json, report.txt, otg_matrix.png and progress_matrix.png.
void write_report(const BenchmarkReport& report, const std::filesystem::path& out_dir);
Image render_matrix(const ConfusionMatrix& matrix, int cell_px = 32);

/// Value sequence for a scenario in an inferred directory: `<dir>/<id>.json`, else any sidecar
/// with 12 channels whose scenario_id matches (lowest timestamp first).
std::optional<std::filesystem::path> find_inferred_sequence(const std::filesystem::path& dir,
                                                            const std::string& scenario_id);

}  // namespace psv
