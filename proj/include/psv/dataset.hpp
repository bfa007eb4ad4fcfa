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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psv/planner.hpp"
#include "psv/value_renderer.hpp"

namespace psv {

/// Scenario state at time t of its replay stream. Scheduled objects exist only within their
/// schedule's time span; other objects and an unscheduled ego follow the prediction stub.
Scenario snapshot_at(const Scenario& scenario, double t);

/// Snapshot times k * 0.2 s in [0, duration); a scenario without stream has the single time 0.
std::vector<double> snapshot_times(const Scenario& scenario);

struct AugmentConfig {
  int variants{0};  // variants per snapshot in addition to the original
  double forward_shift_max{10.0};   // m, uniform [0, max] along the lane
  double velocity_scale_max{1.2};   // uniform [1, max]
  double lateral_offset_max{0.5};   // m, uniform [-max, max]
  double heading_jitter_max{0.1};   // rad, uniform [-max, max]

  bool is_identity() const;
};

AugmentConfig load_augment_config(const std::filesystem::path& path);
AugmentConfig parse_augment_config(const std::string& text);

struct AugmentedSnapshot {
  Scenario scenario;
  int variant{0};  // 0: original
};

/// Original plus the configured variants; variants whose ego overlaps an object at t = 0 are
/// dropped. Parameters are drawn from `seed` only.
std::vector<AugmentedSnapshot> augment(const Scenario& snapshot, const AugmentConfig& config, std::uint64_t seed);

struct ManifestRow {
  std::string input;   // sidecar path relative to the manifest directory
  std::string target;  // sidecar path relative to the manifest directory
  std::string scenario_id;
  double timestamp{0.0};
  double aspect_ratio{1.0};
  std::string variant;

  bool operator==(const ManifestRow&) const = default;
};

void write_manifest(std::span<const ManifestRow> rows, const std::filesystem::path& path);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

inline constexpr std::array<double, 5> kAspectEdges{1.0, 1.5, 2.0, 3.0, 4.0};
int aspect_bucket(double aspect_ratio);

/// Duplicates rows of minority aspect-ratio buckets (seeded, with replacement) until every
/// non-empty bucket holds at least half of the largest one. Original rows keep their order.
std::vector<ManifestRow> rebalance(std::span<const ManifestRow> rows, std::uint64_t seed);

struct DatasetConfig {
  PlannerConfig planner;
  ValueRenderConfig render;
  AugmentConfig augment;
  bool rebalance{false};
  std::uint64_t seed{0};
  int workers{0};
};

struct DatasetResult {
  std::vector<ManifestRow> rows;
  std::vector<std::string> warnings;
  int skipped_no_objects{0};
  int skipped_failures{0};
};

/// Replays every scenario at 5 Hz, plans, renders and persists input/target pairs under
/// `out_dir/pairs`, and writes `out_dir/manifest.csv`.
DatasetResult generate_dataset(std::span<const Scenario> scenarios, const std::filesystem::path& out_dir,
                               const DatasetConfig& config);
DatasetResult generate_dataset(const std::filesystem::path& scenario_dir, const std::filesystem::path& out_dir,
                               const DatasetConfig& config);

}  // namespace psv
