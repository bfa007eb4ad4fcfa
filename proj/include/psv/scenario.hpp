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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psv/geometry.hpp"
#include "psv/kinematics.hpp"

namespace psv {

enum class BoundaryClass { kDashed, kSolid, kCurb };

struct Centerline {
  int id{0};
  std::vector<Vec2> points;
  std::vector<double> speed_limit;         // m/s, per point
  std::vector<double> curvature_velocity;  // m/s, per point
  std::vector<int> successors;
  std::vector<int> neighbors;

  bool operator==(const Centerline&) const = default;
};

struct Boundary {
  std::vector<Vec2> points;
  BoundaryClass kind{BoundaryClass::kDashed};

  bool operator==(const Boundary&) const = default;
};

struct RoadGraph {
  std::vector<Centerline> centerlines;
  std::vector<Boundary> boundaries;
  int target_lane_id{0};
  double max_lateral_acceleration{2.0};  // used to precompute curvature_velocity

  const Centerline* find(int lane_id) const;
  bool operator==(const RoadGraph&) const = default;
};

struct Extent {
  double length{4.8};
  double width{1.9};

  bool operator==(const Extent&) const = default;
};

struct TrafficObject {
  int id{0};
  Vec2 position;
  double heading{0.0};
  Extent extent;
  double velocity{0.0};
  double acceleration{0.0};
  bool is_static{false};

  OrientedBox box() const { return {position, heading, extent.length, extent.width}; }
  bool operator==(const TrafficObject&) const = default;
};

struct PredictedPose {
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double t{0.0};
};

struct ObjectPrediction {
  int object_id{0};
  Extent extent;
  bool is_static{false};
  std::vector<PredictedPose> samples;  // every kSampleStep from t = 0

  /// Pose at the sample nearest to t, clamped to the last sample.
  const PredictedPose& at(double t) const;
};

/// Scripted replay: waypoints are linearly interpolated in time.
struct Waypoint {
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double velocity{0.0};

  bool operator==(const Waypoint&) const = default;
};

struct StreamSpec {
  double duration{0.0};
  std::map<int, std::vector<Waypoint>> object_schedules;
  std::vector<Waypoint> ego_schedule;

  bool operator==(const StreamSpec&) const = default;
};

struct Scenario {
  std::string id;
  RoadGraph road_graph;
  std::vector<TrafficObject> objects;
  VehicleState ego;
  Extent ego_extent;
  double horizon{6.6};
  std::optional<StreamSpec> stream;

  OrientedBox ego_box() const { return {{ego.x, ego.y}, ego.heading, ego_extent.length, ego_extent.width}; }
  bool operator==(const Scenario&) const = default;
};

/// Number of samples on the kSampleStep grid covering [0, horizon].
int horizon_sample_count(double horizon);

/// Throws Error(kValidation) naming the offending field.
void validate(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
/// Every *.json scenario of a directory, sorted by file name. Files that fail to load are
/// reported through `errors` (or rethrown when it is null).
std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir, std::vector<std::string>* errors = nullptr);
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
std::string dump_scenario(const Scenario& scenario);

/// Per point: min(speed_limit, sqrt(a_lat_max / |kappa|)) with three-point circumscribed-circle
/// curvature; |kappa| < 1e-6 counts as straight.
std::vector<double> curvature_velocity(std::span<const Vec2> points, std::span<const double> speed_limit,
                                       double a_lat_max);

/// Circumscribed-circle curvature of each vertex; endpoints copy their neighbor.
std::vector<double> polyline_curvature(std::span<const Vec2> points);

/// Nearest centerline whose direction agrees with `heading` within max_heading_error.
struct LaneMatch {
  const Centerline* lane{nullptr};
  Projection projection;
};
std::optional<LaneMatch> match_lane(const RoadGraph& graph, const Vec2& p, double heading,
                                    double max_distance, double max_heading_error);

/// Nearest centerline regardless of heading. Graph must be non-empty.
LaneMatch nearest_lane(const RoadGraph& graph, const Vec2& p);

/// Travels `distance` along the lane chain (first successor) from the projection of `start`,
/// keeping the lateral offset; beyond the chain's end continues straight.
PredictedPose advance_along_lane(const RoadGraph& graph, const LaneMatch& match, double distance);

/// Lane-following capture tolerances for the prediction stub.
inline constexpr double kLaneCaptureDistance = 2.5;
inline constexpr double kLaneCaptureHeading = 0.7853981633974483;

std::vector<ObjectPrediction> predict_objects(const Scenario& scenario, double horizon);

}  // namespace psv
