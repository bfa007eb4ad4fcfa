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
#include <string>

#include "psv/scenario.hpp"

namespace psv {

enum class RoadShape { kStraight, kCurve };

struct SyntheticOptions {
  RoadShape shape{RoadShape::kStraight};
  int min_objects{1};
  int max_objects{3};
  double stream_duration{0.0};  // > 0 attaches a replay stream without schedules
};

/// Two same-direction lanes with curbs and a dashed divider, the ego on the right lane and a
/// seeded mix of lead, parked and neighbor-lane vehicles.
Scenario synthetic_scenario(std::uint64_t seed, const SyntheticOptions& options = {}, const std::string& id = {});

}  // namespace psv
