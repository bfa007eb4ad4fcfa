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

#include "psv/image.hpp"
#include "psv/scenario.hpp"
#include "psv/viewport.hpp"

namespace psv {

struct InputRenderConfig {
  double max_speed{30.0};         // m/s mapped to 1.0 in the velocity channel
  double accel_range{5.0};        // [-range, range] m/s^2 mapped onto [0, 1]
  double centerline_width_px{10.0};
  double boundary_width_px{4.0};
  double ego_outline_px{3.0};
  float dashed_level{0.33f};
  float solid_level{0.66f};
  float curb_level{1.0f};
};

enum InputChannel : std::size_t { kVelocityChannel, kDirectionChannel, kLaneChannel, kStaticChannel, kInputChannels };

/// Four channels at viewport resolution.
using InputLayers = std::array<Image, kInputChannels>;

struct InputImageStack {
  InputLayers channels;  // kSquareSize x kSquareSize
  Viewport viewport;
  SquareTransform square;
};

/// Direction relative to the ego heading, (-pi, pi] mapped onto (0, 1].
float encode_direction(double heading, double ego_heading);

/// Level of each centerline in the lane channel: target lane 1.0, other lanes reachable from the
/// ego lane (successor/neighbor closure) at distinct levels in (0.2, 0.9), unreachable lanes 0.
std::vector<std::pair<int, float>> lane_levels(const Scenario& scenario);

InputLayers render_input_layers(const Scenario& scenario, const Viewport& viewport,
                                const InputRenderConfig& config = {});

InputImageStack render_inputs(const Scenario& scenario, const Viewport& viewport,
                              const InputRenderConfig& config = {});

}  // namespace psv
