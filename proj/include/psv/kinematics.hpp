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
#include <vector>

namespace psv {

/// Time step between emitted state samples [s].
inline constexpr double kSampleStep = 0.2;
/// Internal integration sub-step [s].
inline constexpr double kDefaultSubStep = 0.01;
inline constexpr double kMinTransitionDuration = 1.0;
inline constexpr double kMaxTransitionDuration = 2.2;

struct VehicleState {
  double x{0.0};                 // m, rear-axle reference point
  double y{0.0};                 // m
  double heading{0.0};           // rad
  double velocity{0.0};          // m/s
  double acceleration{0.0};      // m/s^2
  double wheel_angle{0.0};       // rad
  double wheel_angle_rate{0.0};  // rad/s
  double t{0.0};                 // s

  bool operator==(const VehicleState&) const = default;
};

/// Quartic p(tau) = sum_k c[k] tau^k for tau in [0, duration] seconds.
using Quartic = std::array<double, 5>;

double eval(const Quartic& c, double tau);
double eval_rate(const Quartic& c, double tau);
double eval_accel(const Quartic& c, double tau);

struct ActionProfile {
  Quartic velocity_coeffs{};
  Quartic wheel_coeffs{};
  double duration{1.0};
};

struct Transition {
  VehicleState parent_state;
  ActionProfile profile;
  std::vector<VehicleState> samples;  // samples[0] == parent_state, then every kSampleStep
};

struct DynamicsLimits {
  double wheelbase{2.8};
  double max_wheel_angle{0.5};
  double max_acceleration{3.0};
  double max_deceleration{3.0};
  double max_lateral_acceleration{2.5};
  int velocity_steps{7};
  int wheel_steps{9};
};

/// Quartic with p(0)=initial_value, p'(0)=initial_rate, p''(0)=initial_accel,
/// p(T)=terminal_value, p'(T)=terminal_rate. Throws on duration <= 0.
Quartic fit_profile(double initial_value, double initial_rate, double initial_accel,
                    double terminal_value, double terminal_rate, double duration);

/// Kinematic bicycle integration (RK4 on x, y, heading) of the profile starting at `parent`.
/// Velocity is clamped at zero. Samples are emitted every kSampleStep.
Transition integrate_transition(const VehicleState& parent, const ActionProfile& profile,
                                double wheelbase, double sub_step = kDefaultSubStep);

/// Grid of terminal velocities x terminal wheel angles. Each profile reaches its terminal values
/// with zero rate at `duration`.
std::vector<ActionProfile> sample_actions(const VehicleState& state, const DynamicsLimits& limits,
                                          double duration);

/// Largest wheel angle keeping v^2 tan(delta) / wheelbase <= max lateral acceleration.
double max_wheel_angle_at(double velocity, const DynamicsLimits& limits);

}  // namespace psv
