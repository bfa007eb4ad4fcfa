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

#include "psv/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "psv/error.hpp"

namespace psv {

double eval(const Quartic& c, double tau) {
  return c[0] + tau * (c[1] + tau * (c[2] + tau * (c[3] + tau * c[4])));
}

double eval_rate(const Quartic& c, double tau) {
  return c[1] + tau * (2.0 * c[2] + tau * (3.0 * c[3] + tau * 4.0 * c[4]));
}

double eval_accel(const Quartic& c, double tau) {
  return 2.0 * c[2] + tau * (6.0 * c[3] + tau * 12.0 * c[4]);
}

Quartic fit_profile(double initial_value, double initial_rate, double initial_accel,
                    double terminal_value, double terminal_rate, double duration) {
  if (!(duration > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fit_profile: duration must be positive");
  }
  // The three start rows of the 5x5 system are triangular and fix c0..c2. The two end rows
  //   T^3 c3 +   T^4 c4 = a
  // 3 T^2 c3 + 4 T^3 c4 = b
  // have determinant T^6, never singular for T > 0.
  const double t = duration;
  const double c0 = initial_value;
  const double c1 = initial_rate;
  const double c2 = 0.5 * initial_accel;
  const double a = terminal_value - (c0 + c1 * t + c2 * t * t);
  const double b = terminal_rate - (c1 + 2.0 * c2 * t);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double c4 = (b * t - 3.0 * a) / (t3 * t);
  const double c3 = (4.0 * a - b * t) / t3;
  return {c0, c1, c2, c3, c4};
}

namespace {

struct Pose {
  double x, y, heading;
};

Pose derivative(const ActionProfile& p, double tau, double heading, double wheelbase) {
  const double v = std::max(0.0, eval(p.velocity_coeffs, tau));
  const double delta = eval(p.wheel_coeffs, tau);
  return {v * std::cos(heading), v * std::sin(heading), v * std::tan(delta) / wheelbase};
}

VehicleState state_at(const ActionProfile& p, double tau, const Pose& pose, double t) {
  const double raw_v = eval(p.velocity_coeffs, tau);
  VehicleState s;
  s.x = pose.x;
  s.y = pose.y;
  s.heading = pose.heading;
  s.velocity = std::max(0.0, raw_v);
  s.acceleration = raw_v > 0.0 ? eval_rate(p.velocity_coeffs, tau) : 0.0;
  s.wheel_angle = eval(p.wheel_coeffs, tau);
  s.wheel_angle_rate = eval_rate(p.wheel_coeffs, tau);
  s.t = t;
  return s;
}

}  // namespace

Transition integrate_transition(const VehicleState& parent, const ActionProfile& profile,
                                double wheelbase, double sub_step) {
  if (!(wheelbase > 0.0) || !(sub_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "integrate_transition: wheelbase and sub-step must be positive");
  }
  const auto sample_count = static_cast<int>(std::lround(profile.duration / kSampleStep));
  const int subs = std::max(1, static_cast<int>(std::ceil(kSampleStep / sub_step - 1e-9)));
  const double h = kSampleStep / subs;
  const long first_index = std::lround(parent.t / kSampleStep);

  Transition tr;
  tr.parent_state = parent;
  tr.profile = profile;
  tr.samples.reserve(sample_count + 1);
  tr.samples.push_back(parent);

  Pose pose{parent.x, parent.y, parent.heading};
  for (int k = 1; k <= sample_count; ++k) {
    for (int j = 0; j < subs; ++j) {
      const double tau = (k - 1) * kSampleStep + j * h;
      const Pose k1 = derivative(profile, tau, pose.heading, wheelbase);
      const Pose k2 = derivative(profile, tau + 0.5 * h, pose.heading + 0.5 * h * k1.heading, wheelbase);
      const Pose k3 = derivative(profile, tau + 0.5 * h, pose.heading + 0.5 * h * k2.heading, wheelbase);
      const Pose k4 = derivative(profile, tau + h, pose.heading + h * k3.heading, wheelbase);
      pose.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      pose.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
      pose.heading += h / 6.0 * (k1.heading + 2.0 * k2.heading + 2.0 * k3.heading + k4.heading);
    }
    const double t = static_cast<double>(first_index + k) * kSampleStep;
    tr.samples.push_back(state_at(profile, k * kSampleStep, pose, t));
  }
  return tr;
}

double max_wheel_angle_at(double velocity, const DynamicsLimits& limits) {
  if (velocity < 1e-6) return limits.max_wheel_angle;
  const double bound = std::atan(limits.max_lateral_acceleration * limits.wheelbase / (velocity * velocity));
  return std::min(limits.max_wheel_angle, bound);
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n <= 1) return {0.5 * (lo + hi)};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace

std::vector<ActionProfile> sample_actions(const VehicleState& state, const DynamicsLimits& limits,
                                          double duration) {
  if (state.velocity < 0.0 || std::abs(state.wheel_angle) > limits.max_wheel_angle + 1e-12) {
    return {};
  }
  if (duration < kMinTransitionDuration - 1e-9 || duration > kMaxTransitionDuration + 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "sample_actions: duration outside [1.0, 2.2] s");
  }

  const double v_lo = std::max(0.0, state.velocity - limits.max_deceleration * duration);
  const double v_hi = state.velocity + limits.max_acceleration * duration;
  const auto terminal_velocities =
      limits.velocity_steps <= 1 ? std::vector<double>{state.velocity}
                                 : linspace(v_lo, v_hi, limits.velocity_steps);

  std::vector<ActionProfile> out;
  out.reserve(terminal_velocities.size() * static_cast<std::size_t>(std::max(1, limits.wheel_steps)));
  double previous_v = -1.0;
  for (double v_end : terminal_velocities) {
    if (v_end == previous_v) continue;
    previous_v = v_end;
    const Quartic vel = fit_profile(state.velocity, state.acceleration, 0.0, v_end, 0.0, duration);
    const double delta_max = max_wheel_angle_at(v_end, limits);
    const auto wheel_targets = limits.wheel_steps <= 1 ? std::vector<double>{0.0}
                                                       : linspace(-delta_max, delta_max, limits.wheel_steps);
    for (double delta_end : wheel_targets) {
      const Quartic wheel =
          fit_profile(state.wheel_angle, state.wheel_angle_rate, 0.0, delta_end, 0.0, duration);
      bool feasible = true;
      for (double tau = 0.0; tau <= duration + 1e-9; tau += 0.05) {
        if (std::abs(eval(wheel, tau)) > limits.max_wheel_angle + 1e-9) {
          feasible = false;
          break;
        }
      }
      if (feasible) out.push_back({vel, wheel, duration});
    }
  }
  return out;
}

}  // namespace psv
