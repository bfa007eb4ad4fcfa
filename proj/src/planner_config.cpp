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

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "psv/error.hpp"
#include "psv/planner.hpp"

namespace psv {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& into) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    into = it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("planner config field '") + key + "': " + e.what());
  }
}

}  // namespace

PlannerConfig parse_planner_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("planner config: ") + e.what());
  }
  PlannerConfig c;
  if (const auto it = root.find("dynamics"); it != root.end()) {
    auto& d = c.dynamics;
    read(*it, "wheelbase", d.wheelbase);
    read(*it, "max_wheel_angle", d.max_wheel_angle);
    read(*it, "max_acceleration", d.max_acceleration);
    read(*it, "max_deceleration", d.max_deceleration);
    read(*it, "max_lateral_acceleration", d.max_lateral_acceleration);
    read(*it, "velocity_steps", d.velocity_steps);
    read(*it, "wheel_steps", d.wheel_steps);
  }
  read(root, "layer_durations", c.layer_durations);
  read(root, "sub_step", c.sub_step);
  read(root, "workers", c.workers);
  if (const auto it = root.find("prune"); it != root.end()) {
    read(*it, "bin_x", c.prune.bin_x);
    read(*it, "bin_y", c.prune.bin_y);
    read(*it, "bin_heading", c.prune.bin_heading);
    read(*it, "bin_velocity", c.prune.bin_velocity);
    read(*it, "max_states", c.prune.max_states);
  }
  if (const auto it = root.find("reward"); it != root.end()) {
    read(*it, "gamma", c.reward.gamma);
    read(*it, "time_gap", c.reward.time_gap);
    read(*it, "lane_half_width", c.reward.lane_half_width);
    if (const auto w = it->find("weights"); w != it->end()) {
      if (!w->is_object()) throw Error(ErrorCode::kParse, "planner config field 'reward.weights': expected an object");
      for (const auto& [name, value] : w->items()) {
        bool known = false;
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
          if (feature_name(static_cast<Feature>(f)) == name) {
            if (!value.is_number()) throw Error(ErrorCode::kParse, "reward weight '" + name + "' must be a number");
            c.reward.weights[f] = value.get<double>();
            known = true;
          }
        }
        if (!known) throw Error(ErrorCode::kParse, "unknown reward feature '" + name + "'");
      }
    }
  }
  if (!(c.reward.gamma > 0.0 && c.reward.gamma <= 1.0)) {
    throw Error(ErrorCode::kValidation, "planner config field 'reward.gamma' must be in (0, 1]");
  }
  if (!(c.dynamics.wheelbase > 0.0)) throw Error(ErrorCode::kValidation, "planner config field 'dynamics.wheelbase' must be positive");
  if (c.layer_durations.empty()) throw Error(ErrorCode::kValidation, "planner config field 'layer_durations' is empty");
  for (double d : c.layer_durations) {
    if (d < kMinTransitionDuration - 1e-9 || d > kMaxTransitionDuration + 1e-9) {
      throw Error(ErrorCode::kValidation, "planner config field 'layer_durations' must lie in [1.0, 2.2] s");
    }
  }
  if (c.prune.max_states == 0) throw Error(ErrorCode::kValidation, "planner config field 'prune.max_states' must be positive");
  if (!(c.prune.bin_x > 0.0 && c.prune.bin_y > 0.0 && c.prune.bin_heading > 0.0 && c.prune.bin_velocity > 0.0)) {
    throw Error(ErrorCode::kValidation, "planner config field 'prune' bin sizes must be positive");
  }
  if (c.dynamics.velocity_steps < 1 || c.dynamics.wheel_steps < 1) {
    throw Error(ErrorCode::kValidation, "planner config field 'dynamics' step counts must be >= 1");
  }
  if (!(c.sub_step > 0.0)) throw Error(ErrorCode::kValidation, "planner config field 'sub_step' must be positive");
  if (c.workers < 0) throw Error(ErrorCode::kValidation, "planner config field 'workers' must be >= 0");
  return c;
}

PlannerConfig load_planner_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open planner config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_planner_config(buf.str());
}

std::string dump_planner_config(const PlannerConfig& c) {
  json weights;
  for (std::size_t f = 0; f < kFeatureCount; ++f) weights[std::string(feature_name(static_cast<Feature>(f)))] = c.reward.weights[f];
  json root{{"dynamics",
             {{"wheelbase", c.dynamics.wheelbase},
              {"max_wheel_angle", c.dynamics.max_wheel_angle},
              {"max_acceleration", c.dynamics.max_acceleration},
              {"max_deceleration", c.dynamics.max_deceleration},
              {"max_lateral_acceleration", c.dynamics.max_lateral_acceleration},
              {"velocity_steps", c.dynamics.velocity_steps},
              {"wheel_steps", c.dynamics.wheel_steps}}},
            {"layer_durations", c.layer_durations},
            {"sub_step", c.sub_step},
            {"workers", c.workers},
            {"prune",
             {{"bin_x", c.prune.bin_x},
              {"bin_y", c.prune.bin_y},
              {"bin_heading", c.prune.bin_heading},
              {"bin_velocity", c.prune.bin_velocity},
              {"max_states", c.prune.max_states}}},
            {"reward",
             {{"gamma", c.reward.gamma},
              {"time_gap", c.reward.time_gap},
              {"lane_half_width", c.reward.lane_half_width},
              {"weights", weights}}}};
  return root.dump(2);
}

}  // namespace psv
