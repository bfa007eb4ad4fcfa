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

#include "json.hpp"
#include "psv/error.hpp"
#include "psv/planner.hpp"

namespace psv {

std::string dump_policy_set(const PolicySet& policies, int selected) {
  using nlohmann::json;
  json values = json::array(), collides = json::array();
  for (const auto& p : policies.policies) {
    values.push_back(p.value);
    collides.push_back(p.collides);
  }
  json j{{"scenario_id", policies.scenario_id},
         {"policy_count", policies.size()},
         {"visited_states", policies.visited_states},
         {"blocked", policies.blocked},
         {"best", policies.best()},
         {"selected", selected},
         {"values", values},
         {"collides", collides}};
  if (selected >= 0 && static_cast<std::size_t>(selected) < policies.size()) {
    const auto p = policies.policy(selected);
    json samples = json::array();
    for (const auto& s : p.samples) {
      samples.push_back({s.t, s.x, s.y, s.heading, s.velocity, s.acceleration, s.wheel_angle, s.wheel_angle_rate});
    }
    j["selected_policy"] = {{"columns", {"t", "x", "y", "heading", "velocity", "acceleration", "wheel_angle",
                                         "wheel_angle_rate"}},
                            {"samples", samples},
                            {"step_rewards", p.step_rewards},
                            {"value", p.value}};
  }
  return j.dump(1) + "\n";
}

void save_policy_set(const PolicySet& policies, int selected, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << dump_policy_set(policies, selected);
  if (!out) throw Error(ErrorCode::kIo, "cannot write policy dump " + path.string());
}

}  // namespace psv
