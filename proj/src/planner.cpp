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

#include "psv/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "psv/error.hpp"
#include "psv/parallel.hpp"

namespace psv {

namespace {

bool lexicographically_less(const VehicleState& a, const VehicleState& b) {
  return std::tie(a.x, a.y, a.heading, a.velocity) < std::tie(b.x, b.y, b.heading, b.velocity);
}

// Total order used by pruning: non-colliding first, higher value, smaller state, smaller index.
bool ranks_before(const PruneCandidate& a, std::size_t ia, const PruneCandidate& b, std::size_t ib) {
  if (a.collides != b.collides) return !a.collides;
  if (a.value != b.value) return a.value > b.value;
  if (lexicographically_less(a.state, b.state)) return true;
  if (lexicographically_less(b.state, a.state)) return false;
  return ia < ib;
}

}  // namespace

std::vector<std::size_t> prune(std::span<const PruneCandidate> candidates, const PruneConfig& config) {
  if (!(config.bin_x > 0.0 && config.bin_y > 0.0 && config.bin_heading > 0.0 && config.bin_velocity > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "prune: bin sizes must be positive");
  }
  using Bucket = std::array<long long, 4>;
  std::map<Bucket, std::size_t> winners;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& s = candidates[i].state;
    const Bucket b{static_cast<long long>(std::floor(s.x / config.bin_x)),
                   static_cast<long long>(std::floor(s.y / config.bin_y)),
                   static_cast<long long>(std::floor(wrap_angle(s.heading) / config.bin_heading)),
                   static_cast<long long>(std::floor(s.velocity / config.bin_velocity))};
    auto [it, inserted] = winners.try_emplace(b, i);
    if (!inserted && ranks_before(candidates[i], i, candidates[it->second], it->second)) it->second = i;
  }
  std::vector<std::size_t> out;
  out.reserve(winners.size());
  for (const auto& [bucket, index] : winners) out.push_back(index);
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before(candidates[a], a, candidates[b], b);
  });
  if (out.size() > config.max_states) out.resize(config.max_states);
  return out;
}

std::vector<VehicleState> PolicySet::samples(std::size_t i) const {
  std::vector<int> chain;
  for (int n = policies.at(i).leaf; n >= 0; n = nodes[n].parent) chain.push_back(n);
  std::vector<VehicleState> out{initial_state};
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const auto& s = nodes[*it].samples;
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<double> PolicySet::step_rewards(std::size_t i) const {
  std::vector<int> chain;
  for (int n = policies.at(i).leaf; n >= 0; n = nodes[n].parent) chain.push_back(n);
  std::vector<double> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const auto& r = nodes[*it].step_rewards;
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

Policy PolicySet::policy(std::size_t i) const {
  const auto& ref = policies.at(i);
  return {samples(i), step_rewards(i), ref.value, ref.collides, ref.first_collision_time};
}

int PolicySet::best() const {
  int best = -1;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (policies[i].collides) continue;
    if (best < 0 || policies[i].value > policies[best].value) best = static_cast<int>(i);
  }
  return best;
}

PolicySet plan(const Scenario& scenario, std::span<const ObjectPrediction> predictions,
               const PlannerConfig& config, const PlanOptions& options) {
  if (config.layer_durations.empty()) throw Error(ErrorCode::kInvalidArgument, "plan: no layers configured");
  const double total = std::accumulate(config.layer_durations.begin(), config.layer_durations.end(), 0.0);
  if (total + 1e-9 < scenario.horizon) {
    throw Error(ErrorCode::kInvalidArgument, "plan: layer durations do not cover the horizon");
  }
  for (double d : config.layer_durations) {
    const double steps = d / kSampleStep;
    if (std::abs(steps - std::round(steps)) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument, "plan: layer durations must be multiples of 0.2 s");
    }
  }

  const bool objects = options.object_features && options.base_reward;
  const std::span<const ObjectPrediction> preds = objects ? predictions : std::span<const ObjectPrediction>{};
  RewardContext ctx(scenario, preds, config.reward, config.dynamics.wheelbase, objects);
  const int workers = resolve_workers(config.workers);

  PolicySet out;
  out.scenario_id = scenario.id;
  out.initial_state = scenario.ego;
  out.initial_state.t = 0.0;
  out.config = config;

  const bool root_collides = objects && collision_check({&out.initial_state, 1}, preds, scenario.ego_extent).collides;

  // Frontier entries are node indices; -1 is the initial state.
  std::vector<int> frontier{-1};
  const std::size_t layers = config.layer_durations.size();
  for (std::size_t layer = 0; layer < layers; ++layer) {
    const double duration = config.layer_durations[layer];
    std::vector<std::vector<SearchNode>> expanded(frontier.size());
    parallel_for(frontier.size(), workers, [&](std::size_t fi) {
      const int parent = frontier[fi];
      const VehicleState& from = parent < 0 ? out.initial_state : out.nodes[parent].samples.back();
      const double parent_value = parent < 0 ? 0.0 : out.nodes[parent].partial_value;
      const bool parent_collides = parent < 0 ? root_collides : out.nodes[parent].collides;
      const double parent_collision_t = parent < 0 ? 0.0 : out.nodes[parent].first_collision_time;
      auto& children = expanded[fi];
      for (const auto& profile : sample_actions(from, config.dynamics, duration)) {
        auto tr = integrate_transition(from, profile, config.dynamics.wheelbase, config.sub_step);
        SearchNode child;
        child.parent = parent;
        child.layer = static_cast<int>(layer);
        if (options.base_reward) {
          auto rr = evaluate_reward(tr, ctx);
          child.step_rewards = std::move(rr.rewards);
          child.collides = parent_collides || rr.collision.collides;
          child.first_collision_time = parent_collides ? parent_collision_t : rr.collision.first_time;
        } else {
          child.step_rewards.assign(tr.samples.size() - 1, 0.0);
          child.collides = false;
        }
        if (options.extra_term) {
          for (std::size_t k = 1; k < tr.samples.size(); ++k) child.step_rewards[k - 1] += options.extra_term(tr.samples[k]);
        }
        double v = parent_value;
        for (std::size_t k = 1; k < tr.samples.size(); ++k) {
          const double t0 = tr.samples[k - 1].t;
          const double discount = config.reward.gamma == 1.0 ? 1.0 : std::pow(config.reward.gamma, t0);
          v += discount * child.step_rewards[k - 1] * kSampleStep;
        }
        child.partial_value = v;
        tr.samples.erase(tr.samples.begin());
        child.samples = std::move(tr.samples);
        children.push_back(std::move(child));
      }
    });

    std::vector<SearchNode> layer_nodes;
    for (auto& group : expanded) {
      for (auto& c : group) {
        out.visited_states += c.samples.size();
        layer_nodes.push_back(std::move(c));
      }
    }
    expanded.clear();

    if (layer + 1 == layers) {
      // Leaves are kept in generation order, which is fixed by frontier order and action order.
      for (auto& c : layer_nodes) {
        out.nodes.push_back(std::move(c));
        const int id = static_cast<int>(out.nodes.size()) - 1;
        out.policies.push_back({id, 0.0, out.nodes[id].collides, out.nodes[id].first_collision_time});
      }
      break;
    }

    // Colliding branches are only carried forward when nothing else survives.
    const bool any_free = std::any_of(layer_nodes.begin(), layer_nodes.end(), [](const auto& n) { return !n.collides; });
    std::vector<PruneCandidate> candidates;
    std::vector<std::size_t> candidate_nodes;
    for (std::size_t i = 0; i < layer_nodes.size(); ++i) {
      if (any_free && layer_nodes[i].collides) continue;
      candidates.push_back({layer_nodes[i].samples.back(), layer_nodes[i].partial_value, layer_nodes[i].collides});
      candidate_nodes.push_back(i);
    }
    const auto survivors = prune(candidates, config.prune);
    frontier.clear();
    for (std::size_t idx : survivors) {
      out.nodes.push_back(std::move(layer_nodes[candidate_nodes[idx]]));
      frontier.push_back(static_cast<int>(out.nodes.size()) - 1);
    }
    if (frontier.empty()) break;
  }

  for (std::size_t i = 0; i < out.policies.size(); ++i) {
    out.policies[i].value = policy_value(out.step_rewards(i), config.reward.gamma);
  }
  out.blocked = std::all_of(out.policies.begin(), out.policies.end(), [](const auto& p) { return p.collides; });
  return out;
}

}  // namespace psv
