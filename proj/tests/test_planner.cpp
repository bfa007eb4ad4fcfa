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

#include <algorithm>
#include <map>
#include <random>
#include <tuple>

#include "doctest.h"
#include "psv/error.hpp"
#include "psv/planner.hpp"
#include "support.hpp"

using namespace psv;

namespace {

Transition lane_transition(double v, double y, int n = 5) {
  Transition tr;
  for (int k = 0; k <= n; ++k) {
    VehicleState s;
    s.x = 10.0 + v * 0.2 * k;
    s.y = y;
    s.velocity = v;
    s.t = 0.2 * k;
    tr.samples.push_back(s);
  }
  tr.parent_state = tr.samples.front();
  return tr;
}

PlannerConfig small_config() {
  PlannerConfig c;
  c.dynamics.velocity_steps = 3;
  c.dynamics.wheel_steps = 5;
  c.prune.max_states = 40;
  return c;
}

}  // namespace

TEST_CASE("policy value is a discounted Riemann sum") {
  const std::vector<double> r{1.0, 1.0};
  CHECK(policy_value(r, 0.5) == doctest::Approx(0.2 * (1.0 + std::pow(0.5, 0.2))).epsilon(1e-12));
  CHECK(policy_value(r, 0.5) == doctest::Approx(0.3741).epsilon(1e-4));
  CHECK(policy_value(std::vector<double>(33, 2.0), 1.0) == doctest::Approx(13.2));
  CHECK(policy_value({}, 0.9) == 0.0);
}

TEST_CASE("driving on the target lane centre at the speed limit earns exactly the lane bonus") {
  const auto s = test::straight_road();
  RewardContext ctx(s, {}, RewardConfig{}, 2.8);
  const auto r = evaluate_reward(lane_transition(13.0, 0.0), ctx);
  REQUIRE(r.rewards.size() == 5);
  for (double v : r.rewards) CHECK(v == doctest::Approx(1.0));
  CHECK_FALSE(r.collision.collides);
}

TEST_CASE("reward features against hand computation") {
  auto s = test::straight_road();
  s.objects.push_back(test::object_at(1, 40.0, 0.0, 0.0, true));
  const auto preds = predict_objects(s, 6.6);
  RewardContext ctx(s, preds, RewardConfig{}, 2.8);
  auto tr = lane_transition(10.0, 0.5, 1);
  const auto r = evaluate_reward(tr, ctx);
  const auto& f = r.features.at(0);
  const Vec2 ego{12.0, 0.5};
  CHECK(f[kSpeedDeviation] == doctest::Approx(3.0));
  CHECK(f[kLateralOffset] == doctest::Approx(0.5));
  CHECK(f[kOnTargetLane] == 1.0);
  CHECK(f[kBoundaryCrossing] == 0.0);
  CHECK(f[kObjectProximity] == doctest::Approx(1.0 / (Vec2{40.0, 0.0} - ego).norm()));
  const double gap = 28.0 - 4.8;
  CHECK(f[kTimeGapShortfall] == doctest::Approx(std::max(0.0, 2.0 - gap / 10.0)));
  double expected = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) expected += RewardConfig{}.weights[i] * f[i];
  CHECK(r.rewards[0] == doctest::Approx(expected));
}

TEST_CASE("crossing a curb is flagged, crossing a dashed line is not") {
  const auto s = test::straight_road();
  RewardContext ctx(s, {}, RewardConfig{}, 2.8);
  CHECK(ctx.crosses_hard_boundary({10, -1.0}, {11, -2.5}));
  CHECK_FALSE(ctx.crosses_hard_boundary({10, 1.0}, {11, 2.5}));
}

TEST_CASE("nearest lane lookup matches brute-force projection") {
  const auto s = test::straight_road();
  RewardContext ctx(s, {}, RewardConfig{}, 2.8);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(-30.0, 320.0), uy(-40.0, 40.0);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p{ux(rng), uy(rng)};
    double best = 1e18;
    for (const auto& c : s.road_graph.centerlines) best = std::min(best, project_onto_polyline(c.points, p).distance);
    CHECK(ctx.nearest_lane(p).projection.distance == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("collision check uses the matching prediction sample") {
  auto s = test::straight_road();
  s.objects.push_back(test::object_at(1, 20.0, 0.0, 0.0, true));
  const auto preds = predict_objects(s, 6.6);
  const auto tr = lane_transition(10.0, 0.0, 10);
  const auto c = collision_check(tr.samples, preds, s.ego_extent);
  CHECK(c.collides);
  // Boxes overlap once the centres are closer than 4.8 m: x = 10 + 10 t > 15.2.
  CHECK(c.first_time == doctest::Approx(0.6));
  CHECK_FALSE(collision_check(lane_transition(10.0, 3.5, 10).samples, preds, s.ego_extent).collides);
}

TEST_CASE("prune agrees with a sort-based oracle") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 6.0), h(-0.4, 0.4), val(-5.0, 5.0);
  PruneConfig cfg;
  cfg.max_states = 25;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<PruneCandidate> cand(200);
    for (auto& c : cand) {
      c.state.x = u(rng);
      c.state.y = u(rng) * 0.5;
      c.state.heading = h(rng);
      c.state.velocity = u(rng);
      c.value = std::round(val(rng));  // frequent value ties
      c.collides = rng() % 7 == 0;
    }
    auto key = [&](const PruneCandidate& c, std::size_t i) {
      return std::make_tuple(c.collides, -c.value, c.state.x, c.state.y, c.state.heading, c.state.velocity, i);
    };
    std::map<std::tuple<long long, long long, long long, long long>, std::size_t> best;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const auto& st = cand[i].state;
      const auto b = std::make_tuple(static_cast<long long>(std::floor(st.x / cfg.bin_x)),
                                     static_cast<long long>(std::floor(st.y / cfg.bin_y)),
                                     static_cast<long long>(std::floor(st.heading / cfg.bin_heading)),
                                     static_cast<long long>(std::floor(st.velocity / cfg.bin_velocity)));
      auto it = best.find(b);
      if (it == best.end() || key(cand[i], i) < key(cand[it->second], it->second)) best[b] = i;
    }
    std::vector<std::size_t> expected;
    for (const auto& [b, i] : best) expected.push_back(i);
    std::sort(expected.begin(), expected.end(), [&](auto a, auto b) { return key(cand[a], a) < key(cand[b], b); });
    expected.resize(std::min(expected.size(), cfg.max_states));
    CHECK(prune(cand, cfg) == expected);
  }
}

TEST_CASE("prune keeps the same states under input permutation") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<PruneCandidate> cand(300);
  for (auto& c : cand) {
    c.state.x = u(rng);
    c.state.y = u(rng);
    c.state.velocity = u(rng);
    c.value = u(rng);
  }
  auto states = [](const std::vector<PruneCandidate>& c, const std::vector<std::size_t>& idx) {
    std::vector<VehicleState> out;
    for (auto i : idx) out.push_back(c[i].state);
    return out;
  };
  PruneConfig cfg;
  cfg.max_states = 50;
  const auto a = states(cand, prune(cand, cfg));
  std::shuffle(cand.begin(), cand.end(), rng);
  CHECK(states(cand, prune(cand, cfg)) == a);
}

TEST_CASE("one layer of 5x5 actions yields exactly 25 policies") {
  auto s = test::straight_road();
  s.horizon = 2.2;
  PlannerConfig cfg;
  cfg.layer_durations = {2.2};
  cfg.dynamics.velocity_steps = 5;
  cfg.dynamics.wheel_steps = 5;
  const auto set = plan(s, {}, cfg);
  CHECK(set.size() == 25);
  CHECK(set.visited_states == 25 * 11);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto p = set.policy(i);
    CHECK(p.samples.size() == 12);
    CHECK(p.value == doctest::Approx(policy_value(p.step_rewards, 1.0)));
  }
}

TEST_CASE("plan values equal the discounted sum of step rewards") {
  auto s = test::straight_road();
  auto cfg = small_config();
  cfg.reward.gamma = 0.9;
  const auto set = plan(s, {}, cfg);
  REQUIRE(set.size() > 0);
  for (std::size_t i = 0; i < set.size(); i += 7) {
    const auto p = set.policy(i);
    REQUIRE(p.samples.size() == 34);
    CHECK(p.samples.back().t == doctest::Approx(6.6));
    CHECK(p.value == doctest::Approx(policy_value(p.step_rewards, 0.9)).epsilon(1e-12));
    CHECK(set.nodes[set.policies[i].leaf].partial_value == doctest::Approx(p.value).epsilon(1e-9));
  }
}

TEST_CASE("plan is identical for one and several workers") {
  auto s = test::straight_road();
  s.objects.push_back(test::object_at(1, 35.0, 0.0, 3.0));
  const auto preds = predict_objects(s, s.horizon);
  auto cfg = small_config();
  cfg.workers = 1;
  const auto a = plan(s, preds, cfg);
  cfg.workers = 3;
  const auto b = plan(s, preds, cfg);
  REQUIRE(a.size() == b.size());
  CHECK(a.visited_states == b.visited_states);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.policies[i].value == b.policies[i].value);
    CHECK(a.samples(i) == b.samples(i));
  }
}

TEST_CASE("colliding policies are flagged and never best") {
  auto s = test::straight_road();
  s.objects.push_back(test::object_at(1, 25.0, 0.0, 0.0, true));
  const auto preds = predict_objects(s, s.horizon);
  const auto set = plan(s, preds, small_config());
  const int best = set.best();
  REQUIRE(best >= 0);
  CHECK_FALSE(set.policies[best].collides);
  CHECK_FALSE(collision_check(set.samples(best), preds, s.ego_extent).collides);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(set.policies[i].collides == collision_check(set.samples(i), preds, s.ego_extent).collides);
  }
}

TEST_CASE("an ego boxed in from the start is blocked") {
  auto s = test::straight_road();
  s.objects.push_back(test::object_at(1, 1.0, 0.0, 0.0, true));
  const auto preds = predict_objects(s, s.horizon);
  const auto set = plan(s, preds, small_config());
  CHECK(set.blocked);
  CHECK(set.best() == -1);
}

TEST_CASE("plan rejects layer layouts that do not cover the horizon") {
  auto s = test::straight_road();
  PlannerConfig cfg;
  cfg.layer_durations = {2.2, 2.2};
  CHECK_THROWS_AS(plan(s, {}, cfg), Error);
  cfg.layer_durations = {2.2, 2.1, 2.3};
  CHECK_THROWS_AS(plan(s, {}, cfg), Error);
}

TEST_CASE("planner config JSON round trip and validation") {
  PlannerConfig c;
  c.prune.max_states = 77;
  c.reward.weights[kAbsJerk] = -0.25;
  c.layer_durations = {2.0, 2.2, 1.4, 1.0};
  const auto back = parse_planner_config(dump_planner_config(c));
  CHECK(back.prune.max_states == 77);
  CHECK(back.reward.weights[kAbsJerk] == -0.25);
  CHECK(back.layer_durations == c.layer_durations);
  CHECK_THROWS_AS(parse_planner_config(R"({"reward": {"weights": {"nope": 1}}})"), Error);
  CHECK_THROWS_AS(parse_planner_config(R"({"prune": {"max_states": 0}})"), Error);
}
