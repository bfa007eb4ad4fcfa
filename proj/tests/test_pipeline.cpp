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
#include <cmath>
#include <limits>

#include "doctest.h"
#include "json.hpp"
#include "psv/dataset.hpp"
#include "psv/evaluation.hpp"
#include "psv/geometry.hpp"
#include "psv/stack_io.hpp"
#include "psv/synthetic.hpp"
#include "support.hpp"

using namespace psv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<VehicleState> line_policy(Vec2 start, Vec2 velocity, double horizon = 6.6) {
  std::vector<VehicleState> out;
  for (int k = 0; k < horizon_sample_count(horizon); ++k) {
    VehicleState s;
    s.t = k * kSampleStep;
    s.x = start.x + velocity.x * s.t;
    s.y = start.y + velocity.y * s.t;
    out.push_back(s);
  }
  return out;
}

ObjectPrediction line_prediction(Vec2 start, Vec2 velocity, double horizon = 6.6) {
  ObjectPrediction p;
  p.object_id = 1;
  for (const auto& s : line_policy(start, velocity, horizon)) p.samples.push_back({s.x, s.y, 0.0, s.t});
  return p;
}

PlannerConfig small_config() {
  PlannerConfig c;
  c.dynamics.velocity_steps = 3;
  c.dynamics.wheel_steps = 5;
  c.prune.max_states = 40;
  c.workers = 1;
  return c;
}

Scenario parked_ahead() {
  auto s = test::straight_road();
  s.id = "parked";
  s.objects.push_back(test::object_at(7, 45.0, 0.0, 0.0, true));
  return s;
}

}  // namespace

TEST_CASE("object time gap examples") {
  const auto ego = line_policy({0.0, 0.0}, {10.0, 0.0});
  CHECK(otg(ego, {}) == kInf);

  // Ego passes (20, 0) at t = 2, the object crosses it at t = 5 moving along y.
  const std::vector<ObjectPrediction> crossing{line_prediction({20.0, -40.0}, {0.0, 8.0})};
  CHECK(otg(ego, crossing) == doctest::Approx(3.0).epsilon(1e-9));

  const std::vector<ObjectPrediction> same{line_prediction({0.0, 0.0}, {10.0, 0.0})};
  CHECK(otg(ego, same) == 0.0);

  const std::vector<ObjectPrediction> apart{line_prediction({0.0, 30.0}, {10.0, 0.0})};
  CHECK(otg(ego, apart) == kInf);

  // Co-located only at t = 3.
  const std::vector<ObjectPrediction> meet{line_prediction({30.0, -30.0}, {0.0, 10.0})};
  CHECK(otg(line_policy({0.0, 0.0}, {10.0, 0.0}), meet) == 0.0);

  // 1.4 m apart is inside sqrt(2), 1.5 m is not.
  CHECK(otg(ego, std::vector{line_prediction({0.0, 1.4}, {10.0, 0.0})}) == 0.0);
  CHECK(otg(ego, std::vector{line_prediction({0.0, 1.5}, {10.0, 0.0})}) == kInf);
}

TEST_CASE("progress is the arc length") {
  CHECK(progress(line_policy({3.0, 4.0}, {0.0, 0.0})) == 0.0);
  CHECK(progress(line_policy({0.0, 0.0}, {10.0, 0.0})) == doctest::Approx(66.0).epsilon(1e-12));
  const double r = 20.0;
  std::vector<VehicleState> circle;
  for (int k = 0; k <= 400; ++k) {
    VehicleState s;
    s.x = r * std::cos(2.0 * std::numbers::pi * k / 400);
    s.y = r * std::sin(2.0 * std::numbers::pi * k / 400);
    circle.push_back(s);
  }
  CHECK(std::abs(progress(circle) - 2.0 * std::numbers::pi * r) < 1e-3 * 2.0 * std::numbers::pi * r);
}

TEST_CASE("metric bins and confusion matrices") {
  CHECK(metric_bin(Metric::kOtg, 0.0) == 0);
  CHECK(metric_bin(Metric::kOtg, 0.5) == 0);
  CHECK(metric_bin(Metric::kOtg, 1.0) == 1);
  CHECK(metric_bin(Metric::kOtg, 6.5) == 6);
  CHECK(metric_bin(Metric::kOtg, 7.0) == 7);
  CHECK(metric_bin(Metric::kOtg, kInf) == 7);
  CHECK(metric_bin(Metric::kProgress, 9.99) == 0);
  CHECK(metric_bin(Metric::kProgress, 65.0) == 6);
  CHECK(metric_bin(Metric::kProgress, 70.0) == 7);
  CHECK(metric_bin(Metric::kProgress, 500.0) == 7);

  using Pair = std::pair<std::optional<double>, std::optional<double>>;
  const std::vector<Pair> pairs{{0.5, 6.5}, {kInf, kInf}, {std::nullopt, 2.0}, {kInf, kInf}};
  const auto m = confusion_matrix(pairs, Metric::kOtg);
  CHECK(m.counts[0][6] == 1);
  CHECK(m.counts[7][7] == 2);
  CHECK(m.skipped == 1);
  CHECK(m.total() == 3);

  const auto img = render_matrix(m, 4);
  CHECK(img.width() == 32);
  CHECK(img.height() == 32);
}

TEST_CASE("evaluation of a parked car keeps a time gap") {
  BenchmarkConfig cfg;
  cfg.planner = small_config();
  const auto ev = evaluate_scenario(parked_ahead(), cfg);
  REQUIRE(ev.result.ok);
  REQUIRE(ev.reward_policy);
  REQUIRE(ev.values_policy);
  CHECK(*ev.result.values_otg > 0.0);
  CHECK(*ev.result.reward_progress == doctest::Approx(progress(ev.reward_policy->samples)));
  CHECK(*ev.result.values_progress == doctest::Approx(progress(ev.values_policy->samples)));
}

TEST_CASE("benchmark accounting, empty inputs and reports") {
  BenchmarkConfig cfg;
  cfg.planner = small_config();
  test::TempDir dir("bench");
  std::filesystem::create_directories(dir.path() / "empty");
  const auto empty = run_benchmark(dir.path() / "empty", cfg);
  CHECK(empty.results.empty());
  CHECK(empty.otg_matrix.total() == 0);
  CHECK_FALSE(empty.warnings.empty());

  std::vector<Scenario> scenarios{synthetic_scenario(3), synthetic_scenario(4), parked_ahead(), test::straight_road()};
  scenarios.back().id = "no_objects";
  const auto report = run_benchmark(scenarios, cfg);
  REQUIRE(report.results.size() == 3);
  CHECK(std::is_sorted(report.results.begin(), report.results.end(),
                       [](const auto& a, const auto& b) { return a.scenario_id < b.scenario_id; }));
  CHECK(report.otg_matrix.total() + report.otg_matrix.skipped == 3);
  CHECK(report.progress_matrix.total() + report.progress_matrix.skipped == 3);
  CHECK(std::any_of(report.warnings.begin(), report.warnings.end(),
                    [](const std::string& w) { return w.find("no_objects") != std::string::npos; }));

  write_report(report, dir.path() / "out");
  for (const char* f : {"report.json", "report.txt", "otg_matrix.png", "progress_matrix.png"}) {
    CHECK(std::filesystem::exists(dir.path() / "out" / f));
  }
  const auto j = nlohmann::json::parse(report_to_json(report));
  CHECK(j.at("scenarios") == 3);
  CHECK(j.at("otg_matrix").at("total").get<int>() == report.otg_matrix.total());
  CHECK(report_to_text(report).find("OTG") != std::string::npos);
}

TEST_CASE("inferred sequences are found by file name or sidecar scenario id") {
  test::TempDir dir("inferred");
  Viewport vp;
  vp.width_px = 4;
  vp.height_px = 4;
  ValueImageSequence seq;
  seq.viewport = vp;
  for (auto& l : seq.value_layers) l = Image(4, 4);
  for (auto& l : seq.object_layers) l = Image(4, 4);
  save_sequence(seq, dir.path() / "a", "alpha", 0.0);
  save_sequence(seq, dir.path() / "late", "beta", 1.2);
  save_sequence(seq, dir.path() / "early", "beta", 0.4);
  CHECK(find_inferred_sequence(dir.path(), "a") == dir.path() / "a");
  CHECK(find_inferred_sequence(dir.path(), "beta") == dir.path() / "early");
  CHECK_FALSE(find_inferred_sequence(dir.path(), "gamma"));

  // Input stacks next to targets are not value sequences.
  StackMeta meta;
  meta.kind = "input";
  meta.viewport = vp;
  meta.scenario_id = "delta";
  meta.channel_names = {"velocity", "direction", "lanes", "static"};
  save_stack(dir.path() / "delta_a_input", std::vector<Image>(4, Image(4, 4)), meta);
  save_sequence(seq, dir.path() / "delta_b_target", "delta", 0.0);
  CHECK(find_inferred_sequence(dir.path(), "delta") == dir.path() / "delta_b_target");
}

TEST_CASE("snapshots follow the stream schedule") {
  auto s = test::straight_road();
  s.objects.push_back(test::object_at(1, 30.0, 0.0, 5.0));
  StreamSpec stream;
  stream.duration = 2.0;
  stream.object_schedules[2] = {{0.5, 50.0, 3.5, 0.0, 4.0}, {1.5, 54.0, 3.5, 0.0, 4.0}};
  s.stream = stream;

  const auto times = snapshot_times(s);
  REQUIRE(times.size() == 10);
  CHECK(times.front() == 0.0);
  CHECK(times.back() == doctest::Approx(1.8));

  const auto a = snapshot_at(s, 0.2);
  REQUIRE(a.objects.size() == 1);
  CHECK(a.objects[0].position.x == doctest::Approx(31.0).epsilon(1e-9));
  CHECK(a.ego.x == doctest::Approx(1.6).epsilon(1e-6));
  CHECK_FALSE(a.stream);

  const auto b = snapshot_at(s, 1.0);
  REQUIRE(b.objects.size() == 2);
  CHECK(b.objects[1].id == 2);
  CHECK(b.objects[1].position.x == doctest::Approx(52.0));
  CHECK(b.objects[1].velocity == doctest::Approx(4.0));

  CHECK(snapshot_at(s, 1.8).objects.size() == 1);
  auto plain = test::straight_road();
  CHECK(snapshot_times(plain) == std::vector<double>{0.0});
}

TEST_CASE("augmentation: identity, determinism and the collision filter") {
  auto s = test::straight_road();
  s.objects.push_back(test::object_at(1, 9.0, 0.0, 0.0, true));
  AugmentConfig none;
  CHECK(none.is_identity());
  const auto only = augment(s, none, 5);
  REQUIRE(only.size() == 1);
  CHECK(only[0].scenario == s);
  CHECK(only[0].variant == 0);

  const auto cfg = parse_augment_config(R"({"variants": 40, "forward_shift_max": 12.0})");
  CHECK(cfg.variants == 40);
  const auto a = augment(s, cfg, 5);
  const auto b = augment(s, cfg, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].variant == b[i].variant);
    CHECK(a[i].scenario == b[i].scenario);
  }
  CHECK(a.size() < 41);
  CHECK(a.size() > 1);
  for (const auto& v : a) {
    for (const auto& o : v.scenario.objects) CHECK_FALSE(boxes_overlap(v.scenario.ego_box(), o.box()));
  }
  const auto c = augment(s, cfg, 6);
  CHECK_FALSE((c.size() == a.size() && std::equal(a.begin(), a.end(), c.begin(), [](const auto& x, const auto& y) {
                 return x.scenario == y.scenario;
               })));
  CHECK(test::thrown_code([] { parse_augment_config(R"({"variants": -1})"); }).has_value());
}

TEST_CASE("rebalancing fills minority aspect buckets to half the largest") {
  CHECK(aspect_bucket(1.0) == 0);
  CHECK(aspect_bucket(1.49) == 0);
  CHECK(aspect_bucket(1.5) == 1);
  CHECK(aspect_bucket(2.5) == 2);
  CHECK(aspect_bucket(3.0) == 3);
  CHECK(aspect_bucket(3.9) == 3);
  CHECK(aspect_bucket(4.0) == 3);

  std::vector<ManifestRow> rows;
  for (int i = 0; i < 100; ++i) rows.push_back({"i" + std::to_string(i), "t", "s", 0.2 * i, 1.0, "orig"});
  for (int i = 0; i < 10; ++i) rows.push_back({"w" + std::to_string(i), "t", "s", 0.2 * i, 4.0, "orig"});
  const auto out = rebalance(rows, 9);
  REQUIRE(out.size() >= 150);
  CHECK(std::equal(rows.begin(), rows.end(), out.begin()));
  CHECK(std::count_if(out.begin(), out.end(), [](const auto& r) { return aspect_bucket(r.aspect_ratio) == 3; }) >= 50);
  CHECK(rebalance(rows, 9) == out);

  const std::vector<ManifestRow> single(rows.begin(), rows.begin() + 20);
  CHECK(rebalance(single, 1) == single);
}

TEST_CASE("manifest round trip with quoting") {
  test::TempDir dir("manifest");
  const std::vector<ManifestRow> rows{{"pairs/a_input.json", "pairs/a_target.json", "plain", 0.4, 1.0, "orig"},
                                      {"p, q.json", "r \"s\".json", "id,with,commas", 1.2, 2.5, "aug1"}};
  write_manifest(rows, dir.path() / "manifest.csv");
  CHECK(read_manifest(dir.path() / "manifest.csv") == rows);
  const auto text = test::read_bytes(dir.path() / "manifest.csv");
  CHECK(text.rfind("input,target,scenario_id,timestamp,aspect_ratio,variant\n", 0) == 0);
}

TEST_CASE("dataset generation is deterministic and skips empty snapshots") {
  test::TempDir dir("dataset");
  auto s = parked_ahead();
  StreamSpec stream;
  stream.duration = 0.6;
  s.stream = stream;
  auto empty = test::straight_road();
  empty.id = "empty";
  empty.stream = stream;

  DatasetConfig cfg;
  cfg.planner = small_config();
  cfg.seed = 17;
  const std::vector<Scenario> scenarios{s, empty};
  const auto a = generate_dataset(scenarios, dir.path() / "a", cfg);
  const auto b = generate_dataset(scenarios, dir.path() / "b", cfg);
  CHECK(a.rows.size() == 3);
  CHECK(a.skipped_no_objects == 3);
  CHECK(a.rows == b.rows);
  CHECK(test::read_bytes(dir.path() / "a" / "manifest.csv") == test::read_bytes(dir.path() / "b" / "manifest.csv"));
  for (const auto& row : a.rows) {
    CHECK(row.scenario_id == "parked");
    const auto input = load_stack(dir.path() / "a" / row.input);
    const auto target = load_stack(dir.path() / "a" / row.target);
    CHECK(input.channels.size() == 4);
    CHECK(target.channels.size() == 12);
    CHECK(input.meta.viewport == target.meta.viewport);
    CHECK(input.meta.square == target.meta.square);
    CHECK(input.meta.frame == Frame::kSquare);
    CHECK(target.meta.scenario_id == "parked");
  }
  const auto first = std::filesystem::path("pairs") / "parked_t000000_v00_input_00.png";
  CHECK(test::read_bytes(dir.path() / "a" / first) == test::read_bytes(dir.path() / "b" / first));
}
