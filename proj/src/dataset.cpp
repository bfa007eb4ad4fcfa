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

#include "psv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <tuple>
#include <random>
#include <sstream>

#include "json.hpp"
#include "psv/error.hpp"
#include "psv/input_renderer.hpp"
#include "psv/parallel.hpp"
#include "psv/stack_io.hpp"

namespace psv {

namespace {

Waypoint interpolate(const std::vector<Waypoint>& w, double t) {
  if (t <= w.front().t) return w.front();
  if (t >= w.back().t) return w.back();
  const auto it = std::upper_bound(w.begin(), w.end(), t, [](double v, const Waypoint& p) { return v < p.t; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  return {t, a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), wrap_angle(a.heading + u * wrap_angle(b.heading - a.heading)),
          a.velocity + u * (b.velocity - a.velocity)};
}

LaneMatch lane_of(const RoadGraph& graph, const Vec2& p, double heading) {
  if (auto m = match_lane(graph, p, heading, kLaneCaptureDistance, kLaneCaptureHeading)) return *m;
  return nearest_lane(graph, p);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& id, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fnv1a(id)), static_cast<std::uint32_t>(fnv1a(id) >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  return rng();
}

bool ego_collides(const Scenario& s) {
  const auto ego = s.ego_box();
  return std::any_of(s.objects.begin(), s.objects.end(), [&](const auto& o) { return boxes_overlap(ego, o.box()); });
}

}  // namespace

std::vector<double> snapshot_times(const Scenario& scenario) {
  if (!scenario.stream) return {0.0};
  std::vector<double> out;
  for (int k = 0; k * kSampleStep < scenario.stream->duration - 1e-9; ++k) out.push_back(k * kSampleStep);
  return out;
}

Scenario snapshot_at(const Scenario& scenario, double t) {
  Scenario out = scenario;
  out.stream.reset();
  if (!scenario.stream) return out;
  const StreamSpec& stream = *scenario.stream;
  const auto preds = predict_objects(scenario, std::max(t, kSampleStep));

  out.objects.clear();
  for (std::size_t i = 0; i < scenario.objects.size(); ++i) {
    TrafficObject o = scenario.objects[i];
    if (const auto it = stream.object_schedules.find(o.id); it != stream.object_schedules.end() && !it->second.empty()) {
      const auto& w = it->second;
      if (t < w.front().t - 1e-9 || t > w.back().t + 1e-9) continue;
      const auto p = interpolate(w, t);
      o.position = {p.x, p.y};
      o.heading = p.heading;
      o.velocity = p.velocity;
    } else {
      const auto& pose = preds[i].at(t);
      o.position = {pose.x, pose.y};
      o.heading = pose.heading;
    }
    out.objects.push_back(o);
  }
  // Schedules for ids without an initial object introduce new vehicles.
  for (const auto& [id, w] : stream.object_schedules) {
    const bool known = std::any_of(scenario.objects.begin(), scenario.objects.end(), [&](const auto& o) { return o.id == id; });
    if (known || w.empty() || t < w.front().t - 1e-9 || t > w.back().t + 1e-9) continue;
    const auto p = interpolate(w, t);
    TrafficObject o;
    o.id = id;
    o.position = {p.x, p.y};
    o.heading = p.heading;
    o.velocity = p.velocity;
    out.objects.push_back(o);
  }
  std::sort(out.objects.begin(), out.objects.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  if (t > 0.0) {
    if (!stream.ego_schedule.empty()) {
      const auto p = interpolate(stream.ego_schedule, t);
      out.ego.x = p.x;
      out.ego.y = p.y;
      out.ego.heading = p.heading;
      out.ego.velocity = p.velocity;
    } else if (scenario.ego.velocity > 0.0) {
      const auto m = lane_of(scenario.road_graph, {scenario.ego.x, scenario.ego.y}, scenario.ego.heading);
      const auto pose = advance_along_lane(scenario.road_graph, m, scenario.ego.velocity * t);
      out.ego.x = pose.x;
      out.ego.y = pose.y;
      out.ego.heading = wrap_angle(pose.heading + wrap_angle(scenario.ego.heading - m.projection.heading));
    }
    out.ego.acceleration = 0.0;
    out.ego.wheel_angle = 0.0;
    out.ego.wheel_angle_rate = 0.0;
  }
  out.ego.t = 0.0;
  return out;
}

bool AugmentConfig::is_identity() const {
  return variants <= 0 || (forward_shift_max == 0.0 && velocity_scale_max == 1.0 && lateral_offset_max == 0.0 &&
                           heading_jitter_max == 0.0);
}

AugmentConfig parse_augment_config(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParse, "augment config: not a JSON object");
  AugmentConfig c;
  try {
    c.variants = j.value("variants", c.variants);
    c.forward_shift_max = j.value("forward_shift_max", c.forward_shift_max);
    c.velocity_scale_max = j.value("velocity_scale_max", c.velocity_scale_max);
    c.lateral_offset_max = j.value("lateral_offset_max", c.lateral_offset_max);
    c.heading_jitter_max = j.value("heading_jitter_max", c.heading_jitter_max);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("augment config: ") + e.what());
  }
  if (c.variants < 0 || c.forward_shift_max < 0.0 || c.velocity_scale_max < 1.0 || c.lateral_offset_max < 0.0 ||
      c.heading_jitter_max < 0.0) {
    throw Error(ErrorCode::kValidation, "augment config: magnitudes out of range");
  }
  return c;
}

AugmentConfig load_augment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open augment config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_augment_config(buf.str());
}

std::vector<AugmentedSnapshot> augment(const Scenario& snapshot, const AugmentConfig& config, std::uint64_t seed) {
  std::vector<AugmentedSnapshot> out{{snapshot, 0}};
  if (config.is_identity()) return out;
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const auto& g = snapshot.road_graph;
  const auto m = lane_of(g, {snapshot.ego.x, snapshot.ego.y}, snapshot.ego.heading);
  const double relative_heading = wrap_angle(snapshot.ego.heading - m.projection.heading);
  for (int v = 1; v <= config.variants; ++v) {
    // Always four draws per variant so dropped variants do not shift later ones.
    const double shift = uniform(0.0, config.forward_shift_max);
    const double scale = uniform(1.0, config.velocity_scale_max);
    const double lateral = uniform(-config.lateral_offset_max, config.lateral_offset_max);
    const double jitter = uniform(-config.heading_jitter_max, config.heading_jitter_max);
    Scenario s = snapshot;
    const auto pose = advance_along_lane(g, m, shift);
    const Vec2 p = Vec2{pose.x, pose.y} + unit(pose.heading + std::numbers::pi / 2.0) * lateral;
    s.ego.x = p.x;
    s.ego.y = p.y;
    s.ego.heading = wrap_angle(pose.heading + relative_heading + jitter);
    s.ego.velocity = snapshot.ego.velocity * scale;
    if (ego_collides(s)) continue;
    out.push_back({std::move(s), v});
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

constexpr const char* kManifestHeader = "input,target,scenario_id,timestamp,aspect_ratio,variant";

}  // namespace

void write_manifest(std::span<const ManifestRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
  out << kManifestHeader << '\n';
  char num[64];
  for (const auto& r : rows) {
    out << csv_field(r.input) << ',' << csv_field(r.target) << ',' << csv_field(r.scenario_id) << ',';
    std::snprintf(num, sizeof num, "%.3f,%.6f", r.timestamp, r.aspect_ratio);
    out << num << ',' << csv_field(r.variant) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) {
    throw Error(ErrorCode::kParse, path.string() + ": unexpected manifest header");
  }
  std::vector<ManifestRow> rows;
  for (int n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(n) + ": expected 6 fields");
    try {
      rows.push_back({f[0], f[1], f[2], std::stod(f[3]), std::stod(f[4]), f[5]});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(n) + ": bad number");
    }
  }
  return rows;
}

int aspect_bucket(double aspect_ratio) {
  int b = 0;
  while (b + 2 < static_cast<int>(kAspectEdges.size()) && aspect_ratio >= kAspectEdges[b + 1]) ++b;
  return b;
}

std::vector<ManifestRow> rebalance(std::span<const ManifestRow> rows, std::uint64_t seed) {
  std::vector<ManifestRow> out(rows.begin(), rows.end());
  std::map<int, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < rows.size(); ++i) buckets[aspect_bucket(rows[i].aspect_ratio)].push_back(i);
  std::size_t largest = 0;
  for (const auto& [b, members] : buckets) largest = std::max(largest, members.size());
  const std::size_t target = (largest + 1) / 2;
  std::mt19937_64 rng(seed);
  for (const auto& [b, members] : buckets) {
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (std::size_t n = members.size(); n < target; ++n) out.push_back(rows[members[pick(rng)]]);
  }
  return out;
}

namespace {

struct Job {
  Scenario scenario;
  double timestamp{0.0};
  int variant{0};
};

std::string stem_for(const Job& job) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_t%06lld_v%02d", std::llround(job.timestamp * 1000.0), job.variant);
  return job.scenario.id + buf;
}

std::vector<std::string> input_channel_names() { return {"velocity", "direction", "lanes", "static"}; }

std::vector<std::string> target_channel_names() {
  std::vector<std::string> names;
  for (int l = 1; l <= kLayerCount; ++l) names.push_back("value_" + std::to_string(l));
  for (int l = 1; l <= kLayerCount; ++l) names.push_back("object_" + std::to_string(l));
  return names;
}

ManifestRow run_job(const Job& job, const std::filesystem::path& out_dir, const DatasetConfig& config) {
  const Scenario& s = job.scenario;
  const auto preds = predict_objects(s, s.horizon);
  const auto policies = plan(s, preds, config.planner);
  if (policies.blocked) throw Error(ErrorCode::kBlocked, "every policy collides");
  const auto viewport = fit_viewport(s, reachable_points(policies));
  const auto inputs = render_inputs(s, viewport);
  const auto seq = render_sequence(preds, policies, viewport, config.render);
  const auto target = to_square_target(seq, viewport, inputs.square);

  const std::string stem = stem_for(job);
  StackMeta meta;
  meta.frame = Frame::kSquare;
  meta.viewport = viewport;
  meta.square = inputs.square;
  meta.scenario_id = s.id;
  meta.timestamp = job.timestamp;

  meta.kind = "input";
  meta.channel_names = input_channel_names();
  save_stack(out_dir / "pairs" / (stem + "_input"), inputs.channels, meta);
  meta.kind = "target";
  meta.channel_names = target_channel_names();
  save_stack(out_dir / "pairs" / (stem + "_target"), target, meta);

  return {"pairs/" + stem + "_input.json",
          "pairs/" + stem + "_target.json",
          s.id,
          job.timestamp,
          static_cast<double>(viewport.width_px) / viewport.height_px,
          job.variant == 0 ? "orig" : "aug" + std::to_string(job.variant)};
}

}  // namespace

DatasetResult generate_dataset(std::span<const Scenario> scenarios, const std::filesystem::path& out_dir,
                               const DatasetConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "pairs", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create output directory " + out_dir.string() + ": " + ec.message());

  DatasetResult result;
  std::vector<Job> jobs;
  for (const auto& sc : scenarios) {
    const auto times = snapshot_times(sc);
    for (std::size_t k = 0; k < times.size(); ++k) {
      Scenario snap = snapshot_at(sc, times[k]);
      if (snap.objects.empty()) {
        ++result.skipped_no_objects;
        continue;
      }
      for (auto& a : augment(snap, config.augment, derive_seed(config.seed, sc.id, k))) {
        jobs.push_back({std::move(a.scenario), times[k], a.variant});
      }
    }
  }
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::tie(a.scenario.id, a.timestamp, a.variant) < std::tie(b.scenario.id, b.timestamp, b.variant);
  });

  const int workers = std::min<int>(resolve_workers(config.workers), std::max<std::size_t>(1, jobs.size()));
  DatasetConfig cfg = config;
  if (workers > 1) {
    cfg.planner.workers = 1;
    cfg.render.workers = 1;
  }
  std::vector<std::optional<ManifestRow>> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    try {
      rows[i] = run_job(jobs[i], out_dir, cfg);
    } catch (const std::exception& e) {
      errors[i] = stem_for(jobs[i]) + ": skipped, " + e.what();
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (rows[i]) {
      result.rows.push_back(std::move(*rows[i]));
    } else {
      ++result.skipped_failures;
      result.warnings.push_back(errors[i]);
    }
  }
  if (config.rebalance && !result.rows.empty()) result.rows = rebalance(result.rows, config.seed);
  write_manifest(result.rows, out_dir / "manifest.csv");
  return result;
}

DatasetResult generate_dataset(const std::filesystem::path& scenario_dir, const std::filesystem::path& out_dir,
                               const DatasetConfig& config) {
  std::vector<std::string> errors;
  const auto scenarios = load_scenario_dir(scenario_dir, &errors);
  auto result = generate_dataset(scenarios, out_dir, config);
  result.warnings.insert(result.warnings.begin(), errors.begin(), errors.end());
  return result;
}

}  // namespace psv
