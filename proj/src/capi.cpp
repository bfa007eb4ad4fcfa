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

#include "psv/psv.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <new>
#include <sstream>
#include <string>

#include "psv/dataset.hpp"
#include "psv/error.hpp"
#include "psv/evaluation.hpp"
#include "psv/input_renderer.hpp"
#include "psv/shaped_planner.hpp"
#include "psv/stack_io.hpp"
#include "psv/synthetic.hpp"
#include "psv/value_renderer.hpp"

#ifndef PSV_VERSION_STRING
#define PSV_VERSION_STRING "0.0.0"
#endif

struct psv_scenario {
  psv::Scenario value;
};
struct psv_planner_config {
  psv::PlannerConfig value;
};
struct psv_policy_set {
  psv::PolicySet value;
};
struct psv_value_sequence {
  psv::ValueImageSequence value;
};
struct psv_report {
  psv::BenchmarkReport value;
  std::string json;
  std::string text;
};
struct psv_dataset {
  psv::DatasetResult value;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

psv_status to_status(psv::ErrorCode code) {
  switch (code) {
    case psv::ErrorCode::kInvalidArgument: return PSV_ERR_INVALID_ARGUMENT;
    case psv::ErrorCode::kParse: return PSV_ERR_PARSE;
    case psv::ErrorCode::kValidation: return PSV_ERR_VALIDATION;
    case psv::ErrorCode::kIo: return PSV_ERR_IO;
    case psv::ErrorCode::kBlocked: return PSV_ERR_BLOCKED;
    case psv::ErrorCode::kMismatch: return PSV_ERR_MISMATCH;
  }
  return PSV_ERR_INTERNAL;
}

template <typename Fn>
psv_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return PSV_OK;
  } catch (const psv::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return PSV_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PSV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PSV_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw psv::Error(psv::ErrorCode::kInvalidArgument, what);
}

const psv::PlannerConfig& config_or_default(const psv_planner_config* c) {
  static const psv::PlannerConfig defaults;
  return c ? c->value : defaults;
}

std::vector<psv::VehicleState> to_states(const psv_state* p, std::size_t n) {
  std::vector<psv::VehicleState> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {p[i].x, p[i].y, p[i].heading, p[i].velocity, p[i].acceleration, p[i].wheel_angle,
              p[i].wheel_angle_rate, p[i].t};
  }
  return out;
}

}  // namespace

extern "C" {

const char* psv_version(void) { return PSV_VERSION_STRING; }

const char* psv_last_error(void) { return g_last_error.c_str(); }

psv_status psv_scenario_load(const char* path, psv_scenario** out) {
  return guarded([&] {
    require(path && out, "psv_scenario_load: null argument");
    *out = new psv_scenario{psv::load_scenario(path)};
  });
}

psv_status psv_scenario_parse(const char* json, psv_scenario** out) {
  return guarded([&] {
    require(json && out, "psv_scenario_parse: null argument");
    *out = new psv_scenario{psv::parse_scenario(json)};
  });
}

psv_status psv_scenario_synthetic(uint64_t seed, int shape, int min_objects, int max_objects, double stream_duration,
                                  psv_scenario** out) {
  return guarded([&] {
    require(out != nullptr, "psv_scenario_synthetic: null argument");
    require(shape == 0 || shape == 1, "psv_scenario_synthetic: shape must be 0 or 1");
    psv::SyntheticOptions o;
    o.shape = shape == 1 ? psv::RoadShape::kCurve : psv::RoadShape::kStraight;
    o.min_objects = min_objects;
    o.max_objects = max_objects;
    o.stream_duration = stream_duration;
    *out = new psv_scenario{psv::synthetic_scenario(seed, o)};
  });
}

psv_status psv_scenario_save(const psv_scenario* scenario, const char* path) {
  return guarded([&] {
    require(scenario && path, "psv_scenario_save: null argument");
    psv::save_scenario(scenario->value, path);
  });
}

const char* psv_scenario_id(const psv_scenario* scenario) { return scenario ? scenario->value.id.c_str() : ""; }

size_t psv_scenario_object_count(const psv_scenario* scenario) {
  return scenario ? scenario->value.objects.size() : 0;
}

void psv_scenario_free(psv_scenario* scenario) { delete scenario; }

psv_status psv_config_default(psv_planner_config** out) {
  return guarded([&] {
    require(out != nullptr, "psv_config_default: null argument");
    *out = new psv_planner_config{};
  });
}

psv_status psv_config_load(const char* path, psv_planner_config** out) {
  return guarded([&] {
    require(path && out, "psv_config_load: null argument");
    *out = new psv_planner_config{psv::load_planner_config(path)};
  });
}

psv_status psv_config_set_workers(psv_planner_config* config, int workers) {
  return guarded([&] {
    require(config != nullptr, "psv_config_set_workers: null config");
    require(workers >= 0, "psv_config_set_workers: workers must be >= 0");
    config->value.workers = workers;
  });
}

psv_status psv_config_set_prune_cap(psv_planner_config* config, size_t max_states) {
  return guarded([&] {
    require(config != nullptr, "psv_config_set_prune_cap: null config");
    require(max_states > 0, "psv_config_set_prune_cap: cap must be positive");
    config->value.prune.max_states = max_states;
  });
}

void psv_config_free(psv_planner_config* config) { delete config; }

psv_status psv_plan(const psv_scenario* scenario, const psv_planner_config* config, psv_policy_set** out) {
  return guarded([&] {
    require(scenario && out, "psv_plan: null argument");
    const auto preds = psv::predict_objects(scenario->value, scenario->value.horizon);
    *out = new psv_policy_set{psv::plan(scenario->value, preds, config_or_default(config))};
  });
}

psv_status psv_plan_shaped(const psv_scenario* scenario, const psv_value_sequence* sequence,
                           const psv_planner_config* config, psv_mode mode, double weight, psv_policy_set** out,
                           int* selected) {
  return guarded([&] {
    require(scenario && out, "psv_plan_shaped: null argument");
    require(mode == PSV_MODE_REWARD_ONLY || sequence, "psv_plan_shaped: sequence required for this mode");
    psv::ShapingMode m = psv::ShapingMode::kRewardOnly;
    if (mode == PSV_MODE_SHAPED) m = psv::ShapingMode::kShaped;
    else if (mode == PSV_MODE_VALUES_ONLY) m = psv::ShapingMode::kValuesOnly;
    else require(mode == PSV_MODE_REWARD_ONLY, "psv_plan_shaped: unknown mode");
    const auto preds = psv::predict_objects(scenario->value, scenario->value.horizon);
    static const psv::ValueImageSequence empty;
    auto r = psv::plan_with_psvn(scenario->value, preds, sequence ? sequence->value : empty,
                                 config_or_default(config), m, weight);
    if (selected) *selected = r.selected;
    *out = new psv_policy_set{std::move(r.policies)};
  });
}

size_t psv_policy_set_size(const psv_policy_set* set) { return set ? set->value.size() : 0; }

size_t psv_policy_set_visited_states(const psv_policy_set* set) { return set ? set->value.visited_states : 0; }

int psv_policy_set_blocked(const psv_policy_set* set) { return set && set->value.blocked ? 1 : 0; }

int psv_policy_set_best(const psv_policy_set* set) { return set ? set->value.best() : -1; }

psv_status psv_policy_set_policy(const psv_policy_set* set, size_t index, psv_state* samples, size_t capacity,
                                 size_t* count, double* value, int* collides) {
  return guarded([&] {
    require(set != nullptr, "psv_policy_set_policy: null set");
    require(index < set->value.size(), "psv_policy_set_policy: index out of range");
    require(samples || capacity == 0, "psv_policy_set_policy: null sample buffer");
    const auto states = set->value.samples(index);
    for (std::size_t i = 0; i < states.size() && i < capacity; ++i) {
      const auto& s = states[i];
      samples[i] = {s.x, s.y, s.heading, s.velocity, s.acceleration, s.wheel_angle, s.wheel_angle_rate, s.t};
    }
    if (count) *count = states.size();
    if (value) *value = set->value.policies[index].value;
    if (collides) *collides = set->value.policies[index].collides ? 1 : 0;
  });
}

psv_status psv_policy_set_save(const psv_policy_set* set, int selected, const char* path) {
  return guarded([&] {
    require(set && path, "psv_policy_set_save: null argument");
    psv::save_policy_set(set->value, selected, path);
  });
}

void psv_policy_set_free(psv_policy_set* set) { delete set; }

psv_status psv_render_sequence(const psv_scenario* scenario, const psv_policy_set* set, double beta,
                               psv_value_sequence** out) {
  return guarded([&] {
    require(scenario && set && out, "psv_render_sequence: null argument");
    psv::ValueRenderConfig cfg;
    if (beta > 0.0) cfg.beta = beta;
    const auto preds = psv::predict_objects(scenario->value, scenario->value.horizon);
    *out = new psv_value_sequence{psv::render_sequence(scenario->value, preds, set->value, cfg)};
  });
}

psv_status psv_sequence_save(const psv_value_sequence* sequence, const char* prefix, const char* scenario_id,
                             double timestamp) {
  return guarded([&] {
    require(sequence && prefix, "psv_sequence_save: null argument");
    psv::save_sequence(sequence->value, prefix, scenario_id ? scenario_id : "", timestamp);
  });
}

psv_status psv_sequence_load(const char* prefix, psv_value_sequence** out) {
  return guarded([&] {
    require(prefix && out, "psv_sequence_load: null argument");
    *out = new psv_value_sequence{psv::load_sequence(prefix)};
  });
}

psv_status psv_sequence_size(const psv_value_sequence* sequence, int* width, int* height) {
  return guarded([&] {
    require(sequence != nullptr, "psv_sequence_size: null sequence");
    if (width) *width = sequence->value.viewport.width_px;
    if (height) *height = sequence->value.viewport.height_px;
  });
}

psv_status psv_sequence_pixel(const psv_value_sequence* sequence, double x, double y, double t, float* value) {
  return guarded([&] {
    require(sequence && value, "psv_sequence_pixel: null argument");
    *value = psv::pixel_lookup(x, y, t, sequence->value);
  });
}

void psv_sequence_free(psv_value_sequence* sequence) { delete sequence; }

psv_status psv_render_inputs(const psv_scenario* scenario, const psv_policy_set* set, const char* prefix) {
  return guarded([&] {
    require(scenario && set && prefix, "psv_render_inputs: null argument");
    const auto vp = psv::fit_viewport(scenario->value, psv::reachable_points(set->value));
    const auto inputs = psv::render_inputs(scenario->value, vp);
    psv::StackMeta meta;
    meta.kind = "input";
    meta.frame = psv::Frame::kSquare;
    meta.viewport = vp;
    meta.square = inputs.square;
    meta.scenario_id = scenario->value.id;
    meta.channel_names = {"velocity", "direction", "lanes", "static"};
    psv::save_stack(prefix, inputs.channels, meta);
  });
}

psv_status psv_otg(const psv_state* policy, size_t count, const psv_scenario* scenario, double* out) {
  return guarded([&] {
    require((policy || count == 0) && scenario && out, "psv_otg: null argument");
    const auto preds = psv::predict_objects(scenario->value, scenario->value.horizon);
    *out = psv::otg(to_states(policy, count), preds);
  });
}

double psv_progress(const psv_state* policy, size_t count) {
  if (!policy) return 0.0;
  return psv::progress(to_states(policy, count));
}

psv_status psv_generate_dataset(const char* scenario_dir, const char* out_dir, const psv_planner_config* config,
                                uint64_t seed, const char* augment_config, int rebalance, psv_dataset** out) {
  return guarded([&] {
    require(scenario_dir && out_dir && out, "psv_generate_dataset: null argument");
    psv::DatasetConfig cfg;
    cfg.planner = config_or_default(config);
    cfg.seed = seed;
    cfg.rebalance = rebalance != 0;
    if (augment_config) cfg.augment = psv::load_augment_config(augment_config);
    auto result = psv::generate_dataset(std::filesystem::path(scenario_dir), out_dir, cfg);
    std::ostringstream os;
    os << "pairs: " << result.rows.size() << "\n"
       << "snapshots without objects: " << result.skipped_no_objects << "\n"
       << "failed snapshots: " << result.skipped_failures << "\n";
    for (const auto& w : result.warnings) os << "warning: " << w << "\n";
    *out = new psv_dataset{std::move(result), os.str()};
  });
}

size_t psv_dataset_pair_count(const psv_dataset* dataset) { return dataset ? dataset->value.rows.size() : 0; }

const char* psv_dataset_summary(const psv_dataset* dataset) { return dataset ? dataset->summary.c_str() : ""; }

void psv_dataset_free(psv_dataset* dataset) { delete dataset; }

psv_status psv_run_benchmark(const char* scenario_dir, const psv_planner_config* config, const char* inferred_dir,
                             psv_report** out) {
  return guarded([&] {
    require(scenario_dir && out, "psv_run_benchmark: null argument");
    psv::BenchmarkConfig cfg;
    cfg.planner = config_or_default(config);
    cfg.workers = cfg.planner.workers;
    if (inferred_dir) {
      cfg.source = psv::ValueSource::kInferred;
      cfg.inferred_dir = inferred_dir;
    }
    auto report = psv::run_benchmark(std::filesystem::path(scenario_dir), cfg);
    auto json = psv::report_to_json(report);
    auto text = psv::report_to_text(report);
    *out = new psv_report{std::move(report), std::move(json), std::move(text)};
  });
}

size_t psv_report_scenario_count(const psv_report* report) { return report ? report->value.results.size() : 0; }

const char* psv_report_json(const psv_report* report) { return report ? report->json.c_str() : ""; }

const char* psv_report_text(const psv_report* report) { return report ? report->text.c_str() : ""; }

psv_status psv_report_write(const psv_report* report, const char* out_dir) {
  return guarded([&] {
    require(report && out_dir, "psv_report_write: null argument");
    psv::write_report(report->value, out_dir);
  });
}

void psv_report_free(psv_report* report) { delete report; }

}  // extern "C"
