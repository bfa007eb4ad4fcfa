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

/* C interface of the pixel-state-value planning library. */
#ifndef PSV_PSV_H_
#define PSV_PSV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PSV_API __declspec(dllexport)
#else
#define PSV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psv_status {
  PSV_OK = 0,
  PSV_ERR_INVALID_ARGUMENT = 1,
  PSV_ERR_PARSE = 2,
  PSV_ERR_VALIDATION = 3,
  PSV_ERR_IO = 4,
  PSV_ERR_BLOCKED = 5,
  PSV_ERR_MISMATCH = 6,
  PSV_ERR_INTERNAL = 99
} psv_status;

typedef struct psv_scenario psv_scenario;
typedef struct psv_planner_config psv_planner_config;
typedef struct psv_policy_set psv_policy_set;
typedef struct psv_value_sequence psv_value_sequence;
typedef struct psv_report psv_report;
typedef struct psv_dataset psv_dataset;

typedef struct psv_state {
  double x, y, heading, velocity, acceleration, wheel_angle, wheel_angle_rate, t;
} psv_state;

typedef enum psv_mode { PSV_MODE_REWARD_ONLY = 0, PSV_MODE_SHAPED = 1, PSV_MODE_VALUES_ONLY = 2 } psv_mode;

/* Library version string, static storage. */
PSV_API const char* psv_version(void);
/* Message of the last failed call on this thread; empty if none. */
PSV_API const char* psv_last_error(void);

/* Scenarios */
PSV_API psv_status psv_scenario_load(const char* path, psv_scenario** out);
PSV_API psv_status psv_scenario_parse(const char* json, psv_scenario** out);
/* shape: 0 straight, 1 curve. stream_duration > 0 attaches a replay stream. */
PSV_API psv_status psv_scenario_synthetic(uint64_t seed, int shape, int min_objects, int max_objects,
                                          double stream_duration, psv_scenario** out);
PSV_API psv_status psv_scenario_save(const psv_scenario* scenario, const char* path);
/* Owned by the scenario. */
PSV_API const char* psv_scenario_id(const psv_scenario* scenario);
PSV_API size_t psv_scenario_object_count(const psv_scenario* scenario);
PSV_API void psv_scenario_free(psv_scenario* scenario);

/* Planner configuration */
PSV_API psv_status psv_config_default(psv_planner_config** out);
PSV_API psv_status psv_config_load(const char* path, psv_planner_config** out);
PSV_API psv_status psv_config_set_workers(psv_planner_config* config, int workers);
PSV_API psv_status psv_config_set_prune_cap(psv_planner_config* config, size_t max_states);
PSV_API void psv_config_free(psv_planner_config* config);

/* Planning. config may be NULL for defaults. */
PSV_API psv_status psv_plan(const psv_scenario* scenario, const psv_planner_config* config, psv_policy_set** out);
/* sequence is ignored (and may be NULL) in PSV_MODE_REWARD_ONLY. */
PSV_API psv_status psv_plan_shaped(const psv_scenario* scenario, const psv_value_sequence* sequence,
                                   const psv_planner_config* config, psv_mode mode, double weight,
                                   psv_policy_set** out, int* selected);
PSV_API size_t psv_policy_set_size(const psv_policy_set* set);
PSV_API size_t psv_policy_set_visited_states(const psv_policy_set* set);
PSV_API int psv_policy_set_blocked(const psv_policy_set* set);
/* Best non-colliding policy by value, -1 if none. */
PSV_API int psv_policy_set_best(const psv_policy_set* set);
/* Copies up to `capacity` samples; `count` receives the full sample count. */
PSV_API psv_status psv_policy_set_policy(const psv_policy_set* set, size_t index, psv_state* samples,
                                         size_t capacity, size_t* count, double* value, int* collides);
PSV_API psv_status psv_policy_set_save(const psv_policy_set* set, int selected, const char* path);
PSV_API void psv_policy_set_free(psv_policy_set* set);

/* Value image sequences. beta <= 0 selects the default. */
PSV_API psv_status psv_render_sequence(const psv_scenario* scenario, const psv_policy_set* set, double beta,
                                       psv_value_sequence** out);
PSV_API psv_status psv_sequence_save(const psv_value_sequence* sequence, const char* prefix,
                                     const char* scenario_id, double timestamp);
PSV_API psv_status psv_sequence_load(const char* prefix, psv_value_sequence** out);
PSV_API psv_status psv_sequence_size(const psv_value_sequence* sequence, int* width, int* height);
PSV_API psv_status psv_sequence_pixel(const psv_value_sequence* sequence, double x, double y, double t,
                                      float* value);
PSV_API void psv_sequence_free(psv_value_sequence* sequence);

/* Four-channel square input stack; the viewport comes from the set's reachable states. */
PSV_API psv_status psv_render_inputs(const psv_scenario* scenario, const psv_policy_set* set, const char* prefix);

/* Metrics over sampled trajectories. */
PSV_API psv_status psv_otg(const psv_state* policy, size_t count, const psv_scenario* scenario, double* out);
PSV_API double psv_progress(const psv_state* policy, size_t count);

/* Dataset generation. augment_config may be NULL. */
PSV_API psv_status psv_generate_dataset(const char* scenario_dir, const char* out_dir,
                                        const psv_planner_config* config, uint64_t seed, const char* augment_config,
                                        int rebalance, psv_dataset** out);
PSV_API size_t psv_dataset_pair_count(const psv_dataset* dataset);
/* Owned by the dataset handle. */
PSV_API const char* psv_dataset_summary(const psv_dataset* dataset);
PSV_API void psv_dataset_free(psv_dataset* dataset);

/* Benchmark. inferred_dir NULL: oracle-rendered values. */
PSV_API psv_status psv_run_benchmark(const char* scenario_dir, const psv_planner_config* config,
                                     const char* inferred_dir, psv_report** out);
PSV_API size_t psv_report_scenario_count(const psv_report* report);
/* Owned by the report. */
PSV_API const char* psv_report_json(const psv_report* report);
PSV_API const char* psv_report_text(const psv_report* report);
PSV_API psv_status psv_report_write(const psv_report* report, const char* out_dir);
PSV_API void psv_report_free(psv_report* report);

#ifdef __cplusplus
}
#endif

#endif  // PSV_PSV_H_
