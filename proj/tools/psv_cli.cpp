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

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psv/psv.h"

namespace {

int fail(psv_status status, const std::string& what) {
  std::fprintf(stderr, "psv: %s: %s\n", what.c_str(), psv_last_error());
  return status == PSV_ERR_IO ? 3 : 2;
}

void ensure_parent(const std::string& prefix) {
  const auto parent = std::filesystem::path(prefix).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
}

struct ConfigHandle {
  psv_planner_config* ptr{nullptr};
  ~ConfigHandle() { psv_config_free(ptr); }
};

psv_status load_config(const std::string& path, ConfigHandle& out) {
  return path.empty() ? psv_config_default(&out.ptr) : psv_config_load(path.c_str(), &out.ptr);
}

int cmd_generate(const std::string& scenarios, const std::string& out, std::uint64_t seed, const std::string& augment,
                 bool rebalance, const std::string& config_path) {
  ConfigHandle cfg;
  if (auto s = load_config(config_path, cfg); s != PSV_OK) return fail(s, "config");
  psv_dataset* ds = nullptr;
  const auto s = psv_generate_dataset(scenarios.c_str(), out.c_str(), cfg.ptr, seed,
                                      augment.empty() ? nullptr : augment.c_str(), rebalance ? 1 : 0, &ds);
  if (s != PSV_OK) return fail(s, "generate");
  std::printf("%s", psv_dataset_summary(ds));
  std::printf("manifest: %s\n", (std::filesystem::path(out) / "manifest.csv").string().c_str());
  psv_dataset_free(ds);
  return 0;
}

int cmd_plan(const std::string& scenario_path, const std::string& out, const std::string& config_path,
             const std::string& mode_name, const std::string& values, double weight, double beta, bool images) {
  ConfigHandle cfg;
  if (auto s = load_config(config_path, cfg); s != PSV_OK) return fail(s, "config");
  psv_scenario* sc = nullptr;
  if (auto s = psv_scenario_load(scenario_path.c_str(), &sc); s != PSV_OK) return fail(s, "scenario");

  psv_mode mode = PSV_MODE_REWARD_ONLY;
  if (mode_name == "shaped") mode = PSV_MODE_SHAPED;
  else if (mode_name == "values_only") mode = PSV_MODE_VALUES_ONLY;

  psv_value_sequence* input_seq = nullptr;
  if (mode != PSV_MODE_REWARD_ONLY) {
    if (values.empty()) {
      psv_scenario_free(sc);
      std::fprintf(stderr, "psv: plan: --values is required for mode %s\n", mode_name.c_str());
      return 2;
    }
    if (auto s = psv_sequence_load(values.c_str(), &input_seq); s != PSV_OK) {
      psv_scenario_free(sc);
      return fail(s, "values");
    }
  }

  psv_policy_set* set = nullptr;
  int selected = -1;
  auto status = psv_plan_shaped(sc, input_seq, cfg.ptr, mode, weight, &set, &selected);
  psv_sequence_free(input_seq);
  if (status != PSV_OK) {
    psv_scenario_free(sc);
    return fail(status, "plan");
  }
  std::printf("scenario %s: %zu policies, %zu visited states, selected %d%s\n", psv_scenario_id(sc),
              psv_policy_set_size(set), psv_policy_set_visited_states(set), selected,
              psv_policy_set_blocked(set) ? " (blocked)" : "");
  int rc = 0;
  if ((status = psv_policy_set_save(set, selected, (out + "_policies.json").c_str())) != PSV_OK) {
    rc = fail(status, "policy dump");
  } else if (images) {
    psv_value_sequence* seq = nullptr;
    if ((status = psv_render_sequence(sc, set, beta, &seq)) != PSV_OK) {
      rc = fail(status, "render");
    } else {
      if ((status = psv_sequence_save(seq, (out + "_values").c_str(), psv_scenario_id(sc), 0.0)) != PSV_OK) {
        rc = fail(status, "save values");
      } else if ((status = psv_render_inputs(sc, set, (out + "_inputs").c_str())) != PSV_OK) {
        rc = fail(status, "render inputs");
      } else {
        std::printf("wrote %s_policies.json, %s_values.json, %s_inputs.json\n", out.c_str(), out.c_str(), out.c_str());
      }
      psv_sequence_free(seq);
    }
  }
  psv_policy_set_free(set);
  psv_scenario_free(sc);
  return rc;
}

int cmd_evaluate(const std::string& scenarios, const std::vector<std::string>& values, const std::string& out,
                 const std::string& config_path) {
  const char* inferred = nullptr;
  if (values.empty() || values[0] == "oracle") {
    if (values.size() > 1) {
      std::fprintf(stderr, "psv: evaluate: --values oracle takes no directory\n");
      return 2;
    }
  } else if (values[0] == "inferred") {
    if (values.size() != 2) {
      std::fprintf(stderr, "psv: evaluate: --values inferred needs a directory\n");
      return 2;
    }
    inferred = values[1].c_str();
  } else {
    std::fprintf(stderr, "psv: evaluate: --values must be 'oracle' or 'inferred DIR'\n");
    return 2;
  }
  ConfigHandle cfg;
  if (auto s = load_config(config_path, cfg); s != PSV_OK) return fail(s, "config");
  psv_report* report = nullptr;
  if (auto s = psv_run_benchmark(scenarios.c_str(), cfg.ptr, inferred, &report); s != PSV_OK) {
    return fail(s, "evaluate");
  }
  std::printf("%s", psv_report_text(report));
  int rc = 0;
  if (!out.empty()) {
    if (auto s = psv_report_write(report, out.c_str()); s != PSV_OK) rc = fail(s, "report");
  }
  psv_report_free(report);
  return rc;
}

int cmd_render_inputs(const std::string& scenario_path, const std::string& out, const std::string& config_path) {
  ConfigHandle cfg;
  if (auto s = load_config(config_path, cfg); s != PSV_OK) return fail(s, "config");
  psv_scenario* sc = nullptr;
  if (auto s = psv_scenario_load(scenario_path.c_str(), &sc); s != PSV_OK) return fail(s, "scenario");
  psv_policy_set* set = nullptr;
  auto status = psv_plan(sc, cfg.ptr, &set);
  int rc = 0;
  if (status != PSV_OK) {
    rc = fail(status, "plan");
  } else if ((status = psv_render_inputs(sc, set, out.c_str())) != PSV_OK) {
    rc = fail(status, "render inputs");
  } else {
    std::printf("wrote %s.json\n", out.c_str());
  }
  psv_policy_set_free(set);
  psv_scenario_free(sc);
  return rc;
}

int cmd_synth(int count, std::uint64_t seed, const std::string& out, int curve_every, double stream) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    std::fprintf(stderr, "psv: synth: cannot create %s: %s\n", out.c_str(), ec.message().c_str());
    return 3;
  }
  for (int i = 0; i < count; ++i) {
    const int shape = curve_every > 0 && i % curve_every == curve_every - 1 ? 1 : 0;
    psv_scenario* sc = nullptr;
    if (auto s = psv_scenario_synthetic(seed + i, shape, 1, 3, stream, &sc); s != PSV_OK) return fail(s, "synth");
    const auto path = std::filesystem::path(out) / (std::string(psv_scenario_id(sc)) + ".json");
    const auto s = psv_scenario_save(sc, path.string().c_str());
    psv_scenario_free(sc);
    if (s != PSV_OK) return fail(s, "synth");
  }
  std::printf("wrote %d scenarios to %s\n", count, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pixel state value planning: dataset generation, planning and evaluation"};
  app.require_subcommand(1);
  app.footer("Worker threads: PSV_WORKERS (default: hardware concurrency).");

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Planner configuration (JSON)")->check(CLI::ExistingFile);
  };

  auto* version = app.add_subcommand("version", "Print the library version");

  auto* generate = app.add_subcommand("generate", "Replay scenarios at 5 Hz and write input/target pairs");
  std::string scenarios_dir, out_dir, augment;
  std::uint64_t seed = 0;
  bool rebalance = false;
  generate->add_option("--scenarios", scenarios_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  generate->add_option("--out", out_dir, "Output directory")->required();
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("--augment", augment, "Augmentation config (JSON)")->check(CLI::ExistingFile);
  generate->add_flag("--rebalance", rebalance, "Rebalance by target aspect ratio");
  add_config(generate);

  auto* plan = app.add_subcommand("plan", "Plan one scenario, dump the policy set and render its images");
  std::string scenario_file, prefix, mode = "reward_only", values_prefix;
  double weight = 1.0, beta = 0.0;
  bool no_images = false;
  plan->add_option("scenario", scenario_file, "Scenario file")->required()->check(CLI::ExistingFile);
  plan->add_option("--out", prefix, "Output prefix")->required();
  plan->add_option("--mode", mode, "reward_only, shaped or values_only")
      ->check(CLI::IsMember({"reward_only", "shaped", "values_only"}));
  plan->add_option("--values", values_prefix, "Value sequence (prefix or sidecar) for shaped modes");
  plan->add_option("--weight", weight, "Shaping weight in shaped mode");
  plan->add_option("--beta", beta, "MaxEnt temperature for rendering (default 10)");
  plan->add_flag("--no-images", no_images, "Only write the policy dump");
  add_config(plan);

  auto* evaluate = app.add_subcommand("evaluate", "Benchmark reward_only against values_only selection");
  std::vector<std::string> values{"oracle"};
  std::string report_dir;
  evaluate->add_option("--scenarios", scenarios_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--values", values, "oracle | inferred DIR")->expected(1, 2);
  evaluate->add_option("--out", report_dir, "Report directory (report.json, report.txt, matrix PNGs)");
  add_config(evaluate);

  auto* render = app.add_subcommand("render-inputs", "Render the four-channel input stack of a scenario");
  render->add_option("scenario", scenario_file, "Scenario file")->required()->check(CLI::ExistingFile);
  render->add_option("--out", prefix, "Output prefix")->required();
  add_config(render);

  auto* synth = app.add_subcommand("synth", "Write seeded synthetic two-lane scenarios");
  int count = 10, curve_every = 3;
  double stream = 0.0;
  synth->add_option("--count", count, "Number of scenarios")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "First seed");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--curve-every", curve_every, "Every k-th scenario uses a curved road (0: never)");
  synth->add_option("--stream", stream, "Attach a replay stream of this duration [s]");

  CLI11_PARSE(app, argc, argv);

  if (*version) {
    std::printf("psv %s\n", psv_version());
    return 0;
  }
  if (*generate) return cmd_generate(scenarios_dir, out_dir, seed, augment, rebalance, config);
  if (*plan || *render) ensure_parent(prefix);
  if (*plan) return cmd_plan(scenario_file, prefix, config, mode, values_prefix, weight, beta, !no_images);
  if (*evaluate) return cmd_evaluate(scenarios_dir, values, report_dir, config);
  if (*render) return cmd_render_inputs(scenario_file, prefix, config);
  if (*synth) return cmd_synth(count, seed, out_dir, curve_every, stream);
  return 0;
}
