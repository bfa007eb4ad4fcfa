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

#include "psv/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "psv/error.hpp"
#include "psv/parallel.hpp"
#include "psv/shaped_planner.hpp"

namespace psv {

double otg(std::span<const VehicleState> policy, std::span<const ObjectPrediction> predictions,
           double threshold_squared) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pred : predictions) {
    for (const auto& e : policy) {
      for (const auto& o : pred.samples) {
        const double dx = e.x - o.x, dy = e.y - o.y;
        if (dx * dx + dy * dy < threshold_squared) best = std::min(best, std::abs(e.t - o.t));
      }
    }
  }
  return best;
}

double progress(std::span<const VehicleState> policy) {
  double d = 0.0;
  for (std::size_t i = 1; i < policy.size(); ++i) {
    d += std::hypot(policy[i].x - policy[i - 1].x, policy[i].y - policy[i - 1].y);
  }
  return d;
}

int metric_bin(Metric metric, double value) {
  const double width = metric == Metric::kOtg ? 1.0 : 10.0;
  if (!(value < (kMatrixBins - 1) * width)) return kMatrixBins - 1;  // also infinity
  return std::clamp(static_cast<int>(std::floor(value / width)), 0, kMatrixBins - 1);
}

int ConfusionMatrix::total() const {
  int n = 0;
  for (const auto& row : counts) {
    for (int c : row) n += c;
  }
  return n;
}

ConfusionMatrix confusion_matrix(std::span<const std::pair<std::optional<double>, std::optional<double>>> pairs,
                                 Metric metric) {
  ConfusionMatrix m;
  m.metric = metric;
  for (const auto& [row, col] : pairs) {
    if (!row || !col) {
      ++m.skipped;
      continue;
    }
    ++m.counts[metric_bin(metric, *row)][metric_bin(metric, *col)];
  }
  return m;
}

ScenarioEvaluation evaluate_scenario(const Scenario& scenario, const BenchmarkConfig& config,
                                     const ValueImageSequence* inferred) {
  ScenarioEvaluation ev;
  ev.result.scenario_id = scenario.id;
  const auto preds = predict_objects(scenario, scenario.horizon);

  const ValueImageSequence empty;
  auto reward = plan_with_psvn(scenario, preds, empty, config.planner, ShapingMode::kRewardOnly);
  if (reward.selected >= 0) {
    ev.reward_policy = reward.policy;
    ev.result.reward_otg = otg(reward.policy.samples, preds, config.otg_threshold_squared);
    ev.result.reward_progress = progress(reward.policy.samples);
  }

  ValueImageSequence oracle;
  const ValueImageSequence* seq = inferred;
  if (!seq) {
    if (reward.policies.blocked) throw Error(ErrorCode::kBlocked, "every reward_only policy collides");
    oracle = render_sequence(scenario, preds, reward.policies, config.render);
    seq = &oracle;
  }
  auto values = plan_with_psvn(scenario, preds, *seq, config.planner, ShapingMode::kValuesOnly);
  if (values.selected >= 0) {
    ev.values_policy = values.policy;
    ev.result.values_otg = otg(values.policy.samples, preds, config.otg_threshold_squared);
    ev.result.values_progress = progress(values.policy.samples);
  }
  ev.result.ok = ev.reward_policy.has_value() && ev.values_policy.has_value();
  if (!ev.result.ok) ev.result.error = "no selectable policy";
  return ev;
}

std::optional<std::filesystem::path> find_inferred_sequence(const std::filesystem::path& dir,
                                                            const std::string& scenario_id) {
  namespace fs = std::filesystem;
  if (fs::exists(dir / (scenario_id + ".json"))) return dir / scenario_id;
  std::optional<fs::path> best;
  double best_t = std::numeric_limits<double>::infinity();
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("files")) continue;
    if (!j["files"].is_array() || j["files"].size() != 2 * kLayerCount) continue;
    if (j.value("scenario_id", std::string{}) != scenario_id) continue;
    const double t = j.value("timestamp", 0.0);
    if (t < best_t) {
      best_t = t;
      best = f.parent_path() / f.stem();
    }
  }
  return best;
}

BenchmarkReport run_benchmark(std::span<const Scenario> scenarios, const BenchmarkConfig& config) {
  BenchmarkReport report;
  std::vector<const Scenario*> order;
  for (const auto& s : scenarios) {
    if (s.objects.empty()) {
      report.warnings.push_back(s.id + ": skipped, no other vehicle");
      continue;
    }
    order.push_back(&s);
  }
  std::stable_sort(order.begin(), order.end(), [](const Scenario* a, const Scenario* b) { return a->id < b->id; });

  const int workers = std::min<int>(resolve_workers(config.workers), std::max<std::size_t>(1, order.size()));
  BenchmarkConfig cfg = config;
  if (workers > 1) cfg.planner.workers = 1;
  report.results.resize(order.size());
  parallel_for(order.size(), workers, [&](std::size_t i) {
    const Scenario& s = *order[i];
    try {
      std::optional<ValueImageSequence> inferred;
      if (cfg.source == ValueSource::kInferred) {
        const auto path = find_inferred_sequence(cfg.inferred_dir, s.id);
        if (!path) throw Error(ErrorCode::kIo, "no inferred value sequence in " + cfg.inferred_dir.string());
        inferred = load_sequence(*path);
      }
      report.results[i] = evaluate_scenario(s, cfg, inferred ? &*inferred : nullptr).result;
    } catch (const std::exception& e) {
      report.results[i].scenario_id = s.id;
      report.results[i].ok = false;
      report.results[i].error = e.what();
    }
  });
  if (cfg.source == ValueSource::kInferred && !std::filesystem::is_directory(cfg.inferred_dir)) {
    report.warnings.push_back("inferred directory missing: " + cfg.inferred_dir.string());
  }

  std::vector<std::pair<std::optional<double>, std::optional<double>>> otg_pairs, progress_pairs;
  int evaluated = 0, otg_ok = 0, progress_ok = 0;
  double sum_r = 0.0, sum_v = 0.0;
  for (const auto& r : report.results) {
    if (!r.error.empty()) report.warnings.push_back(r.scenario_id + ": " + r.error);
    otg_pairs.emplace_back(r.reward_otg, r.values_otg);
    progress_pairs.emplace_back(r.reward_progress, r.values_progress);
    if (!r.ok) continue;
    ++evaluated;
    if (*r.values_otg >= 1.0) ++otg_ok;
    if (*r.values_otg == 0.0) ++report.values_otg_zero_count;
    if (*r.values_progress >= *r.reward_progress) ++progress_ok;
    sum_r += *r.reward_progress;
    sum_v += *r.values_progress;
  }
  report.otg_matrix = confusion_matrix(otg_pairs, Metric::kOtg);
  report.progress_matrix = confusion_matrix(progress_pairs, Metric::kProgress);
  if (evaluated > 0) {
    report.values_otg_at_least_1s_rate = static_cast<double>(otg_ok) / evaluated;
    report.values_progress_at_least_reward_rate = static_cast<double>(progress_ok) / evaluated;
    report.mean_reward_progress = sum_r / evaluated;
    report.mean_values_progress = sum_v / evaluated;
  }
  if (scenarios.empty()) report.warnings.push_back("no scenarios to evaluate");
  return report;
}

BenchmarkReport run_benchmark(const std::filesystem::path& scenario_dir, const BenchmarkConfig& config) {
  std::vector<std::string> load_errors;
  const auto scenarios = load_scenario_dir(scenario_dir, &load_errors);
  auto report = run_benchmark(scenarios, config);
  report.warnings.insert(report.warnings.begin(), load_errors.begin(), load_errors.end());
  return report;
}

namespace {

nlohmann::json number_or_inf(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

nlohmann::json matrix_json(const ConfusionMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m.counts) rows.push_back(row);
  return {{"metric", m.metric == Metric::kOtg ? "otg" : "progress"},
          {"rows", "reward_only"},
          {"columns", "values_only"},
          {"counts", rows},
          {"total", m.total()},
          {"skipped", m.skipped}};
}

std::string bin_label(Metric m, int i) {
  if (m == Metric::kOtg) return i == kMatrixBins - 1 ? ">=7/inf" : "<" + std::to_string(i + 1);
  return i == kMatrixBins - 1 ? ">=70" : "<" + std::to_string(10 * (i + 1));
}

}  // namespace

std::string report_to_json(const BenchmarkReport& report) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    results.push_back({{"scenario_id", r.scenario_id},
                       {"ok", r.ok},
                       {"error", r.error},
                       {"reward_otg", number_or_inf(r.reward_otg)},
                       {"values_otg", number_or_inf(r.values_otg)},
                       {"reward_progress", number_or_inf(r.reward_progress)},
                       {"values_progress", number_or_inf(r.values_progress)}});
  }
  nlohmann::json j{{"scenarios", report.results.size()},
                   {"otg_matrix", matrix_json(report.otg_matrix)},
                   {"progress_matrix", matrix_json(report.progress_matrix)},
                   {"summary",
                    {{"values_otg_at_least_1s_rate", report.values_otg_at_least_1s_rate},
                     {"values_progress_at_least_reward_rate", report.values_progress_at_least_reward_rate},
                     {"mean_reward_progress", report.mean_reward_progress},
                     {"mean_values_progress", report.mean_values_progress},
                     {"values_otg_zero_count", report.values_otg_zero_count}}},
                   {"warnings", report.warnings},
                   {"results", results}};
  return j.dump(2) + "\n";
}

std::string report_to_text(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "scenarios: " << report.results.size() << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "values_only OTG >= 1 s: %.3f\n", report.values_otg_at_least_1s_rate);
  os << buf;
  std::snprintf(buf, sizeof buf, "values_only progress >= reward_only: %.3f\n",
                report.values_progress_at_least_reward_rate);
  os << buf;
  std::snprintf(buf, sizeof buf, "mean progress reward_only %.2f m, values_only %.2f m\n",
                report.mean_reward_progress, report.mean_values_progress);
  os << buf;
  for (const auto* m : {&report.otg_matrix, &report.progress_matrix}) {
    os << "\n" << (m->metric == Metric::kOtg ? "OTG [s]" : "progress [m]")
       << " (rows reward_only, columns values_only)\n";
    std::snprintf(buf, sizeof buf, "%9s", "");
    os << buf;
    for (int c = 0; c < kMatrixBins; ++c) {
      std::snprintf(buf, sizeof buf, "%8s", bin_label(m->metric, c).c_str());
      os << buf;
    }
    os << "\n";
    for (int r = 0; r < kMatrixBins; ++r) {
      std::snprintf(buf, sizeof buf, "%9s", bin_label(m->metric, r).c_str());
      os << buf;
      for (int c = 0; c < kMatrixBins; ++c) {
        std::snprintf(buf, sizeof buf, "%8d", m->counts[r][c]);
        os << buf;
      }
      os << "\n";
    }
  }
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  return os.str();
}

Image render_matrix(const ConfusionMatrix& matrix, int cell_px) {
  int peak = 0;
  for (const auto& row : matrix.counts) {
    for (int c : row) peak = std::max(peak, c);
  }
  Image img(kMatrixBins * cell_px, kMatrixBins * cell_px);
  for (int r = 0; r < kMatrixBins; ++r) {
    for (int c = 0; c < kMatrixBins; ++c) {
      const float v = peak > 0 ? static_cast<float>(matrix.counts[r][c]) / peak : 0.0f;
      for (int y = 0; y < cell_px; ++y) {
        for (int x = 0; x < cell_px; ++x) {
          // one-pixel grid lines
          const bool edge = x == 0 || y == 0;
          img.at(c * cell_px + x, r * cell_px + y) = edge ? 0.5f : v;
        }
      }
    }
  }
  return img;
}

void write_report(const BenchmarkReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(out_dir / name, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + (out_dir / name).string());
  };
  write("report.json", report_to_json(report));
  write("report.txt", report_to_text(report));
  save_png16(render_matrix(report.otg_matrix), out_dir / "otg_matrix.png");
  save_png16(render_matrix(report.progress_matrix), out_dir / "progress_matrix.png");
}

}  // namespace psv
