/*
 * Copyright 2026 The dsml Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dsml/commands.hpp"

#include <chrono>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <vector>

#include "dsml/artifacts.hpp"
#include "dsml/config.hpp"
#include "dsml/errors.hpp"
#include "dsml/parallel.hpp"
#include "dsml/rng.hpp"
#include "dsml/validation.hpp"

namespace dsml {

namespace {

namespace fs = std::filesystem;

constexpr const char* kPresetName = "paper-demo";

RunConfig apply_overrides(RunConfig config, const CommandOptions& options) {
  if (options.seed) config.planner.seed = *options.seed;
  if (options.runs) {
    if (*options.runs < 1) throw ConfigError("--runs must be at least 1");
    config.output.validation_runs = *options.runs;
  }
  if (!options.out_dir.empty()) config.output.directory = options.out_dir;
  return config;
}

RunConfig resolve_config(const CommandOptions& options) {
  if (options.config.empty()) throw ConfigError("--config is required (a JSON file or 'paper-demo')");
  RunConfig config;
  if (options.config == kPresetName) {
    config = options.full_scale ? paper_demo_config() : desk_scale(paper_demo_config());
  } else {
    config = load_config(options.config);
  }
  return apply_overrides(std::move(config), options);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool all_satisfied(const PlanFile& plan) {
  for (const auto& rep : plan.repetitions)
    if (rep.result.terminated_by != Termination::Satisfied) return false;
  return true;
}

PlanFile run_planner(const RunConfig& config, std::ostream& err) {
  PlanFile plan;
  plan.config = config;
  err << "planning '" << config.name << "': " << config.repetitions << " repetition(s), H="
      << config.horizon << ", M=" << config.planner.samples << ", max_N=" << config.planner.max_N
      << ", threads=" << worker_count() << '\n';
  for (int r = 0; r < config.repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    RepetitionPlan rep;
    rep.data = draw_repetition(config, r);
    const Problem problem = build_problem(config, rep.data);
    rep.result = dsml::plan(problem, repetition_planner(config, rep.data), [&](const HistoryEntry& h) {
      err << "  rep " << r << " N=" << h.N << " C=" << format_double(h.satisfaction) << " ("
          << std::fixed << std::setprecision(1) << seconds_since(start) << " s)\n"
          << std::defaultfloat << std::flush;
    });
    err << "  rep " << r << ": "
        << (rep.result.terminated_by == Termination::Satisfied ? "satisfied" : "cap")
        << " at N=" << rep.result.N_final << '\n';
    plan.repetitions.push_back(std::move(rep));
  }
  return plan;
}

void write_plan_artifacts(const PlanFile& plan, const fs::path& dir) {
  write_text(dir / "plan.json", plan_to_json(plan));
  write_text(dir / "satisfaction_vs_N.csv", satisfaction_csv(plan));
  write_text(dir / "locations.csv", locations_csv(plan));
}

struct Validation {
  ValidationReport pooled;
  std::vector<ValidationReport> per_repetition;
};

Validation run_validation(const PlanFile& plan, int runs, std::ostream& err) {
  Validation v;
  for (const auto& rep : plan.repetitions) {
    const Problem problem = build_problem(plan.config, rep.data);
    v.per_repetition.push_back(
        validate_plan(problem, rep.result.locations, runs, derive_seed(rep.data.seed, 4)));
    err << "  rep " << rep.data.index << ": " << v.per_repetition.back().violating_runs << "/"
        << runs << " violating runs\n";
  }
  v.pooled = merge_reports(v.per_repetition);
  return v;
}

void write_validation_artifacts(const PlanFile& plan, const Validation& v, const fs::path& dir) {
  write_text(dir / "violations.csv", violations_csv(v.pooled));
  write_text(dir / "report.json", report_json(v.pooled, plan, v.per_repetition));
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace

int cmd_plan(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = resolve_config(options);
    const PlanFile plan = run_planner(config, err);
    const fs::path dir = config.output.directory;
    write_plan_artifacts(plan, dir);
    out << "wrote " << (dir / "plan.json").string() << ", satisfaction_vs_N.csv, locations.csv\n";
    return all_satisfied(plan) ? kExitSatisfied : kExitCap;
  });
}

int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    fs::path dir = options.out_dir;
    RunConfig override_config;
    const bool have_config = !options.config.empty();
    if (have_config) {
      override_config = resolve_config(options);
      if (dir.empty()) dir = override_config.output.directory;
    }
    if (dir.empty()) dir = OutputConfig{}.directory;
    const fs::path plan_path = dir / "plan.json";
    PlanFile plan = plan_from_json(read_text(plan_path), plan_path.string());
    plan.config = have_config ? override_config : apply_overrides(plan.config, options);
    const int runs = plan.config.output.validation_runs;
    err << "validating " << plan.repetitions.size() << " repetition(s) with " << runs << " run(s) each\n";
    const Validation v = run_validation(plan, runs, err);
    write_validation_artifacts(plan, v, dir);
    out << "violation rate " << format_double(v.pooled.violation_rate) << " over "
        << v.pooled.runs << " runs";
    for (const auto& t : v.pooled.tasks)
      out << "; task " << t.task << ": " << format_double(t.violation_rate);
    out << '\n';
    return all_satisfied(plan) ? kExitSatisfied : kExitCap;
  });
}

int cmd_demo(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CommandOptions demo = options;
    if (demo.config.empty()) demo.config = kPresetName;
    const RunConfig config = resolve_config(demo);
    const auto start = std::chrono::steady_clock::now();
    const PlanFile plan = run_planner(config, err);
    const fs::path dir = config.output.directory;
    write_plan_artifacts(plan, dir);
    const int runs = config.output.validation_runs;
    err << "validating with " << runs << " run(s) per repetition\n";
    const Validation v = run_validation(plan, runs, err);
    write_validation_artifacts(plan, v, dir);

    out << config.name << " (H=" << config.horizon << ", M=" << config.planner.samples
        << ", delta=" << format_double(config.planner.delta) << ", " << runs
        << " validation runs per repetition)\n";
    out << "rep  N_final  final_C  terminated  violation_rate";
    for (const auto& t : v.pooled.tasks) out << "  task" << t.task;
    out << '\n';
    for (std::size_t r = 0; r < plan.repetitions.size(); ++r) {
      const PlanResult& res = plan.repetitions[r].result;
      const ValidationReport& rv = v.per_repetition[r];
      out << std::left << std::setw(5) << plan.repetitions[r].data.index << std::setw(9)
          << res.N_final << std::setw(9) << format_double(res.satisfaction_history.back().satisfaction)
          << std::setw(12) << (res.terminated_by == Termination::Satisfied ? "satisfied" : "cap")
          << std::setw(14) << format_double(rv.violation_rate);
      for (const auto& t : rv.tasks) out << "  " << std::setw(5) << format_double(t.violation_rate);
      out << '\n';
    }
    out << "all  " << std::setw(9) << "" << std::setw(9) << "" << std::setw(12) << ""
        << std::setw(14) << format_double(v.pooled.violation_rate);
    for (const auto& t : v.pooled.tasks) out << "  " << std::setw(5) << format_double(t.violation_rate);
    out << std::right << "\nartifacts in " << dir.string() << " (" << std::fixed
        << std::setprecision(1) << seconds_since(start) << " s)\n" << std::defaultfloat;
    return all_satisfied(plan) ? kExitSatisfied : kExitCap;
  });
}

}  // namespace dsml
