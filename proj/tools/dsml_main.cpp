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

#include <iostream>

#include "CLI11.hpp"
#include "dsml/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dsml: plans data collection for learning-based control of several tasks"};
  app.require_subcommand(1);

  dsml::CommandOptions options;
  std::uint64_t seed = 0;
  int runs = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config, "JSON config file or the preset name 'paper-demo'");
    sub->add_option("--seed", seed, "Master seed (overrides planner.seed)");
    sub->add_option("--out-dir", options.out_dir, "Artifact directory (overrides output.directory)");
    sub->add_option("--runs", runs, "Validation runs per repetition")->check(CLI::PositiveNumber);
    sub->add_flag("--full-scale", options.full_scale, "paper-demo at H=100, M=100, 10 repetitions");
  };
  auto* plan = app.add_subcommand("plan", "Run the planner and write plan.json and CSVs");
  auto* validate = app.add_subcommand("validate", "Validate <out-dir>/plan.json on the true system");
  auto* demo = app.add_subcommand("demo", "Plan and validate the paper-demo preset");
  for (auto* sub : {plan, validate, demo}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsml::kExitError;
  }
  for (auto* sub : {plan, validate, demo}) {
    if (sub->count("--seed") > 0) options.seed = seed;
    if (sub->count("--runs") > 0) options.runs = runs;
  }
  if (*plan) return dsml::cmd_plan(options, std::cout, std::cerr);
  if (*validate) return dsml::cmd_validate(options, std::cout, std::cerr);
  return dsml::cmd_demo(options, std::cout, std::cerr);
}
