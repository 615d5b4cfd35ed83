// Copyright 2026 The stcorridor Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "stcorridor/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = stcorridor::cli;
  CLI::App app{"Speed planning in spatio-temporal corridors"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string variant;
  int degree = 0;
  int grid = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", cfg.scenario, "Built-in scenario name or YAML file");
    sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed for randomized checks")->capture_default_str();
    sub->add_option("--grid", grid, "Evaluation grid size");
  };

  CLI::App* verify = app.add_subcommand("verify", "Run containment property suites");
  add_common(verify);
  verify->add_option("--cases", cfg.cases, "Random corridors per suite")->capture_default_str();

  CLI::App* coverage = app.add_subcommand("coverage", "Gap study of a concave test bound");
  add_common(coverage);
  coverage->add_option("--bound", cfg.bound, "quadratic, quartic, logistic or affine")
      ->capture_default_str();
  coverage->add_option("--degrees", cfg.degrees, "Increasing degrees")->delimiter(',');

  CLI::App* plan = app.add_subcommand("plan", "Single-shot speed plan");
  add_common(plan);
  plan->add_option("--variant", variant, "rect, trap or convex (default: convex and trap)");
  plan->add_option("--degree", degree, "Bezier degree per segment");

  CLI::App* sim = app.add_subcommand("sim", "Closed-loop simulation");
  add_common(sim);
  sim->add_option("--variant", variant, "rect, trap or convex (default: convex and trap)");
  sim->add_option("--degree", degree, "Bezier degree per segment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (!variant.empty()) cfg.variant = variant;
  if (degree != 0) cfg.degree = degree;
  if (grid != 0) cfg.grid = grid;
  return cli::dispatch(cfg, std::cout, std::cerr);
}
