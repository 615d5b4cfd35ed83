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

// Plans one scenario with each corridor shape and prints the comparison.
//
//   corridor_shapes [scenario.yaml | built-in name]

#include <iostream>
#include <string>

#include "stcorridor/planner.hpp"
#include "stcorridor/scenario.hpp"

int main(int argc, char** argv) {
  using namespace stcorridor;
  const std::string name = argc > 1 ? argv[1] : "fig5_decel_front";
  Scenario sc;
  try {
    sc = load_scenario(name);
  } catch (const ScenarioLoadError& e) {
    std::cerr << e.what() << '\n';
    return e.io_error ? 4 : 2;
  }

  std::cout << "scenario " << sc.name << '\n';
  for (auto v : {CorridorVariant::kGeneralConvex, CorridorVariant::kTrapezoid,
                 CorridorVariant::kRectangle}) {
    const PlanResult r = plan(scenario_problem(sc, v));
    std::cout << "  " << to_string(v) << ": ";
    if (!r.ok()) {
      std::cout << r.message << '\n';
      continue;
    }
    std::cout << "cost " << r.cost << ", min accel " << r.metrics.min_accel << " m/s^2, "
              << r.segments().size() << " segments\n";
  }
  return 0;
}
