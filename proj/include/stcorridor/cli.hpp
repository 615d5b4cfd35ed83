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

// Subcommands of the stcorridor command-line tool. Each takes a RunConfig,
// writes its artifacts into the output directory, prints a key=value summary
// and returns an exit code:
//   0 success, 1 a verified property failed, 2 usage, 3 infeasible, 4 I/O.

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stcorridor/constraints.hpp"
#include "stcorridor/corridor.hpp"
#include "stcorridor/coverage.hpp"
#include "stcorridor/planner.hpp"
#include "stcorridor/properties.hpp"
#include "stcorridor/scenario.hpp"
#include "stcorridor/sim.hpp"
#include "stcorridor/svg.hpp"

namespace stcorridor::cli {

enum ExitCode : int {
  kOk = 0,
  kPropertyFailure = 1,
  kUsage = 2,
  kInfeasible = 3,
  kIo = 4,
};

struct RunConfig {
  std::string subcommand;
  std::string scenario;  // built-in name or YAML path; empty = default
  std::optional<std::string> variant;
  std::optional<int> degree;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::optional<int> grid;
  std::string bound = "quadratic";
  std::vector<int> degrees{4, 8, 16, 32, 64};
  int cases = 200;
};

/// Usage problem detected while interpreting the configuration.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Output file could not be written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir + "'");
  }
  return std::filesystem::path(dir);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << content;
  f.close();
  if (!f) throw IoError("cannot write '" + path.string() + "'");
}

inline std::vector<CorridorVariant> variants_for(const RunConfig& cfg,
                                                 std::vector<CorridorVariant> fallback) {
  if (!cfg.variant) return fallback;
  auto v = parse_variant(*cfg.variant);
  if (!v) throw UsageError("unknown variant '" + *cfg.variant + "' (use rect, trap or convex)");
  return {*v};
}

inline Scenario scenario_for(const RunConfig& cfg, const std::string& fallback) {
  Scenario sc;
  try {
    sc = load_scenario(cfg.scenario.empty() ? fallback : cfg.scenario);
  } catch (const ScenarioLoadError& e) {
    if (e.io_error) throw IoError(e.what());
    throw UsageError(e.what());
  }
  if (cfg.degree) {
    if (*cfg.degree < 3 || *cfg.degree > kMaxBezierDegree) {
      throw UsageError("--degree must be in [3, 64]");
    }
    sc.degree = *cfg.degree;
  }
  return sc;
}

inline std::string plan_svg(const PlanResult& r, const std::string& title) {
  svg::Panel st{title, "t [s]", "s [m]", {}};
  svg::Panel va{"speed and acceleration", "t [s]", "v [m/s], a [m/s^2]", {}};
  svg::Series traj{"s(t)", {}, {}, "#1f77b4"};
  svg::Series up{"upper", {}, {}, "#d62728", true};
  svg::Series lo{"lower", {}, {}, "#2ca02c", true};
  svg::Series vel{"v(t)", {}, {}, "#1f77b4"};
  svg::Series acc{"a(t)", {}, {}, "#ff7f0e"};
  const double t1 = r.trajectory.t_end();
  for (double t = 0.0; t <= t1 + 1e-9; t += kPlanCsvStep) {
    const double tc = std::min(t, t1);
    const auto [u, l] = corridor_bounds_at(r.corridors, tc);
    traj.x.push_back(tc);
    traj.y.push_back(r.trajectory.position(tc));
    if (u < kFreeSpaceCap) {
      up.x.push_back(tc);
      up.y.push_back(u);
    }
    lo.x.push_back(tc);
    lo.y.push_back(l);
    vel.x.push_back(tc);
    vel.y.push_back(r.trajectory.velocity(tc));
    acc.x.push_back(tc);
    acc.y.push_back(r.trajectory.acceleration(tc));
  }
  st.series = {traj, up, lo};
  va.series = {vel, acc};
  std::ostringstream os;
  svg::write_panels(os, {st, va});
  return os.str();
}

inline std::string sim_svg(const std::vector<SimLog>& logs) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c"};
  svg::Panel sp{"ego speed", "t [s]", "v [m/s]", {}};
  svg::Panel ap{"ego acceleration", "t [s]", "a [m/s^2]", {}};
  for (std::size_t i = 0; i < logs.size(); ++i) {
    svg::Series v{std::string(to_string(logs[i].variant)), {}, {}, kColors[i % 3]};
    svg::Series a = v;
    for (const auto& r : logs[i].records) {
      v.x.push_back(r.ego.t);
      v.y.push_back(r.ego.v);
      a.x.push_back(r.ego.t);
      a.y.push_back(r.ego.a);
    }
    sp.series.push_back(std::move(v));
    ap.series.push_back(std::move(a));
  }
  std::ostringstream os;
  svg::write_panels(os, {sp, ap});
  return os.str();
}

}  // namespace detail

/// Property suites and the unequal-spacing counterexample.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.scenario.empty()) detail::scenario_for(cfg, cfg.scenario);
  if (cfg.cases < 1) throw UsageError("--cases must be positive");
  const auto dir = detail::prepare_out_dir(cfg.out_dir);
  PropertySuiteConfig pc;
  pc.seed = cfg.seed;
  pc.cases = cfg.cases;
  if (cfg.grid) {
    if (*cfg.grid < 2) throw UsageError("--grid must be at least 2");
    pc.containment_grid = *cfg.grid;
  }
  const PropertySuiteResult r = run_property_suite(pc);
  const HullCounterexample hc = hull_counterexample();
  const bool counter_ok = hc.trajectory_violation > 1e-3 && hc.repaired_violation <= 1e-9;

  std::ostringstream rep;
  rep.precision(10);
  rep << "seed=" << cfg.seed << '\n'
      << "cases=" << pc.cases << '\n'
      << "checks=" << r.checks << '\n'
      << "containment_failures=" << r.containment_failures << '\n'
      << "max_containment_violation=" << r.max_containment_violation << '\n'
      << "sandwich_failures=" << r.sandwich_failures << '\n'
      << "max_sandwich_violation=" << r.max_sandwich_violation << '\n'
      << "counterexample_planar_violation=" << hc.planar_violation << '\n'
      << "counterexample_violation=" << hc.trajectory_violation << '\n'
      << "counterexample_repaired_violation=" << hc.repaired_violation << '\n'
      << "passed=" << (r.passed() && counter_ok ? "true" : "false") << '\n';
  detail::write_file(dir / "verify_report.txt", rep.str());
  out << rep.str();
  return r.passed() && counter_ok ? kOk : kPropertyFailure;
}

/// Gap study for one of the built-in bounds.
inline int cmd_coverage(const RunConfig& cfg, std::ostream& out) {
  const auto bound = builtin_bound(cfg.bound);
  if (!bound) throw UsageError("unknown bound '" + cfg.bound + "'");
  GapStudy study;
  try {
    study = gap_study(*bound, cfg.degrees, cfg.grid.value_or(4001));
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  if (!study.exact_cover && !study.slope_f_cpets.defined) {
    throw UsageError("slope undefined: need at least two degrees >= 4");
  }
  const auto dir = detail::prepare_out_dir(cfg.out_dir);
  std::ostringstream csv;
  write_gap_csv(csv, study);
  detail::write_file(dir / ("coverage_" + study.bound_name + ".csv"), csv.str());

  std::ostringstream rep;
  rep.precision(10);
  rep << "bound=" << study.bound_name << '\n'
      << "exact_cover=" << (study.exact_cover ? "true" : "false") << '\n';
  auto slope = [&](const char* key, const LogLogFit& f) {
    rep << key << '=';
    if (f.defined) rep << f.slope;
    else rep << "undefined";
    rep << '\n';
  };
  slope("slope_f_cpets", study.slope_f_cpets);
  slope("slope_cpets_curve", study.slope_cpets_curve);
  slope("slope_f_curve", study.slope_f_curve);
  detail::write_file(dir / ("coverage_" + study.bound_name + "_summary.txt"), rep.str());
  out << rep.str();
  return kOk;
}

/// Single-shot plans on a scenario, one per variant.
inline int cmd_plan(const RunConfig& cfg, std::ostream& out) {
  const Scenario sc = detail::scenario_for(cfg, "fig5_decel_front");
  const auto variants = detail::variants_for(
      cfg, {CorridorVariant::kGeneralConvex, CorridorVariant::kTrapezoid});
  const auto dir = detail::prepare_out_dir(cfg.out_dir);
  bool infeasible = false;
  std::ostringstream rep;
  rep.precision(10);
  rep << "scenario=" << sc.name << '\n';
  for (CorridorVariant v : variants) {
    const std::string tag(to_string(v));
    PlanResult r;
    try {
      r = plan(scenario_problem(sc, v));
    } catch (const InfeasibleError& e) {
      r.status = PlanStatus::kInfeasible;
      r.message = e.what();
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
    rep << tag << ".status=" << to_string(r.status) << '\n';
    if (!r.ok()) {
      infeasible = true;
      rep << tag << ".message=" << r.message << '\n';
      continue;
    }
    rep << tag << ".cost=" << r.cost << '\n'
        << tag << ".min_accel=" << r.metrics.min_accel << '\n'
        << tag << ".max_accel=" << r.metrics.max_accel << '\n'
        << tag << ".min_speed=" << r.metrics.min_speed << '\n'
        << tag << ".jerk_rms=" << r.metrics.jerk_rms << '\n'
        << tag << ".primal_residual=" << r.primal_residual << '\n'
        << tag << ".dual_residual=" << r.dual_residual << '\n';
    std::ostringstream csv;
    write_plan_csv(csv, r);
    detail::write_file(dir / ("plan_" + tag + ".csv"), csv.str());
    detail::write_file(dir / ("plan_" + tag + ".svg"),
                       detail::plan_svg(r, sc.name + " (" + tag + ")"));
  }
  detail::write_file(dir / "plan_summary.txt", rep.str());
  out << rep.str();
  return infeasible ? kInfeasible : kOk;
}

/// Closed-loop runs, one per variant.
inline int cmd_sim(const RunConfig& cfg, std::ostream& out) {
  const Scenario sc = detail::scenario_for(cfg, "fig6_cutin");
  const auto variants = detail::variants_for(
      cfg, {CorridorVariant::kGeneralConvex, CorridorVariant::kTrapezoid});
  const auto dir = detail::prepare_out_dir(cfg.out_dir);
  std::vector<SimLog> logs;
  std::ostringstream rep;
  for (CorridorVariant v : variants) {
    SimLog log;
    try {
      log = run(sc, v);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
    const std::string tag(to_string(v));
    std::ostringstream csv;
    write_sim_csv(csv, log);
    detail::write_file(dir / ("sim_" + tag + ".csv"), csv.str());
    std::ostringstream sum;
    write_sim_summary(sum, log);
    detail::write_file(dir / ("sim_" + tag + "_summary.txt"), sum.str());
    rep << sum.str();
    logs.push_back(std::move(log));
  }
  detail::write_file(dir / "sim.svg", detail::sim_svg(logs));
  out << rep.str();
  return kOk;
}

/// Runs a subcommand, mapping exceptions to exit codes. Diagnostics go to
/// `err`.
inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
    if (cfg.subcommand == "coverage") return cmd_coverage(cfg, out);
    if (cfg.subcommand == "plan") return cmd_plan(cfg, out);
    if (cfg.subcommand == "sim") return cmd_sim(cfg, out);
    err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace stcorridor::cli
