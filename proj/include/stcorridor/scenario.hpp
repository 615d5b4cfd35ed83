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

// Driving scenarios: ego start state, scripted obstacles, planner and
// simulation settings. Scenarios load from YAML or come built in.
//
// Positions are measured along the ego path. An obstacle is described by
// its rear position and speed when it appears and a list of constant
// acceleration phases, after which it keeps its speed.

#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stcorridor/corridor.hpp"
#include "stcorridor/planner.hpp"

namespace stcorridor {

/// Malformed scenario file or unknown built-in name.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ObstacleSpec {
  double appear_time = 0.0;
  /// Rear position when the obstacle appears. Relative to the ego position
  /// at that time when `relative` is set, absolute otherwise.
  double position = 0.0;
  bool relative = false;
  double speed = 0.0;
  std::vector<AccelPhase> phases;
  double margin = 5.0;
};

/// Kinematic state of an obstacle at some time after it appeared.
struct ObstacleState {
  double position = 0.0;
  double speed = 0.0;
  double accel = 0.0;  // acceleration of the current phase
};

/// Obstacle state `elapsed` seconds after it appeared at `start`.
inline ObstacleState obstacle_state(const ObstacleSpec& o, double start, double elapsed) {
  ObstacleState st{start, o.speed, 0.0};
  double remaining = std::max(0.0, elapsed);
  for (const auto& ph : o.phases) {
    if (remaining < ph.duration) {
      st.accel = ph.accel;
      break;
    }
    st.position = ObstacleTrace::kinematic_position(ph.duration, st.position, st.speed, {ph});
    st.speed = std::max(0.0, st.speed + ph.accel * ph.duration);
    remaining -= ph.duration;
  }
  st.position = ObstacleTrace::kinematic_position(remaining, st.position, st.speed,
                                                  {AccelPhase{st.accel, remaining}});
  st.speed = std::max(0.0, st.speed + st.accel * remaining);
  if (st.speed == 0.0 && st.accel < 0.0) st.accel = 0.0;
  return st;
}

struct CorridorSettings {
  double sample_dt = 0.1;
  /// Trapezoid and rectangle bounds are fitted over windows of this length
  /// inside each general corridor. Zero fits over the whole corridor.
  double fit_window = 0.0;
  double floor = 0.0;
};

struct SimSettings {
  double duration = 12.0;
  double replan_hz = 10.0;
  double dyn_hz = 100.0;
  double horizon = 8.0;
  double tau = 0.3;
  /// Adds tau times the planned acceleration to the speed command.
  bool lag_feedforward = true;
};

struct Scenario {
  std::string name;
  InitialState ego;
  std::vector<ObstacleSpec> obstacles;
  int degree = kDefaultPlanDegree;
  CostWeights weights;
  DynamicLimits limits;
  double t_short = 6.0;
  double t_long = 20.0;
  double reference_accel = -0.05;
  /// Reference start speed. Unset anchors the reference at the current
  /// ego speed.
  std::optional<double> reference_speed;
  double max_segment_duration = 0.0;
  /// Time of the single-shot plan. The ego is assumed to cruise at its
  /// initial speed until then.
  double plan_time = 0.0;
  CorridorSettings corridor;
  SimSettings sim;
};

/// Sampled upper bound of the free space ahead of an ego at `ego_s`, over
/// [0, horizon] of planning time starting at absolute time t_now. Obstacles
/// that have appeared are extrapolated with their current acceleration; the
/// others do not constrain the plan. `anchor[i]` is the absolute rear
/// position of obstacle i when it appeared.
inline Samples free_space_bound(const Scenario& sc, double t_now, double ego_s, double horizon,
                                const std::vector<double>& anchor) {
  const double dt = sc.corridor.sample_dt;
  const auto steps = static_cast<int>(std::llround(horizon / dt));
  Samples out;
  for (int k = 0; k <= steps; ++k) {
    out.times.push_back(k == steps ? horizon : k * dt);
    out.values.push_back(kFreeSpaceCap);
  }
  for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
    const ObstacleSpec& o = sc.obstacles[i];
    if (t_now < o.appear_time - 1e-9) continue;
    const ObstacleState st = obstacle_state(o, anchor[i], t_now - o.appear_time);
    const std::vector<AccelPhase> pred{AccelPhase{st.accel, horizon}};
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double pos =
          ObstacleTrace::kinematic_position(out.times[k], st.position, st.speed, pred);
      out.values[k] = std::min(out.values[k], pos - o.margin - ego_s);
    }
  }
  return out;
}

/// Corridors of the requested variant for a sampled free-space bound.
///
/// The general convex split fixes the tiling. Trapezoid and rectangle bounds
/// are fitted on windows of at most `fit_window` seconds inside each tile.
inline std::vector<Corridor> scenario_corridors(const Samples& bound, CorridorVariant variant,
                                                const CorridorSettings& cfg) {
  const std::vector<Corridor> general = split_general_convex(bound, cfg.floor);
  if (variant == CorridorVariant::kGeneralConvex) return general;
  std::vector<Corridor> out;
  for (const auto& c : general) {
    const int pieces =
        cfg.fit_window > 0.0
            ? std::max(1, static_cast<int>(std::ceil(c.duration() / cfg.fit_window - 1e-9)))
            : 1;
    for (int k = 0; k < pieces; ++k) {
      const double a = c.t_start() + c.duration() * k / pieces;
      const double b = k + 1 == pieces ? c.t_end() : c.t_start() + c.duration() * (k + 1) / pieces;
      out.push_back(variant == CorridorVariant::kTrapezoid
                        ? trapezoid_fit(bound, a, b, cfg.floor)
                        : rectangle_fit(bound, a, b, cfg.floor));
    }
  }
  return out;
}

/// Single-shot planning problem at the scenario's plan time.
inline SpeedPlanProblem scenario_problem(const Scenario& sc, CorridorVariant variant) {
  auto ego_at = [&](double t) { return sc.ego.s + sc.ego.v * t + 0.5 * sc.ego.a * t * t; };
  const double v_now = std::max(0.0, sc.ego.v + sc.ego.a * sc.plan_time);
  std::vector<double> anchor;
  for (const auto& o : sc.obstacles) {
    anchor.push_back(o.relative ? o.position + ego_at(o.appear_time) : o.position);
  }
  const Samples bound = free_space_bound(sc, sc.plan_time, ego_at(sc.plan_time), sc.t_long, anchor);
  SpeedPlanProblem p;
  p.corridors = scenario_corridors(bound, variant, sc.corridor);
  p.degree = sc.degree;
  p.initial = InitialState{0.0, v_now, sc.ego.a};
  p.reference = ReferenceSpec{0.0, sc.reference_speed.value_or(v_now), sc.reference_accel};
  p.weights = sc.weights;
  p.t_short = sc.t_short;
  p.t_long = sc.t_long;
  p.limits = sc.limits;
  p.max_segment_duration = sc.max_segment_duration;
  return p;
}

/// Front vehicle 10 m ahead at the ego speed, braking gently to a stop.
inline Scenario fig5_decel_front() {
  Scenario sc;
  sc.name = "fig5_decel_front";
  sc.ego = InitialState{0.0, 5.5, 0.0};
  ObstacleSpec front;
  front.position = 10.0;
  front.speed = 5.5;
  front.phases = {AccelPhase{-0.3, 5.5 / 0.3}};
  front.margin = 5.0;
  sc.obstacles = {front};
  sc.t_short = 6.0;
  sc.t_long = 20.0;
  sc.reference_accel = -0.05;
  sc.max_segment_duration = 5.0;
  sc.corridor.fit_window = 5.0;
  return sc;
}

/// Vehicle cutting in 22 m ahead of a cruising ego at t = 1 s.
inline Scenario fig6_cutin() {
  Scenario sc;
  sc.name = "fig6_cutin";
  sc.ego = InitialState{0.0, 16.0, 0.0};
  ObstacleSpec cut;
  cut.appear_time = 1.0;
  cut.position = 22.0;
  cut.relative = true;
  cut.speed = 7.0;
  cut.phases = {AccelPhase{-0.5, 3.0}};
  cut.margin = 5.0;
  sc.obstacles = {cut};
  sc.t_short = 3.0;
  sc.t_long = 8.0;
  sc.reference_accel = 0.0;
  sc.max_segment_duration = 2.0;
  sc.plan_time = 1.0;
  sc.sim.horizon = 8.0;
  sc.sim.duration = 12.0;
  return sc;
}

inline std::optional<Scenario> builtin_scenario(const std::string& name) {
  if (name == "fig5_decel_front") return fig5_decel_front();
  if (name == "fig6_cutin") return fig6_cutin();
  return std::nullopt;
}

namespace detail {

template <typename T>
void read_field(const YAML::Node& node, const char* key, T& out) {
  if (const YAML::Node v = node[key]) out = v.as<T>();
}

}  // namespace detail

/// Parses a scenario document. Missing keys keep their defaults.
/// Throws ScenarioError on malformed input.
inline Scenario parse_scenario(const YAML::Node& root) {
  using detail::read_field;
  Scenario sc;
  try {
    if (!root.IsMap()) throw ScenarioError("scenario: top level must be a mapping");
    read_field(root, "name", sc.name);
    if (const YAML::Node e = root["ego"]) {
      read_field(e, "s", sc.ego.s);
      read_field(e, "v", sc.ego.v);
      read_field(e, "a", sc.ego.a);
    }
    if (const YAML::Node obs = root["obstacles"]) {
      if (!obs.IsSequence()) throw ScenarioError("scenario: obstacles must be a list");
      for (const auto& o : obs) {
        ObstacleSpec spec;
        read_field(o, "appear_time", spec.appear_time);
        read_field(o, "position", spec.position);
        read_field(o, "relative", spec.relative);
        read_field(o, "speed", spec.speed);
        read_field(o, "margin", spec.margin);
        if (const YAML::Node ph = o["phases"]) {
          for (const auto& p : ph) {
            spec.phases.push_back(AccelPhase{p["accel"].as<double>(), p["duration"].as<double>()});
          }
        }
        sc.obstacles.push_back(spec);
      }
    }
    if (const YAML::Node p = root["planner"]) {
      read_field(p, "degree", sc.degree);
      read_field(p, "t_short", sc.t_short);
      read_field(p, "t_long", sc.t_long);
      read_field(p, "reference_accel", sc.reference_accel);
      if (const YAML::Node rs = p["reference_speed"]) sc.reference_speed = rs.as<double>();
      read_field(p, "max_segment_duration", sc.max_segment_duration);
      read_field(p, "plan_time", sc.plan_time);
      if (const YAML::Node w = p["weights"]) {
        read_field(w, "w00", sc.weights.w00);
        read_field(w, "w01", sc.weights.w01);
        read_field(w, "w10", sc.weights.w10);
        read_field(w, "w11", sc.weights.w11);
        read_field(w, "w20", sc.weights.w20);
        read_field(w, "w21", sc.weights.w21);
      }
      if (const YAML::Node l = p["limits"]) {
        read_field(l, "v_max", sc.limits.v_max);
        read_field(l, "a_min", sc.limits.a_min);
        read_field(l, "a_max", sc.limits.a_max);
      }
    }
    if (const YAML::Node c = root["corridor"]) {
      read_field(c, "sample_dt", sc.corridor.sample_dt);
      read_field(c, "fit_window", sc.corridor.fit_window);
      read_field(c, "floor", sc.corridor.floor);
    }
    if (const YAML::Node s = root["sim"]) {
      read_field(s, "duration", sc.sim.duration);
      read_field(s, "replan_hz", sc.sim.replan_hz);
      read_field(s, "dyn_hz", sc.sim.dyn_hz);
      read_field(s, "horizon", sc.sim.horizon);
      read_field(s, "tau", sc.sim.tau);
      read_field(s, "lag_feedforward", sc.sim.lag_feedforward);
    }
  } catch (const YAML::Exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  if (sc.corridor.sample_dt <= 0.0) throw ScenarioError("scenario: sample_dt must be positive");
  if (sc.sim.replan_hz <= 0.0 || sc.sim.dyn_hz <= 0.0 || sc.sim.tau <= 0.0) {
    throw ScenarioError("scenario: rates and tau must be positive");
  }
  for (const auto& o : sc.obstacles) {
    if (o.margin < 0.0 || o.speed < 0.0) {
      throw ScenarioError("scenario: obstacle speed and margin must be non-negative");
    }
    for (const auto& ph : o.phases) {
      if (ph.duration < 0.0) throw ScenarioError("scenario: negative phase duration");
    }
  }
  return sc;
}

/// `io_error` separates unreadable files from malformed ones.
struct ScenarioLoadError : ScenarioError {
  ScenarioLoadError(const std::string& what, bool io) : ScenarioError(what), io_error(io) {}
  bool io_error;
};

/// Built-in name or path to a YAML file.
inline Scenario load_scenario(const std::string& name_or_path) {
  if (auto sc = builtin_scenario(name_or_path)) return *sc;
  YAML::Node root;
  try {
    root = YAML::LoadFile(name_or_path);
  } catch (const YAML::BadFile&) {
    throw ScenarioLoadError("cannot read scenario '" + name_or_path + "'", true);
  } catch (const YAML::Exception& e) {
    throw ScenarioLoadError("malformed scenario '" + name_or_path + "': " + e.what(), false);
  }
  try {
    Scenario sc = parse_scenario(root);
    if (sc.name.empty()) sc.name = name_or_path;
    return sc;
  } catch (const ScenarioError& e) {
    throw ScenarioLoadError(e.what(), false);
  }
}

}  // namespace stcorridor
