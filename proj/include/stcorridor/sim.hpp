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

// Closed-loop longitudinal simulation.
//
// The ego follows a speed command through first-order dynamics. At every
// replan tick the free space ahead is predicted, corridors of the chosen
// variant are built, a plan is solved and the speed one control period
// ahead becomes the command until the next replan.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stcorridor/corridor.hpp"
#include "stcorridor/planner.hpp"
#include "stcorridor/scenario.hpp"

namespace stcorridor {

struct EgoState {
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
  double t = 0.0;
};

/// Exact response of v' = (v_cmd - v) / tau over dt, clamped at zero.
inline double first_order_step(double v, double v_cmd, double dt, double tau) {
  if (!(dt > 0.0) || !(tau > 0.0)) {
    throw std::domain_error("first_order_step: dt and tau must be positive");
  }
  return std::max(0.0, v + (v_cmd - v) * (1.0 - std::exp(-dt / tau)));
}

struct SimRecord {
  EgoState ego;
  double v_cmd = 0.0;
  double obstacle_rear = std::numeric_limits<double>::quiet_NaN();  // nearest obstacle
  bool plan_ok = true;      // last replan succeeded
  bool fallback = false;    // emergency braking active
  double plan_min_accel = std::numeric_limits<double>::quiet_NaN();
};

struct SimSummary {
  double min_accel = 0.0;
  double min_speed = 0.0;
  /// First tick with a <= -0.5 m/s^2, or NaN.
  double first_brake_time = std::numeric_limits<double>::quiet_NaN();
  double min_gap = std::numeric_limits<double>::infinity();
  bool collision = false;
  int replans = 0;
  int fallbacks = 0;
  double max_primal_residual = 0.0;
  double max_dual_residual = 0.0;
};

struct SimLog {
  std::string scenario;
  CorridorVariant variant = CorridorVariant::kGeneralConvex;
  double dt = 0.01;
  std::vector<SimRecord> records;
  SimSummary summary;
};

inline constexpr double kBrakeThreshold = -0.5;

/// Summary statistics recomputed from the records.
inline SimSummary summarize(const std::vector<SimRecord>& records) {
  SimSummary s;
  if (records.empty()) return s;
  s.min_accel = records.front().ego.a;
  s.min_speed = records.front().ego.v;
  for (const auto& r : records) {
    s.min_accel = std::min(s.min_accel, r.ego.a);
    s.min_speed = std::min(s.min_speed, r.ego.v);
    if (std::isnan(s.first_brake_time) && r.ego.a <= kBrakeThreshold) {
      s.first_brake_time = r.ego.t;
    }
    if (!std::isnan(r.obstacle_rear)) {
      const double gap = r.obstacle_rear - r.ego.s;
      s.min_gap = std::min(s.min_gap, gap);
      if (gap <= 0.0) s.collision = true;
    }
  }
  return s;
}

/// Runs the scenario's closed loop with the given corridor variant. Plan
/// failures trigger maximum braking for that control period.
inline SimLog run(const Scenario& sc, CorridorVariant variant) {
  const SimSettings& cfg = sc.sim;
  if (!(cfg.dyn_hz > 0.0) || !(cfg.replan_hz > 0.0) || !(cfg.tau > 0.0)) {
    throw std::domain_error("sim::run: rates and tau must be positive");
  }
  if (!(cfg.horizon > sc.t_short)) {
    throw std::domain_error("sim::run: horizon must exceed T_s");
  }
  const double dt = 1.0 / cfg.dyn_hz;
  const double control_period = 1.0 / cfg.replan_hz;
  const int ticks_per_replan = std::max(1, static_cast<int>(std::llround(cfg.dyn_hz / cfg.replan_hz)));
  const int ticks = static_cast<int>(std::llround(cfg.duration * cfg.dyn_hz));

  SimLog log;
  log.scenario = sc.name;
  log.variant = variant;
  log.dt = dt;
  log.records.reserve(static_cast<std::size_t>(ticks) + 1);

  EgoState ego{sc.ego.s, sc.ego.v, sc.ego.a, 0.0};
  std::vector<std::optional<double>> anchor(sc.obstacles.size());
  std::optional<Trajectory> last_plan;
  double last_plan_time = 0.0;
  double v_cmd = ego.v;
  bool plan_ok = true;
  bool fallback = false;
  double plan_min_accel = std::numeric_limits<double>::quiet_NaN();
  int replans = 0;
  int fallbacks = 0;
  double max_prim = 0.0;
  double max_dual = 0.0;

  auto nearest_rear = [&](double t) {
    double rear = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
      if (!anchor[i]) continue;
      const ObstacleSpec& o = sc.obstacles[i];
      const double pos = obstacle_state(o, *anchor[i], t - o.appear_time).position;
      if (std::isnan(rear) || pos < rear) rear = pos;
    }
    return rear;
  };
  auto update_anchors = [&](double t) {
    for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
      const ObstacleSpec& o = sc.obstacles[i];
      if (!anchor[i] && t >= o.appear_time - 1e-9) {
        anchor[i] = o.relative ? ego.s + o.position : o.position;
      }
    }
  };

  for (int k = 0; k <= ticks; ++k) {
    ego.t = k * dt;
    update_anchors(ego.t);
    if (k < ticks && k % ticks_per_replan == 0) {
      ++replans;
      std::vector<double> anchors;
      for (const auto& a : anchor) anchors.push_back(a.value_or(0.0));
      double a0 = last_plan ? last_plan->acceleration(ego.t - last_plan_time) : ego.a;
      a0 = std::clamp(a0, sc.limits.a_min, sc.limits.a_max);

      PlanResult res;
      try {
        const Samples bound = free_space_bound(sc, ego.t, ego.s, cfg.horizon, anchors);
        SpeedPlanProblem p;
        p.corridors = scenario_corridors(bound, variant, sc.corridor);
        p.degree = sc.degree;
        p.initial = InitialState{0.0, std::min(ego.v, sc.limits.v_max), a0};
        p.reference = ReferenceSpec{0.0, sc.reference_speed.value_or(ego.v), sc.reference_accel};
        p.weights = sc.weights;
        p.t_short = sc.t_short;
        p.t_long = cfg.horizon;
        p.limits = sc.limits;
        p.max_segment_duration = sc.max_segment_duration;
        res = plan(p);
      } catch (const InfeasibleError& e) {
        res.status = PlanStatus::kInfeasible;
        res.message = e.what();
      }
      plan_ok = res.ok();
      if (plan_ok) {
        const double tc = control_period;
        v_cmd = res.trajectory.velocity(tc);
        if (cfg.lag_feedforward) v_cmd += cfg.tau * res.trajectory.acceleration(tc);
        v_cmd = std::max(0.0, v_cmd);
        fallback = false;
        plan_min_accel = res.metrics.min_accel;
        max_prim = std::max(max_prim, res.primal_residual);
        max_dual = std::max(max_dual, res.dual_residual);
        last_plan = res.trajectory;
        last_plan_time = ego.t;
      } else {
        v_cmd = std::max(0.0, ego.v + cfg.tau * sc.limits.a_min);
        fallback = true;
        ++fallbacks;
        plan_min_accel = std::numeric_limits<double>::quiet_NaN();
        last_plan.reset();
      }
    }
    SimRecord rec;
    rec.ego = ego;
    rec.v_cmd = v_cmd;
    rec.obstacle_rear = nearest_rear(ego.t);
    rec.plan_ok = plan_ok;
    rec.fallback = fallback;
    rec.plan_min_accel = plan_min_accel;
    log.records.push_back(rec);
    if (k == ticks) break;

    const double v_next = first_order_step(ego.v, v_cmd, dt, cfg.tau);
    ego.a = (v_next - ego.v) / dt;
    ego.s += 0.5 * (ego.v + v_next) * dt;
    ego.v = v_next;
  }
  log.summary = summarize(log.records);
  log.summary.replans = replans;
  log.summary.fallbacks = fallbacks;
  log.summary.max_primal_residual = max_prim;
  log.summary.max_dual_residual = max_dual;
  return log;
}

/// Columns t,s,v,a,v_cmd,obstacle_rear,gap,plan_ok,fallback,plan_min_accel.
inline void write_sim_csv(std::ostream& os, const SimLog& log) {
  os << "t,s,v,a,v_cmd,obstacle_rear,gap,plan_ok,fallback,plan_min_accel\n";
  os.precision(10);
  for (const auto& r : log.records) {
    os << r.ego.t << ',' << r.ego.s << ',' << r.ego.v << ',' << r.ego.a << ',' << r.v_cmd << ',';
    if (std::isnan(r.obstacle_rear)) {
      os << ",,";
    } else {
      os << r.obstacle_rear << ',' << r.obstacle_rear - r.ego.s << ',';
    }
    os << (r.plan_ok ? 1 : 0) << ',' << (r.fallback ? 1 : 0) << ',';
    if (!std::isnan(r.plan_min_accel)) os << r.plan_min_accel;
    os << '\n';
  }
}

/// Flat key=value lines.
inline void write_sim_summary(std::ostream& os, const SimLog& log) {
  const SimSummary& s = log.summary;
  os.precision(10);
  os << "scenario=" << log.scenario << '\n'
     << "variant=" << to_string(log.variant) << '\n'
     << "min_accel=" << s.min_accel << '\n'
     << "min_speed=" << s.min_speed << '\n'
     << "first_brake_time=";
  if (std::isnan(s.first_brake_time)) os << "none";
  else os << s.first_brake_time;
  os << '\n' << "min_gap=";
  if (std::isinf(s.min_gap)) os << "none";
  else os << s.min_gap;
  os << '\n'
     << "collision=" << (s.collision ? "true" : "false") << '\n'
     << "replans=" << s.replans << '\n'
     << "fallbacks=" << s.fallbacks << '\n'
     << "max_primal_residual=" << s.max_primal_residual << '\n'
     << "max_dual_residual=" << s.max_dual_residual << '\n';
}

}  // namespace stcorridor
