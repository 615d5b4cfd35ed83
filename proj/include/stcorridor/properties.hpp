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

// Randomized property suites for the containment guarantees.
//
// Each case draws a random concave upper and convex lower piecewise-linear
// bound, then for every degree in range checks that
//   * random control values inside the boxes give a curve inside the
//     corridor, and
//   * the curve through the upper-bound samples stays below its CPETS, which
//     stays below the bound.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <vector>

#include "stcorridor/bezier.hpp"
#include "stcorridor/constraints.hpp"
#include "stcorridor/corridor.hpp"

namespace stcorridor {

struct PropertySuiteConfig {
  std::uint64_t seed = 1;
  int cases = 200;
  int min_degree = 2;
  int max_degree = 16;
  int containment_grid = kDefaultContainmentGrid;
  int sandwich_grid = 1001;
  double tolerance = 1e-9;
};

struct PropertySuiteResult {
  int checks = 0;
  int containment_failures = 0;
  int sandwich_failures = 0;
  double max_containment_violation = 0.0;
  double max_sandwich_violation = 0.0;
  double seconds = 0.0;

  bool passed() const { return containment_failures == 0 && sandwich_failures == 0; }
};

/// Random concave (or, with `convex`, convex) piecewise-linear bound on
/// [t0, t1] with 2 to 7 pieces.
inline PiecewiseLinearBound random_pl_bound(std::mt19937_64& rng, double t0, double t1,
                                            bool convex) {
  std::uniform_int_distribution<int> pieces_dist(2, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int pieces = pieces_dist(rng);
  std::vector<double> times{t0, t1};
  for (int k = 1; k < pieces; ++k) times.push_back(t0 + (t1 - t0) * (0.05 + 0.9 * unit(rng)));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return b - a < 1e-6; }),
              times.end());
  // Strictly monotone slopes keep every breakpoint a genuine kink.
  std::vector<double> slopes(times.size() - 1);
  double slope = -20.0 + 40.0 * unit(rng);
  for (auto& s : slopes) {
    s = slope;
    slope += (convex ? 1.0 : -1.0) * (0.5 + 10.0 * unit(rng));
  }
  std::vector<double> values{-10.0 + 20.0 * unit(rng)};
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    values.push_back(values.back() + slopes[k] * (times[k + 1] - times[k]));
  }
  return PiecewiseLinearBound(std::move(times), std::move(values),
                              convex ? ShapeTag::kConvex : ShapeTag::kConcave);
}

/// Corridor with random concave upper and convex lower bounds. The lower
/// bound is shifted so it stays at least a small gap below the upper one.
inline Corridor random_corridor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double t0 = -5.0 + 10.0 * unit(rng);
  const double t1 = t0 + 0.2 + 10.0 * unit(rng);
  const PiecewiseLinearBound upper = random_pl_bound(rng, t0, t1, false);
  const PiecewiseLinearBound raw = random_pl_bound(rng, t0, t1, true);
  std::vector<double> ts = upper.times();
  ts.insert(ts.end(), raw.times().begin(), raw.times().end());
  double excess = -1e300;
  for (double t : ts) excess = std::max(excess, raw(t) - upper(t));
  const double shift = excess + 0.1 + 5.0 * unit(rng);
  std::vector<double> lv = raw.values();
  for (double& v : lv) v -= shift;
  return Corridor(t0, t1, upper, PiecewiseLinearBound(raw.times(), std::move(lv), ShapeTag::kConvex));
}

inline PropertySuiteResult run_property_suite(const PropertySuiteConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PropertySuiteResult r;
  for (int c = 0; c < cfg.cases; ++c) {
    const Corridor corridor = random_corridor(rng);
    for (int n = cfg.min_degree; n <= cfg.max_degree; ++n) {
      ++r.checks;
      const ControlPointBoxes boxes = control_point_boxes(corridor, n);
      std::vector<double> ctrl(boxes.upper.size());
      for (std::size_t i = 0; i < ctrl.size(); ++i) {
        // Mix interior draws with box corners, which are the extreme cases.
        const double w = unit(rng) < 0.3 ? (unit(rng) < 0.5 ? 0.0 : 1.0) : unit(rng);
        ctrl[i] = boxes.lower[i] + w * (boxes.upper[i] - boxes.lower[i]);
      }
      const BezierSegment seg(ctrl, corridor.t_start(), corridor.t_end());
      const double viol = containment_check(seg, corridor, cfg.containment_grid).max_violation();
      r.max_containment_violation = std::max(r.max_containment_violation, viol);
      if (viol > cfg.tolerance) ++r.containment_failures;

      const Cpets cpets = cpets_of(corridor.upper(), n);
      const BezierSegment top = cpets_curve(cpets);
      double worst = 0.0;
      for (int k = 0; k < cfg.sandwich_grid; ++k) {
        const double u = static_cast<double>(k) / (cfg.sandwich_grid - 1);
        const double t =
            k == cfg.sandwich_grid - 1 ? corridor.t_end() : corridor.t_start() + u * corridor.duration();
        const double curve = top.eval_parameter(u);
        const double poly = cpets(t);
        const double bound = corridor.upper()(t);
        worst = std::max({worst, curve - poly, poly - bound});
      }
      r.max_sandwich_violation = std::max(r.max_sandwich_violation, worst);
      if (worst > cfg.tolerance) ++r.sandwich_failures;
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace stcorridor
