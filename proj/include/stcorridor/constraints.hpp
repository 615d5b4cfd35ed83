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

// Control-point constraints that keep a scaled Bezier segment inside a
// convex spatio-temporal corridor.
//
// Sampling the corridor bounds at the equally spaced times
// t_i = t_start + (i / n) h gives one interval per control value. When the
// upper bound is concave and the lower bound convex, any control values in
// these intervals produce a curve inside the corridor. The polyline through
// the upper-bound samples (the equal-time-spacing control polygon, CPETS)
// sits between the curve and the bound.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "stcorridor/bezier.hpp"
#include "stcorridor/corridor.hpp"
#include "stcorridor/error.hpp"

namespace stcorridor {

struct ControlPointBoxes {
  int degree = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<double> lower;  // lb_i, i = 0..n
  std::vector<double> upper;  // ub_i

  double time_of(int i) const {
    return t_start + (static_cast<double>(i) / static_cast<double>(degree)) * (t_end - t_start);
  }
  bool contains(const std::vector<double>& control, double tol = 0.0) const {
    if (control.size() != upper.size()) return false;
    for (std::size_t i = 0; i < control.size(); ++i) {
      if (control[i] > upper[i] + tol || control[i] < lower[i] - tol) return false;
    }
    return true;
  }
};

/// Box i is [lower(t_i), upper(t_i)] at the equally spaced times t_i.
inline ControlPointBoxes control_point_boxes(const Corridor& c, int degree) {
  if (degree < 1 || degree > kMaxBezierDegree) {
    throw std::domain_error("control_point_boxes: degree must be in [1, 64]");
  }
  ControlPointBoxes boxes;
  boxes.degree = degree;
  boxes.t_start = c.t_start();
  boxes.t_end = c.t_end();
  boxes.lower.resize(static_cast<std::size_t>(degree) + 1);
  boxes.upper.resize(static_cast<std::size_t>(degree) + 1);
  for (int i = 0; i <= degree; ++i) {
    const double t = i == degree ? c.t_end() : boxes.time_of(i);
    const auto k = static_cast<std::size_t>(i);
    boxes.lower[k] = c.lower()(t);
    boxes.upper[k] = c.upper()(t);
    if (boxes.lower[k] > boxes.upper[k]) {
      throw InfeasibleError("control_point_boxes: empty box " + std::to_string(i) +
                            " at t = " + std::to_string(t));
    }
  }
  return boxes;
}

/// Equal-time-spacing control polygon of a concave bound.
struct Cpets {
  PiecewiseLinearBound polygon;

  int degree() const { return static_cast<int>(polygon.times().size()) - 1; }
  /// Control values s_i = f(t_i).
  const std::vector<double>& control_values() const { return polygon.values(); }
  double operator()(double t) const { return polygon(t); }
};

/// Throws std::domain_error if the bound is not concave.
inline Cpets cpets_of(const PiecewiseLinearBound& bound, int degree) {
  if (degree < 1 || degree > kMaxBezierDegree) {
    throw std::domain_error("cpets_of: degree must be in [1, 64]");
  }
  const Shape shape = check_shape(bound.times(), bound.values());
  if (shape != Shape::kConcave && shape != Shape::kAffine) {
    throw std::domain_error("cpets_of: bound is not concave");
  }
  const double a = bound.t_start();
  const double b = bound.t_end();
  std::vector<double> t(static_cast<std::size_t>(degree) + 1);
  std::vector<double> v(t.size());
  for (int i = 0; i <= degree; ++i) {
    const auto k = static_cast<std::size_t>(i);
    t[k] = i == degree ? b : a + (static_cast<double>(i) / degree) * (b - a);
    v[k] = bound(t[k]);
  }
  return Cpets{PiecewiseLinearBound(std::move(t), std::move(v), ShapeTag::kConcave)};
}

/// Bezier segment whose control values are the CPETS vertices.
inline BezierSegment cpets_curve(const Cpets& cpets) {
  return BezierSegment(cpets.control_values(), cpets.polygon.t_start(), cpets.polygon.t_end());
}

struct ContainmentReport {
  double max_upper_violation = 0.0;
  double max_lower_violation = 0.0;
  double worst_t = 0.0;

  double max_violation() const { return std::max(max_upper_violation, max_lower_violation); }
};

inline constexpr int kDefaultContainmentGrid = 2001;

/// Largest excursion of the segment outside the corridor on a uniform grid.
inline ContainmentReport containment_check(const BezierSegment& seg, const Corridor& c,
                                           int grid_size = kDefaultContainmentGrid) {
  const double slack = 1e-9 * std::max(1.0, std::abs(c.t_end()));
  if (std::abs(seg.t_start() - c.t_start()) > slack || std::abs(seg.t_end() - c.t_end()) > slack) {
    throw std::domain_error("containment_check: segment and corridor intervals differ");
  }
  if (grid_size < 2) throw std::domain_error("containment_check: grid needs two points");
  ContainmentReport r;
  r.worst_t = c.t_start();
  double worst = -1.0;
  for (int k = 0; k < grid_size; ++k) {
    const double u = static_cast<double>(k) / (grid_size - 1);
    const double t = k == grid_size - 1 ? c.t_end() : c.t_start() + u * c.duration();
    const double y = seg.eval_parameter(u);
    const double up = std::max(0.0, y - c.upper()(t));
    const double lo = std::max(0.0, c.lower()(t) - y);
    r.max_upper_violation = std::max(r.max_upper_violation, up);
    r.max_lower_violation = std::max(r.max_lower_violation, lo);
    if (std::max(up, lo) > worst) {
      worst = std::max(up, lo);
      r.worst_t = t;
    }
  }
  return r;
}

/// Demonstration that picking control points at unequal times breaks
/// containment in a time-parameterized corridor.
///
/// Three control points sit on the concave upper boundary at times
/// (0, 0.9, 1). As a planar quadratic Bezier (both coordinates blended) the
/// curve stays inside its control triangle and hence inside the corridor.
/// A trajectory, however, advances time linearly in the curve parameter, so
/// the same ordinates are effectively placed at (0, 0.5, 1) and the curve
/// leaves the corridor. Clamping the ordinates to the equal-spacing boxes
/// restores containment.
struct HullCounterexample {
  Corridor corridor;
  std::vector<double> control_times;  // where the points were picked
  std::vector<double> ordinates;
  BezierSegment trajectory;           // time-scaled curve of the ordinates
  double planar_violation = 0.0;      // x and y both Bernstein-blended
  double trajectory_violation = 0.0;  // time-scaled curve
  BezierSegment repaired;             // ordinates clamped to the boxes
  double repaired_violation = 0.0;
};

namespace detail {

// Planar quadratic Bezier through control points (x_i, y_i): maximum vertical
// excursion outside the corridor on a dense parameter grid.
inline double planar_violation(const Corridor& c, const std::vector<double>& xs,
                               const std::vector<double>& ys, int grid) {
  const int n = static_cast<int>(xs.size()) - 1;
  double worst = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double u = static_cast<double>(k) / (grid - 1);
    double x = 0.0;
    double y = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double b = bernstein_basis(n, i, u);
      x += b * xs[static_cast<std::size_t>(i)];
      y += b * ys[static_cast<std::size_t>(i)];
    }
    x = std::clamp(x, c.t_start(), c.t_end());
    worst = std::max({worst, y - c.upper()(x), c.lower()(x) - y});
  }
  return worst;
}

}  // namespace detail

inline HullCounterexample hull_counterexample(int grid = 20001) {
  // Upper bound: slope 1 up to t = 0.9, then slope -10. Lower bound constant.
  PiecewiseLinearBound upper({0.0, 0.9, 1.0}, {0.0, 0.9, -0.1}, ShapeTag::kConcave);
  PiecewiseLinearBound lower = PiecewiseLinearBound::constant(-0.5, 0.0, 1.0, ShapeTag::kConvex);
  Corridor corridor(0.0, 1.0, upper, lower);

  std::vector<double> times{0.0, 0.9, 1.0};
  std::vector<double> ys;
  for (double t : times) ys.push_back(upper(t));

  BezierSegment trajectory(ys, 0.0, 1.0);
  const ContainmentReport bad = containment_check(trajectory, corridor, grid);

  const ControlPointBoxes boxes = control_point_boxes(corridor, 2);
  std::vector<double> fixed = ys;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    fixed[i] = std::clamp(fixed[i], boxes.lower[i], boxes.upper[i]);
  }
  BezierSegment repaired(fixed, 0.0, 1.0);
  const ContainmentReport good = containment_check(repaired, corridor, grid);

  return HullCounterexample{corridor,
                            times,
                            ys,
                            trajectory,
                            std::max(0.0, detail::planar_violation(corridor, times, ys, grid)),
                            bad.max_violation(),
                            repaired,
                            good.max_violation()};
}

}  // namespace stcorridor
