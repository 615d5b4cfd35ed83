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

#include "stcorridor/constraints.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "stcorridor/properties.hpp"

namespace stcorridor {
namespace {

PiecewiseLinearBound hump_bound(int pieces) {
  std::vector<double> t, v;
  for (int k = 0; k <= pieces; ++k) {
    const double x = static_cast<double>(k) / pieces;
    t.push_back(x);
    v.push_back(2.0 * x - x * x);
  }
  return PiecewiseLinearBound(t, v, ShapeTag::kConcave);
}

Corridor unit_box() {
  return Corridor(0.0, 1.0, PiecewiseLinearBound::constant(1.0, 0.0, 1.0, ShapeTag::kConcave),
                  PiecewiseLinearBound::constant(0.0, 0.0, 1.0, ShapeTag::kConvex));
}

Corridor hump_corridor() {
  return Corridor(0.0, 1.0, hump_bound(2), PiecewiseLinearBound::constant(0.0, 0.0, 1.0, ShapeTag::kConvex));
}

TEST(ControlPointBoxes, WorkedExamples) {
  for (int n : {1, 3, 9}) {
    const ControlPointBoxes b = control_point_boxes(unit_box(), n);
    ASSERT_EQ(b.upper.size(), static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
      EXPECT_EQ(b.lower[static_cast<std::size_t>(i)], 0.0);
      EXPECT_EQ(b.upper[static_cast<std::size_t>(i)], 1.0);
    }
  }
  const ControlPointBoxes b = control_point_boxes(hump_corridor(), 2);
  EXPECT_NEAR(b.upper[0], 0.0, 1e-15);
  EXPECT_NEAR(b.upper[1], 0.75, 1e-15);
  EXPECT_NEAR(b.upper[2], 1.0, 1e-15);
  for (double l : b.lower) EXPECT_EQ(l, 0.0);

  const ControlPointBoxes one = control_point_boxes(hump_corridor(), 1);
  EXPECT_DOUBLE_EQ(one.time_of(0), 0.0);
  EXPECT_DOUBLE_EQ(one.time_of(1), 1.0);
  EXPECT_THROW(control_point_boxes(unit_box(), 0), std::domain_error);
}

TEST(Cpets, WorkedExamples) {
  const PiecewiseLinearBound line({0.0, 2.0}, {1.0, 3.0}, ShapeTag::kConcave);
  const Cpets flat = cpets_of(line, 5);
  for (int k = 0; k <= 20; ++k) EXPECT_NEAR(flat(0.1 * k), line(0.1 * k), 1e-14);

  const Cpets q = cpets_of(hump_bound(2), 2);
  ASSERT_EQ(q.degree(), 2);
  EXPECT_NEAR(q.polygon.times()[1], 0.5, 1e-15);
  EXPECT_NEAR(q.control_values()[1], 0.75, 1e-15);
  EXPECT_NEAR(q.control_values()[2], 1.0, 1e-15);
}

TEST(Cpets, Idempotent) {
  const Cpets once = cpets_of(hump_bound(40), 7);
  const Cpets twice = cpets_of(once.polygon, 7);
  for (std::size_t i = 0; i < once.control_values().size(); ++i) {
    EXPECT_NEAR(twice.control_values()[i], once.control_values()[i], 1e-15);
  }
}

TEST(Cpets, RejectsNonConcave) {
  const PiecewiseLinearBound v({0.0, 0.5, 1.0}, {1.0, 0.0, 1.0}, ShapeTag::kConvex);
  EXPECT_THROW(cpets_of(v, 4), std::domain_error);
}

TEST(ContainmentCheck, WorkedExamples) {
  const Corridor c = hump_corridor();
  for (int n = 1; n <= 16; ++n) {
    const ControlPointBoxes b = control_point_boxes(c, n);
    const BezierSegment top(b.upper, 0.0, 1.0);
    EXPECT_LE(containment_check(top, c).max_violation(), 1e-9) << n;
  }
  const ContainmentReport flat =
      containment_check(BezierSegment({0.5, 0.5, 0.5}, 0.0, 1.0), unit_box());
  EXPECT_EQ(flat.max_upper_violation, 0.0);
  EXPECT_EQ(flat.max_lower_violation, 0.0);

  const ContainmentReport bad = containment_check(BezierSegment({0.0, 1.2, 1.0}, 0.0, 1.0), c);
  EXPECT_GT(bad.max_upper_violation, 0.0);
  EXPECT_THROW(containment_check(BezierSegment({0.0, 1.0}, 0.0, 2.0), c), std::domain_error);
}

TEST(HullCounterexample, PlanarCurveInsideTrajectoryOutside) {
  const HullCounterexample hc = hull_counterexample();
  EXPECT_LE(hc.planar_violation, 1e-9);
  EXPECT_GT(hc.trajectory_violation, 1e-3);
  EXPECT_LE(hc.repaired_violation, 1e-9);
  const Shape upper = check_shape(hc.corridor.upper().times(), hc.corridor.upper().values());
  EXPECT_EQ(upper, Shape::kConcave);
  // The picked times are not equally spaced.
  EXPECT_NE(hc.control_times[1], 0.5);
}

TEST(Properties, RandomInteriorControlsStayInside) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < 100; ++draw) {
    const Corridor c = random_corridor(rng);
    const int n = 2 + draw % 15;
    const ControlPointBoxes b = control_point_boxes(c, n);
    std::vector<double> ctrl(b.upper.size());
    for (std::size_t i = 0; i < ctrl.size(); ++i) {
      ctrl[i] = b.lower[i] + unit(rng) * (b.upper[i] - b.lower[i]);
    }
    ASSERT_TRUE(b.contains(ctrl));
    EXPECT_LE(containment_check(BezierSegment(ctrl, c.t_start(), c.t_end()), c).max_violation(), 1e-9);
  }
}

TEST(Properties, CurveBelowCpetsBelowBound) {
  std::mt19937_64 rng(43);
  for (int draw = 0; draw < 200; ++draw) {
    const PiecewiseLinearBound f = random_pl_bound(rng, 0.0, 1.0, false);
    for (int n = 2; n <= 16; ++n) {
      const Cpets cp = cpets_of(f, n);
      const BezierSegment curve = cpets_curve(cp);
      for (int k = 0; k <= 1000; ++k) {
        const double t = k / 1000.0;
        const double c = curve.eval_parameter(t);
        ASSERT_LE(c, cp(t) + 1e-9);
        ASSERT_LE(cp(t), f(t) + 1e-9);
      }
    }
  }
}

TEST(Properties, MirroredConvexLowerBound) {
  std::mt19937_64 rng(47);
  for (int draw = 0; draw < 100; ++draw) {
    const PiecewiseLinearBound g = random_pl_bound(rng, 0.0, 1.0, true);
    for (int n = 2; n <= 16; ++n) {
      std::vector<double> s;
      for (int i = 0; i <= n; ++i) s.push_back(g(static_cast<double>(i) / n));
      const BezierSegment curve(s, 0.0, 1.0);
      for (int k = 0; k <= 1000; ++k) ASSERT_GE(curve.eval_parameter(k / 1000.0), g(k / 1000.0) - 1e-9);
    }
  }
}

// On each cell [j/n, (j+1)/n] the curve stays below the extension of the
// polygon edge leaving s_j.
void check_cell_bound(const PiecewiseLinearBound& f, int n) {
  std::vector<double> s;
  for (int i = 0; i <= n; ++i) s.push_back(f(static_cast<double>(i) / n));
  const BezierSegment curve(s, 0.0, 1.0);
  for (int j = 0; j < n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    for (int k = 0; k <= 50; ++k) {
      const double t = (j + k / 50.0) / n;
      const double line = s[jj] + n * (s[jj + 1] - s[jj]) * (t - static_cast<double>(j) / n);
      ASSERT_LE(curve.eval_parameter(t), line + 1e-9) << "n=" << n << " j=" << j;
    }
  }
}

TEST(Properties, PerCellBoundForMonotoneAndPeakedBounds) {
  const PiecewiseLinearBound ascending({0.0, 0.3, 0.7, 1.0}, {0.0, 0.6, 0.9, 1.0}, ShapeTag::kConcave);
  const PiecewiseLinearBound descending({0.0, 0.3, 0.7, 1.0}, {1.0, 0.95, 0.7, 0.1}, ShapeTag::kConcave);
  const PiecewiseLinearBound peaked({0.0, 0.4, 0.6, 1.0}, {0.0, 0.8, 0.8, 0.1}, ShapeTag::kConcave);
  for (int n = 2; n <= 16; ++n) {
    check_cell_bound(ascending, n);
    check_cell_bound(descending, n);
    check_cell_bound(peaked, n);
  }
}

}  // namespace
}  // namespace stcorridor
