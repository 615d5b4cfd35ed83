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

#include "stcorridor/bezier.hpp"

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"

namespace stcorridor {
namespace {

using testing::bernstein_sum;
using testing::central_difference;

std::vector<double> random_controls(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  std::vector<double> s(static_cast<std::size_t>(n) + 1);
  for (auto& v : s) v = d(rng);
  return s;
}

TEST(BernsteinBasis, KnownValues) {
  EXPECT_DOUBLE_EQ(bernstein_basis(2, 1, 0.5), 0.5);
  for (int n = 0; n <= 10; ++n) EXPECT_DOUBLE_EQ(bernstein_basis(n, 0, 0.0), 1.0);
  double sum = 0.0;
  for (int i = 0; i <= 5; ++i) sum += bernstein_basis(5, i, 0.3);
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(BernsteinBasis, RejectsIndexOutOfRange) {
  EXPECT_THROW(bernstein_basis(3, -1, 0.5), std::domain_error);
  EXPECT_THROW(bernstein_basis(3, 4, 0.5), std::domain_error);
}

TEST(BernsteinBasis, BinomialMatchesPascalUpTo64) {
  const auto rows = testing::pascal(64);
  for (int n = 0; n <= 64; ++n) {
    for (int i = 0; i <= n; ++i) {
      const double expected = rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
      EXPECT_NEAR(binomial(n, i), expected, 1e-13 * expected) << n << " choose " << i;
    }
  }
}

TEST(BernsteinBasis, PartitionOfUnity) {
  for (int n = 1; n <= 32; ++n) {
    for (int k = 0; k <= 1000; ++k) {
      const double u = k / 1000.0;
      double sum = 0.0;
      for (double b : bernstein_row(n, u)) sum += b;
      ASSERT_NEAR(sum, 1.0, 1e-12) << "n=" << n << " u=" << u;
    }
  }
}

TEST(BezierSegment, RejectsBadConstruction) {
  EXPECT_THROW(BezierSegment({}, 0.0, 1.0), std::domain_error);
  EXPECT_THROW(BezierSegment({0.0, 1.0}, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(BezierSegment({0.0, 1.0}, 2.0, 1.0), std::domain_error);
  EXPECT_THROW(BezierSegment(std::vector<double>(66, 0.0), 0.0, 1.0), std::domain_error);
  EXPECT_NO_THROW(BezierSegment(std::vector<double>(65, 0.0), 0.0, 1.0));
}

TEST(Eval, WorkedExamples) {
  const BezierSegment constant({2.5, 2.5, 2.5, 2.5}, 1.0, 3.0);
  EXPECT_NEAR(eval(constant, 1.7), 2.5, 1e-15);
  EXPECT_NEAR(eval(BezierSegment({0.0, 0.75, 1.0}, 0.0, 1.0), 0.5), 0.625, 1e-15);
  EXPECT_NEAR(eval(BezierSegment({0.0, 0.5, 1.0}, 0.0, 1.0), 0.3), 0.3, 1e-15);
}

TEST(Eval, OutsideIntervalThrows) {
  const BezierSegment seg({0.0, 1.0}, 2.0, 4.0);
  EXPECT_THROW(eval(seg, 1.9), std::domain_error);
  EXPECT_THROW(eval(seg, 4.1), std::domain_error);
}

TEST(Eval, MatchesDirectBernsteinSum) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 20; ++n) {
    const auto s = random_controls(rng, n);
    const BezierSegment seg(s, -1.0, 2.0);
    for (int k = 0; k <= 100; ++k) {
      const double u = k / 100.0;
      EXPECT_NEAR(seg.eval_parameter(u), bernstein_sum(s, u), 1e-11) << "n=" << n;
      EXPECT_NEAR(eval(seg, -1.0 + 3.0 * u), bernstein_sum(s, u), 1e-11);
    }
  }
}

TEST(Eval, EndpointInterpolation) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 32; ++n) {
    const auto s = random_controls(rng, n);
    const BezierSegment seg(s, 0.5, 1.25);
    EXPECT_NEAR(eval(seg, 0.5), s.front(), 1e-12);
    EXPECT_NEAR(eval(seg, 1.25), s.back(), 1e-12);
  }
}

TEST(Derivative, WorkedExamples) {
  const int n = 6;
  std::vector<double> line(n + 1);
  for (int i = 0; i <= n; ++i) line[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
  const BezierSegment d = derivative(BezierSegment(line, 0.0, 1.0));
  for (double v : d.control_values()) EXPECT_NEAR(v, 1.0, 1e-14);

  const BezierSegment flat = derivative(BezierSegment({3.0, 3.0, 3.0}, 0.0, 2.0));
  for (double v : flat.control_values()) EXPECT_EQ(v, 0.0);

  const BezierSegment q({0.0, 0.75, 1.0}, 0.0, 1.0);
  const BezierSegment dq = derivative(q);
  ASSERT_EQ(dq.degree(), 1);
  EXPECT_NEAR(dq.control(0), 1.5, 1e-15);
  EXPECT_NEAR(dq.control(1), 0.5, 1e-15);
  for (double t : {0.1, 0.4, 0.77}) {
    const double fd = central_difference([&](double x) { return eval(q, x); }, t);
    EXPECT_NEAR(eval(dq, t), fd, 1e-6);
  }
}

TEST(Derivative, DegreeZeroThrows) {
  EXPECT_THROW(derivative(BezierSegment({1.0}, 0.0, 1.0)), std::domain_error);
}

TEST(Derivative, MatchesFiniteDifferencesOnScaledIntervals) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> start(-3.0, 3.0);
  std::uniform_real_distribution<double> length(0.2, 6.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 12;
    const double t0 = start(rng);
    const double t1 = t0 + length(rng);
    const BezierSegment seg(random_controls(rng, n), t0, t1);
    const BezierSegment d = derivative(seg);
    for (int k = 1; k < 20; ++k) {
      const double t = t0 + (t1 - t0) * k / 20.0;
      const double fd = central_difference([&](double x) { return eval(seg, x); }, t);
      EXPECT_NEAR(eval(d, t), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Derivative, SecondOrderMatchesSecondDifferenceFormula) {
  std::mt19937_64 rng(5);
  const int n = 7;
  const double h = 2.5;
  const auto s = random_controls(rng, n);
  const BezierSegment d2 = derivative(BezierSegment(s, 1.0, 1.0 + h), 2);
  ASSERT_EQ(d2.degree(), n - 2);
  for (int i = 0; i + 2 <= n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double expected = n * (n - 1) * (s[k + 2] - 2.0 * s[k + 1] + s[k]) / (h * h);
    EXPECT_NEAR(d2.control(i), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(SplitRecurrence, WorkedExamples) {
  auto [a, b] = split_recurrence(BezierSegment({0.0, 1.0}, 0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(a, 0.0);
  EXPECT_DOUBLE_EQ(b, 1.0);

  const BezierSegment q({0.0, 0.75, 1.0}, 0.0, 1.0);
  auto [c, d] = split_recurrence(q, 0.5);
  EXPECT_NEAR(c, 0.375, 1e-15);
  EXPECT_NEAR(d, 0.875, 1e-15);
  EXPECT_NEAR(0.5 * c + 0.5 * d, 0.625, 1e-15);

  auto [e, f] = split_recurrence(BezierSegment({4.0, -1.0, 2.0, 7.0}, 2.0, 3.0), 2.0);
  EXPECT_NEAR(e, 4.0, 1e-15);
  (void)f;
}

TEST(SplitRecurrence, BlendEqualsEval) {
  std::mt19937_64 rng(13);
  for (int n = 1; n <= 16; ++n) {
    const BezierSegment seg(random_controls(rng, n), 0.0, 3.0);
    for (int k = 0; k <= 30; ++k) {
      const double t = 3.0 * k / 30.0;
      const double u = t / 3.0;
      const auto [first, second] = split_recurrence(seg, t);
      EXPECT_NEAR((1.0 - u) * first + u * second, eval(seg, t), 1e-12);
    }
  }
  EXPECT_THROW(split_recurrence(BezierSegment({1.0}, 0.0, 1.0), 0.5), std::domain_error);
}

TEST(Reverse, WorkedExamples) {
  const BezierSegment r = reverse(BezierSegment({0.0, 1.0}, 0.0, 1.0));
  EXPECT_EQ(r.control(0), 1.0);
  EXPECT_EQ(r.control(1), 0.0);

  const BezierSegment pal({1.0, 3.0, -2.0, 3.0, 1.0}, 0.0, 2.0);
  EXPECT_EQ(reverse(pal), pal);

  const BezierSegment q({0.0, 0.75, 1.0}, 0.0, 1.0);
  EXPECT_NEAR(eval(reverse(q), 0.3), 0.805, 1e-15);
  EXPECT_NEAR(eval(q, 0.7), 0.805, 1e-15);
}

TEST(Reverse, MirrorsTime) {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 12; ++n) {
    const BezierSegment seg(random_controls(rng, n), 1.0, 4.0);
    const BezierSegment r = reverse(seg);
    for (int k = 0; k <= 50; ++k) {
      const double t = 1.0 + 3.0 * k / 50.0;
      EXPECT_NEAR(eval(r, 5.0 - t), eval(seg, t), 1e-12);
    }
  }
}

// Non-decreasing control values give a non-decreasing curve.
TEST(ShapeProperties, AscendingControlsGiveAscendingCurve) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> inc(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 15;
    std::vector<double> s{inc(rng)};
    for (int i = 0; i < n; ++i) s.push_back(s.back() + (trial % 3 == 0 && i % 2 ? 0.0 : inc(rng)));
    const BezierSegment seg(s, 0.0, 1.0);
    double prev = seg.eval_parameter(0.0);
    for (int k = 1; k <= 1000; ++k) {
      const double cur = seg.eval_parameter(k / 1000.0);
      ASSERT_GE(cur, prev - 1e-10);
      prev = cur;
    }
  }
}

std::vector<double> random_concave_controls(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(0.0, 3.0);
  std::vector<double> slopes(static_cast<std::size_t>(n));
  for (auto& v : slopes) v = d(rng) - 1.5;
  std::sort(slopes.rbegin(), slopes.rend());
  std::vector<double> s{d(rng)};
  for (double m : slopes) s.push_back(s.back() + m);
  return s;
}

TEST(ShapeProperties, ConcaveControlsGiveConcaveCurve) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 15;
    const BezierSegment d2 = derivative(BezierSegment(random_concave_controls(rng, n), 0.0, 2.0), 2);
    for (int k = 0; k <= 1000; ++k) ASSERT_LE(d2.eval_parameter(k / 1000.0), 1e-10);
  }
}

// The curve stays under its end tangents. Checked on the whole grid, which
// includes the first and last cells.
TEST(ShapeProperties, ConcaveCurveBelowEndTangents) {
  std::mt19937_64 rng(29);
  const int grid = 1001;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 15;
    const double h = 0.5 + trial * 0.1;
    const auto s = random_concave_controls(rng, n);
    const BezierSegment seg(s, 0.0, h);
    const double start_slope = n * (s[1] - s[0]) / h;
    const double end_slope = n * (s[static_cast<std::size_t>(n)] - s[static_cast<std::size_t>(n) - 1]) / h;
    for (int k = 0; k < grid; ++k) {
      const double t = h * k / (grid - 1);
      EXPECT_LE(eval(seg, t), s.front() + start_slope * t + 1e-10);
      const double te = h - t;
      EXPECT_LE(eval(seg, te), s.back() - end_slope * (h - te) + 1e-10);
    }
  }
}

}  // namespace
}  // namespace stcorridor
