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

#include "stcorridor/qp.hpp"

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"

namespace stcorridor {
namespace {

QpProblem box_problem(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  QpProblem p;
  p.P = m.transpose() * m + 0.5 * Mat::Identity(n, n);
  p.q = Vec(n);
  p.l = Vec(n);
  p.u = Vec(n);
  for (int i = 0; i < n; ++i) {
    p.q[i] = 3.0 * g(rng);
    const double a = g(rng);
    const double b = g(rng);
    p.l[i] = std::min(a, b);
    p.u[i] = std::max(a, b);
  }
  p.A = Mat::Identity(n, n);
  return p;
}

TEST(QpSolve, ClampedScalar) {
  QpProblem p{Mat::Constant(1, 1, 2.0), Vec::Constant(1, -2.0), Mat::Constant(1, 1, 1.0),
              Vec::Constant(1, -kQpInfinity), Vec::Constant(1, 0.5)};
  const QpSolution s = solve(p);
  ASSERT_EQ(s.status, QpStatus::kSolved);
  EXPECT_NEAR(s.x[0], 0.5, 1e-6);
}

TEST(QpSolve, UnconstrainedQuadratic) {
  QpProblem p{Mat::Identity(3, 3) * 2.0, Vec::Zero(3), Mat::Zero(0, 3), Vec::Zero(0), Vec::Zero(0)};
  const QpSolution s = solve(p);
  ASSERT_EQ(s.status, QpStatus::kSolved);
  EXPECT_LE(s.x.lpNorm<Eigen::Infinity>(), 1e-6);
}

// (x1 - 2)^2 + (x2 + 1)^2 with x1 + x2 = 0, -1 <= x1 <= 1. On the line the
// objective is (x1 - 2)^2 + (1 - x1)^2, minimized at 1.5 and clamped to 1.
TEST(QpSolve, EqualityAndBox) {
  QpProblem p;
  p.P = 2.0 * Mat::Identity(2, 2);
  p.q = Vec(2);
  p.q << -4.0, 2.0;
  p.A = Mat(2, 2);
  p.A << 1.0, 1.0, 1.0, 0.0;
  p.l = Vec(2);
  p.l << 0.0, -1.0;
  p.u = Vec(2);
  p.u << 0.0, 1.0;
  const QpSolution s = solve(p);
  ASSERT_EQ(s.status, QpStatus::kSolved);
  EXPECT_NEAR(s.x[0], 1.0, 1e-6);
  EXPECT_NEAR(s.x[1], -1.0, 1e-6);
  EXPECT_LE(s.primal_residual, 1e-6);
  EXPECT_LE(s.dual_residual, 1e-6);
}

TEST(QpSolve, DetectsInfeasibility) {
  QpProblem p;
  p.P = Mat::Identity(1, 1);
  p.q = Vec::Zero(1);
  p.A = Mat(2, 1);
  p.A << 1.0, 1.0;
  p.l = Vec(2);
  p.l << 1.0, -kQpInfinity;
  p.u = Vec(2);
  p.u << kQpInfinity, 0.0;
  EXPECT_EQ(solve(p).status, QpStatus::kInfeasible);
}

TEST(QpSolve, RejectsMalformedProblems) {
  QpProblem p{Mat::Identity(2, 2), Vec::Zero(3), Mat::Zero(0, 2), Vec::Zero(0), Vec::Zero(0)};
  EXPECT_THROW(solve(p), std::domain_error);
  QpProblem asym{Mat::Identity(2, 2), Vec::Zero(2), Mat::Identity(2, 2), Vec::Ones(2), Vec::Zero(2)};
  EXPECT_THROW(solve(asym), std::domain_error);
  asym.l = Vec::Zero(2);
  asym.P(0, 1) = 1.0;
  EXPECT_THROW(solve(asym), std::domain_error);
}

TEST(QpSolve, MatchesProjectedGradientOracle) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 20;
    const QpProblem p = box_problem(rng, n);
    const QpSolution s = solve(p);
    ASSERT_EQ(s.status, QpStatus::kSolved) << trial;
    const Vec ref = testing::projected_gradient(p.P, p.q, p.l, p.u);
    EXPECT_LE((s.x - ref).lpNorm<Eigen::Infinity>(), 1e-4) << trial;
    EXPECT_LE(s.primal_residual, 1e-6);
    EXPECT_LE(s.dual_residual, 1e-6);
  }
}

TEST(QpSolve, NoRandomFeasiblePointIsBetter) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const QpProblem p = box_problem(rng, 8);
    const QpSolution s = solve(p);
    ASSERT_EQ(s.status, QpStatus::kSolved);
    const double best = p.objective(s.x);
    for (int k = 0; k < 1000; ++k) {
      Vec x(8);
      for (int i = 0; i < 8; ++i) x[i] = p.l[i] + unit(rng) * (p.u[i] - p.l[i]);
      ASSERT_GE(p.objective(x), best - 1e-6);
    }
  }
}

TEST(QpSolve, Deterministic) {
  std::mt19937_64 rng(61);
  const QpProblem p = box_problem(rng, 12);
  const QpSolution a = solve(p);
  const QpSolution b = solve(p);
  EXPECT_EQ(a.iterations, b.iterations);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(a.x[i], b.x[i]);
}

}  // namespace
}  // namespace stcorridor
