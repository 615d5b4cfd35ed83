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

// Longitudinal speed planning with piecewise Bezier segments.
//
// Decision variables are the control values of every segment, stacked
// segment by segment. The cost tracks a uniformly accelerated reference and
// penalizes acceleration error and jerk, with separate weights for the near
// window [0, T_s] and the far window [T_s, T_l]:
//
//   w00 int_0^Ts (S - Sr)^2 + w01 int_Ts^Tl (S - Sr)^2
//   + w10 int_0^Ts (S'' - Sr'')^2 + w11 int_Ts^Tl (S'' - Sr'')^2
//   + w20 int_0^Ts (S''')^2 + w21 int_Ts^Tl (S''')^2
//
// Every integrand is a polynomial of degree at most 2n on a segment, so
// Gauss-Legendre quadrature with n + 1 nodes is exact.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stcorridor/bezier.hpp"
#include "stcorridor/constraints.hpp"
#include "stcorridor/corridor.hpp"
#include "stcorridor/error.hpp"
#include "stcorridor/qp.hpp"

namespace stcorridor {

struct InitialState {
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
};

/// S_r(t) = s0 + v0 t + a t^2 / 2.
struct ReferenceSpec {
  double s0 = 0.0;
  double v0 = 0.0;
  double a = 0.0;

  double position(double t) const { return s0 + v0 * t + 0.5 * a * t * t; }
};

struct CostWeights {
  double w00 = 5.0;   // position, near window
  double w01 = 2.5;   // position, far window
  double w10 = 10.0;  // acceleration, near window
  double w11 = 3.0;   // acceleration, far window
  double w20 = 25.0;  // jerk, near window
  double w21 = 10.0;  // jerk, far window
};

struct DynamicLimits {
  double v_max = 16.77;
  double a_min = -6.0;
  double a_max = 3.0;
};

inline constexpr int kDefaultPlanDegree = 8;

struct SpeedPlanProblem {
  std::vector<Corridor> corridors;  // contiguous, tiling [0, t_long]
  int degree = kDefaultPlanDegree;
  InitialState initial;
  ReferenceSpec reference;
  CostWeights weights;
  double t_short = 6.0;
  double t_long = 20.0;
  DynamicLimits limits;
  /// Corridors longer than this are cut into equal pieces, one segment per
  /// piece. Zero keeps one segment per corridor.
  double max_segment_duration = 0.0;
  QpSettings qp;

  /// Throws std::domain_error when an invariant does not hold.
  void validate() const {
    if (degree < 3 || degree > kMaxBezierDegree) {
      throw std::domain_error("SpeedPlanProblem: degree must be in [3, 64]");
    }
    if (!(t_long > 0.0)) throw std::domain_error("SpeedPlanProblem: T_l must be positive");
    if (t_short < 0.0 || t_short > t_long) {
      throw std::domain_error("SpeedPlanProblem: T_s must lie in [0, T_l]");
    }
    if (!(t_short < t_long)) throw std::domain_error("SpeedPlanProblem: T_s must be below T_l");
    if (corridors.empty()) throw std::domain_error("SpeedPlanProblem: no corridors");
    const double slack = 1e-9 * std::max(1.0, t_long);
    if (std::abs(corridors.front().t_start()) > slack ||
        std::abs(corridors.back().t_end() - t_long) > slack) {
      throw std::domain_error("SpeedPlanProblem: corridors must tile [0, T_l]");
    }
    for (std::size_t k = 1; k < corridors.size(); ++k) {
      if (std::abs(corridors[k].t_start() - corridors[k - 1].t_end()) > slack) {
        throw std::domain_error("SpeedPlanProblem: corridors are not contiguous");
      }
    }
    if (limits.v_max < 0.0 || limits.a_min > limits.a_max) {
      throw std::domain_error("SpeedPlanProblem: inconsistent dynamic limits");
    }
    if (max_segment_duration < 0.0) {
      throw std::domain_error("SpeedPlanProblem: negative max_segment_duration");
    }
  }
};

/// Corridors cut so that none is longer than max_duration (zero = no cut).
inline std::vector<Corridor> subdivide_corridors(const std::vector<Corridor>& corridors,
                                                 double max_duration) {
  if (max_duration <= 0.0) return corridors;
  std::vector<Corridor> out;
  for (const auto& c : corridors) {
    const int pieces =
        std::max(1, static_cast<int>(std::ceil(c.duration() / max_duration - 1e-9)));
    for (int k = 0; k < pieces; ++k) {
      const double a = c.t_start() + c.duration() * k / pieces;
      const double b = k + 1 == pieces ? c.t_end() : c.t_start() + c.duration() * (k + 1) / pieces;
      out.push_back(pieces == 1 ? c : c.restrict(a, b));
    }
  }
  return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int m) {
  if (m < 1) throw std::domain_error("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  return rule;
}

/// Maps control values of a degree-n segment of duration h to the control
/// values of its derivative of the given order.
inline Mat derivative_matrix(int n, double h, int order) {
  Mat d = Mat::Identity(n + 1, n + 1);
  for (int r = 0; r < order; ++r) {
    const int deg = n - r;
    Mat step = Mat::Zero(deg, deg + 1);
    for (int i = 0; i < deg; ++i) {
      step(i, i) = -deg / h;
      step(i, i + 1) = deg / h;
    }
    d = step * d;
  }
  return d;
}

inline Eigen::RowVectorXd bernstein_row_vector(int n, double u) {
  Eigen::RowVectorXd r(n + 1);
  for (int i = 0; i <= n; ++i) r[i] = bernstein_basis(n, i, u);
  return r;
}

/// 0.5 x' P x + q' x + constant.
struct QuadraticCost {
  Mat P;
  Vec q;
  double constant = 0.0;

  double value(const Vec& x) const { return 0.5 * x.dot(P * x) + q.dot(x) + constant; }
};

/// Segment intervals after subdivision.
inline std::vector<Corridor> plan_segments(const SpeedPlanProblem& p) {
  return subdivide_corridors(p.corridors, p.max_segment_duration);
}

inline QuadraticCost assemble_cost(const SpeedPlanProblem& p) {
  p.validate();
  const std::vector<Corridor> segs = plan_segments(p);
  const int n = p.degree;
  const int per = n + 1;
  const auto nv = static_cast<Eigen::Index>(segs.size()) * per;
  QuadraticCost cost{Mat::Zero(nv, nv), Vec::Zero(nv), 0.0};
  const GaussRule rule = gauss_legendre(n + 1);
  const CostWeights& w = p.weights;

  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double t0 = segs[k].t_start();
    const double t1 = segs[k].t_end();
    const double h = t1 - t0;
    const Mat d2 = derivative_matrix(n, h, 2);
    const Mat d3 = derivative_matrix(n, h, 3);
    const auto off = static_cast<Eigen::Index>(k) * per;

    // Quadrature windows: the parts of the segment before and after T_s.
    std::vector<std::pair<double, double>> windows;  // (a, b) with weight index
    std::vector<int> near;
    if (t0 < p.t_short) {
      windows.emplace_back(t0, std::min(t1, p.t_short));
      near.push_back(1);
    }
    if (t1 > p.t_short) {
      windows.emplace_back(std::max(t0, p.t_short), t1);
      near.push_back(0);
    }
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      const auto [a, b] = windows[wi];
      if (!(b > a)) continue;
      const double w_pos = near[wi] ? w.w00 : w.w01;
      const double w_acc = near[wi] ? w.w10 : w.w11;
      const double w_jerk = near[wi] ? w.w20 : w.w21;
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double t = mid + half * rule.nodes[g];
        const double u = (t - t0) / h;
        const double wq = half * rule.weights[g];
        const Eigen::RowVectorXd r0 = bernstein_row_vector(n, u);
        const Eigen::RowVectorXd r2 = bernstein_row_vector(n - 2, u) * d2;
        const Eigen::RowVectorXd r3 = bernstein_row_vector(n - 3, u) * d3;
        const double ref0 = p.reference.position(t);
        const double ref2 = p.reference.a;
        auto add = [&](const Eigen::RowVectorXd& r, double ref, double weight) {
          if (weight == 0.0) return;
          const double c = weight * wq;
          cost.P.block(off, off, per, per).noalias() += 2.0 * c * r.transpose() * r;
          cost.q.segment(off, per).noalias() -= 2.0 * c * ref * r.transpose();
          cost.constant += c * ref * ref;
        };
        add(r0, ref0, w_pos);
        add(r2, ref2, w_acc);
        add(r3, 0.0, w_jerk);
      }
    }
  }
  cost.P = 0.5 * (cost.P + cost.P.transpose());
  return cost;
}

/// Row counts of each constraint block, in assembly order.
struct ConstraintLayout {
  int box_rows = 0;
  int join_rows = 0;
  int initial_rows = 0;
  int velocity_rows = 0;
  int accel_rows = 0;

  int total() const { return box_rows + join_rows + initial_rows + velocity_rows + accel_rows; }
};

struct ConstraintSet {
  Mat A;
  Vec l;
  Vec u;
  ConstraintLayout layout;
};

/// Throws InfeasibleError when a control-point box is empty.
inline ConstraintSet assemble_constraints(const SpeedPlanProblem& p) {
  p.validate();
  const std::vector<Corridor> segs = plan_segments(p);
  const int n = p.degree;
  const int per = n + 1;
  const int ks = static_cast<int>(segs.size());
  ConstraintLayout lay;
  lay.box_rows = ks * per;
  lay.join_rows = 3 * (ks - 1);
  lay.initial_rows = 3;
  lay.velocity_rows = ks * n;
  lay.accel_rows = ks * (n - 1);

  ConstraintSet cs;
  cs.layout = lay;
  const auto nv = static_cast<Eigen::Index>(ks) * per;
  cs.A = Mat::Zero(lay.total(), nv);
  cs.l = Vec::Zero(lay.total());
  cs.u = Vec::Zero(lay.total());
  Eigen::Index row = 0;

  for (int k = 0; k < ks; ++k) {
    const ControlPointBoxes boxes = control_point_boxes(segs[static_cast<std::size_t>(k)], n);
    for (int i = 0; i <= n; ++i) {
      cs.A(row, k * per + i) = 1.0;
      cs.l[row] = boxes.lower[static_cast<std::size_t>(i)];
      cs.u[row] = boxes.upper[static_cast<std::size_t>(i)];
      ++row;
    }
  }

  std::vector<Mat> d1(static_cast<std::size_t>(ks));
  std::vector<Mat> d2(static_cast<std::size_t>(ks));
  for (int k = 0; k < ks; ++k) {
    const double h = segs[static_cast<std::size_t>(k)].duration();
    d1[static_cast<std::size_t>(k)] = derivative_matrix(n, h, 1);
    d2[static_cast<std::size_t>(k)] = derivative_matrix(n, h, 2);
  }

  for (int k = 1; k < ks; ++k) {
    const auto prev = static_cast<std::size_t>(k - 1);
    const auto cur = static_cast<std::size_t>(k);
    cs.A(row, (k - 1) * per + n) = 1.0;
    cs.A(row, k * per) = -1.0;
    ++row;
    cs.A.block(row, (k - 1) * per, 1, per) = d1[prev].row(n - 1);
    cs.A.block(row, k * per, 1, per) = -d1[cur].row(0);
    ++row;
    cs.A.block(row, (k - 1) * per, 1, per) = d2[prev].row(n - 2);
    cs.A.block(row, k * per, 1, per) = -d2[cur].row(0);
    ++row;
  }

  cs.A(row, 0) = 1.0;
  cs.l[row] = cs.u[row] = p.initial.s;
  ++row;
  cs.A.block(row, 0, 1, per) = d1[0].row(0);
  cs.l[row] = cs.u[row] = p.initial.v;
  ++row;
  cs.A.block(row, 0, 1, per) = d2[0].row(0);
  cs.l[row] = cs.u[row] = p.initial.a;
  ++row;

  for (int k = 0; k < ks; ++k) {
    for (int i = 0; i < n; ++i) {
      cs.A.block(row, k * per, 1, per) = d1[static_cast<std::size_t>(k)].row(i);
      cs.l[row] = 0.0;
      cs.u[row] = p.limits.v_max;
      ++row;
    }
  }
  for (int k = 0; k < ks; ++k) {
    for (int i = 0; i + 1 < n; ++i) {
      cs.A.block(row, k * per, 1, per) = d2[static_cast<std::size_t>(k)].row(i);
      cs.l[row] = p.limits.a_min;
      cs.u[row] = p.limits.a_max;
      ++row;
    }
  }
  return cs;
}

/// Piecewise Bezier position profile with cached derivative segments.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<BezierSegment> segments) : pos_(std::move(segments)) {
    if (pos_.empty()) throw std::domain_error("Trajectory: no segments");
    for (const auto& s : pos_) {
      vel_.push_back(derivative(s));
      acc_.push_back(derivative(vel_.back()));
      jerk_.push_back(derivative(acc_.back()));
    }
  }

  bool empty() const { return pos_.empty(); }
  const std::vector<BezierSegment>& segments() const { return pos_; }
  double t_start() const { return pos_.front().t_start(); }
  double t_end() const { return pos_.back().t_end(); }

  double position(double t) const { return eval(pos_[index(t)], clamp(t)); }
  double velocity(double t) const { return eval(vel_[index(t)], clamp(t)); }
  double acceleration(double t) const { return eval(acc_[index(t)], clamp(t)); }
  double jerk(double t) const { return eval(jerk_[index(t)], clamp(t)); }

 private:
  double clamp(double t) const { return std::clamp(t, t_start(), t_end()); }
  std::size_t index(double t) const {
    if (pos_.empty()) throw std::domain_error("Trajectory: empty");
    const double c = clamp(t);
    for (std::size_t k = 0; k + 1 < pos_.size(); ++k) {
      if (c < pos_[k].t_end()) return k;
    }
    return pos_.size() - 1;
  }

  std::vector<BezierSegment> pos_;
  std::vector<BezierSegment> vel_;
  std::vector<BezierSegment> acc_;
  std::vector<BezierSegment> jerk_;
};

struct PlanMetrics {
  double min_accel = 0.0;
  double max_accel = 0.0;
  double min_speed = 0.0;
  double jerk_rms = 0.0;
};

enum class PlanStatus { kOk, kInfeasible, kSolverFailure };

inline std::string_view to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::kOk: return "ok";
    case PlanStatus::kInfeasible: return "infeasible";
    case PlanStatus::kSolverFailure: return "solver_failure";
  }
  return "?";
}

struct PlanResult {
  PlanStatus status = PlanStatus::kSolverFailure;
  std::string message;
  std::vector<Corridor> corridors;  // one per segment
  Trajectory trajectory;
  double cost = 0.0;
  PlanMetrics metrics;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;

  bool ok() const { return status == PlanStatus::kOk; }
  const std::vector<BezierSegment>& segments() const { return trajectory.segments(); }
};

inline constexpr double kMetricStep = 0.01;

inline PlanMetrics compute_metrics(const Trajectory& traj, double step = kMetricStep) {
  PlanMetrics m;
  const double t0 = traj.t_start();
  const double t1 = traj.t_end();
  const auto count = static_cast<int>(std::ceil((t1 - t0) / step - 1e-9));
  m.min_accel = m.max_accel = traj.acceleration(t0);
  m.min_speed = traj.velocity(t0);
  double jerk_sq = 0.0;
  for (int k = 0; k <= count; ++k) {
    const double t = std::min(t1, t0 + k * step);
    const double a = traj.acceleration(t);
    m.min_accel = std::min(m.min_accel, a);
    m.max_accel = std::max(m.max_accel, a);
    m.min_speed = std::min(m.min_speed, traj.velocity(t));
    const double j = traj.jerk(t);
    jerk_sq += j * j;
  }
  m.jerk_rms = std::sqrt(jerk_sq / (count + 1));
  return m;
}

/// Solves the speed planning QP. Never throws on infeasibility: the status
/// says why no trajectory was returned.
inline PlanResult plan(const SpeedPlanProblem& p) {
  PlanResult result;
  result.corridors = plan_segments(p);
  ConstraintSet cs;
  QuadraticCost cost;
  try {
    cost = assemble_cost(p);
    cs = assemble_constraints(p);
  } catch (const InfeasibleError& e) {
    result.status = PlanStatus::kInfeasible;
    result.message = std::string("no trajectory within corridors: ") + e.what();
    return result;
  }
  QpProblem qp{cost.P, cost.q, cs.A, cs.l, cs.u};
  const QpSolution sol = solve(qp, p.qp);
  result.primal_residual = sol.primal_residual;
  result.dual_residual = sol.dual_residual;
  result.iterations = sol.iterations;
  if (sol.status != QpStatus::kSolved) {
    result.status =
        sol.status == QpStatus::kInfeasible ? PlanStatus::kInfeasible : PlanStatus::kSolverFailure;
    result.message = sol.status == QpStatus::kInfeasible
                         ? "no trajectory within corridors"
                         : "solver did not converge";
    return result;
  }
  const int per = p.degree + 1;
  std::vector<BezierSegment> segs;
  for (std::size_t k = 0; k < result.corridors.size(); ++k) {
    std::vector<double> ctrl(static_cast<std::size_t>(per));
    for (int i = 0; i < per; ++i) {
      ctrl[static_cast<std::size_t>(i)] = sol.x[static_cast<Eigen::Index>(k) * per + i];
    }
    segs.emplace_back(std::move(ctrl), result.corridors[k].t_start(), result.corridors[k].t_end());
  }
  result.trajectory = Trajectory(std::move(segs));
  result.cost = cost.value(sol.x);
  result.metrics = compute_metrics(result.trajectory);
  result.status = PlanStatus::kOk;
  return result;
}

/// Bound of whichever segment corridor contains t.
inline std::pair<double, double> corridor_bounds_at(const std::vector<Corridor>& corridors,
                                                    double t) {
  for (const auto& c : corridors) {
    if (t <= c.t_end() + 1e-12) {
      const double tc = std::clamp(t, c.t_start(), c.t_end());
      return {c.upper()(tc), c.lower()(tc)};
    }
  }
  const auto& c = corridors.back();
  return {c.upper()(c.t_end()), c.lower()(c.t_end())};
}

inline constexpr double kPlanCsvStep = 0.05;

/// Columns t,s,v,a,jerk,corridor_upper,corridor_lower.
inline void write_plan_csv(std::ostream& os, const PlanResult& r, double step = kPlanCsvStep) {
  if (!r.ok()) throw std::domain_error("write_plan_csv: plan has no trajectory");
  os << "t,s,v,a,jerk,corridor_upper,corridor_lower\n";
  const double t0 = r.trajectory.t_start();
  const double t1 = r.trajectory.t_end();
  const auto count = static_cast<int>(std::llround((t1 - t0) / step));
  os.precision(10);
  for (int k = 0; k <= count; ++k) {
    const double t = std::min(t1, t0 + k * step);
    const auto [up, lo] = corridor_bounds_at(r.corridors, t);
    os << t << ',' << r.trajectory.position(t) << ',' << r.trajectory.velocity(t) << ','
       << r.trajectory.acceleration(t) << ',' << r.trajectory.jerk(t) << ',' << up << ',' << lo
       << '\n';
  }
}

}  // namespace stcorridor
