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

// Dense convex QP solver based on operator splitting (ADMM).
//
// Solves:  min  0.5 x' P x + q' x
//          s.t. l <= A x <= u
//
// Equalities are rows with l == u. The iteration follows the usual
// splitting with an auxiliary z = A x:
//   1. x~ = (P + sigma I + A' R A)^-1 (sigma x - q + A' (R z - y))
//   2. relax x and A x~ with alpha, project onto [l, u] to get z
//   3. y += R (relaxed A x~ - z)
// on a Ruiz-equilibrated copy of the problem. Once the iterates are close,
// the active set is read off the duals and the reduced KKT system is solved
// directly ("polishing"), which gives residuals near machine precision.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stcorridor {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kQpInfinity = 1e20;

struct QpProblem {
  Mat P;
  Vec q;
  Mat A;
  Vec l;
  Vec u;

  int num_variables() const { return static_cast<int>(q.size()); }
  int num_constraints() const { return static_cast<int>(l.size()); }

  /// Throws std::domain_error on inconsistent dimensions, an asymmetric P,
  /// or a row with l > u.
  void validate() const {
    const auto n = q.size();
    const auto m = l.size();
    if (P.rows() != n || P.cols() != n) throw std::domain_error("QpProblem: P must be n x n");
    if (A.rows() != m || A.cols() != n) throw std::domain_error("QpProblem: A must be m x n");
    if (u.size() != m) throw std::domain_error("QpProblem: l and u differ in length");
    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if (n > 0 && (P - P.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw std::domain_error("QpProblem: P is not symmetric");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (l[i] > u[i]) {
        throw std::domain_error("QpProblem: l > u in row " + std::to_string(i));
      }
    }
  }

  double objective(const Vec& x) const { return 0.5 * x.dot(P * x) + q.dot(x); }
};

enum class QpStatus { kSolved, kMaxIterations, kInfeasible };

inline std::string_view to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kSolved: return "solved";
    case QpStatus::kMaxIterations: return "max_iterations";
    case QpStatus::kInfeasible: return "infeasible";
  }
  return "?";
}

struct QpSettings {
  double eps = 1e-6;          // absolute tolerance on both KKT residuals
  int max_iter = 20000;
  double rho = 0.1;           // ADMM penalty
  double sigma = 1e-6;        // x regularization
  double alpha = 1.6;         // over-relaxation
  int scaling_iters = 15;
  bool adaptive_rho = true;
  bool polish = true;
  int check_interval = 25;
  int stagnation_window = 1000;
  std::optional<Vec> initial_x;
};

struct QpSolution {
  Vec x;
  Vec y;
  QpStatus status = QpStatus::kMaxIterations;
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double objective = 0.0;
  bool polished = false;
};

/// Largest violation of l <= A x <= u.
inline double primal_residual(const QpProblem& p, const Vec& x) {
  if (p.num_constraints() == 0) return 0.0;
  const Vec ax = p.A * x;
  double r = 0.0;
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    r = std::max({r, p.l[i] - ax[i], ax[i] - p.u[i]});
  }
  return r;
}

/// ||P x + q + A' y||_inf.
inline double dual_residual(const QpProblem& p, const Vec& x, const Vec& y) {
  Vec g = p.P * x + p.q;
  if (p.num_constraints() > 0) g += p.A.transpose() * y;
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

namespace detail {

struct Scaling {
  Vec d;       // variable scaling
  Vec e;       // constraint scaling
  double c = 1.0;  // cost scaling
};

inline Vec inv_sqrt_clamped(const Vec& norms) {
  Vec out(norms.size());
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    const double v = norms[i] < 1e-4 ? 1.0 : std::min(norms[i], 1e4);
    out[i] = 1.0 / std::sqrt(v);
  }
  return out;
}

// Ruiz equilibration of the KKT matrix [P A'; A 0], followed by a cost scale.
inline Scaling equilibrate(Mat& P, Vec& q, Mat& A, Vec& l, Vec& u, int iters) {
  const auto n = P.rows();
  const auto m = A.rows();
  Scaling s{Vec::Ones(n), Vec::Ones(m), 1.0};
  for (int it = 0; it < iters; ++it) {
    Vec col_norm(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = P.col(j).cwiseAbs().maxCoeff();
      if (m > 0) v = std::max(v, A.col(j).cwiseAbs().maxCoeff());
      col_norm[j] = v;
    }
    Vec row_norm(m);
    for (Eigen::Index i = 0; i < m; ++i) row_norm[i] = A.row(i).cwiseAbs().maxCoeff();
    const Vec dd = inv_sqrt_clamped(col_norm);
    const Vec ee = inv_sqrt_clamped(row_norm);
    P = dd.asDiagonal() * P * dd.asDiagonal();
    q = dd.asDiagonal() * q;
    A = ee.asDiagonal() * A * dd.asDiagonal();
    s.d = s.d.cwiseProduct(dd);
    s.e = s.e.cwiseProduct(ee);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (l[i] > -kQpInfinity) l[i] *= s.e[i];
    if (u[i] < kQpInfinity) u[i] *= s.e[i];
  }
  double pnorm = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) pnorm += P.col(j).cwiseAbs().maxCoeff();
  pnorm = n > 0 ? pnorm / static_cast<double>(n) : 0.0;
  const double qnorm = n > 0 ? q.cwiseAbs().maxCoeff() : 0.0;
  double scale = std::max(pnorm, qnorm);
  scale = scale < 1e-4 ? 1.0 : std::min(scale, 1e4);
  s.c = 1.0 / scale;
  P *= s.c;
  q *= s.c;
  return s;
}

inline Vec project_box(const Vec& v, const Vec& l, const Vec& u) {
  return v.cwiseMax(l).cwiseMin(u);
}

// Reduced KKT solve on the given active set with regularization and
// iterative refinement. Returns nullopt if the system cannot be solved.
inline std::optional<std::pair<Vec, Vec>> polish(const QpProblem& p,
                                                 const std::vector<int>& lower_active,
                                                 const std::vector<int>& upper_active) {
  const auto n = p.P.rows();
  const auto m = p.A.rows();
  const auto na = static_cast<Eigen::Index>(lower_active.size() + upper_active.size());
  if (na > n + m) return std::nullopt;
  Mat kkt = Mat::Zero(n + na, n + na);
  Vec rhs(n + na);
  kkt.topLeftCorner(n, n) = p.P;
  rhs.head(n) = -p.q;
  Eigen::Index r = n;
  std::vector<int> rows;
  for (int i : lower_active) {
    kkt.block(r, 0, 1, n) = p.A.row(i);
    kkt.block(0, r, n, 1) = p.A.row(i).transpose();
    rhs[r] = p.l[i];
    rows.push_back(i);
    ++r;
  }
  for (int i : upper_active) {
    kkt.block(r, 0, 1, n) = p.A.row(i);
    kkt.block(0, r, n, 1) = p.A.row(i).transpose();
    rhs[r] = p.u[i];
    rows.push_back(i);
    ++r;
  }
  const double scale = std::max(1.0, kkt.cwiseAbs().maxCoeff());
  const double delta = 1e-11 * scale;
  Mat reg = kkt;
  reg.topLeftCorner(n, n).diagonal().array() += delta;
  reg.bottomRightCorner(na, na).diagonal().array() -= delta;
  Eigen::PartialPivLU<Mat> lu(reg);
  Vec sol = lu.solve(rhs);
  for (int it = 0; it < 25; ++it) {
    const Vec res = rhs - kkt * sol;
    if (!res.allFinite()) return std::nullopt;
    if (res.cwiseAbs().maxCoeff() < 1e-14 * scale) break;
    sol += lu.solve(res);
  }
  if (!sol.allFinite()) return std::nullopt;
  Vec x = sol.head(n);
  Vec y = Vec::Zero(m);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    y[rows[k]] += sol[n + static_cast<Eigen::Index>(k)];
  }
  return std::make_pair(std::move(x), std::move(y));
}

// Active-set refinement around polish(): rows whose multiplier has the wrong
// sign leave the active set, violated rows join it, until the set is stable.
// `lower` and `upper` hold the initial guess; equality rows are always
// active. Returns the final (x, y) if the set settled.
inline std::optional<std::pair<Vec, Vec>> refine_active_set(const QpProblem& p,
                                                            std::vector<int> lower,
                                                            std::vector<int> upper,
                                                            int max_rounds = 50) {
  const auto m = p.A.rows();
  std::vector<int> state(static_cast<std::size_t>(m), 0);  // -1 lower, +1 upper, 2 equality
  for (Eigen::Index i = 0; i < m; ++i) {
    if (p.u[i] - p.l[i] < 1e-12) state[static_cast<std::size_t>(i)] = 2;
  }
  for (int i : lower) if (state[static_cast<std::size_t>(i)] != 2) state[static_cast<std::size_t>(i)] = -1;
  for (int i : upper) if (state[static_cast<std::size_t>(i)] != 2) state[static_cast<std::size_t>(i)] = 1;

  for (int round = 0; round < max_rounds; ++round) {
    std::vector<int> lo;
    std::vector<int> up;
    for (Eigen::Index i = 0; i < m; ++i) {
      const int st = state[static_cast<std::size_t>(i)];
      if (st == -1 || st == 2) lo.push_back(static_cast<int>(i));
      else if (st == 1) up.push_back(static_cast<int>(i));
    }
    auto sol = polish(p, lo, up);
    if (!sol) return std::nullopt;
    const Vec ax = p.A * sol->first;
    const Vec& y = sol->second;
    const double scale = std::max(1.0, ax.size() ? ax.cwiseAbs().maxCoeff() : 0.0);
    const double tol = 1e-10 * scale;
    bool changed = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      int& st = state[static_cast<std::size_t>(i)];
      if (st == 2) continue;
      if (st == -1 && y[i] > 0.0) {
        st = 0;
        changed = true;
      } else if (st == 1 && y[i] < 0.0) {
        st = 0;
        changed = true;
      } else if (st == 0 && ax[i] < p.l[i] - tol) {
        st = -1;
        changed = true;
      } else if (st == 0 && ax[i] > p.u[i] + tol) {
        st = 1;
        changed = true;
      }
    }
    if (!changed) return sol;
  }
  return std::nullopt;
}

}  // namespace detail

/// Solves the QP. Throws std::domain_error if the problem is malformed.
/// kSolved means both KKT residuals are at most settings.eps.
inline QpSolution solve(const QpProblem& problem, const QpSettings& settings = {}) {
  problem.validate();
  const auto n = problem.P.rows();
  const auto m = problem.A.rows();

  Mat P = problem.P;
  Vec q = problem.q;
  Mat A = problem.A;
  Vec l = problem.l.cwiseMax(-kQpInfinity);
  Vec u = problem.u.cwiseMin(kQpInfinity);
  const detail::Scaling sc = detail::equilibrate(P, q, A, l, u, settings.scaling_iters);

  Vec rho_vec(m);
  auto set_rho = [&](double rho) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (l[i] <= -kQpInfinity && u[i] >= kQpInfinity) rho_vec[i] = 1e-6;
      else if (u[i] - l[i] < 1e-12) rho_vec[i] = 1e3 * rho;
      else rho_vec[i] = rho;
    }
  };
  double rho = settings.rho;
  set_rho(rho);

  auto factorize = [&]() {
    Mat K = P;
    K.diagonal().array() += settings.sigma;
    if (m > 0) K += A.transpose() * rho_vec.asDiagonal() * A;
    return Eigen::LDLT<Mat>(K);
  };
  Eigen::LDLT<Mat> kkt = factorize();

  // Scaled iterates.
  Vec x = Vec::Zero(n);
  if (settings.initial_x) {
    if (settings.initial_x->size() != n) throw std::domain_error("solve: initial_x size");
    x = sc.d.cwiseInverse().cwiseProduct(*settings.initial_x);
  }
  Vec z = m > 0 ? detail::project_box(A * x, l, u) : Vec();
  Vec y = Vec::Zero(m);

  QpSolution best;
  auto unscale = [&](const Vec& xs, const Vec& ys) {
    Vec xu = sc.d.cwiseProduct(xs);
    Vec yu = m > 0 ? Vec(sc.e.cwiseProduct(ys) / sc.c) : Vec();
    return std::make_pair(xu, yu);
  };
  auto evaluate = [&](const Vec& xu, const Vec& yu, int iters, bool polished) {
    QpSolution s;
    s.x = xu;
    s.y = m > 0 ? yu : Vec();
    s.iterations = iters;
    s.primal_residual = primal_residual(problem, xu);
    s.dual_residual = m > 0 ? dual_residual(problem, xu, yu) : dual_residual(problem, xu, Vec());
    s.objective = problem.objective(xu);
    s.polished = polished;
    s.status = (s.primal_residual <= settings.eps && s.dual_residual <= settings.eps)
                   ? QpStatus::kSolved
                   : QpStatus::kMaxIterations;
    return s;
  };

  double best_prim = std::numeric_limits<double>::infinity();
  int last_improvement = 0;
  int last_polish = -1000000;
  Vec x_prev = x;
  Vec y_prev = y;

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    x_prev = x;
    y_prev = y;
    Vec rhs = settings.sigma * x - q;
    if (m > 0) rhs += A.transpose() * (rho_vec.cwiseProduct(z) - y);
    const Vec x_tilde = kkt.solve(rhs);
    x = settings.alpha * x_tilde + (1.0 - settings.alpha) * x_prev;
    if (m > 0) {
      const Vec z_tilde = A * x_tilde;
      const Vec z_relaxed = settings.alpha * z_tilde + (1.0 - settings.alpha) * z;
      const Vec z_next =
          detail::project_box(z_relaxed + rho_vec.cwiseInverse().cwiseProduct(y), l, u);
      y += rho_vec.cwiseProduct(z_relaxed - z_next);
      z = z_next;
    }

    if (iter % settings.check_interval != 0 && iter != settings.max_iter) continue;

    // Residuals in scaled space drive rho adaptation.
    const Vec ax = m > 0 ? Vec(A * x) : Vec();
    const double prim_s = m > 0 ? (ax - z).cwiseAbs().maxCoeff() : 0.0;
    Vec grad = P * x + q;
    if (m > 0) grad += A.transpose() * y;
    const double dual_s = n > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;

    auto [xu, yu] = unscale(x, y);
    QpSolution current = evaluate(xu, yu, iter, false);
    if (current.status == QpStatus::kSolved) return current;
    if (current.primal_residual + current.dual_residual <
        best.primal_residual + best.dual_residual) {
      best = current;
    }

    // Primal infeasibility certificate from the change in y.
    if (m > 0) {
      const Vec dy = y - y_prev;
      const double dy_norm = dy.cwiseAbs().maxCoeff();
      if (dy_norm > 1e-10) {
        const double at_dy = (sc.d.cwiseInverse().asDiagonal() * (A.transpose() * dy))
                                 .cwiseAbs()
                                 .maxCoeff();
        double support = 0.0;
        bool bounded = true;
        for (Eigen::Index i = 0; i < m; ++i) {
          if (dy[i] > 0.0) {
            if (u[i] >= kQpInfinity) bounded = false;
            else support += u[i] * dy[i];
          } else if (dy[i] < 0.0) {
            if (l[i] <= -kQpInfinity) bounded = false;
            else support += l[i] * dy[i];
          }
        }
        const double dy_unscaled = sc.e.cwiseProduct(dy).cwiseAbs().maxCoeff();
        constexpr double kCertTol = 1e-7;
        if (bounded && at_dy <= kCertTol * dy_unscaled && support < -kCertTol * dy_unscaled) {
          best.status = QpStatus::kInfeasible;
          best.iterations = iter;
          return best;
        }
      }
    }

    // Active-set guess from the current iterate.
    auto try_polish = [&]() -> std::optional<QpSolution> {
      std::vector<int> lower_active;
      std::vector<int> upper_active;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (z[i] - l[i] < -y[i]) lower_active.push_back(static_cast<int>(i));
        else if (u[i] - z[i] < y[i]) upper_active.push_back(static_cast<int>(i));
      }
      auto pol = detail::refine_active_set(problem, lower_active, upper_active);
      if (!pol) return std::nullopt;
      QpSolution polished = evaluate(pol->first, pol->second, iter, true);
      if (polished.status != QpStatus::kSolved) return std::nullopt;
      return polished;
    };

    // Polish once the iterates are reasonably converged.
    const double loose = 1e-2;
    const double zn = m > 0 ? std::max(ax.cwiseAbs().maxCoeff(), z.cwiseAbs().maxCoeff()) : 0.0;
    const double gn = std::max(
        {(P * x).cwiseAbs().maxCoeff(), q.size() ? q.cwiseAbs().maxCoeff() : 0.0,
         m > 0 ? (A.transpose() * y).cwiseAbs().maxCoeff() : 0.0});
    const bool near = prim_s <= loose * (1.0 + zn) && dual_s <= loose * (1.0 + gn);
    if (settings.polish && near && iter - last_polish >= 100) {
      last_polish = iter;
      if (auto pol = try_polish()) return *pol;
    }

    // Stagnation: no primal progress over a long window.
    if (current.primal_residual < 0.99 * best_prim) {
      best_prim = current.primal_residual;
      last_improvement = iter;
    } else if (iter - last_improvement >= settings.stagnation_window &&
               current.primal_residual > 1e3 * settings.eps) {
      if (settings.polish) {
        if (auto pol = try_polish()) return *pol;
      }
      best.status = QpStatus::kInfeasible;
      best.iterations = iter;
      return best;
    }

    if (settings.adaptive_rho && m > 0) {
      const double prim_n = prim_s / (1e-10 + zn);
      const double dual_n = dual_s / (1e-10 + gn);
      const double ratio = std::sqrt(prim_n / (1e-10 + dual_n));
      const double new_rho = std::clamp(rho * ratio, 1e-6, 1e6);
      if (new_rho > 5.0 * rho || new_rho < 0.2 * rho) {
        rho = new_rho;
        set_rho(rho);
        kkt = factorize();
      }
    }
  }
  best.iterations = settings.max_iter;
  if (best.status == QpStatus::kSolved) best.status = QpStatus::kMaxIterations;
  return best;
}

}  // namespace stcorridor
