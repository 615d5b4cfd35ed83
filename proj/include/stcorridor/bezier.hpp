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

// Scaled Bezier segments in one spatial dimension.
//
// A segment of degree n carries n+1 control values s_0..s_n in physical units
// and a time interval [t_start, t_end]. Evaluation maps t to the curve
// parameter u = (t - t_start) / h with h = t_end - t_start, so derivatives
// pick up a factor 1/h per order.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stcorridor {

inline constexpr int kMaxBezierDegree = 64;

/// Binomial coefficient C(n, i) by multiplicative recurrence.
inline double binomial(int n, int i) {
  if (i < 0 || i > n) {
    throw std::domain_error("binomial: index out of range");
  }
  if (i > n - i) i = n - i;
  double c = 1.0;
  for (int k = 1; k <= i; ++k) {
    c = c * static_cast<double>(n - i + k) / static_cast<double>(k);
  }
  return c;
}

/// B^n_i(u) = C(n,i) u^i (1-u)^(n-i).
inline double bernstein_basis(int n, int i, double u) {
  if (n < 0 || n > kMaxBezierDegree) {
    throw std::domain_error("bernstein_basis: degree must be in [0, 64]");
  }
  if (i < 0 || i > n) {
    throw std::domain_error("bernstein_basis: index " + std::to_string(i) +
                            " outside [0, " + std::to_string(n) + "]");
  }
  // std::pow(0, 0) is 1, which gives the right endpoint values.
  return binomial(n, i) * std::pow(u, i) * std::pow(1.0 - u, n - i);
}

/// All n+1 basis values at u.
inline std::vector<double> bernstein_row(int n, double u) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) row[static_cast<std::size_t>(i)] = bernstein_basis(n, i, u);
  return row;
}

class BezierSegment {
 public:
  /// Throws std::domain_error if the interval is empty or the degree is
  /// outside [0, 64]. Degree 0 (a constant) only arises as a derivative.
  BezierSegment(std::vector<double> control_values, double t_start, double t_end)
      : control_(std::move(control_values)), t_start_(t_start), t_end_(t_end) {
    if (control_.empty()) {
      throw std::domain_error("BezierSegment: needs at least one control value");
    }
    if (degree() > kMaxBezierDegree) {
      throw std::domain_error("BezierSegment: degree above 64");
    }
    if (!(t_end_ - t_start_ > 0.0)) {
      throw std::domain_error("BezierSegment: t_end must exceed t_start");
    }
  }

  int degree() const { return static_cast<int>(control_.size()) - 1; }
  std::span<const double> control_values() const { return control_; }
  double control(int i) const { return control_.at(static_cast<std::size_t>(i)); }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t_start_; }

  /// Curve parameter for time t; throws if t is outside the interval.
  double parameter(double t) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(t_end_));
    if (t < t_start_ - slack || t > t_end_ + slack) {
      throw std::domain_error("BezierSegment: t = " + std::to_string(t) +
                              " outside [" + std::to_string(t_start_) + ", " +
                              std::to_string(t_end_) + "]");
    }
    const double u = (t - t_start_) / duration();
    return std::clamp(u, 0.0, 1.0);
  }

  /// De Casteljau evaluation at curve parameter u in [0, 1].
  double eval_parameter(double u) const {
    std::vector<double> work(control_);
    for (std::size_t level = work.size() - 1; level > 0; --level) {
      for (std::size_t k = 0; k < level; ++k) {
        work[k] = (1.0 - u) * work[k] + u * work[k + 1];
      }
    }
    return work.front();
  }

  bool operator==(const BezierSegment&) const = default;

 private:
  std::vector<double> control_;
  double t_start_;
  double t_end_;
};

inline double eval(const BezierSegment& seg, double t) {
  return seg.eval_parameter(seg.parameter(t));
}

/// Hodograph: degree n-1 on the same interval, control values
/// n (s_{i+1} - s_i) / h.
inline BezierSegment derivative(const BezierSegment& seg) {
  const int n = seg.degree();
  if (n < 1) {
    throw std::domain_error("derivative: segment has degree 0");
  }
  const double scale = static_cast<double>(n) / seg.duration();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] = scale * (seg.control(i + 1) - seg.control(i));
  }
  return BezierSegment(std::move(d), seg.t_start(), seg.t_end());
}

/// k-th derivative segment.
inline BezierSegment derivative(const BezierSegment& seg, int order) {
  BezierSegment out = seg;
  for (int k = 0; k < order; ++k) out = derivative(out);
  return out;
}

/// Values at t of the two degree-(n-1) sub-curves built from s_0..s_{n-1} and
/// s_1..s_n. Their (1-u, u) blend is the curve value.
inline std::pair<double, double> split_recurrence(const BezierSegment& seg, double t) {
  const int n = seg.degree();
  if (n < 1) {
    throw std::domain_error("split_recurrence: segment has degree 0");
  }
  const double u = seg.parameter(t);
  const auto cv = seg.control_values();
  const BezierSegment head(std::vector<double>(cv.begin(), cv.end() - 1), seg.t_start(),
                           seg.t_end());
  const BezierSegment tail(std::vector<double>(cv.begin() + 1, cv.end()), seg.t_start(),
                           seg.t_end());
  return {head.eval_parameter(u), tail.eval_parameter(u)};
}

/// Time-reversed segment: eval(reverse(seg), t_start + t_end - t) == eval(seg, t).
inline BezierSegment reverse(const BezierSegment& seg) {
  const auto cv = seg.control_values();
  return BezierSegment(std::vector<double>(cv.rbegin(), cv.rend()), seg.t_start(), seg.t_end());
}

}  // namespace stcorridor
