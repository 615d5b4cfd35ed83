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

// Spatio-temporal corridors in the position-time plane.
//
// Upper bounds are concave and lower bounds convex piecewise-linear functions
// of time. Corridors are generated from sampled obstacle occupancy in three
// shapes: general convex (the sampled bound itself, split where its
// curvature changes sign), trapezoidal (one affine bound per interval) and
// rectangular (one constant bound per interval).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stcorridor/error.hpp"

namespace stcorridor {

/// Slope-monotonicity tolerance used by every shape test.
inline constexpr double kShapeTolerance = 1e-9;

/// Upper-bound value meaning "unconstrained".
inline constexpr double kFreeSpaceCap = 10000.0;

enum class ShapeTag { kConcave, kConvex, kUnconstrained };

/// Result of classifying sampled data. kAffine satisfies both tests.
enum class Shape { kConcave, kConvex, kAffine, kNeither };

inline std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::kConcave: return "concave";
    case Shape::kConvex: return "convex";
    case Shape::kAffine: return "affine";
    case Shape::kNeither: return "neither";
  }
  return "?";
}

/// Time-sorted samples of a bound.
struct Samples {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
};

namespace detail {

inline void require_valid_samples(const std::vector<double>& times,
                                  const std::vector<double>& values, const char* who) {
  if (times.size() != values.size()) {
    throw std::domain_error(std::string(who) + ": times and values differ in length");
  }
  if (times.size() < 2) {
    throw std::domain_error(std::string(who) + ": need at least two samples");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw std::domain_error(std::string(who) + ": times must be strictly increasing");
    }
  }
}

inline double interpolate(const std::vector<double>& times, const std::vector<double>& values,
                          double t) {
  const double span = times.back() - times.front();
  const double slack = 1e-12 * std::max(1.0, span);
  if (t < times.front() - slack || t > times.back() + slack) {
    throw std::domain_error("eval_bound: t = " + std::to_string(t) + " outside [" +
                            std::to_string(times.front()) + ", " +
                            std::to_string(times.back()) + "]");
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  if (it == times.end()) return values.back();
  const auto k = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[k - 1];
  const double t1 = times[k];
  if (t == t0) return values[k - 1];
  const double w = (t - t0) / (t1 - t0);
  return values[k - 1] + w * (values[k] - values[k - 1]);
}

}  // namespace detail

/// Classifies samples by monotonicity of consecutive slopes. Throws on
/// duplicate or unsorted times.
inline Shape check_shape(const std::vector<double>& times, const std::vector<double>& values,
                         double tol = kShapeTolerance) {
  detail::require_valid_samples(times, values, "check_shape");
  bool concave = true;
  bool convex = true;
  double prev_slope = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double slope = (values[k] - values[k - 1]) / (times[k] - times[k - 1]);
    if (k > 1) {
      if (slope > prev_slope + tol) concave = false;
      if (slope < prev_slope - tol) convex = false;
    }
    prev_slope = slope;
  }
  if (concave && convex) return Shape::kAffine;
  if (concave) return Shape::kConcave;
  if (convex) return Shape::kConvex;
  return Shape::kNeither;
}

inline Shape check_shape(const Samples& s, double tol = kShapeTolerance) {
  return check_shape(s.times, s.values, tol);
}

class PiecewiseLinearBound {
 public:
  PiecewiseLinearBound(std::vector<double> times, std::vector<double> values,
                       ShapeTag tag = ShapeTag::kUnconstrained)
      : times_(std::move(times)), values_(std::move(values)), tag_(tag) {
    detail::require_valid_samples(times_, values_, "PiecewiseLinearBound");
    const Shape shape = check_shape(times_, values_);
    if (tag_ == ShapeTag::kConcave && shape != Shape::kConcave && shape != Shape::kAffine) {
      throw std::domain_error("PiecewiseLinearBound: values are not concave");
    }
    if (tag_ == ShapeTag::kConvex && shape != Shape::kConvex && shape != Shape::kAffine) {
      throw std::domain_error("PiecewiseLinearBound: values are not convex");
    }
  }

  static PiecewiseLinearBound constant(double value, double t_start, double t_end,
                                       ShapeTag tag = ShapeTag::kUnconstrained) {
    return PiecewiseLinearBound({t_start, t_end}, {value, value}, tag);
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  ShapeTag tag() const { return tag_; }
  double t_start() const { return times_.front(); }
  double t_end() const { return times_.back(); }

  double operator()(double t) const { return detail::interpolate(times_, values_, t); }

  /// Same function on [a, b], with interpolated end breakpoints. Concavity and
  /// convexity survive restriction, so the tag is kept.
  PiecewiseLinearBound restrict(double a, double b) const {
    if (!(b > a)) throw std::domain_error("PiecewiseLinearBound::restrict: empty interval");
    std::vector<double> t{a};
    std::vector<double> v{(*this)(a)};
    for (std::size_t k = 0; k < times_.size(); ++k) {
      if (times_[k] > a && times_[k] < b) {
        t.push_back(times_[k]);
        v.push_back(values_[k]);
      }
    }
    t.push_back(b);
    v.push_back((*this)(b));
    return PiecewiseLinearBound(std::move(t), std::move(v), tag_);
  }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  ShapeTag tag_;
};

inline double eval_bound(const PiecewiseLinearBound& b, double t) { return b(t); }

/// Region between a concave upper and a convex lower bound over
/// [t_start, t_end].
class Corridor {
 public:
  /// Throws std::domain_error when the bounds do not cover the interval or
  /// have the wrong shape, and InfeasibleError when lower exceeds upper.
  Corridor(double t_start, double t_end, PiecewiseLinearBound upper, PiecewiseLinearBound lower)
      : t_start_(t_start), t_end_(t_end), upper_(std::move(upper)), lower_(std::move(lower)) {
    if (!(t_end_ > t_start_)) throw std::domain_error("Corridor: empty interval");
    const double slack = 1e-12 * std::max(1.0, std::abs(t_end_));
    for (const auto* b : {&upper_, &lower_}) {
      if (b->t_start() > t_start_ + slack || b->t_end() < t_end_ - slack) {
        throw std::domain_error("Corridor: bound does not cover the interval");
      }
    }
    if (upper_.tag() == ShapeTag::kConvex) {
      throw std::domain_error("Corridor: upper bound must be concave");
    }
    if (lower_.tag() == ShapeTag::kConcave) {
      throw std::domain_error("Corridor: lower bound must be convex");
    }
    // Both bounds are linear between merged breakpoints, so checking the
    // merged set covers every crossing.
    for (double t : merged_breakpoints()) {
      if (lower_(t) > upper_(t)) {
        throw InfeasibleError("Corridor: lower bound exceeds upper bound at t = " +
                              std::to_string(t));
      }
    }
  }

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t_start_; }
  const PiecewiseLinearBound& upper() const { return upper_; }
  const PiecewiseLinearBound& lower() const { return lower_; }

  std::vector<double> merged_breakpoints() const {
    std::vector<double> ts{t_start_, t_end_};
    for (const auto* b : {&upper_, &lower_}) {
      for (double t : b->times()) {
        if (t > t_start_ && t < t_end_) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
  }

  /// Corridor restricted to [a, b] within its interval.
  Corridor restrict(double a, double b) const {
    return Corridor(a, b, upper_.restrict(a, b), lower_.restrict(a, b));
  }

 private:
  double t_start_;
  double t_end_;
  PiecewiseLinearBound upper_;
  PiecewiseLinearBound lower_;
};

/// One constant-acceleration phase of an obstacle's motion.
struct AccelPhase {
  double accel = 0.0;     // m/s^2
  double duration = 0.0;  // s
};

/// Sampled rear-bumper position of an obstacle along the ego path.
/// positions[k] is the position at time k * dt.
struct ObstacleTrace {
  double appear_time = 0.0;
  double dt = 0.1;
  std::vector<double> positions;
  double margin = 0.0;

  /// Linear interpolation; beyond the last sample the final velocity is held.
  double position_at(double t) const {
    if (positions.empty()) throw std::domain_error("ObstacleTrace: empty trace");
    if (positions.size() == 1 || t <= 0.0) return positions.front();
    const double x = t / dt;
    const auto last = positions.size() - 1;
    if (x >= static_cast<double>(last)) {
      const double v = (positions[last] - positions[last - 1]) / dt;
      return positions[last] + v * (t - static_cast<double>(last) * dt);
    }
    const auto k = static_cast<std::size_t>(std::floor(x));
    const double w = x - static_cast<double>(k);
    return positions[k] + w * (positions[k + 1] - positions[k]);
  }

  /// Trace of a vehicle that appears at `appear_time` at `position` with
  /// `speed` and then runs through `phases` (constant speed afterwards).
  /// Speed never goes negative. Samples cover [0, horizon].
  static ObstacleTrace from_kinematics(double appear_time, double position, double speed,
                                       const std::vector<AccelPhase>& phases, double margin,
                                       double horizon, double dt = 0.1) {
    if (!(dt > 0.0) || !(horizon > 0.0)) {
      throw std::domain_error("ObstacleTrace::from_kinematics: dt and horizon must be positive");
    }
    if (margin < 0.0) throw std::domain_error("ObstacleTrace: negative margin");
    ObstacleTrace trace;
    trace.appear_time = appear_time;
    trace.dt = dt;
    trace.margin = margin;
    const auto count = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9)) + 1;
    trace.positions.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double t = static_cast<double>(k) * dt;
      trace.positions.push_back(kinematic_position(t - appear_time, position, speed, phases));
    }
    return trace;
  }

  /// Position after `elapsed` seconds of the phase schedule (elapsed <= 0
  /// returns the start position).
  static double kinematic_position(double elapsed, double position, double speed,
                                   const std::vector<AccelPhase>& phases) {
    if (elapsed <= 0.0) return position;
    double s = position;
    double v = speed;
    double remaining = elapsed;
    for (const auto& ph : phases) {
      if (remaining <= 0.0) break;
      double step = std::min(remaining, ph.duration);
      if (ph.accel < 0.0 && v + ph.accel * step < 0.0) {
        const double to_stop = -v / ph.accel;
        s += v * to_stop + 0.5 * ph.accel * to_stop * to_stop;
        v = 0.0;
      } else {
        s += v * step + 0.5 * ph.accel * step * step;
        v += ph.accel * step;
      }
      remaining -= ph.duration;
    }
    if (remaining > 0.0) s += v * remaining;
    return s;
  }
};

/// Uniform samples on [0, horizon] of min(position(t) - margin, cap), or the
/// cap before the obstacle appears.
inline Samples occupancy_to_upper_bound(const ObstacleTrace& obs, double horizon, double dt,
                                        double cap = kFreeSpaceCap) {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw std::domain_error("occupancy_to_upper_bound: dt and horizon must be positive");
  }
  if (obs.positions.empty()) throw std::domain_error("occupancy_to_upper_bound: empty trace");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Samples out;
  out.times.reserve(steps + 1);
  out.values.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, horizon);
    out.times.push_back(t);
    if (t < obs.appear_time - 1e-9) {
      out.values.push_back(cap);
    } else {
      out.values.push_back(std::min(obs.position_at(t) - obs.margin, cap));
    }
  }
  if (out.times.back() < horizon) {
    out.times.push_back(horizon);
    out.values.push_back(std::min(obs.position_at(horizon) - obs.margin, cap));
  }
  return out;
}

/// Pointwise minimum of bounds sampled on the same grid.
inline Samples pointwise_min(const Samples& a, const Samples& b) {
  if (a.times != b.times) throw std::domain_error("pointwise_min: grids differ");
  Samples out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = std::min(a.values[k], b.values[k]);
  return out;
}

enum class CorridorVariant { kGeneralConvex, kTrapezoid, kRectangle };

inline std::string_view to_string(CorridorVariant v) {
  switch (v) {
    case CorridorVariant::kGeneralConvex: return "convex";
    case CorridorVariant::kTrapezoid: return "trap";
    case CorridorVariant::kRectangle: return "rect";
  }
  return "?";
}

inline std::optional<CorridorVariant> parse_variant(std::string_view name) {
  if (name == "convex" || name == "general_convex") return CorridorVariant::kGeneralConvex;
  if (name == "trap" || name == "trapezoid") return CorridorVariant::kTrapezoid;
  if (name == "rect" || name == "rectangle") return CorridorVariant::kRectangle;
  return std::nullopt;
}

namespace detail {

// Samples strictly inside (a, b) plus interpolated values at a and b.
inline Samples window(const Samples& s, double a, double b) {
  if (!(b > a)) throw std::domain_error("corridor fit: empty interval");
  Samples w;
  w.times.push_back(a);
  w.values.push_back(interpolate(s.times, s.values, a));
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.times[k] > a && s.times[k] < b) {
      w.times.push_back(s.times[k]);
      w.values.push_back(s.values[k]);
    }
  }
  w.times.push_back(b);
  w.values.push_back(interpolate(s.times, s.values, b));
  return w;
}

inline PiecewiseLinearBound floor_bound(double floor, double a, double b) {
  return PiecewiseLinearBound::constant(floor, a, b, ShapeTag::kConvex);
}

// Secant through the window ends, shifted down until it touches the samples.
// Values are clipped to the samples so rounding can never lift the line above
// them.
inline PiecewiseLinearBound shifted_secant(const Samples& w) {
  const double a = w.times.front();
  const double b = w.times.back();
  const double va = w.values.front();
  const double vb = w.values.back();
  auto secant = [&](double t) { return va + (vb - va) * (t - a) / (b - a); };
  double shift = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    shift = std::max(shift, secant(w.times[k]) - w.values[k]);
  }
  std::vector<double> values(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    values[k] = std::min(secant(w.times[k]) - shift, w.values[k]);
  }
  return PiecewiseLinearBound(w.times, std::move(values), ShapeTag::kConcave);
}

}  // namespace detail

/// Affine upper bound on [a, b]: the secant of the samples, shifted down by
/// its largest excursion above them.
inline Corridor trapezoid_fit(const Samples& samples, double a, double b, double floor = 0.0) {
  const Samples w = detail::window(samples, a, b);
  return Corridor(a, b, detail::shifted_secant(w), detail::floor_bound(floor, a, b));
}

/// Constant upper bound on [a, b]: the minimum of the samples there, or of
/// the trapezoid bound when that is lower (possible only on convex data).
/// This keeps rectangle <= trapezoid pointwise.
inline Corridor rectangle_fit(const Samples& samples, double a, double b, double floor = 0.0) {
  const Samples w = detail::window(samples, a, b);
  const PiecewiseLinearBound trap = detail::shifted_secant(w);
  const double lowest = std::min(*std::min_element(w.values.begin(), w.values.end()),
                                 *std::min_element(trap.values().begin(), trap.values().end()));
  return Corridor(a, b, PiecewiseLinearBound::constant(lowest, a, b, ShapeTag::kConcave),
                  detail::floor_bound(floor, a, b));
}

/// Splits a sampled upper bound into corridors with concave upper bounds.
///
/// Interior breakpoints are classified by the jump in slope. Runs of convex
/// breakpoints not separated by a concave one form convex stretches [p, q].
/// A stretch of a single breakpoint (a kink such as a V vertex) is only a
/// split point. A longer stretch becomes its own corridor bounded by the
/// shifted secant, extended to the end of the data when the remaining part
/// is affine. Everything else keeps the samples themselves as bound.
inline std::vector<Corridor> split_general_convex(const Samples& samples, double floor = 0.0) {
  detail::require_valid_samples(samples.times, samples.values, "split_general_convex");
  const std::size_t n = samples.size();
  if (n < 3) throw std::domain_error("split_general_convex: need at least three samples");

  // +1 convex kink, -1 concave kink, 0 flat.
  std::vector<int> kind(n, 0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double before =
        (samples.values[j] - samples.values[j - 1]) / (samples.times[j] - samples.times[j - 1]);
    const double after =
        (samples.values[j + 1] - samples.values[j]) / (samples.times[j + 1] - samples.times[j]);
    if (after > before + kShapeTolerance) kind[j] = 1;
    else if (after < before - kShapeTolerance) kind[j] = -1;
  }

  struct Stretch {
    std::size_t first;
    std::size_t last;
  };
  auto has_concave_kink = [&](std::size_t from, std::size_t to) {
    for (std::size_t m = from + 1; m < to; ++m) {
      if (kind[m] == -1) return true;
    }
    return false;
  };
  std::vector<Stretch> stretches;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (kind[j] != 1) continue;
    if (!stretches.empty() && !has_concave_kink(stretches.back().last, j)) {
      stretches.back().last = j;
    } else {
      stretches.push_back({j, j});
    }
  }
  if (!stretches.empty()) {
    auto& head = stretches.front();
    if (head.last > head.first && !has_concave_kink(0, head.first)) head.first = 0;
    auto& tail = stretches.back();
    if (tail.last > tail.first && !has_concave_kink(tail.last, n - 1)) tail.last = n - 1;
  }

  struct Piece {
    std::size_t first;
    std::size_t last;
    bool convex;
  };
  std::vector<Piece> pieces;
  std::size_t cursor = 0;
  for (const auto& st : stretches) {
    if (st.first > cursor) pieces.push_back({cursor, st.first, false});
    if (st.last > st.first) pieces.push_back({st.first, st.last, true});
    cursor = std::max(cursor, st.last);
  }
  if (cursor < n - 1) pieces.push_back({cursor, n - 1, false});

  std::vector<Corridor> out;
  out.reserve(pieces.size());
  for (const auto& p : pieces) {
    const double a = samples.times[p.first];
    const double b = samples.times[p.last];
    std::vector<double> t(samples.times.begin() + static_cast<std::ptrdiff_t>(p.first),
                          samples.times.begin() + static_cast<std::ptrdiff_t>(p.last) + 1);
    std::vector<double> v(samples.values.begin() + static_cast<std::ptrdiff_t>(p.first),
                          samples.values.begin() + static_cast<std::ptrdiff_t>(p.last) + 1);
    if (p.convex) {
      out.emplace_back(a, b, detail::shifted_secant(Samples{std::move(t), std::move(v)}),
                       detail::floor_bound(floor, a, b));
    } else {
      out.emplace_back(a, b, PiecewiseLinearBound(std::move(t), std::move(v), ShapeTag::kConcave),
                       detail::floor_bound(floor, a, b));
    }
  }
  return out;
}

/// Corridors of the requested shape. All variants share the tiling of the
/// general convex split, so their feasible sets are nested whenever the
/// fitted bounds are.
inline std::vector<Corridor> make_corridors(const Samples& samples, CorridorVariant variant,
                                            double floor = 0.0) {
  std::vector<Corridor> general = split_general_convex(samples, floor);
  if (variant == CorridorVariant::kGeneralConvex) return general;
  std::vector<Corridor> out;
  out.reserve(general.size());
  for (const auto& c : general) {
    out.push_back(variant == CorridorVariant::kTrapezoid
                      ? trapezoid_fit(samples, c.t_start(), c.t_end(), floor)
                      : rectangle_fit(samples, c.t_start(), c.t_end(), floor));
  }
  return out;
}

}  // namespace stcorridor
