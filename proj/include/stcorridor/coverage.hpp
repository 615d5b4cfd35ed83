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

// Search-space coverage: how far the highest reachable curve falls below the
// true free-space bound.
//
// For a concave bound f on [0, 1] and degree n, three sup-norm gaps are
// measured on a dense grid: f - CPETS, CPETS - curve and f - curve, where
// the curve uses s_i = f(i / n). Their decay rates are estimated by a least
// squares fit of log(gap) against log(n).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stcorridor/bezier.hpp"
#include "stcorridor/corridor.hpp"

namespace stcorridor {

/// max_k (f_k - g_k) over a shared grid.
inline double sup_gap(const std::vector<double>& f, const std::vector<double>& g) {
  if (f.size() != g.size()) throw std::domain_error("sup_gap: grids differ in length");
  if (f.empty()) throw std::domain_error("sup_gap: empty grid");
  double m = f[0] - g[0];
  for (std::size_t k = 1; k < f.size(); ++k) m = std::max(m, f[k] - g[k]);
  return m;
}

/// A smooth concave test bound on [0, 1].
struct BoundSpec {
  std::string name;
  std::function<double(double)> f;
};

inline BoundSpec quadratic_bound() {
  return {"quadratic", [](double t) { return 2.0 * t - t * t; }};
}
inline BoundSpec quartic_bound() {
  return {"quartic", [](double t) { return 1.0 - std::pow(2.0 * t - 1.0, 4); }};
}
/// Saturating curve log(1 + 9t) / log(10): smooth, increasing, concave.
inline BoundSpec logistic_bound() {
  return {"logistic", [](double t) { return std::log1p(9.0 * t) / std::log(10.0); }};
}
inline BoundSpec affine_bound() {
  return {"affine", [](double t) { return 0.25 + 0.5 * t; }};
}

inline std::optional<BoundSpec> builtin_bound(const std::string& name) {
  for (auto b : {quadratic_bound(), quartic_bound(), logistic_bound(), affine_bound()}) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

struct LogLogFit {
  bool defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  int points = 0;
};

/// Least squares fit of log(y) = slope * log(x) + intercept over points with
/// x >= min_x and y > 0. Undefined with fewer than two such points.
inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                            double min_x = 4.0) {
  if (x.size() != y.size()) throw std::domain_error("fit_loglog: length mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] >= min_x && y[k] > 1e-14) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  }
  LogLogFit fit;
  fit.points = static_cast<int>(lx.size());
  if (lx.size() < 2) return fit;
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.defined = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / m);
  return fit;
}

struct GapStudy {
  std::string bound_name;
  std::vector<int> degrees;
  std::vector<double> gap_f_cpets;
  std::vector<double> gap_cpets_curve;
  std::vector<double> gap_f_curve;
  LogLogFit slope_f_cpets;
  LogLogFit slope_cpets_curve;
  LogLogFit slope_f_curve;
  /// Every gap is zero: the bound is reproduced exactly and no rate exists.
  bool exact_cover = false;
};

/// Gaps for one degree on a uniform grid of [0, 1].
struct DegreeGaps {
  double f_cpets = 0.0;
  double cpets_curve = 0.0;
  double f_curve = 0.0;
};

inline DegreeGaps degree_gaps(const std::function<double(double)>& f, int n, int grid_size) {
  if (n < 1) throw std::domain_error("degree_gaps: degree must be positive");
  if (grid_size < 2) throw std::domain_error("degree_gaps: grid needs two points");
  std::vector<double> s(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) s[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n);
  const BezierSegment curve(s, 0.0, 1.0);

  std::vector<double> fv(static_cast<std::size_t>(grid_size));
  std::vector<double> pv(fv.size());
  std::vector<double> cv(fv.size());
  for (int k = 0; k < grid_size; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double t = static_cast<double>(k) / (grid_size - 1);
    fv[kk] = f(t);
    const double x = t * n;
    const int cell = std::min(n - 1, static_cast<int>(std::floor(x)));
    const double w = x - cell;
    pv[kk] = s[static_cast<std::size_t>(cell)] +
             w * (s[static_cast<std::size_t>(cell) + 1] - s[static_cast<std::size_t>(cell)]);
    cv[kk] = curve.eval_parameter(t);
  }
  return {sup_gap(fv, pv), sup_gap(pv, cv), sup_gap(fv, cv)};
}

/// Throws std::domain_error for an empty degree list, degrees below 2, or
/// degrees that are not strictly increasing.
inline GapStudy gap_study(const BoundSpec& bound, const std::vector<int>& degrees,
                          int grid_size = 4001) {
  if (degrees.empty()) throw std::domain_error("gap_study: no degrees");
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    if (degrees[k] < 2) throw std::domain_error("gap_study: degrees must be >= 2");
    if (k > 0 && degrees[k] <= degrees[k - 1]) {
      throw std::domain_error("gap_study: degrees must be strictly increasing");
    }
  }
  GapStudy study;
  study.bound_name = bound.name;
  study.degrees = degrees;
  for (int n : degrees) {
    const DegreeGaps g = degree_gaps(bound.f, n, grid_size);
    // Rounding can make an exact cover come out at -1e-17.
    study.gap_f_cpets.push_back(std::max(0.0, g.f_cpets));
    study.gap_cpets_curve.push_back(std::max(0.0, g.cpets_curve));
    study.gap_f_curve.push_back(std::max(0.0, g.f_curve));
  }
  std::vector<double> x(degrees.begin(), degrees.end());
  study.slope_f_cpets = fit_loglog(x, study.gap_f_cpets);
  study.slope_cpets_curve = fit_loglog(x, study.gap_cpets_curve);
  study.slope_f_curve = fit_loglog(x, study.gap_f_curve);
  constexpr double kExact = 1e-12;
  study.exact_cover = std::all_of(study.gap_f_curve.begin(), study.gap_f_curve.end(),
                                  [](double g) { return g <= kExact; }) &&
                      std::all_of(study.gap_f_cpets.begin(), study.gap_f_cpets.end(),
                                  [](double g) { return g <= kExact; });
  return study;
}

inline void write_gap_csv(std::ostream& os, const GapStudy& s) {
  os << "n,gap_f_cpets,gap_cpets_curve,gap_f_curve\n";
  os.precision(17);
  for (std::size_t k = 0; k < s.degrees.size(); ++k) {
    os << s.degrees[k] << ',' << s.gap_f_cpets[k] << ',' << s.gap_cpets_curve[k] << ','
       << s.gap_f_curve[k] << '\n';
  }
}

/// Upper bound of whichever corridor contains t (the earlier one at joins).
inline double corridor_upper_at(const std::vector<Corridor>& corridors, double t) {
  for (const auto& c : corridors) {
    if (t <= c.t_end() + 1e-12) return c.upper()(std::max(t, c.t_start()));
  }
  throw std::domain_error("corridor_upper_at: t beyond the last corridor");
}

/// Integral over the sample grid (trapezoidal rule) of the true bound minus
/// the corridor upper bound, for corridors that tile the sample span.
inline double uncovered_area(const Samples& samples, const std::vector<Corridor>& corridors) {
  double area = 0.0;
  double prev = samples.values.front() - corridor_upper_at(corridors, samples.times.front());
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const double cur = samples.values[k] - corridor_upper_at(corridors, samples.times[k]);
    area += 0.5 * (prev + cur) * (samples.times[k] - samples.times[k - 1]);
    prev = cur;
  }
  return area;
}

inline double uncovered_area(const Samples& samples, CorridorVariant variant) {
  return uncovered_area(samples, make_corridors(samples, variant));
}

}  // namespace stcorridor
