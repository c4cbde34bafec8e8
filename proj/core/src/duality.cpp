// Copyright 2026 The Smoothcert Authors
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
#include "smoothcert/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include <nlohmann/json.hpp>

#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"

namespace smoothcert {

namespace {

// exp(eps) saturates instead of overflowing; profiles are bounded so the
// saturated value only shows up in branches that are not selected anyway.
constexpr double kEpsCap = 700.0;

double safe_exp(double x) { return std::exp(std::clamp(x, -kEpsCap, kEpsCap)); }

}  // namespace

TradeoffCurve::TradeoffCurve(std::vector<CurveKnot> knots)
    : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw DomainError("tradeoff curve needs >= 2 knots");
  if (knots_.front().alpha != 0 || knots_.back().alpha != 1) {
    throw DomainError("tradeoff curve must span alpha in [0,1]");
  }
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const auto& k = knots_[i];
    if (k.value < 0 || k.value > 1) throw DomainError("curve value out of [0,1]");
    if (k.value > 1 - k.alpha + 1e-12) {
      throw DomainError("curve must satisfy f(alpha) <= 1 - alpha");
    }
    if (i == 0) continue;
    const auto& p = knots_[i - 1];
    if (k.alpha <= p.alpha) throw DomainError("alphas must strictly increase");
    if (k.value > p.value + 1e-12) {
      throw DomainError("curve values must be non-increasing");
    }
    const double slope = (k.value - p.value) / (k.alpha - p.alpha);
    if (slope < prev_slope - 1e-9) {
      throw DomainError("curve must be convex");
    }
    prev_slope = slope;
  }
}

double TradeoffCurve::operator()(double alpha) const {
  if (alpha <= 0) return knots_.front().value;
  if (alpha >= 1) return knots_.back().value;
  const auto it = std::lower_bound(
      knots_.begin(), knots_.end(), alpha,
      [](const CurveKnot& k, double a) { return k.alpha < a; });
  const auto& hi = *it;
  if (hi.alpha == alpha) return hi.value;
  const auto& lo = *(it - 1);
  const double t = (alpha - lo.alpha) / (hi.alpha - lo.alpha);
  return lo.value + t * (hi.value - lo.value);
}

std::string TradeoffCurve::to_json_string() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& k : knots_) arr.push_back({k.alpha, k.value});
  nlohmann::json j;
  j["knots"] = std::move(arr);
  return j.dump();
}

TradeoffCurve TradeoffCurve::from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  std::vector<CurveKnot> knots;
  for (const auto& entry : j.at("knots")) {
    knots.push_back({entry.at(0).get<double>(), entry.at(1).get<double>()});
  }
  return TradeoffCurve(std::move(knots));
}

PrivacyProfile::PrivacyProfile(std::function<double(double)> evaluator,
                               std::vector<double> grid)
    : evaluator_(std::move(evaluator)), grid_(std::move(grid)) {
  if (!evaluator_) throw DomainError("profile needs an evaluator");
  if (grid_.empty()) throw DomainError("profile needs a non-empty grid");
  if (!std::is_sorted(grid_.begin(), grid_.end())) {
    throw DomainError("profile grid must be sorted");
  }
}

std::vector<double> PrivacyProfile::default_grid() {
  constexpr int kPoints = 4001;
  constexpr double kLo = -20.0, kHi = 20.0;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[static_cast<std::size_t>(i)] = kLo + (kHi - kLo) * i / (kPoints - 1);
  }
  return grid;
}

PrivacyProfile PrivacyProfile::identical(std::vector<double> grid) {
  return PrivacyProfile(
      [](double eps) { return std::max(0.0, 1.0 - safe_exp(eps)); },
      std::move(grid));
}

PrivacyProfile PrivacyProfile::gaussian(double shift_over_sigma,
                                        std::vector<double> grid) {
  const double mu = std::fabs(shift_over_sigma);
  if (mu == 0) return identical(std::move(grid));
  return PrivacyProfile(
      [mu](double eps) {
        const double value = normal_cdf(mu / 2 - eps / mu) -
                             safe_exp(eps) * normal_cdf(-mu / 2 - eps / mu);
        return std::clamp(value, 0.0, 1.0);
      },
      std::move(grid));
}

PrivacyProfile PrivacyProfile::from_pld(const DiscretePLD& pld,
                                        std::vector<double> grid) {
  auto cache = std::make_shared<PldProfileEvaluator>(pld);
  return PrivacyProfile([cache](double eps) { return (*cache)(eps); },
                        std::move(grid));
}

PrivacyProfile PrivacyProfile::from_curve(const TradeoffCurve& curve,
                                          std::vector<double> grid) {
  auto shared = std::make_shared<TradeoffCurve>(curve);
  return PrivacyProfile(
      [shared](double eps) { return primal_to_dual(*shared, eps); },
      std::move(grid));
}

PrivacyProfile PrivacyProfile::pointwise_max(
    std::vector<PrivacyProfile> profiles) {
  if (profiles.empty()) throw DomainError("pointwise_max of nothing");
  std::vector<double> grid = profiles.front().grid();
  auto shared =
      std::make_shared<std::vector<PrivacyProfile>>(std::move(profiles));
  return PrivacyProfile(
      [shared](double eps) {
        double best = 0;
        for (const auto& p : *shared) best = std::max(best, p(eps));
        return best;
      },
      std::move(grid));
}

namespace {

// Maximizes an objective over the grid, extends past the ends while the
// objective keeps rising there, then golden-sections between the evaluated
// neighbors of the best point. Every candidate is an attained objective
// value, so the result is a sound lower bound on the supremum.
double grid_supremum(const std::function<double(double)>& objective,
                     const std::vector<double>& grid) {
  std::vector<std::pair<double, double>> points;  // (eps, value)
  points.reserve(grid.size() + 64);
  for (double x : grid) points.emplace_back(x, objective(x));
  const double base_step =
      grid.size() > 1 ? std::max(grid[1] - grid[0], 1e-6) : 0.01;
  for (int dir : {-1, +1}) {
    double edge = dir < 0 ? grid.front() : grid.back();
    double edge_val =
        dir < 0 ? points.front().second : points[grid.size() - 1].second;
    double step = base_step;
    while (std::fabs(edge) < kEpsCap) {
      const double x = std::clamp(edge + dir * step, -kEpsCap, kEpsCap);
      if (x == edge) break;
      const double v = objective(x);
      points.emplace_back(x, v);
      if (v <= edge_val) break;
      edge = x;
      edge_val = v;
      step *= 2;
    }
  }
  std::sort(points.begin(), points.end());
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].second > points[best].second) best = i;
  }
  const double left = points[best == 0 ? 0 : best - 1].first;
  const double right = points[std::min(best + 1, points.size() - 1)].first;
  const double refined =
      left < right ? maximize_unimodal(objective, left, right, 1e-12)
                   : points[best].second;
  return std::max(points[best].second, refined);
}

}  // namespace

double dual_to_primal(const PrivacyProfile& profile, double alpha) {
  if (alpha < 0 || alpha > 1) throw DomainError("alpha must be in [0,1]");
  auto objective = [&profile, alpha](double eps) {
    return safe_exp(-eps) * (1.0 - profile(eps) - alpha);
  };
  const double sup = grid_supremum(objective, profile.grid());
  return std::clamp(sup, 0.0, 1.0 - alpha);
}

double primal_to_dual(const TradeoffCurve& curve, double epsilon) {
  // Knots of the left-continuous inverse f^-1: reflect (alpha, value) pairs,
  // keeping the smallest alpha on ties (flat tail at value 0), and extend
  // with f^-1(y) = 0 for y >= f(0).
  const auto& knots = curve.knots();
  std::vector<std::pair<double, double>> inverse;  // (y, f^-1(y))
  inverse.reserve(knots.size() + 1);
  for (std::size_t i = knots.size(); i-- > 0;) {
    const double y = knots[i].value;
    const double g = knots[i].alpha;
    if (!inverse.empty() && y <= inverse.back().first) {
      inverse.back().second = g;
    } else {
      inverse.emplace_back(y, g);
    }
  }
  if (inverse.back().first < 1) inverse.emplace_back(1.0, 0.0);
  // delta = 1 + sup_y (-e^eps y - f^-1(y)) = 1 - min over knots of
  // (e^eps y + f^-1(y)); the conjugate of a piecewise-linear convex function
  // attains its supremum at a knot.
  const double scale = safe_exp(epsilon);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& [y, g] : inverse) {
    lowest = std::min(lowest, scale * y + g);
  }
  return std::clamp(1.0 - lowest, 0.0, 1.0);
}

double opposite_profile(const PrivacyProfile& profile, double epsilon) {
  const auto& grid = profile.grid();
  if (-epsilon < grid.front() || -epsilon > grid.back()) {
    throw ExtrapolationError("profile grid does not cover -epsilon");
  }
  const double value = 1.0 - safe_exp(epsilon) * (1.0 - profile(-epsilon));
  return std::clamp(value, 0.0, 1.0);
}

double symmetric_dual_to_primal(const PrivacyProfile& profile, double alpha) {
  if (alpha < 0 || alpha > 1) throw DomainError("alpha must be in [0,1]");
  std::vector<double> half;
  half.push_back(0.0);
  for (double eps : profile.grid()) {
    if (eps > 0) half.push_back(eps);
  }
  auto direct = [&profile, alpha](double eps) {
    return safe_exp(-eps) * (1.0 - profile(eps) - alpha);
  };
  auto mirrored = [&profile, alpha](double eps) {
    return 1.0 - profile(eps) - safe_exp(eps) * alpha;
  };
  const double sup =
      std::max(grid_supremum(direct, half), grid_supremum(mirrored, half));
  return std::clamp(sup, 0.0, 1.0 - alpha);
}

double pointwise_min(std::span<const double> values) {
  if (values.empty()) throw DomainError("pointwise_min of an empty list");
  return *std::min_element(values.begin(), values.end());
}

std::function<double(double)> curve_pointwise_min(
    std::vector<std::function<double(double)>> curves) {
  if (curves.empty()) throw DomainError("pointwise min of no curves");
  auto shared = std::make_shared<std::vector<std::function<double(double)>>>(
      std::move(curves));
  return [shared](double alpha) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : *shared) best = std::min(best, c(alpha));
    return best;
  };
}

TradeoffCurve sample_tradeoff_curve(const PrivacyProfile& profile,
                                    const std::vector<double>& alphas) {
  if (alphas.size() < 2 || alphas.front() != 0 || alphas.back() != 1) {
    throw DomainError("alphas must span [0,1]");
  }
  std::vector<CurveKnot> points;
  points.reserve(alphas.size());
  for (double a : alphas) {
    double v = std::clamp(dual_to_primal(profile, a), 0.0, 1.0 - a);
    if (!points.empty()) v = std::min(v, points.back().value);
    points.push_back({a, v});
  }
  // Lower convex hull (monotone chain): removes round-off bumps and can only
  // lower the interpolated curve.
  std::vector<CurveKnot> hull;
  for (const auto& pt : points) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.alpha - a.alpha) * (pt.value - a.value) -
                           (pt.alpha - a.alpha) * (b.value - a.value);
      if (cross <= 0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  return TradeoffCurve(std::move(hull));
}

}  // namespace smoothcert
