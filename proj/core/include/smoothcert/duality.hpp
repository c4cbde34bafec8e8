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
#ifndef SMOOTHCERT_DUALITY_HPP_
#define SMOOTHCERT_DUALITY_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smoothcert/pld.hpp"

namespace smoothcert {

struct CurveKnot {
  double alpha;
  double value;
  bool operator==(const CurveKnot&) const = default;
};

/// Convex, continuous, non-increasing piecewise-linear f : [0,1] -> [0,1]
/// with f(alpha) <= 1 - alpha. The primal (hypothesis-testing)
/// representation of a mechanism's privacy.
class TradeoffCurve {
 public:
  explicit TradeoffCurve(std::vector<CurveKnot> knots);

  const std::vector<CurveKnot>& knots() const { return knots_; }
  double operator()(double alpha) const;

  std::string to_json_string() const;
  static TradeoffCurve from_json_string(const std::string& text);

 private:
  std::vector<CurveKnot> knots_;
};

/// Evaluable privacy profile eps -> delta(eps): a closed form, a PLD-backed
/// evaluator, or a transformed profile. Carries the epsilon grid used when a
/// supremum over epsilon has to be approximated. Immutable and cheap to
/// share across threads.
class PrivacyProfile {
 public:
  PrivacyProfile(std::function<double(double)> evaluator,
                 std::vector<double> grid);

  double operator()(double epsilon) const { return evaluator_(epsilon); }
  const std::vector<double>& grid() const { return grid_; }

  /// Uniform 4001-point grid on [-20, 20]: e^eps spaced geometrically.
  static std::vector<double> default_grid();

  /// Profile of an identical pair: max(0, 1 - e^eps).
  static PrivacyProfile identical(std::vector<double> grid = default_grid());
  /// Analytic profile of (N(mu, 1), N(0, 1)) with mu = shift/stddev.
  static PrivacyProfile gaussian(double shift_over_sigma,
                                 std::vector<double> grid = default_grid());
  static PrivacyProfile from_pld(const DiscretePLD& pld,
                                 std::vector<double> grid = default_grid());
  /// The exact conjugate-based profile of a piecewise-linear curve.
  static PrivacyProfile from_curve(const TradeoffCurve& curve,
                                   std::vector<double> grid = default_grid());
  /// Pointwise maximum of several profiles (the undecomposed envelope).
  static PrivacyProfile pointwise_max(std::vector<PrivacyProfile> profiles);

 private:
  std::function<double(double)> evaluator_;
  std::vector<double> grid_;
};

/// Dual-to-primal conversion f(alpha) = sup_eps e^-eps (1 - delta(eps) -
/// alpha), evaluated as a grid supremum, extended outward while the
/// objective still grows at an endpoint, then sharpened by golden-section
/// around the best grid point. Every evaluation is an attained objective
/// value, so the result is a sound lower bound on the true supremum; finer
/// grids never decrease it. Clamped to [0, 1 - alpha].
double dual_to_primal(const PrivacyProfile& profile, double alpha);

/// Primal-to-dual conversion delta(eps) = 1 + (f^-1)*(-e^eps), computed in
/// closed form from the knots: the conjugate of the piecewise-linear
/// left-continuous inverse attains its supremum at a knot.
double primal_to_dual(const TradeoffCurve& curve, double epsilon);

/// Profile of the opposite neighboring relation:
/// 1 - e^eps (1 - delta(-eps)), clamped to [0,1]. Throws ExtrapolationError
/// when -eps is outside the profile's grid.
double opposite_profile(const PrivacyProfile& profile, double epsilon);

/// Dual-to-primal for symmetric relations, needing only eps >= 0:
/// sup_{eps>=0} max{1 - delta(eps) - e^eps alpha, e^-eps (1 - delta(eps) -
/// alpha)}.
double symmetric_dual_to_primal(const PrivacyProfile& profile, double alpha);

/// Minimum of a non-empty list.
double pointwise_min(std::span<const double> values);

/// Evaluator of the pointwise minimum over decomposed tradeoff evaluators;
/// used directly by certification, with no re-convexification.
std::function<double(double)> curve_pointwise_min(
    std::vector<std::function<double(double)>> curves);

/// Samples dual_to_primal at the given alphas and returns a valid curve
/// (values are clamped monotone and convexified from below, which can only
/// lower them, so the curve stays a sound bound).
TradeoffCurve sample_tradeoff_curve(const PrivacyProfile& profile,
                                    const std::vector<double>& alphas);

}  // namespace smoothcert

#endif  // SMOOTHCERT_DUALITY_HPP_
