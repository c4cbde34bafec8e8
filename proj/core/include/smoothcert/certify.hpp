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
#ifndef SMOOTHCERT_CERTIFY_HPP_
#define SMOOTHCERT_CERTIFY_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "smoothcert/duality.hpp"
#include "smoothcert/mechanisms.hpp"

namespace smoothcert {

/// Exact one-sided Clopper-Pearson bounds for a binomial proportion at the
/// given one-sided confidence level: lower is the largest q with
/// P[Bin(trials, q) >= successes] <= 1 - confidence (0 when successes = 0);
/// upper symmetrically. Bisection on the regularized incomplete beta to
/// 1e-12.
std::pair<double, double> clopper_pearson(std::int64_t successes,
                                          std::int64_t trials,
                                          double confidence);

/// Class-probability separation feeding a certificate: a lower bound on the
/// top class and an upper bound on the runner-up, either exact or derived
/// from Monte-Carlo counts via Clopper-Pearson with the failure probability
/// split evenly across the two bounds used.
struct ProbabilityBounds {
  double p1_lower = 0;
  double p2_upper = 0;
  bool from_counts = false;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
  double confidence = 0;
  std::size_t predicted_class = 0;

  static ProbabilityBounds exact(double p1_lower, double p2_upper);
  static ProbabilityBounds from_monte_carlo(std::vector<std::int64_t> counts,
                                            std::int64_t total,
                                            double confidence);
};

struct CertificateResult {
  bool robust = false;
  /// Smallest decomposed-relation value of f(1-p1) + f(p2) - 1.
  double margin = 0;
  std::size_t binding_relation = 0;
  std::vector<double> per_relation_margins;
};

/// Robustness check: for each decomposed relation's profile, evaluates
/// f_i(1 - p1) + f_i(p2) through the dual-to-primal conversion and requires
/// the minimum over i to exceed 1. Grid under-approximation of the suprema
/// only shrinks the margin, so a "robust" verdict is sound. p1 <= p2 yields
/// a non-robust result rather than an error.
CertificateResult certify(const ProbabilityBounds& bounds,
                          const std::vector<PrivacyProfile>& profiles);
CertificateResult certify(const ProbabilityBounds& bounds,
                          const std::vector<RelationProfile>& profiles);

/// Multiclass wrapper: p1 is the predicted class's lower bound, p2 the
/// largest upper bound among the others.
CertificateResult certify_multiclass(
    const std::vector<std::pair<double, double>>& class_bounds,
    std::size_t predicted, const std::vector<PrivacyProfile>& profiles);

/// Largest radius in `radii` (ascending) whose certificate is robust, or
/// nullopt if none is. Verifies that margins are non-increasing along the
/// sweep and reports a NumericFailureError diagnostic when they are not,
/// since that indicates a broken profile family.
std::optional<double> max_certified_radius(
    const ProbabilityBounds& bounds,
    const std::function<std::vector<PrivacyProfile>(double)>& family,
    const std::vector<double>& radii);

/// Joint threat certificate: composes the training mechanism with the
/// inference-time perturbation profile per decomposed (r+, r-) relation and
/// certifies over the decomposition.
CertificateResult joint_certify(
    int train_radius, double test_radius, const MechanismSpec& spec,
    const ProbabilityBounds& bounds,
    std::vector<double> epsilon_grid = PrivacyProfile::default_grid(),
    const DiscretizationSpec& disc = DiscretizationSpec{});

/// Debug cross-check: evaluates the certificate margin for one profile by a
/// plain grid search on the theorem's own expression (no golden-section
/// sharpening). Always <= the production margin.
double certify_margin_direct_grid(const ProbabilityBounds& bounds,
                                  const PrivacyProfile& profile);

}  // namespace smoothcert

#endif  // SMOOTHCERT_CERTIFY_HPP_
