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
#include "smoothcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"

namespace smoothcert {

namespace {

// P[Bin(n, q) >= k] as a regularized incomplete beta.
double binomial_upper_tail(std::int64_t k, std::int64_t n, double q) {
  if (k <= 0) return 1;
  if (k > n) return 0;
  return regularized_incomplete_beta(static_cast<double>(k),
                                     static_cast<double>(n - k + 1), q);
}

// P[Bin(n, q) <= k].
double binomial_lower_tail(std::int64_t k, std::int64_t n, double q) {
  if (k >= n) return 1;
  if (k < 0) return 0;
  return 1.0 - binomial_upper_tail(k + 1, n, q);
}

}  // namespace

std::pair<double, double> clopper_pearson(std::int64_t successes,
                                          std::int64_t trials,
                                          double confidence) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (successes < 0 || successes > trials) {
    throw DomainError("successes must be in [0, trials]");
  }
  if (!(confidence > 0) || !(confidence < 1)) {
    throw DomainError("confidence must be in (0,1)");
  }
  const double tail = 1.0 - confidence;
  constexpr double kTol = 1e-12;

  double lower = 0;
  if (successes > 0) {
    // Largest q with P[Bin(n,q) >= k] <= tail; the tail is increasing in q.
    double lo = 0, hi = 1;
    while (hi - lo > kTol) {
      const double mid = 0.5 * (lo + hi);
      (binomial_upper_tail(successes, trials, mid) <= tail ? lo : hi) = mid;
    }
    lower = lo;
  }

  double upper = 1;
  if (successes < trials) {
    // Smallest q with P[Bin(n,q) <= k] <= tail; this tail is decreasing in q.
    double lo = 0, hi = 1;
    while (hi - lo > kTol) {
      const double mid = 0.5 * (lo + hi);
      (binomial_lower_tail(successes, trials, mid) <= tail ? hi : lo) = mid;
    }
    upper = hi;
  }
  return {lower, upper};
}

ProbabilityBounds ProbabilityBounds::exact(double p1_lower, double p2_upper) {
  if (p1_lower < 0 || p1_lower > 1 || p2_upper < 0 || p2_upper > 1) {
    throw DomainError("probability bounds must be in [0,1]");
  }
  ProbabilityBounds b;
  b.p1_lower = p1_lower;
  b.p2_upper = p2_upper;
  return b;
}

ProbabilityBounds ProbabilityBounds::from_monte_carlo(
    std::vector<std::int64_t> counts, std::int64_t total, double confidence) {
  if (counts.empty()) throw DomainError("counts must be non-empty");
  if (total < 1) throw DomainError("total must be >= 1");
  std::int64_t sum = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw DomainError("counts must be >= 0");
    sum += c;
  }
  if (sum > total) throw DomainError("counts must sum to at most total");
  if (!(confidence > 0) || !(confidence < 1)) {
    throw DomainError("confidence must be in (0,1)");
  }
  const std::size_t predicted = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  // Failure probability split evenly across the two bounds actually used.
  const double per_bound_confidence = 1.0 - (1.0 - confidence) / 2;

  ProbabilityBounds b;
  b.p1_lower =
      clopper_pearson(counts[predicted], total, per_bound_confidence).first;
  double p2 = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (j == predicted) continue;
    p2 = std::max(
        p2, clopper_pearson(counts[j], total, per_bound_confidence).second);
  }
  b.p2_upper = p2;
  b.from_counts = true;
  b.counts = std::move(counts);
  b.total = total;
  b.confidence = confidence;
  b.predicted_class = predicted;
  return b;
}

CertificateResult certify(const ProbabilityBounds& bounds,
                          const std::vector<PrivacyProfile>& profiles) {
  if (profiles.empty()) throw DomainError("certify needs >= 1 profile");
  CertificateResult result;
  result.per_relation_margins.reserve(profiles.size());
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    // By the primal-dual conversion the two suprema in the certificate are
    // f_i(1 - p1) and f_i(p2).
    const double margin = dual_to_primal(profiles[i], 1.0 - bounds.p1_lower) +
                          dual_to_primal(profiles[i], bounds.p2_upper) - 1.0;
    result.per_relation_margins.push_back(margin);
    if (margin < worst) {
      worst = margin;
      worst_index = i;
    }
  }
  result.margin = worst;
  result.binding_relation = worst_index;
  if (bounds.p1_lower <= bounds.p2_upper) {
    // No class separation: never certifiable.
    result.margin = std::min(result.margin, 0.0);
    result.robust = false;
    return result;
  }
  result.robust = result.margin > 0;
  return result;
}

CertificateResult certify(const ProbabilityBounds& bounds,
                          const std::vector<RelationProfile>& profiles) {
  std::vector<PrivacyProfile> flat;
  flat.reserve(profiles.size());
  for (const auto& rp : profiles) flat.push_back(rp.profile);
  return certify(bounds, flat);
}

CertificateResult certify_multiclass(
    const std::vector<std::pair<double, double>>& class_bounds,
    std::size_t predicted, const std::vector<PrivacyProfile>& profiles) {
  if (class_bounds.empty()) throw DomainError("need >= 1 class");
  if (predicted >= class_bounds.size()) {
    throw DomainError("predicted class index out of range");
  }
  double p2 = 0;
  for (std::size_t j = 0; j < class_bounds.size(); ++j) {
    if (class_bounds[j].first > class_bounds[predicted].first) {
      throw DomainError("predicted class must have the largest lower bound");
    }
    if (j != predicted) p2 = std::max(p2, class_bounds[j].second);
  }
  return certify(
      ProbabilityBounds::exact(class_bounds[predicted].first, p2), profiles);
}

std::optional<double> max_certified_radius(
    const ProbabilityBounds& bounds,
    const std::function<std::vector<PrivacyProfile>(double)>& family,
    const std::vector<double>& radii) {
  if (radii.empty()) throw DomainError("radii list must be non-empty");
  if (!std::is_sorted(radii.begin(), radii.end())) {
    throw DomainError("radii must be ascending");
  }
  std::optional<double> best;
  double previous_margin = std::numeric_limits<double>::infinity();
  for (double radius : radii) {
    const CertificateResult result = certify(bounds, family(radius));
    if (result.margin > previous_margin + 1e-9) {
      throw NumericFailureError(
          "certificate margin increased along the radius sweep; the profile "
          "family is not monotone",
          result.margin - previous_margin);
    }
    previous_margin = result.margin;
    if (result.robust) best = radius;
  }
  return best;
}

CertificateResult joint_certify(int train_radius, double test_radius,
                                const MechanismSpec& spec,
                                const ProbabilityBounds& bounds,
                                std::vector<double> epsilon_grid,
                                const DiscretizationSpec& disc) {
  if (train_radius < 0) throw DomainError("train_radius must be >= 0");
  if (!(test_radius >= 0)) throw DomainError("test_radius must be >= 0");
  const auto rel = NeighboringRelation::joint(
      NeighboringRelation::dataset_changes(train_radius),
      NeighboringRelation::l2_ball(test_radius));
  return certify(bounds,
                 mechanism_profile(spec, rel, std::move(epsilon_grid), disc));
}

double certify_margin_direct_grid(const ProbabilityBounds& bounds,
                                  const PrivacyProfile& profile) {
  double first = 0, second = 0;
  for (double eps : profile.grid()) {
    const double scale = std::exp(-std::max(eps, -700.0));
    const double delta = profile(eps);
    first = std::max(first, scale * (bounds.p1_lower - delta));
    second = std::max(second, scale * (1.0 - bounds.p2_upper - delta));
  }
  return first + second - 1.0;
}

}  // namespace smoothcert
