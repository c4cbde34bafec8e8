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

#include <cmath>
#include <random>

#include "doctest.h"
#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"
#include "support/oracles.hpp"

using namespace smoothcert;

TEST_CASE("clopper_pearson endpoints and frozen value") {
  CHECK(clopper_pearson(1000, 1000, 0.999).second == 1.0);
  CHECK(clopper_pearson(0, 1000, 0.999).first == 0.0);
  // Bisection on the exact binomial tail, cross-checked below by direct
  // tail summation.
  const auto [lower, upper] = clopper_pearson(900, 1000, 0.999);
  CHECK(lower == doctest::Approx(0.8674640180257483).epsilon(1e-9));
  CHECK(oracles::binomial_tail_sum(900, 1000, lower) ==
        doctest::Approx(0.001).epsilon(1e-6));
  CHECK(upper > 0.9);
}

TEST_CASE("clopper_pearson matches direct binomial-tail bisection") {
  const std::vector<std::tuple<std::int64_t, std::int64_t, double>> cases = {
      {5, 10, 0.95},   {1, 50, 0.99},    {49, 50, 0.99}, {250, 500, 0.999},
      {17, 400, 0.9},  {399, 400, 0.95}, {1, 1, 0.9},    {3, 7, 0.999},
      {60, 64, 0.975}, {32, 64, 0.5}};
  for (const auto& [k, n, conf] : cases) {
    const auto [lower, upper] = clopper_pearson(k, n, conf);
    if (k > 0) {
      double lo = 0, hi = 1;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (oracles::binomial_tail_sum(k, n, mid) <= 1 - conf ? lo : hi) = mid;
      }
      CHECK(lower == doctest::Approx(lo).epsilon(1e-9));
    }
    if (k < n) {
      double lo = 0, hi = 1;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        // P[Bin <= k] = 1 - P[Bin >= k+1]
        (1 - oracles::binomial_tail_sum(k + 1, n, mid) <= 1 - conf ? hi : lo) =
            mid;
      }
      CHECK(upper == doctest::Approx(hi).epsilon(1e-9));
    }
  }
}

TEST_CASE("clopper_pearson coverage by simulation") {
  // Empirical coverage of the one-sided lower bound at 0.95 must not fall
  // more than 0.005 below the nominal level.
  std::mt19937_64 rng(20260811);
  const double true_p = 0.83;
  const int n = 40;
  const double conf = 0.95;
  std::binomial_distribution<int> bin(n, true_p);
  int covered = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const int k = bin(rng);
    const auto [lower, upper] = clopper_pearson(k, n, conf);
    if (lower <= true_p) ++covered;
  }
  CHECK(static_cast<double>(covered) / trials >= conf - 0.005);
}

TEST_CASE("clopper_pearson interval narrows with more samples") {
  double previous_lower = 0;
  for (int scale : {1, 2, 4, 8}) {
    const auto [lower, upper] =
        clopper_pearson(900 * scale, 1000 * scale, 0.999);
    CHECK(lower >= previous_lower - 1e-12);
    previous_lower = lower;
  }
}

TEST_CASE("certify gaussian smoothing against the closed-form radius") {
  // Binary case: robust iff radius < sigma * Phi^-1(p1) = 1.2816.
  const auto bounds = ProbabilityBounds::exact(0.9, 0.1);
  const auto robust = certify(
      bounds, mechanism_profile(MechanismSpec::gaussian(1.0),
                                NeighboringRelation::l2_ball(1.2)));
  CHECK(robust.robust);
  CHECK(robust.margin > 0);
  const auto broken = certify(
      bounds, mechanism_profile(MechanismSpec::gaussian(1.0),
                                NeighboringRelation::l2_ball(1.3)));
  CHECK(!broken.robust);
}

TEST_CASE("certify without separation reports non-robust") {
  const auto bounds = ProbabilityBounds::exact(0.5, 0.5);
  const auto result =
      certify(bounds, std::vector<PrivacyProfile>{PrivacyProfile::identical()});
  CHECK(!result.robust);
  CHECK(result.margin <= 0);
}

TEST_CASE("certify is monotone in the probability bounds") {
  const auto profiles = mechanism_profile(MechanismSpec::gaussian(1.0),
                                          NeighboringRelation::l2_ball(0.8));
  double previous = -2;
  for (double p1 : {0.55, 0.7, 0.85, 0.95}) {
    const auto result = certify(ProbabilityBounds::exact(p1, 0.1), profiles);
    CHECK(result.margin >= previous - 1e-12);
    previous = result.margin;
  }
  previous = 2;
  for (double p2 : {0.05, 0.2, 0.4}) {
    const auto result = certify(ProbabilityBounds::exact(0.9, p2), profiles);
    CHECK(result.margin <= previous + 1e-12);
    previous = result.margin;
  }
}

TEST_CASE("direct-grid cross-check never exceeds the production margin") {
  const auto profiles = mechanism_profile(MechanismSpec::gaussian(1.0),
                                          NeighboringRelation::l2_ball(1.0));
  const auto bounds = ProbabilityBounds::exact(0.85, 0.2);
  const auto result = certify(bounds, profiles);
  const double direct = certify_margin_direct_grid(bounds, profiles[0].profile);
  CHECK(direct <= result.margin + 1e-12);
  CHECK(direct == doctest::Approx(result.margin).epsilon(1e-5));
}

TEST_CASE("certify_multiclass") {
  const auto profiles = mechanism_profile(MechanismSpec::gaussian(1.0),
                                          NeighboringRelation::l2_ball(0.5));
  // One certain class.
  auto result = certify_multiclass({{1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}}, 0,
                                   {profiles[0].profile});
  CHECK(result.robust);
  // Ties among runner-up uppers: p2 is their max, attained by either.
  const auto tied = certify_multiclass(
      {{0.8, 0.9}, {0.1, 0.3}, {0.05, 0.3}}, 0, {profiles[0].profile});
  const auto swapped = certify_multiclass(
      {{0.8, 0.9}, {0.05, 0.3}, {0.1, 0.3}}, 0, {profiles[0].profile});
  CHECK(tied.margin == doctest::Approx(swapped.margin).epsilon(1e-12));
  CHECK_THROWS_AS(
      certify_multiclass({{0.2, 0.4}, {0.5, 0.8}}, 0, {profiles[0].profile}),
      DomainError);
}

TEST_CASE("multiclass bounds from counts use the split confidence") {
  const auto bounds =
      ProbabilityBounds::from_monte_carlo({900, 50, 50}, 1000, 0.999);
  CHECK(bounds.predicted_class == 0);
  // Each side runs at confidence 1 - (1-0.999)/2 = 0.9995.
  CHECK(bounds.p1_lower ==
        doctest::Approx(0.8652250017447787).epsilon(1e-9));
  CHECK(bounds.p2_upper ==
        doctest::Approx(clopper_pearson(50, 1000, 0.9995).second)
            .epsilon(1e-12));
  CHECK_THROWS_AS(ProbabilityBounds::from_monte_carlo({600, 600}, 1000, 0.999),
                  DomainError);
}

TEST_CASE("max_certified_radius recovers the gaussian radius") {
  const auto family = [](double radius) {
    std::vector<PrivacyProfile> out;
    for (auto& rp : mechanism_profile(MechanismSpec::gaussian(1.0),
                                      NeighboringRelation::l2_ball(radius))) {
      out.push_back(rp.profile);
    }
    return out;
  };
  std::vector<double> radii;
  for (int i = 0; i <= 300; ++i) radii.push_back(0.01 * i);
  const auto best =
      max_certified_radius(ProbabilityBounds::exact(0.99, 0.01), family, radii);
  REQUIRE(best.has_value());
  CHECK(*best == doctest::Approx(2.32).epsilon(1e-9));
  // p1 = 0.5 cannot even certify radius 0.
  const auto none =
      max_certified_radius(ProbabilityBounds::exact(0.5, 0.5), family, radii);
  CHECK(!none.has_value());
  CHECK_THROWS_AS(max_certified_radius(ProbabilityBounds::exact(0.9, 0.1),
                                       family, {}),
                  DomainError);
}

TEST_CASE("dpa poisoning radius matches the exact inequality") {
  // f(alpha) = max(1 - R/N - alpha, 0): certifiable iff R/N < (p1 - p2)/2.
  const auto family = [](double radius) {
    const int r = static_cast<int>(radius);
    return std::vector<PrivacyProfile>{
        PrivacyProfile([r](double eps) { return dpa_profile(100, r, eps); },
                       PrivacyProfile::default_grid())};
  };
  std::vector<double> radii;
  for (int r = 0; r <= 60; ++r) radii.push_back(r);
  const auto best =
      max_certified_radius(ProbabilityBounds::exact(0.8, 0.2), family, radii);
  REQUIRE(best.has_value());
  CHECK(*best == 29.0);
}

TEST_CASE("joint_certify reductions and monotonicity") {
  const auto spec = MechanismSpec::composition(
      {MechanismSpec::subsampled_gaussian(0.05, 1.0, 2),
       MechanismSpec::gaussian(1.0)});
  const auto bounds = ProbabilityBounds::exact(0.9, 0.1);
  // Zero test radius reduces to poisoning-only certification.
  const auto joint0 = joint_certify(1, 0.0, spec, bounds);
  const auto train_only =
      certify(bounds, mechanism_profile(
                          MechanismSpec::subsampled_gaussian(0.05, 1.0, 2),
                          NeighboringRelation::dataset_changes(1)));
  CHECK(joint0.margin == doctest::Approx(train_only.margin).epsilon(1e-4));
  // Zero train radius reduces to the evasion-only gaussian certificate:
  // margin changes sign at radius sigma * Phi^-1(0.9) = 1.2816.
  CHECK(joint_certify(0, 1.27, spec, bounds).robust);
  CHECK(!joint_certify(0, 1.30, spec, bounds).robust);
  // Margins shrink in both threat radii.
  double previous_train = 2;
  for (int r = 0; r <= 2; ++r) {
    const auto result = joint_certify(r, 0.3, spec, bounds);
    CHECK(result.margin <= previous_train + 1e-9);
    previous_train = result.margin;
  }
  double previous_test = 2;
  for (double d : {0.0, 0.4, 0.8, 1.2}) {
    const auto result = joint_certify(1, d, spec, bounds);
    CHECK(result.margin <= previous_test + 1e-9);
    previous_test = result.margin;
  }
}
