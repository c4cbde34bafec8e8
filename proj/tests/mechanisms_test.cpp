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
#include "smoothcert/mechanisms.hpp"

#include <cmath>

#include "doctest.h"
#include "smoothcert/certify.hpp"
#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"

using namespace smoothcert;

TEST_CASE("decompose_relation") {
  const auto parts =
      decompose_relation(NeighboringRelation::dataset_changes(2));
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].r_plus() == 0);
  CHECK(parts[0].r_minus() == 2);
  CHECK(parts[1].r_plus() == 1);
  CHECK(parts[1].r_minus() == 1);
  CHECK(parts[2].r_plus() == 2);
  CHECK(parts[2].r_minus() == 0);

  const auto zero = decompose_relation(NeighboringRelation::dataset_changes(0));
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].trivial());

  const auto joint = decompose_relation(NeighboringRelation::joint(
      NeighboringRelation::dataset_changes(1), NeighboringRelation::l2_ball(0.2)));
  REQUIRE(joint.size() == 2);
  CHECK(joint[0].kind() == NeighboringRelation::Kind::kJoint);
  CHECK(joint[0].train().r_plus() == 0);
  CHECK(joint[0].train().r_minus() == 1);
  CHECK(joint[0].test().ball_radius() == 0.2);
  CHECK(joint[1].train().r_plus() == 1);

  const auto single =
      decompose_relation(NeighboringRelation::add_remove(2, 1));
  REQUIRE(single.size() == 1);
}

TEST_CASE("dominating pairs for the subsampled gaussian") {
  const auto spec = MechanismSpec::subsampled_gaussian(0.1, 2.0, 1);
  const auto [p, q] =
      dominating_pair(spec, NeighboringRelation::add_remove(0, 1));
  REQUIRE(p.kind() == DistributionKind::kGaussianMixture);
  REQUIRE(p.components().size() == 2);
  CHECK(p.components()[0].weight == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(p.components()[0].mean == 0.0);
  CHECK(p.components()[1].weight == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(p.components()[1].mean == 1.0);
  CHECK(p.components()[1].stddev == 2.0);
  REQUIRE(q.components().size() == 1);
  CHECK(q.components()[0].mean == 0.0);

  // Binomial support size r + 1.
  const auto [p3, q3] =
      dominating_pair(spec, NeighboringRelation::add_remove(0, 3));
  CHECK(p3.components().size() == 4);
  CHECK(q3.components().size() == 1);
  const auto [p21, q21] =
      dominating_pair(spec, NeighboringRelation::add_remove(2, 1));
  CHECK(p21.components().size() == 2);
  REQUIRE(q21.components().size() == 3);
  CHECK(q21.components()[2].mean == -2.0);

  CHECK_THROWS_AS(dominating_pair(spec, NeighboringRelation::l2_ball(1.0)),
                  NoDominatingPairError);
}

TEST_CASE("gaussian dominating pair and zero-radius identity") {
  const auto spec = MechanismSpec::gaussian(1.0);
  const auto [p, q] = dominating_pair(spec, NeighboringRelation::l2_ball(0.0));
  CHECK(hs_divergence(p, q, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  const auto [p2, q2] =
      dominating_pair(spec, NeighboringRelation::l2_ball(1.0));
  CHECK(hs_divergence(p2, q2, 0.0) ==
        doctest::Approx(0.3829249225480262).epsilon(1e-9));
}

TEST_CASE("dpa closed forms") {
  CHECK(dpa_profile(100, 5, 0.1) == 0.05);
  CHECK(dpa_profile(100, 5, -0.1) ==
        doctest::Approx(1 - 0.95 * std::exp(-0.1)).epsilon(1e-15));
  CHECK(dpa_profile(100, 0, 0.7) == 0.0);
  CHECK_THROWS_AS(dpa_profile(100, 101, 0.0), DomainError);

  CHECK(dpa_tradeoff(100, 5, 0.3) == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(dpa_tradeoff(100, 5, 0.97) == 0.0);
  CHECK(dpa_tradeoff(100, 0, 0.4) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("dpa composition closed forms") {
  CHECK(dpa_compose_profile(100, 10, 0.2) ==
        doctest::Approx(0.28).epsilon(1e-15));
  CHECK(dpa_compose_profile(100, 5, 0.0) == 0.05);
  CHECK(dpa_compose_profile(100, 5, 1.0) == 1.0);

  const TradeoffCurve perfect({{0.0, 1.0}, {1.0, 0.0}});
  CHECK(dpa_compose_tradeoff(100, 5, perfect, 0.5) ==
        doctest::Approx(0.45).epsilon(1e-12));
  CHECK(dpa_compose_tradeoff(100, 5, perfect, 0.96) == 0.0);
  CHECK(dpa_compose_tradeoff(100, 0, perfect, 0.37) ==
        doctest::Approx(perfect(0.37)).epsilon(1e-15));
  // Consistent with the plain DPA tradeoff under a perfect base.
  for (double alpha : {0.1, 0.4, 0.7, 0.99}) {
    CHECK(dpa_compose_tradeoff(100, 5, perfect, alpha) ==
          doctest::Approx(dpa_tradeoff(100, 5, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("theorem-consistency: dpa_compose_tradeoff equals the dual route") {
  const TradeoffCurve base({{0.0, 0.9}, {0.4, 0.35}, {0.9, 0.0}, {1.0, 0.0}});
  const int n = 100, r = 5;
  const PrivacyProfile composed(
      [&base, n, r](double eps) {
        return dpa_compose_profile(n, r, primal_to_dual(base, eps));
      },
      PrivacyProfile::default_grid());
  for (int i = 0; i <= 50; ++i) {
    const double alpha = static_cast<double>(i) / 50;
    CHECK(dual_to_primal(composed, alpha) ==
          doctest::Approx(dpa_compose_tradeoff(n, r, base, alpha))
              .epsilon(1e-6));
  }
}

TEST_CASE("preprocess_amplified_profile") {
  const double tvd = 0.3829249225480262;  // 2 Phi(1/2) - 1
  CHECK(preprocess_amplified_profile(1.0, 1.0, 0.5, 0.0) ==
        doctest::Approx(tvd * 0.5).epsilon(1e-9));
  CHECK(preprocess_amplified_profile(1.0, 0.0, 0.9, 0.3) == 0.0);
  CHECK(preprocess_amplified_profile(1.0, 2.0, 0.0, 0.5) == 0.0);
  // For eps < 0 the unsubstituted branch contributes its floor.
  const double w = 2 * normal_cdf(0.5) - 1;
  CHECK(preprocess_amplified_profile(1.0, 1.0, 0.5, -1.0) ==
        doctest::Approx(w * 0.5 + (1 - w) * (1 - std::exp(-1.0)))
            .epsilon(1e-12));
}

TEST_CASE("randomized_response_pair") {
  const auto [p, q] = randomized_response_pair(0.75);
  CHECK(p.atoms()[1].mass == 0.75);
  CHECK(q.atoms()[1].mass == 0.25);
  CHECK(hs_divergence(p, q, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tradeoff_value(p, q, 0.25) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(randomized_response_pair(0.5), DomainError);
  CHECK_THROWS_AS(randomized_response_pair(1.0), DomainError);
}

TEST_CASE("mechanism_profile: lone gaussian against l2 ball") {
  const auto profiles =
      mechanism_profile(MechanismSpec::gaussian(1.0),
                        NeighboringRelation::l2_ball(1.0));
  REQUIRE(profiles.size() == 1);
  CHECK(profiles[0].profile(0.0) ==
        doctest::Approx(0.3829249225480262).epsilon(1e-9));
}

TEST_CASE("mechanism_profile: dpa_compose matches the theorem arithmetic") {
  const auto spec =
      MechanismSpec::dpa_compose(100, MechanismSpec::gaussian(1.0));
  const auto rel = NeighboringRelation::joint(
      NeighboringRelation::dataset_changes(5), NeighboringRelation::l2_ball(1.0));
  const auto profiles = mechanism_profile(spec, rel);
  REQUIRE(profiles.size() == 6);
  for (const auto& rp : profiles) {
    CHECK(rp.profile(0.0) ==
          doctest::Approx(0.05 + 0.95 * 0.3829249225480262).epsilon(1e-9));
  }
}

TEST_CASE("mechanism_profile: subsampled gaussian trivial relation") {
  const auto spec = MechanismSpec::subsampled_gaussian(0.1, 1.0, 1);
  const auto profiles =
      mechanism_profile(spec, NeighboringRelation::add_remove(0, 0));
  REQUIRE(profiles.size() == 1);
  for (double eps : {0.0, 0.5, 2.0}) {
    CHECK(profiles[0].profile(eps) <= 1e-9);
  }
}

TEST_CASE("mechanism_profile: composition equals iteration of one step") {
  // A composition of k identical one-step mechanisms matches the one
  // mechanism run with iterations = k, up to grid slack.
  DiscretizationSpec disc;
  disc.bucket_width = 1e-4;
  const auto one_step = MechanismSpec::subsampled_gaussian(0.2, 1.0, 1);
  const auto stacked = MechanismSpec::composition({one_step, one_step, one_step});
  const auto iterated = MechanismSpec::subsampled_gaussian(0.2, 1.0, 3);
  const auto rel = NeighboringRelation::add_remove(0, 1);
  const auto a = mechanism_profile(stacked, rel, PrivacyProfile::default_grid(),
                                   disc);
  const auto b = mechanism_profile(iterated, rel,
                                   PrivacyProfile::default_grid(), disc);
  for (double eps = -1; eps <= 2; eps += 0.1) {
    CHECK(a[0].profile(eps) ==
          doctest::Approx(b[0].profile(eps)).epsilon(1e-9));
  }
}

TEST_CASE("mechanism_profile: joint composition covers both slots") {
  const auto spec = MechanismSpec::composition(
      {MechanismSpec::subsampled_gaussian(0.2, 1.0, 2),
       MechanismSpec::gaussian(0.5)});
  const auto rel = NeighboringRelation::joint(
      NeighboringRelation::dataset_changes(1),
      NeighboringRelation::l2_ball(0.25));
  const auto profiles = mechanism_profile(spec, rel);
  REQUIRE(profiles.size() == 2);
  // Test-noise-only reduction: zero test radius profile must match the
  // train-only profile.
  const auto rel0 = NeighboringRelation::joint(
      NeighboringRelation::dataset_changes(1), NeighboringRelation::l2_ball(0));
  const auto train_only = mechanism_profile(
      MechanismSpec::subsampled_gaussian(0.2, 1.0, 2),
      NeighboringRelation::dataset_changes(1));
  const auto joint0 = mechanism_profile(spec, rel0);
  for (double eps : {-0.5, 0.0, 0.7}) {
    CHECK(joint0[0].profile(eps) ==
          doctest::Approx(train_only[0].profile(eps)).epsilon(1e-6));
  }
  // A lone training mechanism cannot cover a nontrivial test perturbation.
  CHECK_THROWS_AS(mechanism_profile(
                      MechanismSpec::subsampled_gaussian(0.2, 1.0, 2), rel),
                  NoDominatingPairError);
}

TEST_CASE("mechanism_profile: profiles grow with the threat radius") {
  const auto spec = MechanismSpec::subsampled_gaussian(0.3, 1.0, 1);
  for (double eps : {-0.5, 0.0, 0.5, 1.5}) {
    double previous = -1;
    for (int r = 0; r <= 3; ++r) {
      const auto profiles = mechanism_profile(
          spec, NeighboringRelation::add_remove(0, r));
      const double value = profiles[0].profile(eps);
      CHECK(value >= previous - 1e-10);
      previous = value;
    }
  }
}

TEST_CASE("opposite-relation identity for add/remove profiles") {
  const auto spec = MechanismSpec::subsampled_gaussian(0.25, 1.0, 1);
  for (int r_plus = 0; r_plus <= 2; ++r_plus) {
    for (int r_minus = 0; r_minus <= 2; ++r_minus) {
      if (r_plus + r_minus == 0) continue;
      const auto [p, q] = dominating_pair(
          spec, NeighboringRelation::add_remove(r_plus, r_minus));
      const auto [ps, qs] = dominating_pair(
          spec, NeighboringRelation::add_remove(r_minus, r_plus));
      for (double eps : {-0.8, -0.2, 0.0, 0.4, 1.1}) {
        const double swapped = hs_divergence(ps, qs, eps);
        const double original = hs_divergence(p, q, -eps);
        CHECK(swapped == doctest::Approx(1 - std::exp(eps) * (1 - original))
                             .epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("mechanism json round trip and exact field names") {
  const auto spec = MechanismSpec::from_json_string(
      R"({"type": "subsampled_gaussian", "gamma": 0.00256, "sigma": 3.0,
          "iterations": 3750})");
  CHECK(spec.kind() == MechanismSpec::Kind::kSubsampledGaussian);
  CHECK(spec.gamma() == 0.00256);
  CHECK(spec.sigma() == 3.0);
  CHECK(spec.iterations() == 3750);

  const auto nested = MechanismSpec::composition(
      {MechanismSpec::dpa_compose(100, MechanismSpec::gaussian(0.5)),
       MechanismSpec::randomized_response(0.9)});
  const auto back = MechanismSpec::from_json_string(nested.to_json_string());
  CHECK(back.kind() == MechanismSpec::Kind::kComposition);
  CHECK(back.components()[0].kind() == MechanismSpec::Kind::kDpaCompose);
  CHECK(back.components()[0].base().sigma() == 0.5);
  CHECK(back.components()[1].flip_p() == 0.9);

  const auto rel = NeighboringRelation::from_json_string(
      R"({"type": "joint", "train": {"type": "dataset_changes", "radius": 3},
          "test": {"type": "l2_ball", "radius": 0.5}})");
  CHECK(rel.kind() == NeighboringRelation::Kind::kJoint);
  CHECK(rel.train().changes() == 3);
  const auto rel_back =
      NeighboringRelation::from_json_string(rel.to_json_string());
  CHECK(rel_back.test().ball_radius() == 0.5);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(MechanismSpec::subsampled_gaussian(0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(MechanismSpec::subsampled_gaussian(0.5, 1.0, 0), DomainError);
  CHECK_THROWS_AS(MechanismSpec::dpa(0), DomainError);
  CHECK_THROWS_AS(MechanismSpec::composition({}), DomainError);
  CHECK_THROWS_AS(NeighboringRelation::add_remove(-1, 0), DomainError);
  CHECK_THROWS_AS(NeighboringRelation::l2_ball(-0.5), DomainError);
}
