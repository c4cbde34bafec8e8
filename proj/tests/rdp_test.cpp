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
#include "smoothcert/rdp.hpp"

#include <cmath>

#include "doctest.h"
#include "smoothcert/errors.hpp"
#include "support/oracles.hpp"

using namespace smoothcert;

TEST_CASE("rdp_subsampled_gaussian limits") {
  // q -> 0 collapses the mixture onto the base distribution.
  CHECK(rdp_subsampled_gaussian(2.0, 1e-9, 1.0) < 1e-7);
  // q = 1 is the pure Gaussian Renyi divergence order/(2 sigma^2).
  CHECK(rdp_subsampled_gaussian(4.0, 1.0, 2.0) ==
        doctest::Approx(4.0 / 8.0).epsilon(1e-6));
  CHECK_THROWS_AS(rdp_subsampled_gaussian(1.0, 0.1, 1.0), DomainError);
}

TEST_CASE("rdp_subsampled_gaussian against Monte Carlo") {
  const double order = 2.0, q = 0.01, sigma = 1.0;
  const double value = rdp_subsampled_gaussian(order, q, sigma);
  const auto d_pm = oracles::mc_renyi_divergence(order, q, sigma, false,
                                                 10'000'000, 20260811);
  const auto d_mp = oracles::mc_renyi_divergence(order, q, sigma, true,
                                                 10'000'000, 1123581321);
  const double mc_max = std::max(d_pm.value, d_mp.value);
  const double se = 3 * std::max(d_pm.std_error, d_mp.std_error);
  CHECK(value >= mc_max - se);
  CHECK(value <= mc_max + se);
}

TEST_CASE("rdp_group_corrected") {
  // r = 1 reduces to the plain bound.
  CHECK(rdp_group_corrected(3.0, 0.02, 2.0, 1) ==
        doctest::Approx(rdp_subsampled_gaussian(3.0, 0.02, 2.0))
            .epsilon(1e-9));
  // Effective parameters: q' = 1-(1-q)^r, sigma/r.
  const double direct = rdp_subsampled_gaussian(
      2.5, 1.0 - std::pow(0.99, 2), 1.0 / 2);
  CHECK(rdp_group_corrected(2.5, 0.01, 1.0, 2) ==
        doctest::Approx(direct).epsilon(1e-9));
  // Larger groups are less private.
  double previous = 0;
  for (int r = 1; r <= 4; ++r) {
    const double value = rdp_group_corrected(2.0, 0.01, 2.0, r);
    CHECK(value >= previous - 1e-12);
    previous = value;
  }
  CHECK_THROWS_AS(rdp_group_corrected(2.0, 0.01, 1.0, 0), DomainError);
}

TEST_CASE("rdp_compose scales values") {
  RdpCurve curve{{2.0, 4.0, 8.0}, {0.1, 0.2, 0.5}};
  const RdpCurve doubled = rdp_compose(curve, 2);
  CHECK(doubled.values[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(doubled.values[2] == doctest::Approx(1.0).epsilon(1e-15));
  const RdpCurve same = rdp_compose(curve, 1);
  CHECK(same.values[1] == curve.values[1]);
  CHECK_THROWS_AS(rdp_compose(curve, 0), DomainError);
}

TEST_CASE("rdp_to_profile conversion") {
  RdpCurve zero{{2.0, 16.0, 128.0}, {0.0, 0.0, 0.0}};
  CHECK(rdp_to_profile(zero, 5.0) < 1e-200);
  CHECK(rdp_to_profile(zero, 0.0) == 1.0);
  RdpCurve curve{{2.0, 8.0}, {0.3, 0.6}};
  double previous = 1.0;
  for (double eps = -1; eps <= 6; eps += 0.25) {
    const double d = rdp_to_profile(curve, eps);
    CHECK(d <= 1.0);
    CHECK(d >= 0.0);
    CHECK(d <= previous + 1e-15);
    previous = d;
  }
}

TEST_CASE("default order grid spans (1, 512]") {
  const auto orders = default_rdp_orders();
  REQUIRE(orders.size() == 128);
  CHECK(orders.front() > 1.0);
  CHECK(orders.front() < 1.02);
  CHECK(orders.back() == doctest::Approx(512.0).epsilon(1e-12));
  for (std::size_t i = 1; i < orders.size(); ++i) {
    CHECK(orders[i] > orders[i - 1]);
  }
}

TEST_CASE("rdp curve validation") {
  CHECK_THROWS_AS(
      [] {
        RdpCurve bad{{2.0, 3.0}, {0.5, 0.1}};
        bad.validate();
      }(),
      DomainError);
  CHECK_THROWS_AS(
      [] {
        RdpCurve bad{{0.5}, {0.1}};
        bad.validate();
      }(),
      DomainError);
}
