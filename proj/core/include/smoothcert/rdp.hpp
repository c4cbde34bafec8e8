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
#ifndef SMOOTHCERT_RDP_HPP_
#define SMOOTHCERT_RDP_HPP_

#include <vector>

#include "smoothcert/duality.hpp"

namespace smoothcert {

/// Renyi divergence bound per order; the comparison baseline's currency.
struct RdpCurve {
  std::vector<double> orders;  // each > 1, strictly increasing
  std::vector<double> values;  // >= 0, non-decreasing in order

  void validate() const;
};

/// 128 log-spaced orders in (1, 512].
std::vector<double> default_rdp_orders();

/// Renyi-DP bound of the unit-sensitivity subsampled Gaussian: the larger of
/// the two divergences between N(0, sigma^2) and the two-component mixture
/// (1-q) N(0, sigma^2) + q N(1, sigma^2), by adaptive quadrature to relative
/// error 1e-8. Throws NumericFailureError when the divergence is numerically
/// infinite (sigma too small for the order).
double rdp_subsampled_gaussian(double order, double q, double sigma);

/// Corrected group-privacy bound for radius r: the subsampled Gaussian bound
/// at effective sampling probability 1-(1-q)^r and noise sigma/r.
double rdp_group_corrected(double order, double q, double sigma, int r);

/// Additive composition: values scaled by the step count.
RdpCurve rdp_compose(const RdpCurve& curve, int steps);

/// Classic conversion to a privacy profile:
/// delta(eps) = min over orders of exp((order-1)(value - eps)), clamped at 1.
double rdp_to_profile(const RdpCurve& curve, double epsilon);

/// Wraps the conversion as a PrivacyProfile for the certification pipeline.
PrivacyProfile profile_from_rdp(
    const RdpCurve& curve,
    std::vector<double> grid = PrivacyProfile::default_grid());

}  // namespace smoothcert

#endif  // SMOOTHCERT_RDP_HPP_
