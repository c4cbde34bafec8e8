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
//
// Internal helpers shared by the divergence and discretization code. Not
// installed.
#ifndef SMOOTHCERT_PAIR_ANALYSIS_HPP_
#define SMOOTHCERT_PAIR_ANALYSIS_HPP_

#include <optional>
#include <vector>

#include "smoothcert/distributions.hpp"

namespace smoothcert::internal {

// A Gaussian-mixture pair whose components all share one stddev and whose P
// means all sit at or above the Q means. The likelihood ratio p/q is then
// non-decreasing in y, which makes the privacy-loss CDFs invertible by
// marching along y. All mixture pairs produced by the mechanism catalog have
// this shape (possibly after reflecting y -> -y, which leaves divergences,
// tradeoffs, and loss distributions unchanged).
struct MonotonePair {
  std::vector<double> p_weights, p_means;
  std::vector<double> q_weights, q_means;
  double sigma = 1;

  double log_p(double y) const;
  double log_q(double y) const;
  double cdf_p(double y) const;
  double cdf_q(double y) const;
  // Privacy loss log(p(y)/q(y)); non-decreasing in y.
  double loss(double y) const;
  double loss_derivative(double y) const;
  double quantile_p(double u) const;
  // Solves loss(y) = target on [y_lo, y_hi]; requires a sign change on the
  // bracket. Bisection with Newton acceleration.
  double loss_inverse(double target, double y_lo, double y_hi) const;

  // False only when every component on both sides has the same mean, in
  // which case the pair is a single identical Gaussian.
  bool strictly_increasing() const;

  static std::optional<MonotonePair> try_build(const DistributionDescriptor& p,
                                               const DistributionDescriptor& q);
};

// Discrete pair on the union support, with zero mass filled in.
struct MergedDiscretePair {
  std::vector<double> locations;
  std::vector<double> p_mass;
  std::vector<double> q_mass;

  static MergedDiscretePair build(const DistributionDescriptor& p,
                                  const DistributionDescriptor& q);
};

}  // namespace smoothcert::internal

#endif  // SMOOTHCERT_PAIR_ANALYSIS_HPP_
