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
#ifndef SMOOTHCERT_PLD_HPP_
#define SMOOTHCERT_PLD_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "smoothcert/distributions.hpp"

namespace smoothcert {

struct PldAtom {
  double loss;
  double mass;
  bool operator==(const PldAtom&) const = default;
};

/// How to discretize a continuous privacy-loss distribution.
///
/// Losses are rounded up onto the bucket grid (pessimistic: the resulting
/// profile never understates delta). Mass whose loss falls above
/// loss_range.second is moved to the +infinity atom, which is also
/// pessimistic and keeps such PLDs composable. Mass below loss_range.first
/// is lifted into the lowest finite bucket; if more than tail_mass_bound of
/// probability needs such lifting the range is considered too small and
/// pld_from_pair throws RangeTooSmallError.
struct DiscretizationSpec {
  double bucket_width = 1e-4;
  double loss_range_lo = -64.0;
  double loss_range_hi = 64.0;
  double tail_mass_bound = 1e-12;

  void validate() const;
};

/// Discretized privacy-loss distribution: finite mass on an equispaced loss
/// grid plus an explicit atom at +infinity. The composable currency of the
/// accountant. Stored densely: masses()[j] sits at loss (min_index()+j) *
/// bucket_width().
class DiscretePLD {
 public:
  DiscretePLD(double bucket_width, std::int64_t min_index,
              std::vector<double> masses, double infinity_mass);

  /// Builds from sparse atoms whose losses must sit on the bucket grid.
  static DiscretePLD from_atoms(double bucket_width, std::vector<PldAtom> atoms,
                                double infinity_mass);
  /// Point mass at loss 0; the identity element of composition.
  static DiscretePLD identity(double bucket_width);

  double bucket_width() const { return bucket_width_; }
  std::int64_t min_index() const { return min_index_; }
  const std::vector<double>& masses() const { return masses_; }
  double infinity_mass() const { return infinity_mass_; }
  double loss_at(std::size_t j) const {
    return static_cast<double>(min_index_ + static_cast<std::int64_t>(j)) *
           bucket_width_;
  }

  /// Sparse view (nonzero masses only, ascending loss).
  std::vector<PldAtom> atoms() const;

  double total_finite_mass() const;

  std::string to_json_string() const;
  static DiscretePLD from_json_string(const std::string& text);

 private:
  double bucket_width_;
  std::int64_t min_index_;
  std::vector<double> masses_;
  double infinity_mass_;
};

/// PLD of the sum of two independent privacy losses: convolution of the
/// finite parts, infinity masses combining as 1-(1-a)(1-b). Bucket widths
/// must match (rebucket first).
DiscretePLD compose(const DiscretePLD& a, const DiscretePLD& b);

/// k-fold self-composition by repeated squaring. k >= 1.
DiscretePLD self_compose(const DiscretePLD& a, int k);

/// Moves masses onto a new grid, rounding losses up (profile never
/// decreases).
DiscretePLD rebucket(const DiscretePLD& a, double new_width);

/// delta(epsilon) = infinity_mass + sum mass * (1 - e^(eps - loss))_+.
double profile_from_pld(const DiscretePLD& a, double epsilon);

/// Pessimistic discretization of the privacy loss log(dP/dQ) under P.
/// Exact for discrete pairs; for Gaussian/mixture pairs the loss CDF is
/// inverted bucket-by-bucket along y (requires the common-stddev
/// separated-means shape every catalog mechanism produces).
DiscretePLD pld_from_pair(const DistributionDescriptor& p,
                          const DistributionDescriptor& q,
                          const DiscretizationSpec& spec);

/// O(log n) repeated evaluation of profile_from_pld via cached suffix sums.
/// The weighted suffix sums are kept in log space so arbitrarily negative
/// losses do not overflow.
class PldProfileEvaluator {
 public:
  explicit PldProfileEvaluator(const DiscretePLD& pld);
  double operator()(double epsilon) const;

 private:
  double bucket_width_;
  std::int64_t min_index_;
  double infinity_mass_;
  std::vector<double> suffix_mass_;
  std::vector<double> log_suffix_weighted_;
};

}  // namespace smoothcert

#endif  // SMOOTHCERT_PLD_HPP_
