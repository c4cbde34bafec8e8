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
#ifndef SMOOTHCERT_DISTRIBUTIONS_HPP_
#define SMOOTHCERT_DISTRIBUTIONS_HPP_

#include <vector>

namespace smoothcert {

struct DiscreteAtom {
  double location;
  double mass;
  bool operator==(const DiscreteAtom&) const = default;
};

struct GaussianComponent {
  double weight;
  double mean;
  double stddev;
  bool operator==(const GaussianComponent&) const = default;
};

enum class DistributionKind { kDiscrete, kGaussian, kGaussianMixture };

/// One-dimensional probability law used as one half of a dominating pair:
/// a finite list of point masses, a Gaussian, or a finite Gaussian mixture.
/// Immutable after construction; factories validate and throw DomainError.
class DistributionDescriptor {
 public:
  static DistributionDescriptor discrete(std::vector<DiscreteAtom> atoms);
  static DistributionDescriptor gaussian(double mean, double stddev);
  static DistributionDescriptor gaussian_mixture(
      std::vector<GaussianComponent> components);

  DistributionKind kind() const { return kind_; }
  const std::vector<DiscreteAtom>& atoms() const { return atoms_; }
  double mean() const { return mean_; }
  double stddev() const { return stddev_; }
  const std::vector<GaussianComponent>& components() const {
    return components_;
  }

  bool operator==(const DistributionDescriptor&) const = default;

 private:
  DistributionKind kind_ = DistributionKind::kGaussian;
  std::vector<DiscreteAtom> atoms_;
  double mean_ = 0;
  double stddev_ = 1;
  std::vector<GaussianComponent> components_;
};

/// Arguments of a single hockey-stick divergence evaluation. epsilon is on
/// the natural-log scale (alpha = e^epsilon).
struct PairDivergenceRequest {
  DistributionDescriptor p;
  DistributionDescriptor q;
  double epsilon = 0;

  void validate() const;  // throws DomainError if epsilon is not finite
};

/// Hockey-stick divergence integral of (p - e^eps * q)_+ in [0, 1].
///
/// Discrete pairs are summed exactly. A pair of plain Gaussians with equal
/// stddev uses the closed form; every other Gaussian/mixture combination is
/// integrated by adaptive quadrature to 1e-10 absolute error. Unsupported
/// kind combinations throw UnsupportedPairError.
double hs_divergence(const DistributionDescriptor& p,
                     const DistributionDescriptor& q, double epsilon);

/// Same as hs_divergence but always takes the quadrature path for
/// Gaussian/mixture pairs, bypassing closed forms. Used as a cross-check.
double hs_divergence_quadrature(const DistributionDescriptor& p,
                                const DistributionDescriptor& q,
                                double epsilon);

/// Optimal tradeoff value: the minimal Type-II error of any (randomized)
/// likelihood-ratio test distinguishing P from Q at Type-I level alpha.
/// Exact for discrete pairs; closed form for equal-stddev Gaussians; the
/// Neyman-Pearson threshold construction on the likelihood ratio otherwise.
double tradeoff_value(const DistributionDescriptor& p,
                      const DistributionDescriptor& q, double alpha);

/// CDF of a descriptor (mixture of erfs, or a step function for discrete).
double distribution_cdf(const DistributionDescriptor& d, double y);

/// Inverse CDF for Gaussian/mixture descriptors (bisection + Newton).
double distribution_quantile(const DistributionDescriptor& d, double u);

}  // namespace smoothcert

#endif  // SMOOTHCERT_DISTRIBUTIONS_HPP_
