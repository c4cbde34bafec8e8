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
#ifndef SMOOTHCERT_MECHANISMS_HPP_
#define SMOOTHCERT_MECHANISMS_HPP_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smoothcert/distributions.hpp"
#include "smoothcert/duality.hpp"
#include "smoothcert/pld.hpp"

namespace smoothcert {

/// Threat model as a neighboring relation on inputs. Joint couples a
/// training-set relation with a test-input relation.
class NeighboringRelation {
 public:
  enum class Kind {
    kAddRemove,        // r_plus insertions, r_minus deletions
    kDatasetChanges,   // up to R changes of any kind
    kL2Ball,           // test input moves at most `radius` in l2
    kPerturbKRecords,  // K training records each perturbed up to `radius`
    kJoint,
  };

  static NeighboringRelation add_remove(int r_plus, int r_minus);
  static NeighboringRelation dataset_changes(int radius);
  static NeighboringRelation l2_ball(double radius);
  static NeighboringRelation perturb_k_records(int k, double radius);
  static NeighboringRelation joint(NeighboringRelation train,
                                   NeighboringRelation test);

  Kind kind() const { return kind_; }
  int r_plus() const { return r_plus_; }
  int r_minus() const { return r_minus_; }
  int changes() const { return changes_; }
  double ball_radius() const { return ball_radius_; }
  int k_records() const { return k_records_; }
  double perturb_radius() const { return perturb_radius_; }
  const NeighboringRelation& train() const { return *train_; }
  const NeighboringRelation& test() const { return *test_; }

  /// No perturbation allowed at all (zero radii).
  bool trivial() const;
  std::string describe() const;

  std::string to_json_string() const;
  static NeighboringRelation from_json_string(const std::string& text);

 private:
  NeighboringRelation() = default;
  Kind kind_ = Kind::kDatasetChanges;
  int r_plus_ = 0, r_minus_ = 0;
  int changes_ = 0;
  double ball_radius_ = 0;
  int k_records_ = 0;
  double perturb_radius_ = 0;
  std::shared_ptr<const NeighboringRelation> train_, test_;
};

/// Description of a randomized mechanism (or stack of them). Parsed from
/// JSON like {"type": "subsampled_gaussian", "gamma": 0.00256, "sigma": 3.0,
/// "iterations": 3750}; composition nests component objects.
class MechanismSpec {
 public:
  enum class Kind {
    kGaussian,             // additive N(0, sigma^2), unit-normalized shifts
    kSubsampledGaussian,   // Poisson subsampling + Gaussian, per iteration
    kDpa,                  // uniform choice over N partitions
    kDpaCompose,           // DPA stacked with an inference-time base
    kPreprocessAmplified,  // input noise sigma_in amplifying a base
    kRandomizedResponse,   // binary flip with retention probability p
    kComposition,
  };

  static MechanismSpec gaussian(double sigma, double sensitivity = 1.0);
  static MechanismSpec subsampled_gaussian(double gamma, double sigma,
                                           int iterations);
  static MechanismSpec dpa(int partitions);
  static MechanismSpec dpa_compose(int partitions, MechanismSpec base);
  static MechanismSpec preprocess_amplified(double sigma_in,
                                            MechanismSpec base);
  static MechanismSpec randomized_response(double p);
  static MechanismSpec composition(std::vector<MechanismSpec> components);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double sensitivity() const { return sensitivity_; }
  double gamma() const { return gamma_; }
  int iterations() const { return iterations_; }
  int partitions() const { return partitions_; }
  double sigma_in() const { return sigma_in_; }
  double flip_p() const { return flip_p_; }
  const std::vector<MechanismSpec>& components() const { return components_; }
  const MechanismSpec& base() const { return components_.front(); }

  std::string to_json_string() const;
  static MechanismSpec from_json_string(const std::string& text);

 private:
  MechanismSpec() = default;
  Kind kind_ = Kind::kGaussian;
  double sigma_ = 1, sensitivity_ = 1;
  double gamma_ = 0;
  int iterations_ = 1;
  int partitions_ = 0;
  double sigma_in_ = 0;
  double flip_p_ = 0;
  std::vector<MechanismSpec> components_;
};

/// DatasetChanges(R) splits into AddRemove(r, R-r) for r = 0..R; a Joint
/// relation decomposes its training part and carries the test part along.
/// Anything else stays as a singleton.
std::vector<NeighboringRelation> decompose_relation(
    const NeighboringRelation& rel);

/// Dominating pair for the supported leaf combinations:
/// SubsampledGaussian x AddRemove (binomial Gaussian mixtures),
/// Gaussian x L2Ball, RandomizedResponse x its flip relation.
/// Other combinations throw NoDominatingPairError; use mechanism_profile.
std::pair<DistributionDescriptor, DistributionDescriptor> dominating_pair(
    const MechanismSpec& spec, const NeighboringRelation& rel);

/// Closed-form DPA privacy profile: R/N for eps >= 0, else
/// 1 - (1 - R/N) e^eps.
double dpa_profile(int partitions, int changes, double epsilon);

/// Closed-form DPA tradeoff: max{1 - R/N - alpha, 0}.
double dpa_tradeoff(int partitions, int changes, double alpha);

/// Profile of DPA stacked with a base mechanism:
/// R/N + (1 - R/N) * base_delta.
double dpa_compose_profile(int partitions, int changes, double base_delta);

/// Tradeoff of DPA stacked with a base mechanism:
/// (1 - R/N) f_b(alpha / (1 - R/N)) for alpha <= 1 - R/N, else 0.
double dpa_compose_tradeoff(int partitions, int changes,
                            const TradeoffCurve& base_curve, double alpha);

/// Amplification by Gaussian input noise: with substitution weight
/// w = 2 Phi(r / (2 sigma_in)) - 1, returns
/// min(1, w * base_delta + (1 - w) * max(0, 1 - e^eps)). The floor term is
/// what the unperturbed branch contributes; it vanishes for eps >= 0.
double preprocess_amplified_profile(double sigma_in, double r,
                                    double base_delta_at_eps, double epsilon);

/// Flip pair of binary randomized response: {(1,p),(0,1-p)} vs swapped.
std::pair<DistributionDescriptor, DistributionDescriptor>
randomized_response_pair(double p);

struct RelationProfile {
  NeighboringRelation relation;
  PrivacyProfile profile;
};

/// End-to-end profile construction: decomposes the relation, builds
/// dominating pairs for the leaves, discretizes, composes across iterations
/// and stacked components, and applies the closed-form wrappers at profile
/// level. Returns one profile per decomposed relation.
std::vector<RelationProfile> mechanism_profile(
    const MechanismSpec& spec, const NeighboringRelation& rel,
    std::vector<double> epsilon_grid = PrivacyProfile::default_grid(),
    const DiscretizationSpec& disc = DiscretizationSpec{});

/// Composed PLD of the whole mechanism stack against one leaf relation (no
/// decomposition happens here). Closed-form mechanisms contribute their
/// exact loss distributions.
DiscretePLD mechanism_pld(const MechanismSpec& spec,
                          const NeighboringRelation& rel,
                          const DiscretizationSpec& disc = DiscretizationSpec{});

}  // namespace smoothcert

#endif  // SMOOTHCERT_MECHANISMS_HPP_
