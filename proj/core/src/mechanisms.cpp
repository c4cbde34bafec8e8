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

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"

namespace smoothcert {

namespace {

using Kind = MechanismSpec::Kind;
using RelKind = NeighboringRelation::Kind;

double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }

}  // namespace

NeighboringRelation NeighboringRelation::add_remove(int r_plus, int r_minus) {
  if (r_plus < 0 || r_minus < 0) throw DomainError("radii must be >= 0");
  NeighboringRelation r;
  r.kind_ = RelKind::kAddRemove;
  r.r_plus_ = r_plus;
  r.r_minus_ = r_minus;
  return r;
}

NeighboringRelation NeighboringRelation::dataset_changes(int radius) {
  if (radius < 0) throw DomainError("radius must be >= 0");
  NeighboringRelation r;
  r.kind_ = RelKind::kDatasetChanges;
  r.changes_ = radius;
  return r;
}

NeighboringRelation NeighboringRelation::l2_ball(double radius) {
  if (!(radius >= 0)) throw DomainError("radius must be >= 0");
  NeighboringRelation r;
  r.kind_ = RelKind::kL2Ball;
  r.ball_radius_ = radius;
  return r;
}

NeighboringRelation NeighboringRelation::perturb_k_records(int k,
                                                           double radius) {
  if (k < 0 || !(radius >= 0)) throw DomainError("radii must be >= 0");
  NeighboringRelation r;
  r.kind_ = RelKind::kPerturbKRecords;
  r.k_records_ = k;
  r.perturb_radius_ = radius;
  return r;
}

NeighboringRelation NeighboringRelation::joint(NeighboringRelation train,
                                               NeighboringRelation test) {
  if (train.kind() == RelKind::kJoint || test.kind() == RelKind::kJoint) {
    throw DomainError("joint relations do not nest");
  }
  NeighboringRelation r;
  r.kind_ = RelKind::kJoint;
  r.train_ = std::make_shared<const NeighboringRelation>(std::move(train));
  r.test_ = std::make_shared<const NeighboringRelation>(std::move(test));
  return r;
}

bool NeighboringRelation::trivial() const {
  switch (kind_) {
    case RelKind::kAddRemove:
      return r_plus_ == 0 && r_minus_ == 0;
    case RelKind::kDatasetChanges:
      return changes_ == 0;
    case RelKind::kL2Ball:
      return ball_radius_ == 0;
    case RelKind::kPerturbKRecords:
      return k_records_ == 0 || perturb_radius_ == 0;
    case RelKind::kJoint:
      return train_->trivial() && test_->trivial();
  }
  return false;
}

std::string NeighboringRelation::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case RelKind::kAddRemove:
      out << "add_remove(" << r_plus_ << "," << r_minus_ << ")";
      break;
    case RelKind::kDatasetChanges:
      out << "dataset_changes(" << changes_ << ")";
      break;
    case RelKind::kL2Ball:
      out << "l2_ball(" << ball_radius_ << ")";
      break;
    case RelKind::kPerturbKRecords:
      out << "perturb_k_records(" << k_records_ << "," << perturb_radius_
          << ")";
      break;
    case RelKind::kJoint:
      out << "joint(" << train_->describe() << "," << test_->describe() << ")";
      break;
  }
  return out.str();
}

namespace {

nlohmann::json relation_to_json(const NeighboringRelation& r) {
  nlohmann::json j;
  switch (r.kind()) {
    case RelKind::kAddRemove:
      j["type"] = "add_remove";
      j["r_plus"] = r.r_plus();
      j["r_minus"] = r.r_minus();
      break;
    case RelKind::kDatasetChanges:
      j["type"] = "dataset_changes";
      j["radius"] = r.changes();
      break;
    case RelKind::kL2Ball:
      j["type"] = "l2_ball";
      j["radius"] = r.ball_radius();
      break;
    case RelKind::kPerturbKRecords:
      j["type"] = "perturb_k_records";
      j["k"] = r.k_records();
      j["radius"] = r.perturb_radius();
      break;
    case RelKind::kJoint:
      j["type"] = "joint";
      j["train"] = relation_to_json(r.train());
      j["test"] = relation_to_json(r.test());
      break;
  }
  return j;
}

NeighboringRelation relation_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "add_remove") {
    return NeighboringRelation::add_remove(j.at("r_plus").get<int>(),
                                           j.at("r_minus").get<int>());
  }
  if (type == "dataset_changes") {
    return NeighboringRelation::dataset_changes(j.at("radius").get<int>());
  }
  if (type == "l2_ball") {
    return NeighboringRelation::l2_ball(j.at("radius").get<double>());
  }
  if (type == "perturb_k_records") {
    return NeighboringRelation::perturb_k_records(j.at("k").get<int>(),
                                                  j.at("radius").get<double>());
  }
  if (type == "joint") {
    return NeighboringRelation::joint(relation_from_json(j.at("train")),
                                      relation_from_json(j.at("test")));
  }
  throw DomainError("unknown relation type: " + type);
}

}  // namespace

std::string NeighboringRelation::to_json_string() const {
  return relation_to_json(*this).dump();
}

NeighboringRelation NeighboringRelation::from_json_string(
    const std::string& text) {
  return relation_from_json(nlohmann::json::parse(text));
}

MechanismSpec MechanismSpec::gaussian(double sigma, double sensitivity) {
  if (!(sigma > 0)) throw DomainError("sigma must be > 0");
  if (!(sensitivity >= 0)) throw DomainError("sensitivity must be >= 0");
  MechanismSpec m;
  m.kind_ = Kind::kGaussian;
  m.sigma_ = sigma;
  m.sensitivity_ = sensitivity;
  return m;
}

MechanismSpec MechanismSpec::subsampled_gaussian(double gamma, double sigma,
                                                 int iterations) {
  if (!(gamma > 0) || !(gamma < 1)) throw DomainError("gamma must be in (0,1)");
  if (!(sigma > 0)) throw DomainError("sigma must be > 0");
  if (iterations < 1) throw DomainError("iterations must be >= 1");
  MechanismSpec m;
  m.kind_ = Kind::kSubsampledGaussian;
  m.gamma_ = gamma;
  m.sigma_ = sigma;
  m.iterations_ = iterations;
  return m;
}

MechanismSpec MechanismSpec::dpa(int partitions) {
  if (partitions < 1) throw DomainError("partitions must be >= 1");
  MechanismSpec m;
  m.kind_ = Kind::kDpa;
  m.partitions_ = partitions;
  return m;
}

MechanismSpec MechanismSpec::dpa_compose(int partitions, MechanismSpec base) {
  if (partitions < 1) throw DomainError("partitions must be >= 1");
  MechanismSpec m;
  m.kind_ = Kind::kDpaCompose;
  m.partitions_ = partitions;
  m.components_.push_back(std::move(base));
  return m;
}

MechanismSpec MechanismSpec::preprocess_amplified(double sigma_in,
                                                  MechanismSpec base) {
  if (!(sigma_in > 0)) throw DomainError("sigma_in must be > 0");
  MechanismSpec m;
  m.kind_ = Kind::kPreprocessAmplified;
  m.sigma_in_ = sigma_in;
  m.components_.push_back(std::move(base));
  return m;
}

MechanismSpec MechanismSpec::randomized_response(double p) {
  if (!(p > 0.5) || !(p < 1)) throw DomainError("p must be in (0.5, 1)");
  MechanismSpec m;
  m.kind_ = Kind::kRandomizedResponse;
  m.flip_p_ = p;
  return m;
}

MechanismSpec MechanismSpec::composition(std::vector<MechanismSpec> parts) {
  if (parts.empty()) throw DomainError("composition must be non-empty");
  MechanismSpec m;
  m.kind_ = Kind::kComposition;
  m.components_ = std::move(parts);
  return m;
}

namespace {

nlohmann::json mechanism_to_json(const MechanismSpec& m) {
  nlohmann::json j;
  switch (m.kind()) {
    case Kind::kGaussian:
      j["type"] = "gaussian";
      j["sigma"] = m.sigma();
      j["sensitivity"] = m.sensitivity();
      break;
    case Kind::kSubsampledGaussian:
      j["type"] = "subsampled_gaussian";
      j["gamma"] = m.gamma();
      j["sigma"] = m.sigma();
      j["iterations"] = m.iterations();
      break;
    case Kind::kDpa:
      j["type"] = "dpa";
      j["partitions"] = m.partitions();
      break;
    case Kind::kDpaCompose:
      j["type"] = "dpa_compose";
      j["partitions"] = m.partitions();
      j["base"] = mechanism_to_json(m.base());
      break;
    case Kind::kPreprocessAmplified:
      j["type"] = "preprocess_amplified";
      j["sigma_in"] = m.sigma_in();
      j["base"] = mechanism_to_json(m.base());
      break;
    case Kind::kRandomizedResponse:
      j["type"] = "randomized_response";
      j["p"] = m.flip_p();
      break;
    case Kind::kComposition: {
      j["type"] = "composition";
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& c : m.components()) parts.push_back(mechanism_to_json(c));
      j["components"] = std::move(parts);
      break;
    }
  }
  return j;
}

MechanismSpec mechanism_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian") {
    return MechanismSpec::gaussian(j.at("sigma").get<double>(),
                                   j.value("sensitivity", 1.0));
  }
  if (type == "subsampled_gaussian") {
    return MechanismSpec::subsampled_gaussian(j.at("gamma").get<double>(),
                                              j.at("sigma").get<double>(),
                                              j.at("iterations").get<int>());
  }
  if (type == "dpa") {
    return MechanismSpec::dpa(j.at("partitions").get<int>());
  }
  if (type == "dpa_compose") {
    return MechanismSpec::dpa_compose(j.at("partitions").get<int>(),
                                      mechanism_from_json(j.at("base")));
  }
  if (type == "preprocess_amplified") {
    return MechanismSpec::preprocess_amplified(
        j.at("sigma_in").get<double>(), mechanism_from_json(j.at("base")));
  }
  if (type == "randomized_response") {
    return MechanismSpec::randomized_response(j.at("p").get<double>());
  }
  if (type == "composition") {
    std::vector<MechanismSpec> parts;
    for (const auto& c : j.at("components")) {
      parts.push_back(mechanism_from_json(c));
    }
    return MechanismSpec::composition(std::move(parts));
  }
  throw DomainError("unknown mechanism type: " + type);
}

}  // namespace

std::string MechanismSpec::to_json_string() const {
  return mechanism_to_json(*this).dump();
}

MechanismSpec MechanismSpec::from_json_string(const std::string& text) {
  return mechanism_from_json(nlohmann::json::parse(text));
}

std::vector<NeighboringRelation> decompose_relation(
    const NeighboringRelation& rel) {
  if (rel.kind() == RelKind::kDatasetChanges) {
    std::vector<NeighboringRelation> out;
    for (int r = 0; r <= rel.changes(); ++r) {
      out.push_back(NeighboringRelation::add_remove(r, rel.changes() - r));
    }
    return out;
  }
  if (rel.kind() == RelKind::kJoint) {
    std::vector<NeighboringRelation> out;
    for (const auto& train : decompose_relation(rel.train())) {
      out.push_back(NeighboringRelation::joint(train, rel.test()));
    }
    return out;
  }
  return {rel};
}

namespace {

std::vector<double> binomial_weights(int n, double gamma) {
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  double coeff = 1;
  double total = 0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) coeff = coeff * (n - k + 1) / k;
    w[static_cast<std::size_t>(k)] =
        coeff * std::pow(gamma, k) * std::pow(1 - gamma, n - k);
    total += w[static_cast<std::size_t>(k)];
  }
  for (auto& x : w) x /= total;
  return w;
}

DistributionDescriptor binomial_mixture(int n, double gamma, double sigma,
                                        double mean_sign) {
  const std::vector<double> weights = binomial_weights(n, gamma);
  std::vector<GaussianComponent> components;
  components.reserve(weights.size());
  for (int k = 0; k <= n; ++k) {
    components.push_back(
        {weights[static_cast<std::size_t>(k)], mean_sign * k, sigma});
  }
  return DistributionDescriptor::gaussian_mixture(std::move(components));
}

}  // namespace

std::pair<DistributionDescriptor, DistributionDescriptor> dominating_pair(
    const MechanismSpec& spec, const NeighboringRelation& rel) {
  if (spec.kind() == Kind::kSubsampledGaussian &&
      rel.kind() == RelKind::kAddRemove) {
    return {binomial_mixture(rel.r_minus(), spec.gamma(), spec.sigma(), +1),
            binomial_mixture(rel.r_plus(), spec.gamma(), spec.sigma(), -1)};
  }
  if (spec.kind() == Kind::kGaussian && rel.kind() == RelKind::kL2Ball) {
    const double shift = rel.ball_radius() * spec.sensitivity();
    return {DistributionDescriptor::gaussian(0, spec.sigma()),
            DistributionDescriptor::gaussian(shift, spec.sigma())};
  }
  if (spec.kind() == Kind::kRandomizedResponse &&
      (rel.kind() == RelKind::kAddRemove ||
       rel.kind() == RelKind::kDatasetChanges)) {
    if (rel.trivial()) {
      auto same = DistributionDescriptor::discrete(
          {{1.0, spec.flip_p()}, {0.0, 1 - spec.flip_p()}});
      return {same, same};
    }
    return randomized_response_pair(spec.flip_p());
  }
  throw NoDominatingPairError(
      "no dominating pair for this mechanism/relation combination; use the "
      "profile-level APIs (mechanism_profile)");
}

double dpa_profile(int partitions, int changes, double epsilon) {
  if (partitions < 1) throw DomainError("partitions must be >= 1");
  if (changes < 0 || changes > partitions) {
    throw DomainError("changes must satisfy 0 <= R <= N");
  }
  const double rn = static_cast<double>(changes) / partitions;
  if (epsilon >= 0) return rn;
  return 1.0 - (1.0 - rn) * std::exp(epsilon);
}

double dpa_tradeoff(int partitions, int changes, double alpha) {
  if (partitions < 1) throw DomainError("partitions must be >= 1");
  if (changes < 0 || changes > partitions) {
    throw DomainError("changes must satisfy 0 <= R <= N");
  }
  const double rn = static_cast<double>(changes) / partitions;
  return std::max(1.0 - rn - alpha, 0.0);
}

double dpa_compose_profile(int partitions, int changes, double base_delta) {
  if (partitions < 1) throw DomainError("partitions must be >= 1");
  if (changes < 0 || changes > partitions) {
    throw DomainError("changes must satisfy 0 <= R <= N");
  }
  const double rn = static_cast<double>(changes) / partitions;
  return rn + (1.0 - rn) * base_delta;
}

double dpa_compose_tradeoff(int partitions, int changes,
                            const TradeoffCurve& base_curve, double alpha) {
  if (partitions < 1) throw DomainError("partitions must be >= 1");
  if (changes < 0 || changes > partitions) {
    throw DomainError("changes must satisfy 0 <= R <= N");
  }
  if (changes == partitions) return 0;
  const double rn = static_cast<double>(changes) / partitions;
  if (alpha > 1.0 - rn) return 0;
  return (1.0 - rn) * base_curve(alpha / (1.0 - rn));
}

double preprocess_amplified_profile(double sigma_in, double r,
                                    double base_delta_at_eps, double epsilon) {
  if (!(sigma_in > 0)) throw DomainError("sigma_in must be > 0");
  if (!(r >= 0)) throw DomainError("perturbation radius must be >= 0");
  const double w = 2 * normal_cdf(r / (2 * sigma_in)) - 1;
  const double floor = std::max(0.0, 1.0 - safe_exp(epsilon));
  return std::min(1.0, w * base_delta_at_eps + (1.0 - w) * floor);
}

std::pair<DistributionDescriptor, DistributionDescriptor>
randomized_response_pair(double p) {
  if (!(p > 0.5) || !(p < 1)) throw DomainError("p must be in (0.5, 1)");
  return {DistributionDescriptor::discrete({{1.0, p}, {0.0, 1 - p}}),
          DistributionDescriptor::discrete({{1.0, 1 - p}, {0.0, p}})};
}

namespace {

// (train part, test part) of a decomposed leaf relation.
std::pair<NeighboringRelation, NeighboringRelation> split_relation(
    const NeighboringRelation& rel) {
  if (rel.kind() == RelKind::kJoint) return {rel.train(), rel.test()};
  if (rel.kind() == RelKind::kL2Ball) {
    return {NeighboringRelation::dataset_changes(0), rel};
  }
  return {rel, NeighboringRelation::l2_ball(0)};
}

int train_change_count(const NeighboringRelation& rel) {
  switch (rel.kind()) {
    case RelKind::kAddRemove:
      return rel.r_plus() + rel.r_minus();
    case RelKind::kDatasetChanges:
      return rel.changes();
    default:
      throw NoDominatingPairError("relation has no dataset-change count: " +
                                  rel.describe());
  }
}

bool claims_test_slot(const MechanismSpec& m) {
  return m.kind() == Kind::kGaussian;
}

bool claims_train_slot(const MechanismSpec& m);

bool composition_claims(const MechanismSpec& m, bool test_slot) {
  for (const auto& c : m.components()) {
    if (test_slot ? claims_test_slot(c) : claims_train_slot(c)) return true;
    if (c.kind() == Kind::kComposition && composition_claims(c, test_slot)) {
      return true;
    }
  }
  return false;
}

bool claims_train_slot(const MechanismSpec& m) {
  switch (m.kind()) {
    case Kind::kSubsampledGaussian:
    case Kind::kDpa:
    case Kind::kDpaCompose:
    case Kind::kPreprocessAmplified:
    case Kind::kRandomizedResponse:
      return true;
    case Kind::kComposition:
      return composition_claims(m, /*test_slot=*/false);
    default:
      return false;
  }
}

DiscretePLD pld_for(const MechanismSpec& spec, const NeighboringRelation& rel,
                    const DiscretizationSpec& disc);

// PLD of DPA's partition sampling: loss 0 with probability 1 - R/N and
// +infinity otherwise.
DiscretePLD dpa_pld(int partitions, int changes, double bucket_width) {
  const double rn = dpa_profile(partitions, changes, 0.0);
  if (rn >= 1) return DiscretePLD(bucket_width, 0, {}, 1.0);
  return DiscretePLD(bucket_width, 0, {1.0 - rn}, rn);
}

DiscretePLD composition_pld(const MechanismSpec& spec,
                            const NeighboringRelation& rel,
                            const DiscretizationSpec& disc) {
  const auto [train_rel, test_rel] = split_relation(rel);
  if (!train_rel.trivial() && !composition_claims(spec, false)) {
    throw NoDominatingPairError(
        "no component of the composition handles the training perturbation " +
        train_rel.describe());
  }
  if (!test_rel.trivial() && !composition_claims(spec, true)) {
    throw NoDominatingPairError(
        "no component of the composition handles the test perturbation " +
        test_rel.describe());
  }
  DiscretePLD acc = DiscretePLD::identity(disc.bucket_width);
  for (const auto& part : spec.components()) {
    NeighboringRelation slot =
        claims_test_slot(part)
            ? test_rel
            : (part.kind() == Kind::kComposition ? rel : train_rel);
    acc = compose(acc, pld_for(part, slot, disc));
  }
  return acc;
}

DiscretePLD pld_for(const MechanismSpec& spec, const NeighboringRelation& rel,
                    const DiscretizationSpec& disc) {
  switch (spec.kind()) {
    case Kind::kGaussian: {
      if (rel.kind() != RelKind::kL2Ball) {
        throw NoDominatingPairError("gaussian mechanism expects an l2_ball "
                                    "relation, got " + rel.describe());
      }
      const auto [p, q] = dominating_pair(spec, rel);
      return pld_from_pair(p, q, disc);
    }
    case Kind::kSubsampledGaussian: {
      NeighboringRelation slot = rel;
      if (slot.kind() == RelKind::kDatasetChanges && slot.trivial()) {
        slot = NeighboringRelation::add_remove(0, 0);
      }
      if (slot.kind() != RelKind::kAddRemove) {
        throw NoDominatingPairError(
            "subsampled gaussian expects an add_remove relation, got " +
            rel.describe());
      }
      const auto [p, q] = dominating_pair(spec, slot);
      return self_compose(pld_from_pair(p, q, disc), spec.iterations());
    }
    case Kind::kDpa:
      return dpa_pld(spec.partitions(), train_change_count(rel),
                     disc.bucket_width);
    case Kind::kDpaCompose: {
      const auto [train_rel, test_rel] = split_relation(rel);
      return compose(dpa_pld(spec.partitions(), train_change_count(train_rel),
                             disc.bucket_width),
                     pld_for(spec.base(), test_rel, disc));
    }
    case Kind::kPreprocessAmplified: {
      if (rel.kind() != RelKind::kPerturbKRecords) {
        throw NoDominatingPairError(
            "preprocess_amplified expects a perturb_k_records relation, got " +
            rel.describe());
      }
      const double w =
          2 * normal_cdf(rel.perturb_radius() / (2 * spec.sigma_in())) - 1;
      const NeighboringRelation base_rel =
          NeighboringRelation::add_remove(rel.k_records(), rel.k_records());
      DiscretePLD base = pld_for(spec.base(), base_rel, disc);
      // With probability 1-w the coupled noise draws coincide and the loss
      // is 0; otherwise the base mechanism's loss applies.
      std::vector<double> masses = base.masses();
      for (double& m : masses) m *= w;
      const std::int64_t zero_pos = -base.min_index();
      if (zero_pos >= 0 &&
          zero_pos < static_cast<std::int64_t>(masses.size())) {
        masses[static_cast<std::size_t>(zero_pos)] += 1.0 - w;
        return DiscretePLD(base.bucket_width(), base.min_index(),
                           std::move(masses), w * base.infinity_mass());
      }
      std::vector<PldAtom> atoms;
      for (std::size_t j = 0; j < masses.size(); ++j) {
        if (masses[j] > 0) atoms.push_back({base.loss_at(j), masses[j]});
      }
      atoms.push_back({0.0, 1.0 - w});
      return DiscretePLD::from_atoms(base.bucket_width(), std::move(atoms),
                                     w * base.infinity_mass());
    }
    case Kind::kRandomizedResponse: {
      const auto [p, q] = dominating_pair(spec, rel);
      return pld_from_pair(p, q, disc);
    }
    case Kind::kComposition:
      return composition_pld(spec, rel, disc);
  }
  throw NoDominatingPairError("unsupported mechanism");
}

// Profile for one decomposed leaf relation. Lone closed-form mechanisms stay
// closed-form; stacks go through PLD composition.
PrivacyProfile leaf_profile(const MechanismSpec& spec,
                            const NeighboringRelation& rel,
                            const std::vector<double>& grid,
                            const DiscretizationSpec& disc) {
  const auto [train_rel, test_rel] = split_relation(rel);
  switch (spec.kind()) {
    case Kind::kGaussian: {
      if (!train_rel.trivial()) {
        throw NoDominatingPairError(
            "a lone gaussian mechanism cannot cover training perturbation " +
            train_rel.describe());
      }
      const double mu =
          test_rel.ball_radius() * spec.sensitivity() / spec.sigma();
      return PrivacyProfile::gaussian(mu, grid);
    }
    case Kind::kDpa: {
      if (!test_rel.trivial()) {
        throw NoDominatingPairError(
            "plain DPA cannot cover test perturbation " + test_rel.describe());
      }
      const int n = spec.partitions();
      const int r = train_change_count(train_rel);
      if (r > n) throw DomainError("changes must satisfy 0 <= R <= N");
      return PrivacyProfile(
          [n, r](double eps) { return dpa_profile(n, r, eps); }, grid);
    }
    case Kind::kDpaCompose: {
      const int n = spec.partitions();
      const int r = train_change_count(train_rel);
      if (r > n) throw DomainError("changes must satisfy 0 <= R <= N");
      auto base = std::make_shared<PrivacyProfile>(
          leaf_profile(spec.base(), test_rel, grid, disc));
      return PrivacyProfile(
          [n, r, base](double eps) {
            return dpa_compose_profile(n, r, (*base)(eps));
          },
          grid);
    }
    case Kind::kPreprocessAmplified: {
      if (!test_rel.trivial()) {
        throw NoDominatingPairError(
            "preprocess_amplified alone cannot cover test perturbation " +
            test_rel.describe());
      }
      if (train_rel.kind() != RelKind::kPerturbKRecords) {
        throw NoDominatingPairError(
            "preprocess_amplified expects a perturb_k_records relation, got " +
            train_rel.describe());
      }
      const double sigma_in = spec.sigma_in();
      const double radius = train_rel.perturb_radius();
      auto base = std::make_shared<PrivacyProfile>(leaf_profile(
          spec.base(),
          NeighboringRelation::add_remove(train_rel.k_records(),
                                          train_rel.k_records()),
          grid, disc));
      return PrivacyProfile(
          [sigma_in, radius, base](double eps) {
            return preprocess_amplified_profile(sigma_in, radius, (*base)(eps),
                                                eps);
          },
          grid);
    }
    case Kind::kSubsampledGaussian: {
      if (!test_rel.trivial()) {
        throw NoDominatingPairError(
            "subsampled gaussian alone cannot cover test perturbation " +
            test_rel.describe());
      }
      NeighboringRelation slot = train_rel;
      if (slot.kind() == RelKind::kDatasetChanges && slot.trivial()) {
        slot = NeighboringRelation::add_remove(0, 0);
      }
      return PrivacyProfile::from_pld(pld_for(spec, slot, disc), grid);
    }
    case Kind::kRandomizedResponse: {
      if (!test_rel.trivial()) {
        throw NoDominatingPairError(
            "randomized response cannot cover test perturbation " +
            test_rel.describe());
      }
      return PrivacyProfile::from_pld(pld_for(spec, train_rel, disc), grid);
    }
    case Kind::kComposition:
      return PrivacyProfile::from_pld(pld_for(spec, rel, disc), grid);
  }
  throw NoDominatingPairError("unsupported mechanism");
}

}  // namespace

std::vector<RelationProfile> mechanism_profile(const MechanismSpec& spec,
                                               const NeighboringRelation& rel,
                                               std::vector<double> epsilon_grid,
                                               const DiscretizationSpec& disc) {
  disc.validate();
  std::vector<RelationProfile> out;
  for (const auto& leaf : decompose_relation(rel)) {
    out.push_back({leaf, leaf_profile(spec, leaf, epsilon_grid, disc)});
  }
  return out;
}

DiscretePLD mechanism_pld(const MechanismSpec& spec,
                          const NeighboringRelation& rel,
                          const DiscretizationSpec& disc) {
  disc.validate();
  if (spec.kind() == Kind::kComposition) {
    return composition_pld(spec, rel, disc);
  }
  if (spec.kind() == Kind::kDpaCompose) {
    return pld_for(spec, rel, disc);  // splits joint relations internally
  }
  const auto [train_rel, test_rel] = split_relation(rel);
  if (claims_test_slot(spec)) {
    if (!train_rel.trivial()) {
      throw NoDominatingPairError(
          "a lone test-time mechanism cannot cover training perturbation " +
          train_rel.describe());
    }
    return pld_for(spec, test_rel, disc);
  }
  if (!test_rel.trivial()) {
    throw NoDominatingPairError(
        "a lone training mechanism cannot cover test perturbation " +
        test_rel.describe());
  }
  return pld_for(spec, train_rel, disc);
}

}  // namespace smoothcert
