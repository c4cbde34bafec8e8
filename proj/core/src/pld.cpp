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
#include "smoothcert/pld.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "pair_analysis.hpp"
#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"

namespace smoothcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTolerance = 1e-9;

// Rounds loss/width up to an integer bucket index, snapping values that are
// already within a hair of a grid point so grid-aligned losses stay put.
std::int64_t ceil_index(double loss, double width) {
  const double r = loss / width;
  const double nearest = std::nearbyint(r);
  if (std::fabs(r - nearest) < 1e-6) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(r));
}

void trim_and_shift(std::vector<double>& masses, std::int64_t& min_index) {
  std::size_t first = 0;
  while (first < masses.size() && masses[first] == 0) ++first;
  std::size_t last = masses.size();
  while (last > first && masses[last - 1] == 0) --last;
  if (first == last) {
    masses.clear();
    return;
  }
  masses.erase(masses.begin() + static_cast<std::ptrdiff_t>(last),
               masses.end());
  masses.erase(masses.begin(), masses.begin() + static_cast<std::ptrdiff_t>(first));
  min_index += static_cast<std::int64_t>(first);
}

}  // namespace

void DiscretizationSpec::validate() const {
  if (!(bucket_width > 0)) throw DomainError("bucket_width must be > 0");
  if (!(loss_range_lo < loss_range_hi)) {
    throw DomainError("loss_range must satisfy lo < hi");
  }
  if (!(tail_mass_bound > 0) || !(tail_mass_bound < 1)) {
    throw DomainError("tail_mass_bound must be in (0,1)");
  }
  if (!std::isfinite(loss_range_lo) || !std::isfinite(loss_range_hi)) {
    throw DomainError("loss_range must be finite");
  }
}

DiscretePLD::DiscretePLD(double bucket_width, std::int64_t min_index,
                         std::vector<double> masses, double infinity_mass)
    : bucket_width_(bucket_width),
      min_index_(min_index),
      masses_(std::move(masses)),
      infinity_mass_(infinity_mass) {
  if (!(bucket_width_ > 0)) throw DomainError("bucket_width must be > 0");
  if (infinity_mass_ < 0 || infinity_mass_ > 1 + kMassTolerance) {
    throw DomainError("infinity_mass out of range");
  }
  double total = infinity_mass_;
  for (double m : masses_) {
    if (m < 0) throw DomainError("negative PLD mass");
    total += m;
  }
  if (std::fabs(total - 1.0) > kMassTolerance) {
    throw DomainError("PLD masses must sum to 1 (got " + std::to_string(total) +
                      ")");
  }
  trim_and_shift(masses_, min_index_);
}

DiscretePLD DiscretePLD::from_atoms(double bucket_width,
                                    std::vector<PldAtom> atoms,
                                    double infinity_mass) {
  if (!(bucket_width > 0)) throw DomainError("bucket_width must be > 0");
  std::map<std::int64_t, double> by_index;
  for (const auto& a : atoms) {
    const double r = a.loss / bucket_width;
    const double nearest = std::nearbyint(r);
    if (std::fabs(r - nearest) > 1e-6) {
      throw DomainError("atom loss is not on the bucket grid");
    }
    by_index[static_cast<std::int64_t>(nearest)] += a.mass;
  }
  if (by_index.empty()) {
    return DiscretePLD(bucket_width, 0, {}, infinity_mass);
  }
  const std::int64_t lo = by_index.begin()->first;
  const std::int64_t hi = by_index.rbegin()->first;
  std::vector<double> masses(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [idx, mass] : by_index) {
    masses[static_cast<std::size_t>(idx - lo)] = mass;
  }
  return DiscretePLD(bucket_width, lo, std::move(masses), infinity_mass);
}

DiscretePLD DiscretePLD::identity(double bucket_width) {
  return DiscretePLD(bucket_width, 0, {1.0}, 0.0);
}

std::vector<PldAtom> DiscretePLD::atoms() const {
  std::vector<PldAtom> out;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    if (masses_[j] > 0) out.push_back({loss_at(j), masses_[j]});
  }
  return out;
}

double DiscretePLD::total_finite_mass() const {
  double total = 0;
  for (double m : masses_) total += m;
  return total;
}

std::string DiscretePLD::to_json_string() const {
  nlohmann::json j;
  j["bucket_width"] = bucket_width_;
  j["infinity_mass"] = infinity_mass_;
  nlohmann::json atoms_json = nlohmann::json::array();
  for (const auto& a : atoms()) {
    atoms_json.push_back({a.loss, a.mass});
  }
  j["atoms"] = std::move(atoms_json);
  return j.dump();
}

DiscretePLD DiscretePLD::from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  std::vector<PldAtom> atoms;
  for (const auto& entry : j.at("atoms")) {
    atoms.push_back({entry.at(0).get<double>(), entry.at(1).get<double>()});
  }
  return from_atoms(j.at("bucket_width").get<double>(), std::move(atoms),
                    j.at("infinity_mass").get<double>());
}

DiscretePLD compose(const DiscretePLD& a, const DiscretePLD& b) {
  if (a.bucket_width() != b.bucket_width()) {
    throw IncompatibleGridError("bucket widths differ; rebucket first");
  }
  const double infinity_mass =
      1.0 - (1.0 - a.infinity_mass()) * (1.0 - b.infinity_mass());
  if (a.masses().empty() || b.masses().empty()) {
    // One side is all-infinity: the finite part vanishes, but the finite
    // remainder of the other side keeps its shape scaled by (1 - inf).
    const DiscretePLD& finite = a.masses().empty() ? b : a;
    const double scale =
        a.masses().empty() ? a.infinity_mass() : b.infinity_mass();
    std::vector<double> masses = finite.masses();
    for (double& m : masses) m *= (1.0 - scale);
    return DiscretePLD(a.bucket_width(), finite.min_index(), std::move(masses),
                       infinity_mass);
  }
  std::vector<double> masses = convolve(a.masses(), b.masses());
  return DiscretePLD(a.bucket_width(), a.min_index() + b.min_index(),
                     std::move(masses), infinity_mass);
}

DiscretePLD self_compose(const DiscretePLD& a, int k) {
  if (k < 1) throw DomainError("self_compose needs k >= 1");
  DiscretePLD result = DiscretePLD::identity(a.bucket_width());
  DiscretePLD base = a;
  int remaining = k;
  while (true) {
    if (remaining & 1) result = compose(result, base);
    remaining >>= 1;
    if (remaining == 0) break;
    base = compose(base, base);
  }
  return result;
}

DiscretePLD rebucket(const DiscretePLD& a, double new_width) {
  if (!(new_width > 0)) throw DomainError("new_width must be > 0");
  std::map<std::int64_t, double> by_index;
  for (std::size_t j = 0; j < a.masses().size(); ++j) {
    if (a.masses()[j] == 0) continue;
    by_index[ceil_index(a.loss_at(j), new_width)] += a.masses()[j];
  }
  if (by_index.empty()) {
    return DiscretePLD(new_width, 0, {}, a.infinity_mass());
  }
  const std::int64_t lo = by_index.begin()->first;
  const std::int64_t hi = by_index.rbegin()->first;
  std::vector<double> masses(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [idx, mass] : by_index) {
    masses[static_cast<std::size_t>(idx - lo)] = mass;
  }
  return DiscretePLD(new_width, lo, std::move(masses), a.infinity_mass());
}

double profile_from_pld(const DiscretePLD& a, double epsilon) {
  double acc = a.infinity_mass();
  for (std::size_t j = 0; j < a.masses().size(); ++j) {
    const double mass = a.masses()[j];
    if (mass == 0) continue;
    const double loss = a.loss_at(j);
    if (loss > epsilon) acc += mass * (1.0 - std::exp(epsilon - loss));
  }
  return std::clamp(acc, 0.0, 1.0);
}

PldProfileEvaluator::PldProfileEvaluator(const DiscretePLD& pld)
    : bucket_width_(pld.bucket_width()),
      min_index_(pld.min_index()),
      infinity_mass_(pld.infinity_mass()) {
  const auto& masses = pld.masses();
  const std::size_t n = masses.size();
  suffix_mass_.assign(n + 1, 0.0);
  log_suffix_weighted_.assign(n + 1, -kInf);
  for (std::size_t j = n; j-- > 0;) {
    suffix_mass_[j] = suffix_mass_[j + 1] + masses[j];
    double entry = -kInf;
    if (masses[j] > 0) {
      entry = std::log(masses[j]) -
              static_cast<double>(min_index_ + static_cast<std::int64_t>(j)) *
                  bucket_width_;
    }
    log_suffix_weighted_[j] = log_add_exp(log_suffix_weighted_[j + 1], entry);
  }
}

double PldProfileEvaluator::operator()(double epsilon) const {
  const std::size_t n = suffix_mass_.size() - 1;
  // First bucket with loss strictly above epsilon.
  double pos = std::floor(epsilon / bucket_width_) -
               static_cast<double>(min_index_) + 1.0;
  std::int64_t j =
      static_cast<std::int64_t>(std::clamp(pos, 0.0, static_cast<double>(n)));
  auto loss_of = [this](std::int64_t idx) {
    return static_cast<double>(min_index_ + idx) * bucket_width_;
  };
  while (j > 0 && loss_of(j - 1) > epsilon) --j;
  while (j < static_cast<std::int64_t>(n) && loss_of(j) <= epsilon) ++j;
  const auto uj = static_cast<std::size_t>(j);
  double acc = infinity_mass_ + suffix_mass_[uj];
  if (log_suffix_weighted_[uj] != -kInf) {
    acc -= std::exp(epsilon + log_suffix_weighted_[uj]);
  }
  return std::clamp(acc, 0.0, 1.0);
}

namespace {

DiscretePLD pld_from_discrete_pair(const DistributionDescriptor& p,
                                   const DistributionDescriptor& q,
                                   const DiscretizationSpec& spec) {
  const auto merged = internal::MergedDiscretePair::build(p, q);
  const double w = spec.bucket_width;
  const std::int64_t k_lo = ceil_index(spec.loss_range_lo, w);
  const std::int64_t k_hi = ceil_index(spec.loss_range_hi, w);
  double infinity_mass = 0;
  double lifted_mass = 0;
  std::map<std::int64_t, double> by_index;
  for (std::size_t i = 0; i < merged.locations.size(); ++i) {
    const double pm = merged.p_mass[i];
    if (pm == 0) continue;
    if (merged.q_mass[i] == 0) {
      infinity_mass += pm;
      continue;
    }
    const double loss = std::log(pm) - std::log(merged.q_mass[i]);
    std::int64_t k = ceil_index(loss, w);
    if (k > k_hi) {
      infinity_mass += pm;
      continue;
    }
    if (k < k_lo) {
      lifted_mass += pm;
      k = k_lo;
    }
    by_index[k] += pm;
  }
  if (lifted_mass > spec.tail_mass_bound) {
    throw RangeTooSmallError("loss_range lifts too much mass from below");
  }
  std::vector<PldAtom> atoms;
  atoms.reserve(by_index.size());
  for (const auto& [idx, mass] : by_index) {
    atoms.push_back({static_cast<double>(idx) * w, mass});
  }
  return DiscretePLD::from_atoms(w, std::move(atoms), infinity_mass);
}

// Walks y upward until loss(y) >= target, then inverts on the bracket.
double march_loss_inverse(const internal::MonotonePair& pair, double target,
                          double y_start, double y_limit, double step_hint) {
  double lo = y_start;
  double hi = y_start;
  double step = step_hint;
  while (hi < y_limit && pair.loss(hi) < target) {
    lo = hi;
    hi = std::min(y_limit, hi + step);
    step *= 2;
  }
  if (pair.loss(hi) < target) return y_limit;
  return pair.loss_inverse(target, lo, hi);
}

DiscretePLD pld_from_continuous_pair(const DistributionDescriptor& p,
                                     const DistributionDescriptor& q,
                                     const DiscretizationSpec& spec) {
  auto pair = internal::MonotonePair::try_build(p, q);
  if (!pair) {
    throw UnsupportedPairError(
        "pld_from_pair needs a common-stddev mixture pair with separated "
        "means");
  }
  const double w = spec.bucket_width;
  if (!pair->strictly_increasing()) return DiscretePLD::identity(w);

  const double y_lo = pair->quantile_p(spec.tail_mass_bound / 2);
  const double y_hi = pair->quantile_p(1 - spec.tail_mass_bound / 2);
  const double loss_lo = std::max(pair->loss(y_lo), spec.loss_range_lo);
  const double loss_hi = std::min(pair->loss(y_hi), spec.loss_range_hi);
  if (loss_lo >= loss_hi) {
    throw RangeTooSmallError("loss_range does not intersect the loss support");
  }
  const std::int64_t k_min = ceil_index(loss_lo, w);
  std::int64_t k_max = ceil_index(loss_hi, w);
  if (k_max <= k_min) k_max = k_min + 1;

  // Everything below the lowest bucket edge gets lifted into that bucket;
  // refuse ranges where that lift is more than the tail bound.
  const double slope_hint =
      std::max(pair->loss_derivative(0.5 * (y_lo + y_hi)), 1e-12);
  const double step_hint = std::max(w / slope_hint, 1e-9 * pair->sigma);
  const double y_floor = march_loss_inverse(
      *pair, static_cast<double>(k_min - 1) * w, y_lo - 10 * pair->sigma, y_hi,
      step_hint);
  const double lifted = pair->cdf_p(y_floor);
  if (lifted > spec.tail_mass_bound) {
    throw RangeTooSmallError("loss_range lifts too much mass from below");
  }

  std::vector<double> masses(static_cast<std::size_t>(k_max - k_min + 1), 0.0);
  double y_prev = y_lo - 10 * pair->sigma;
  double cdf_prev = 0.0;
  for (std::int64_t k = k_min; k <= k_max; ++k) {
    const double y_k = march_loss_inverse(*pair, static_cast<double>(k) * w,
                                          y_prev, y_hi + 10 * pair->sigma,
                                          step_hint);
    const double cdf_k = pair->cdf_p(y_k);
    masses[static_cast<std::size_t>(k - k_min)] =
        std::max(0.0, cdf_k - cdf_prev);
    y_prev = y_k;
    cdf_prev = cdf_k;
  }
  const double infinity_mass = std::max(0.0, 1.0 - cdf_prev);
  return DiscretePLD(w, k_min, std::move(masses), infinity_mass);
}

}  // namespace

DiscretePLD pld_from_pair(const DistributionDescriptor& p,
                          const DistributionDescriptor& q,
                          const DiscretizationSpec& spec) {
  spec.validate();
  const bool p_disc = p.kind() == DistributionKind::kDiscrete;
  const bool q_disc = q.kind() == DistributionKind::kDiscrete;
  if (p_disc && q_disc) return pld_from_discrete_pair(p, q, spec);
  if (p_disc != q_disc) {
    throw UnsupportedPairError("pld_from_pair on a discrete/continuous pair");
  }
  return pld_from_continuous_pair(p, q, spec);
}

}  // namespace smoothcert
