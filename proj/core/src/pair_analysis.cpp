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
#include "pair_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smoothcert/numeric.hpp"

namespace smoothcert::internal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mixture_log_pdf(const std::vector<double>& weights,
                       const std::vector<double>& means, double sigma,
                       double y) {
  double acc = -kInf;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc = log_add_exp(acc, std::log(weights[i]) +
                               log_normal_pdf(y, means[i], sigma));
  }
  return acc;
}

double mixture_cdf(const std::vector<double>& weights,
                   const std::vector<double>& means, double sigma, double y) {
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] * normal_cdf(y, means[i], sigma);
  }
  return acc;
}

// d/dy log mixture = posterior-weighted average of (mean_i - y) / sigma^2.
double mixture_log_pdf_derivative(const std::vector<double>& weights,
                                  const std::vector<double>& means,
                                  double sigma, double y) {
  double log_norm = -kInf;
  std::vector<double> log_terms(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    log_terms[i] = std::log(weights[i]) + log_normal_pdf(y, means[i], sigma);
    log_norm = log_add_exp(log_norm, log_terms[i]);
  }
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += std::exp(log_terms[i] - log_norm) * (means[i] - y);
  }
  return acc / (sigma * sigma);
}

struct FlatMixture {
  std::vector<double> weights, means;
  double sigma = 0;
  bool ok = false;
};

FlatMixture flatten(const DistributionDescriptor& d) {
  FlatMixture out;
  if (d.kind() == DistributionKind::kGaussian) {
    out.weights = {1.0};
    out.means = {d.mean()};
    out.sigma = d.stddev();
    out.ok = true;
    return out;
  }
  if (d.kind() != DistributionKind::kGaussianMixture) return out;
  for (const auto& c : d.components()) {
    if (c.weight == 0) continue;
    if (out.weights.empty()) {
      out.sigma = c.stddev;
    } else if (std::fabs(c.stddev - out.sigma) >
               1e-12 * std::max(1.0, out.sigma)) {
      return out;  // mixed stddevs: no monotone structure to exploit
    }
    out.weights.push_back(c.weight);
    out.means.push_back(c.mean);
  }
  out.ok = !out.weights.empty();
  return out;
}

}  // namespace

double MonotonePair::log_p(double y) const {
  return mixture_log_pdf(p_weights, p_means, sigma, y);
}

double MonotonePair::log_q(double y) const {
  return mixture_log_pdf(q_weights, q_means, sigma, y);
}

double MonotonePair::cdf_p(double y) const {
  return mixture_cdf(p_weights, p_means, sigma, y);
}

double MonotonePair::cdf_q(double y) const {
  return mixture_cdf(q_weights, q_means, sigma, y);
}

double MonotonePair::loss(double y) const { return log_p(y) - log_q(y); }

double MonotonePair::loss_derivative(double y) const {
  return mixture_log_pdf_derivative(p_weights, p_means, sigma, y) -
         mixture_log_pdf_derivative(q_weights, q_means, sigma, y);
}

bool MonotonePair::strictly_increasing() const {
  const double lo_p = *std::min_element(p_means.begin(), p_means.end());
  const double hi_p = *std::max_element(p_means.begin(), p_means.end());
  const double lo_q = *std::min_element(q_means.begin(), q_means.end());
  const double hi_q = *std::max_element(q_means.begin(), q_means.end());
  return !(lo_p == hi_p && lo_q == hi_q && lo_p == lo_q);
}

double MonotonePair::quantile_p(double u) const {
  if (u <= 0) return -kInf;
  if (u >= 1) return kInf;
  double lo = *std::min_element(p_means.begin(), p_means.end()) - 10 * sigma;
  double hi = *std::max_element(p_means.begin(), p_means.end()) + 10 * sigma;
  while (cdf_p(lo) > u) lo -= 10 * sigma;
  while (cdf_p(hi) < u) hi += 10 * sigma;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * (sigma + std::fabs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf_p(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double MonotonePair::loss_inverse(double target, double y_lo,
                                  double y_hi) const {
  double lo = y_lo, hi = y_hi;
  double y = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const double g = loss(y) - target;
    if (g > 0) {
      hi = y;
    } else {
      lo = y;
    }
    if (hi - lo < 1e-14 * (std::fabs(y) + sigma)) break;
    const double dg = loss_derivative(y);
    double next = dg > 0 ? y - g / dg : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    y = next;
  }
  return 0.5 * (lo + hi);
}

std::optional<MonotonePair> MonotonePair::try_build(
    const DistributionDescriptor& p, const DistributionDescriptor& q) {
  FlatMixture fp = flatten(p);
  FlatMixture fq = flatten(q);
  if (!fp.ok || !fq.ok) return std::nullopt;
  if (std::fabs(fp.sigma - fq.sigma) > 1e-12 * std::max(1.0, fp.sigma)) {
    return std::nullopt;
  }
  const double min_p = *std::min_element(fp.means.begin(), fp.means.end());
  const double max_p = *std::max_element(fp.means.begin(), fp.means.end());
  const double min_q = *std::min_element(fq.means.begin(), fq.means.end());
  const double max_q = *std::max_element(fq.means.begin(), fq.means.end());
  MonotonePair pair;
  pair.sigma = fp.sigma;
  if (min_p >= max_q) {
    pair.p_weights = std::move(fp.weights);
    pair.p_means = std::move(fp.means);
    pair.q_weights = std::move(fq.weights);
    pair.q_means = std::move(fq.means);
    return pair;
  }
  if (max_p <= min_q) {
    // Reflect y -> -y; the loss distribution is unchanged.
    pair.p_weights = std::move(fp.weights);
    pair.p_means = std::move(fp.means);
    pair.q_weights = std::move(fq.weights);
    pair.q_means = std::move(fq.means);
    for (auto& m : pair.p_means) m = -m;
    for (auto& m : pair.q_means) m = -m;
    return pair;
  }
  return std::nullopt;
}

MergedDiscretePair MergedDiscretePair::build(const DistributionDescriptor& p,
                                             const DistributionDescriptor& q) {
  std::vector<double> locations;
  locations.reserve(p.atoms().size() + q.atoms().size());
  for (const auto& a : p.atoms()) locations.push_back(a.location);
  for (const auto& a : q.atoms()) locations.push_back(a.location);
  std::sort(locations.begin(), locations.end());
  locations.erase(std::unique(locations.begin(), locations.end()),
                  locations.end());

  MergedDiscretePair out;
  out.locations = locations;
  out.p_mass.assign(locations.size(), 0.0);
  out.q_mass.assign(locations.size(), 0.0);
  auto fill = [&locations](const std::vector<DiscreteAtom>& atoms,
                           std::vector<double>& mass) {
    for (const auto& a : atoms) {
      const auto it =
          std::lower_bound(locations.begin(), locations.end(), a.location);
      mass[static_cast<std::size_t>(it - locations.begin())] += a.mass;
    }
  };
  fill(p.atoms(), out.p_mass);
  fill(q.atoms(), out.q_mass);
  return out;
}

}  // namespace smoothcert::internal
