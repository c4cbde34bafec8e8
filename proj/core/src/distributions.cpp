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
#include "smoothcert/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pair_analysis.hpp"
#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"

namespace smoothcert {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_total_mass(double total, const char* what) {
  if (std::fabs(total - 1.0) > kMassTolerance) {
    throw DomainError(std::string(what) + " must sum to 1");
  }
}

bool is_plain_gaussian(const DistributionDescriptor& d) {
  return d.kind() == DistributionKind::kGaussian;
}

bool is_continuous(const DistributionDescriptor& d) {
  return d.kind() != DistributionKind::kDiscrete;
}

}  // namespace

DistributionDescriptor DistributionDescriptor::discrete(
    std::vector<DiscreteAtom> atoms) {
  if (atoms.empty()) throw DomainError("discrete distribution needs atoms");
  double total = 0;
  std::set<double> seen;
  for (const auto& a : atoms) {
    if (a.mass < 0 || a.mass > 1 || !std::isfinite(a.location)) {
      throw DomainError("discrete atom out of range");
    }
    if (!seen.insert(a.location).second) {
      throw DomainError("discrete atom locations must be distinct");
    }
    total += a.mass;
  }
  check_total_mass(total, "discrete atom masses");
  std::sort(atoms.begin(), atoms.end(),
            [](const DiscreteAtom& a, const DiscreteAtom& b) {
              return a.location < b.location;
            });
  DistributionDescriptor d;
  d.kind_ = DistributionKind::kDiscrete;
  d.atoms_ = std::move(atoms);
  return d;
}

DistributionDescriptor DistributionDescriptor::gaussian(double mean,
                                                        double stddev) {
  if (!(stddev > 0) || !std::isfinite(mean) || !std::isfinite(stddev)) {
    throw DomainError("gaussian needs finite mean and stddev > 0");
  }
  DistributionDescriptor d;
  d.kind_ = DistributionKind::kGaussian;
  d.mean_ = mean;
  d.stddev_ = stddev;
  return d;
}

DistributionDescriptor DistributionDescriptor::gaussian_mixture(
    std::vector<GaussianComponent> components) {
  if (components.empty()) throw DomainError("mixture needs >= 1 component");
  double total = 0;
  for (const auto& c : components) {
    if (c.weight < 0 || c.weight > 1 || !(c.stddev > 0) ||
        !std::isfinite(c.mean)) {
      throw DomainError("mixture component out of range");
    }
    total += c.weight;
  }
  check_total_mass(total, "mixture weights");
  DistributionDescriptor d;
  d.kind_ = DistributionKind::kGaussianMixture;
  d.components_ = std::move(components);
  return d;
}

void PairDivergenceRequest::validate() const {
  if (!std::isfinite(epsilon)) throw DomainError("epsilon must be finite");
}

namespace {

double hs_discrete(const DistributionDescriptor& p,
                   const DistributionDescriptor& q, double epsilon) {
  const auto merged = internal::MergedDiscretePair::build(p, q);
  const double scale = std::exp(epsilon);
  double acc = 0;
  for (std::size_t i = 0; i < merged.locations.size(); ++i) {
    acc += std::max(0.0, merged.p_mass[i] - scale * merged.q_mass[i]);
  }
  return std::clamp(acc, 0.0, 1.0);
}

// Analytic profile of (N(delta, sigma^2), N(0, sigma^2)); mu = delta/sigma.
double hs_gaussian_closed_form(double mu, double epsilon) {
  mu = std::fabs(mu);
  if (mu == 0) return std::max(0.0, 1.0 - std::exp(epsilon));
  const double value = normal_cdf(mu / 2 - epsilon / mu) -
                       std::exp(epsilon) * normal_cdf(-mu / 2 - epsilon / mu);
  return std::clamp(value, 0.0, 1.0);
}

struct FlatView {
  std::vector<double> weights, means, stddevs;
};

FlatView flat_view(const DistributionDescriptor& d) {
  FlatView v;
  if (d.kind() == DistributionKind::kGaussian) {
    v.weights = {1.0};
    v.means = {d.mean()};
    v.stddevs = {d.stddev()};
  } else {
    for (const auto& c : d.components()) {
      if (c.weight == 0) continue;
      v.weights.push_back(c.weight);
      v.means.push_back(c.mean);
      v.stddevs.push_back(c.stddev);
    }
  }
  return v;
}

double flat_log_pdf(const FlatView& v, double y) {
  double acc = -kInf;
  for (std::size_t i = 0; i < v.weights.size(); ++i) {
    acc = log_add_exp(
        acc, std::log(v.weights[i]) + log_normal_pdf(y, v.means[i], v.stddevs[i]));
  }
  return acc;
}

double hs_quadrature(const DistributionDescriptor& p,
                     const DistributionDescriptor& q, double epsilon) {
  const FlatView vp = flat_view(p);
  const FlatView vq = flat_view(q);
  double lo = kInf, hi = -kInf, sigma_max = 0;
  for (std::size_t i = 0; i < vp.means.size(); ++i) {
    lo = std::min(lo, vp.means[i]);
    hi = std::max(hi, vp.means[i]);
    sigma_max = std::max(sigma_max, vp.stddevs[i]);
  }
  for (std::size_t i = 0; i < vq.means.size(); ++i) {
    lo = std::min(lo, vq.means[i]);
    hi = std::max(hi, vq.means[i]);
    sigma_max = std::max(sigma_max, vq.stddevs[i]);
  }
  lo -= 14 * sigma_max;
  hi += 14 * sigma_max;
  auto integrand = [&](double y) {
    const double pd = std::exp(flat_log_pdf(vp, y));
    const double qd = std::exp(epsilon + flat_log_pdf(vq, y));
    return std::max(0.0, pd - qd);
  };
  const double value = integrate(integrand, lo, hi, 1e-10);
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

double hs_divergence(const DistributionDescriptor& p,
                     const DistributionDescriptor& q, double epsilon) {
  PairDivergenceRequest{p, q, epsilon}.validate();
  const bool p_disc = p.kind() == DistributionKind::kDiscrete;
  const bool q_disc = q.kind() == DistributionKind::kDiscrete;
  if (p_disc && q_disc) return hs_discrete(p, q, epsilon);
  if (p_disc != q_disc) {
    throw UnsupportedPairError(
        "hockey-stick divergence of a discrete/continuous pair is undefined "
        "here; both sides must be discrete or both Gaussian/mixture");
  }
  if (is_plain_gaussian(p) && is_plain_gaussian(q) &&
      p.stddev() == q.stddev()) {
    return hs_gaussian_closed_form((p.mean() - q.mean()) / p.stddev(),
                                   epsilon);
  }
  return hs_quadrature(p, q, epsilon);
}

double hs_divergence_quadrature(const DistributionDescriptor& p,
                                const DistributionDescriptor& q,
                                double epsilon) {
  PairDivergenceRequest{p, q, epsilon}.validate();
  if (!is_continuous(p) || !is_continuous(q)) {
    throw UnsupportedPairError("quadrature path needs Gaussian/mixture pairs");
  }
  return hs_quadrature(p, q, epsilon);
}

namespace {

// Exact Neyman-Pearson sweep over the atoms of a discrete pair: reject the
// lowest likelihood-ratio atoms first, randomizing on the boundary atom.
double tradeoff_discrete(const DistributionDescriptor& p,
                         const DistributionDescriptor& q, double alpha) {
  const auto merged = internal::MergedDiscretePair::build(p, q);
  std::vector<std::size_t> order(merged.locations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto ratio = [&merged](std::size_t i) {
    return merged.q_mass[i] == 0 ? kInf : merged.p_mass[i] / merged.q_mass[i];
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ratio(a) < ratio(b); });
  double remaining = alpha;
  double rejected_q = 0;
  for (std::size_t i : order) {
    if (merged.p_mass[i] <= remaining) {
      remaining -= merged.p_mass[i];
      rejected_q += merged.q_mass[i];
    } else {
      rejected_q += (remaining / merged.p_mass[i]) * merged.q_mass[i];
      remaining = 0;
      break;
    }
  }
  return std::clamp(1.0 - rejected_q, 0.0, 1.0 - alpha);
}

}  // namespace

double tradeoff_value(const DistributionDescriptor& p,
                      const DistributionDescriptor& q, double alpha) {
  if (alpha < 0 || alpha > 1) throw DomainError("alpha must be in [0,1]");
  if (p == q) return 1.0 - alpha;
  const bool p_disc = p.kind() == DistributionKind::kDiscrete;
  const bool q_disc = q.kind() == DistributionKind::kDiscrete;
  if (p_disc && q_disc) return tradeoff_discrete(p, q, alpha);
  if (p_disc != q_disc) {
    throw UnsupportedPairError("tradeoff of a discrete/continuous pair");
  }
  if (is_plain_gaussian(p) && is_plain_gaussian(q) &&
      p.stddev() == q.stddev()) {
    const double mu = std::fabs(p.mean() - q.mean()) / p.stddev();
    if (alpha == 0) return 1;
    if (alpha == 1) return 0;
    return std::clamp(normal_cdf(normal_quantile(1 - alpha) - mu), 0.0,
                      1.0 - alpha);
  }
  auto pair = internal::MonotonePair::try_build(p, q);
  if (!pair) {
    throw UnsupportedPairError(
        "tradeoff needs a common-stddev mixture pair with separated means");
  }
  if (!pair->strictly_increasing()) return 1.0 - alpha;
  // Optimal test rejects P below a likelihood-ratio threshold; with a
  // monotone ratio that is a y-threshold at the alpha-quantile of P.
  const double y_alpha = pair->quantile_p(alpha);
  double value;
  if (y_alpha == -kInf) {
    value = 1;
  } else if (y_alpha == kInf) {
    value = 0;
  } else {
    value = 1.0 - pair->cdf_q(y_alpha);
  }
  return std::clamp(value, 0.0, 1.0 - alpha);
}

double distribution_cdf(const DistributionDescriptor& d, double y) {
  switch (d.kind()) {
    case DistributionKind::kDiscrete: {
      double acc = 0;
      for (const auto& a : d.atoms()) {
        if (a.location <= y) acc += a.mass;
      }
      return acc;
    }
    case DistributionKind::kGaussian:
      return normal_cdf(y, d.mean(), d.stddev());
    case DistributionKind::kGaussianMixture: {
      double acc = 0;
      for (const auto& c : d.components()) {
        acc += c.weight * normal_cdf(y, c.mean, c.stddev);
      }
      return acc;
    }
  }
  return 0;
}

double distribution_quantile(const DistributionDescriptor& d, double u) {
  if (d.kind() == DistributionKind::kDiscrete) {
    throw DomainError("quantile is only provided for continuous descriptors");
  }
  if (u <= 0) return -kInf;
  if (u >= 1) return kInf;
  if (d.kind() == DistributionKind::kGaussian) {
    return d.mean() + d.stddev() * normal_quantile(u);
  }
  double lo = kInf, hi = -kInf, sigma_max = 0;
  for (const auto& c : d.components()) {
    lo = std::min(lo, c.mean);
    hi = std::max(hi, c.mean);
    sigma_max = std::max(sigma_max, c.stddev);
  }
  lo -= 10 * sigma_max;
  hi += 10 * sigma_max;
  while (distribution_cdf(d, lo) > u) lo -= 10 * sigma_max;
  while (distribution_cdf(d, hi) < u) hi += 10 * sigma_max;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * (sigma_max + std::fabs(lo));
       ++i) {
    const double mid = 0.5 * (lo + hi);
    (distribution_cdf(d, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace smoothcert
