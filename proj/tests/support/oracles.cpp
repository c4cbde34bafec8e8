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
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "smoothcert/numeric.hpp"

namespace smoothcert::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double ratio;
  double p;
  double q;
};

std::vector<Atom> merged_atoms(const DistributionDescriptor& p,
                               const DistributionDescriptor& q) {
  std::map<double, std::pair<double, double>> by_loc;
  for (const auto& a : p.atoms()) by_loc[a.location].first += a.mass;
  for (const auto& a : q.atoms()) by_loc[a.location].second += a.mass;
  std::vector<Atom> atoms;
  for (const auto& [loc, pq] : by_loc) {
    (void)loc;
    const double ratio = pq.second == 0 ? kInf : pq.first / pq.second;
    atoms.push_back({ratio, pq.first, pq.second});
  }
  return atoms;
}

double mixture_log_pdf(const DistributionDescriptor& d, double y) {
  double acc = -kInf;
  if (d.kind() == DistributionKind::kGaussian) {
    return log_normal_pdf(y, d.mean(), d.stddev());
  }
  for (const auto& c : d.components()) {
    if (c.weight == 0) continue;
    acc = log_add_exp(acc, std::log(c.weight) +
                               log_normal_pdf(y, c.mean, c.stddev));
  }
  return acc;
}

double sample_descriptor(const DistributionDescriptor& d, std::mt19937_64& rng,
                         std::normal_distribution<double>& unit) {
  if (d.kind() == DistributionKind::kGaussian) {
    return d.mean() + d.stddev() * unit(rng);
  }
  std::uniform_real_distribution<double> u(0, 1);
  double pick = u(rng);
  for (const auto& c : d.components()) {
    pick -= c.weight;
    if (pick <= 0) return c.mean + c.stddev * unit(rng);
  }
  const auto& last = d.components().back();
  return last.mean + last.stddev * unit(rng);
}

}  // namespace

double np_tradeoff_enumerated(const DistributionDescriptor& p,
                              const DistributionDescriptor& q, double alpha) {
  std::vector<Atom> atoms = merged_atoms(p, q);
  // Distinct ratios, each a candidate threshold: reject where ratio < t and
  // randomize on ratio == t.
  std::vector<double> thresholds;
  for (const auto& a : atoms) thresholds.push_back(a.ratio);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  double best = 1.0 - alpha;  // data-independent randomized test
  for (double t : thresholds) {
    double p_below = 0, q_below = 0, p_at = 0, q_at = 0;
    for (const auto& a : atoms) {
      if (a.ratio < t) {
        p_below += a.p;
        q_below += a.q;
      } else if (a.ratio == t) {
        p_at += a.p;
        q_at += a.q;
      }
    }
    if (alpha < p_below || alpha > p_below + p_at) continue;
    const double gamma = p_at == 0 ? 0 : (alpha - p_below) / p_at;
    const double beta = 1.0 - (q_below + gamma * q_at);
    best = std::min(best, beta);
  }
  return best;
}

double product_pair_hs(const DistributionDescriptor& p1,
                       const DistributionDescriptor& q1,
                       const DistributionDescriptor& p2,
                       const DistributionDescriptor& q2, double epsilon) {
  const auto a1 = merged_atoms(p1, q1);
  const auto a2 = merged_atoms(p2, q2);
  const double scale = std::exp(epsilon);
  double acc = 0;
  for (const auto& x : a1) {
    for (const auto& y : a2) {
      acc += std::max(0.0, x.p * y.p - scale * x.q * y.q);
    }
  }
  return std::min(acc, 1.0);
}

MonteCarloEstimate mc_hs_divergence(const DistributionDescriptor& p,
                                    const DistributionDescriptor& q,
                                    double epsilon, std::int64_t samples,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0, 1);
  double sum = 0, sum_sq = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double y = sample_descriptor(p, rng, unit);
    const double log_ratio = mixture_log_pdf(q, y) - mixture_log_pdf(p, y);
    const double value = std::max(0.0, 1.0 - std::exp(epsilon + log_ratio));
    sum += value;
    sum_sq += value * value;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double variance = std::max(0.0, sum_sq / n - mean * mean);
  return {mean, std::sqrt(variance / n)};
}

MonteCarloEstimate mc_renyi_divergence(double order, double q0, double sigma,
                                       bool mixture_on_top,
                                       std::int64_t samples,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  double sum = 0, sum_sq = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    // Sample under the distribution on top of the divergence.
    double y = sigma * unit(rng);
    if (mixture_on_top && u(rng) < q0) y += 1.0;
    const double log_p = log_normal_pdf(y, 0, sigma);
    const double log_m =
        log_add_exp(std::log1p(-q0) + log_normal_pdf(y, 0, sigma),
                    std::log(q0) + log_normal_pdf(y, 1, sigma));
    const double log_ratio = mixture_on_top ? log_m - log_p : log_p - log_m;
    const double value = std::exp((order - 1.0) * log_ratio);
    sum += value;
    sum_sq += value * value;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double variance = std::max(0.0, sum_sq / n - mean * mean);
  const double moment_se = std::sqrt(variance / n);
  // Delta method through D = log(mean) / (order - 1).
  return {std::log(mean) / (order - 1.0),
          moment_se / (mean * (order - 1.0))};
}

TradeoffCurve random_tradeoff_curve(std::uint64_t seed, int max_knots) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  // A pointwise max of lines c - s*alpha with c <= 1 and s >= c (each line
  // stays below 1 - alpha and hits zero by alpha = 1), floored at 0, is a
  // valid tradeoff function; sampling it at grid alphas keeps all the
  // defining properties.
  std::uniform_int_distribution<int> line_count(1, 5);
  const int lines = line_count(rng);
  std::vector<std::pair<double, double>> cs;
  for (int i = 0; i < lines; ++i) {
    const double c = u(rng);
    cs.emplace_back(c, c + 2.0 * u(rng));
  }
  auto f = [&cs](double alpha) {
    double best = 0;
    for (const auto& [c, s] : cs) best = std::max(best, c - s * alpha);
    return best;
  };
  std::vector<double> alphas{0.0, 1.0};
  std::uniform_int_distribution<int> knot_count(2, std::max(2, max_knots - 2));
  const int interior = knot_count(rng);
  for (int i = 0; i < interior; ++i) alphas.push_back(u(rng));
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  std::vector<CurveKnot> knots;
  for (double a : alphas) knots.push_back({a, f(a)});
  return TradeoffCurve(std::move(knots));
}

double binomial_tail_sum(std::int64_t k, std::int64_t n, double prob) {
  if (k <= 0) return 1;
  if (prob <= 0) return 0;
  if (prob >= 1) return 1;
  double acc = 0;
  const double log_p = std::log(prob);
  const double log_1p = std::log1p(-prob);
  for (std::int64_t j = k; j <= n; ++j) {
    const double log_term = std::lgamma(static_cast<double>(n + 1)) -
                            std::lgamma(static_cast<double>(j + 1)) -
                            std::lgamma(static_cast<double>(n - j + 1)) +
                            static_cast<double>(j) * log_p +
                            static_cast<double>(n - j) * log_1p;
    acc += std::exp(log_term);
  }
  return std::min(acc, 1.0);
}

}  // namespace smoothcert::oracles
