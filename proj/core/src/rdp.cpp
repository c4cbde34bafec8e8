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
#include "smoothcert/rdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "smoothcert/errors.hpp"
#include "smoothcert/numeric.hpp"

namespace smoothcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log density of (1-q) N(0, sigma^2) + q N(1, sigma^2).
double log_mixture(double q, double sigma, double y) {
  return log_add_exp(std::log1p(-q) + log_normal_pdf(y, 0, sigma),
                     std::log(q) + log_normal_pdf(y, 1, sigma));
}

// log integrand of E[exp(order * log_a - (order-1) * log_b)].
struct RenyiIntegrand {
  double order, q, sigma;
  bool mixture_on_top;

  double operator()(double y) const {
    const double log_gauss = log_normal_pdf(y, 0, sigma);
    const double log_mix = log_mixture(q, sigma, y);
    const double log_a = mixture_on_top ? log_mix : log_gauss;
    const double log_b = mixture_on_top ? log_gauss : log_mix;
    return order * log_a + (1.0 - order) * log_b;
  }
};

double renyi_one_direction(double order, double q, double sigma,
                           bool mixture_on_top) {
  const RenyiIntegrand g{order, q, sigma, mixture_on_top};
  // Stationary points of the log integrand sit near the component means and
  // near their order-extrapolated images. Probe a window around each
  // candidate finely enough to pin the maximum, then integrate the windows.
  const double pad = 20 * sigma + 1;
  std::vector<std::pair<double, double>> windows;
  for (double c : {0.0, 1.0, order, 1.0 - order}) {
    windows.emplace_back(c - pad, c + pad);
  }
  std::sort(windows.begin(), windows.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& w : windows) {
    if (!merged.empty() && w.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, w.second);
    } else {
      merged.push_back(w);
    }
  }
  constexpr int kProbePerWindow = 4001;
  double g_max = -kInf;
  double coarse = 0;
  std::vector<double> window_peaks(merged.size(), -kInf);
  for (std::size_t wi = 0; wi < merged.size(); ++wi) {
    const auto [lo, hi] = merged[wi];
    for (int i = 0; i < kProbePerWindow; ++i) {
      const double y = lo + (hi - lo) * i / (kProbePerWindow - 1);
      window_peaks[wi] = std::max(window_peaks[wi], g(y));
    }
    g_max = std::max(g_max, window_peaks[wi]);
  }
  if (!std::isfinite(g_max)) {
    throw NumericFailureError("Renyi integrand overflowed", g_max);
  }
  for (const auto& [lo, hi] : merged) {
    const double spacing = (hi - lo) / (kProbePerWindow - 1);
    for (int i = 0; i < kProbePerWindow; ++i) {
      coarse += std::exp(g(lo + spacing * i) - g_max) * spacing;
    }
  }
  const double abs_tol = std::max(coarse, 1e-100) * 5e-10;
  auto scaled = [&g, g_max](double y) { return std::exp(g(y) - g_max); };
  double integral = 0;
  for (const auto& [lo, hi] : merged) {
    integral += integrate(scaled, lo, hi, abs_tol);
  }
  const double divergence = (g_max + std::log(integral)) / (order - 1.0);
  if (!std::isfinite(divergence)) {
    throw NumericFailureError("Renyi divergence numerically infinite",
                              divergence);
  }
  return std::max(0.0, divergence);
}

}  // namespace

void RdpCurve::validate() const {
  if (orders.empty() || orders.size() != values.size()) {
    throw DomainError("RDP curve needs matching non-empty orders and values");
  }
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (!(orders[i] > 1)) throw DomainError("RDP orders must be > 1");
    if (!(values[i] >= 0) || !std::isfinite(values[i])) {
      throw DomainError("RDP values must be finite and >= 0");
    }
    if (i > 0) {
      if (orders[i] <= orders[i - 1]) {
        throw DomainError("RDP orders must strictly increase");
      }
      if (values[i] < values[i - 1] - 1e-9) {
        throw DomainError("Renyi divergence must be non-decreasing in order");
      }
    }
  }
}

std::vector<double> default_rdp_orders() {
  constexpr int kCount = 128;
  const double log_lo = std::log(0.01);   // order 1.01
  const double log_hi = std::log(511.0);  // order 512
  std::vector<double> orders(kCount);
  for (int i = 0; i < kCount; ++i) {
    orders[static_cast<std::size_t>(i)] =
        1.0 + std::exp(log_lo + (log_hi - log_lo) * i / (kCount - 1));
  }
  return orders;
}

double rdp_subsampled_gaussian(double order, double q, double sigma) {
  if (!(order > 1)) throw DomainError("order must be > 1");
  if (!(q > 0) || !(q <= 1)) throw DomainError("q must be in (0,1]");
  if (!(sigma > 0)) throw DomainError("sigma must be > 0");
  if (q == 1) {
    // Mixture collapses to N(1, sigma^2): pure Gaussian Renyi divergence.
    return order / (2 * sigma * sigma);
  }
  return std::max(renyi_one_direction(order, q, sigma, true),
                  renyi_one_direction(order, q, sigma, false));
}

double rdp_group_corrected(double order, double q, double sigma, int r) {
  if (r < 1) throw DomainError("group size must be >= 1");
  const double effective_q = 1.0 - std::pow(1.0 - q, r);
  return rdp_subsampled_gaussian(order, effective_q, sigma / r);
}

RdpCurve rdp_compose(const RdpCurve& curve, int steps) {
  curve.validate();
  if (steps < 1) throw DomainError("steps must be >= 1");
  RdpCurve out = curve;
  for (double& v : out.values) v *= steps;
  return out;
}

double rdp_to_profile(const RdpCurve& curve, double epsilon) {
  curve.validate();
  double best = 1.0;
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double exponent =
        (curve.orders[i] - 1.0) * (curve.values[i] - epsilon);
    if (exponent < 0) best = std::min(best, std::exp(exponent));
  }
  return best;
}

PrivacyProfile profile_from_rdp(const RdpCurve& curve,
                                std::vector<double> grid) {
  curve.validate();
  auto shared = std::make_shared<RdpCurve>(curve);
  return PrivacyProfile(
      [shared](double eps) {
        double best = 1.0;
        for (std::size_t i = 0; i < shared->orders.size(); ++i) {
          const double exponent =
              (shared->orders[i] - 1.0) * (shared->values[i] - eps);
          if (exponent < 0) best = std::min(best, std::exp(exponent));
        }
        return best;
      },
      std::move(grid));
}

}  // namespace smoothcert
