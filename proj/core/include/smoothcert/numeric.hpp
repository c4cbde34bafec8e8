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
#ifndef SMOOTHCERT_NUMERIC_HPP_
#define SMOOTHCERT_NUMERIC_HPP_

#include <functional>
#include <vector>

namespace smoothcert {

/// Standard normal CDF, accurate in both tails (erfc based).
double normal_cdf(double x);

/// CDF of N(mean, stddev^2).
double normal_cdf(double x, double mean, double stddev);

/// Inverse of normal_cdf. p in (0,1); relative accuracy ~1e-15 after Halley
/// polish. p <= 0 maps to -inf, p >= 1 to +inf.
double normal_quantile(double p);

/// log density of N(mean, stddev^2).
double log_normal_pdf(double x, double mean, double stddev);

/// log(exp(a) + exp(b)) without overflow; -inf acts as log(0).
double log_add_exp(double a, double b);

/// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Adaptive Gauss-Kronrod (G7K15) quadrature of f over [lo, hi].
/// Splits intervals until the summed error estimate is below abs_tol.
/// Throws NumericFailureError (carrying the achieved bound) if the interval
/// budget is exhausted first. achieved_error, if non-null, receives the final
/// error estimate.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, double* achieved_error = nullptr);

/// Golden-section maximization of a unimodal f on [lo, hi]; returns the best
/// function value seen (never the interpolated one, so the result is always
/// an attained value of f).
double maximize_unimodal(const std::function<double(double)>& f, double lo,
                         double hi, double x_tol = 1e-12);

/// Linear convolution of two nonnegative mass vectors. Uses direct O(nm)
/// summation when both inputs are short and a radix-2 FFT above the
/// threshold. Tiny negative round-off results are clamped to zero.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b,
                             std::size_t direct_threshold = 4096);

}  // namespace smoothcert

#endif  // SMOOTHCERT_NUMERIC_HPP_
