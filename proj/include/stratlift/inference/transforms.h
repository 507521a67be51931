/*
 * Copyright 2026 The Stratlift Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Bijections from R^d onto constrained parameter spaces, with the
// log-Jacobian terms a density needs after the change of variables.
#ifndef STRATLIFT_INFERENCE_TRANSFORMS_H_
#define STRATLIFT_INFERENCE_TRANSFORMS_H_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace stratlift::inference {

inline double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -INFINITY) return -INFINITY;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> v);

struct SimplexTransform {
  std::vector<double> simplex;  // k entries, sums to 1
  double log_jacobian = 0;
};

// Maps k-1 reals to the interior of the k-simplex by a softmax with the
// first component as the zero-logit reference:
//   x_0 = 1 / (1 + sum exp(v)),  x_j = exp(v_{j-1}) / (1 + sum exp(v)).
// The log-Jacobian of v -> (x_1..x_{k-1}) is sum_j log x_j.
SimplexTransform transform_simplex(std::span<const double> unconstrained);

// Inverse: v_{j-1} = log(x_j / x_0).
std::vector<double> inverse_simplex(std::span<const double> simplex);

// Back-propagates d f / d x (k entries) to d f / d v (k-1 entries), adding
// the derivative of the log-Jacobian when requested. Accumulates into dv.
void simplex_backprop(std::span<const double> simplex,
                      std::span<const double> dsimplex, bool with_jacobian,
                      std::span<double> dv);

struct ScalarTransform {
  double value = 0;
  double log_jacobian = 0;
};

// exp(v); log-Jacobian v.
inline ScalarTransform transform_positive(double v) {
  return {std::exp(v), v};
}
inline double inverse_positive(double x) { return std::log(x); }

// Logistic map onto (0, 1); log-Jacobian log u + log(1 - u).
ScalarTransform transform_unit(double v);
inline double inverse_unit(double u) { return std::log(u) - std::log1p(-u); }

}  // namespace stratlift::inference

#endif  // STRATLIFT_INFERENCE_TRANSFORMS_H_
