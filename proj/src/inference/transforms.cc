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
#include "stratlift/inference/transforms.h"

namespace stratlift::inference {

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -INFINITY;
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -INFINITY) return -INFINITY;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

SimplexTransform transform_simplex(std::span<const double> unconstrained) {
  const std::size_t k = unconstrained.size() + 1;
  SimplexTransform out;
  out.simplex.resize(k);
  double m = 0;  // reference logit
  for (double v : unconstrained) m = std::max(m, v);
  double total = std::exp(-m);
  out.simplex[0] = total;
  for (std::size_t j = 1; j < k; ++j) {
    out.simplex[j] = std::exp(unconstrained[j - 1] - m);
    total += out.simplex[j];
  }
  const double log_total = std::log(total) + m;
  for (std::size_t j = 0; j < k; ++j) {
    out.simplex[j] /= total;
    const double logit = j == 0 ? 0.0 : unconstrained[j - 1];
    out.log_jacobian += logit - log_total;
  }
  return out;
}

std::vector<double> inverse_simplex(std::span<const double> simplex) {
  std::vector<double> v(simplex.size() - 1);
  const double log_ref = std::log(simplex[0]);
  for (std::size_t j = 1; j < simplex.size(); ++j) {
    v[j - 1] = std::log(simplex[j]) - log_ref;
  }
  return v;
}

void simplex_backprop(std::span<const double> simplex,
                      std::span<const double> dsimplex, bool with_jacobian,
                      std::span<double> dv) {
  const std::size_t k = simplex.size();
  double weighted = 0;
  for (std::size_t j = 0; j < k; ++j) weighted += dsimplex[j] * simplex[j];
  for (std::size_t j = 1; j < k; ++j) {
    dv[j - 1] += simplex[j] * (dsimplex[j] - weighted);
    if (with_jacobian) {
      dv[j - 1] += 1.0 - static_cast<double>(k) * simplex[j];
    }
  }
}

ScalarTransform transform_unit(double v) {
  // log u = -log(1 + e^-v), log(1 - u) = -log(1 + e^v)
  const double log_u = -log_sum_exp(0.0, -v);
  const double log_1mu = -log_sum_exp(0.0, v);
  return {std::exp(log_u), log_u + log_1mu};
}

}  // namespace stratlift::inference
