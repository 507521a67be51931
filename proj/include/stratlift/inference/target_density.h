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
#ifndef STRATLIFT_INFERENCE_TARGET_DENSITY_H_
#define STRATLIFT_INFERENCE_TARGET_DENSITY_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stratlift::inference {

// A log density over an unconstrained real vector, including the Jacobian
// of whatever transform maps it onto the model's constrained parameters.
//
// Implementations must be safe to call concurrently from several chains;
// all methods are const and must not mutate shared state.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual std::size_t dim() const = 0;

  // Returns log p(x) up to a constant. When `grad` is non-empty it has
  // dim() entries and receives d log p / dx.
  virtual double log_density(std::span<const double> x,
                             std::span<double> grad) const = 0;

  // Labels of the unconstrained coordinates (used in error messages).
  virtual std::vector<std::string> unconstrained_names() const = 0;

  // Labels and values of the constrained parameters.
  virtual std::vector<std::string> param_names() const = 0;
  virtual std::vector<double> constrain(std::span<const double> x) const = 0;

  // Per-draw derived quantities computed from constrained parameters.
  virtual std::vector<std::string> derived_names() const { return {}; }
  virtual std::vector<double> derived(std::span<const double> params) const {
    (void)params;
    return {};
  }

  // Starting point for every chain before per-chain jitter.
  virtual std::vector<double> initial_point() const {
    return std::vector<double>(dim(), 0.0);
  }

  double logp(std::span<const double> x) const { return log_density(x, {}); }
  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g(dim());
    log_density(x, g);
    return g;
  }
};

}  // namespace stratlift::inference

#endif  // STRATLIFT_INFERENCE_TARGET_DENSITY_H_
