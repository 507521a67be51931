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
#ifndef STRATLIFT_INFERENCE_GRADIENT_CHECK_H_
#define STRATLIFT_INFERENCE_GRADIENT_CHECK_H_

#include <cstddef>
#include <span>
#include <vector>

#include "stratlift/inference/target_density.h"

namespace stratlift::inference {

struct GradientCheck {
  std::vector<double> analytic;
  std::vector<double> numeric;
  // max_k |analytic_k - numeric_k| / max(max_k |analytic_k|, 1)
  double relative_error = 0;
  std::size_t worst_index = 0;
};

// Compares the analytic gradient with central differences of step h.
GradientCheck check_gradient(const TargetDensity& target,
                             std::span<const double> x, double h = 1e-5);

}  // namespace stratlift::inference

#endif  // STRATLIFT_INFERENCE_GRADIENT_CHECK_H_
