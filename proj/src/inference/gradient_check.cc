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
#include "stratlift/inference/gradient_check.h"

#include <algorithm>
#include <cmath>

namespace stratlift::inference {

GradientCheck check_gradient(const TargetDensity& target,
                             std::span<const double> x, double h) {
  GradientCheck out;
  out.analytic = target.gradient(x);
  std::vector<double> probe(x.begin(), x.end());
  out.numeric.resize(probe.size());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + h;
    const double up = target.logp(probe);
    probe[k] = saved - h;
    const double down = target.logp(probe);
    probe[k] = saved;
    out.numeric[k] = (up - down) / (2.0 * h);
  }
  double scale = 1.0;
  for (double g : out.analytic) scale = std::max(scale, std::abs(g));
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double err = std::abs(out.analytic[k] - out.numeric[k]) / scale;
    if (err > out.relative_error || std::isnan(err)) {
      out.relative_error = err;
      out.worst_index = k;
    }
  }
  return out;
}

}  // namespace stratlift::inference
