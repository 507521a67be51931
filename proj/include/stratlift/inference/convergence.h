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
#ifndef STRATLIFT_INFERENCE_CONVERGENCE_H_
#define STRATLIFT_INFERENCE_CONVERGENCE_H_

#include <span>
#include <string>
#include <vector>

#include "stratlift/inference/hmc.h"

namespace stratlift::inference {

struct ConvergenceStats {
  std::string name;
  // NaN when every draw is identical (zero variance).
  double split_rhat = 0;
  double ess_bulk = 0;
};

// Rank-normalized split R-hat and bulk effective sample size for one
// quantity; `chains` holds equally long per-chain sequences. Throws
// PreconditionError with fewer than 2 chains or 100 draws per chain.
ConvergenceStats convergence(const std::vector<std::vector<double>>& chains);

// Same for every column of the draws.
std::vector<ConvergenceStats> convergence(const PosteriorDraws& draws);

// Plain (not rank-normalized) split R-hat; the building block of the
// rank-normalized version, exposed for testing.
double split_rhat_raw(const std::vector<std::vector<double>>& chains);

// Effective sample size of the chains via Geyer's initial monotone
// sequence on the multi-chain autocorrelation estimate.
double ess_raw(const std::vector<std::vector<double>>& chains);

struct DrawSummary {
  std::string name;
  double mean = 0;
  double sd = 0;
  double q025 = 0;
  double q975 = 0;
};

// Pooled-across-chains mean, sd and central 95% interval.
std::vector<DrawSummary> summarize_draws(const PosteriorDraws& draws);
DrawSummary summarize_values(std::string name, std::span<const double> values);

// Linear-interpolation quantile (type 7).
double quantile(std::vector<double> values, double prob);

}  // namespace stratlift::inference

#endif  // STRATLIFT_INFERENCE_CONVERGENCE_H_
