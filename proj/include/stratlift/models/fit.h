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
// One-call model fitting: builds the posterior, runs the sampler and
// summarizes the draws.
#ifndef STRATLIFT_MODELS_FIT_H_
#define STRATLIFT_MODELS_FIT_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stratlift/data.h"
#include "stratlift/inference/convergence.h"
#include "stratlift/inference/hmc.h"
#include "stratlift/inference/target_density.h"

namespace stratlift::models {

enum class ModelKind {
  kDiffMeans,             // "dim"
  kZeroInflated,          // "zi"
  kZeroInflatedPositive,  // "zi-pos"
  kStrata,                // "ps"
  kStrataCovariates,      // "ps-cov"
};

std::string_view model_name(ModelKind kind);
// Throws PreconditionError for unknown names.
ModelKind parse_model(std::string_view name);

// The posterior of `kind` on this data. `covariates` is used by ps-cov only
// and must be non-empty there.
std::unique_ptr<inference::TargetDensity> make_posterior(
    ModelKind kind, const ExperimentDataset& data,
    const std::vector<std::string>& covariates = {});

struct FitResult {
  ModelKind kind = ModelKind::kStrata;
  std::vector<std::string> covariates;
  inference::PosteriorDraws draws;
  std::vector<inference::DrawSummary> summaries;
  // Empty when there are fewer than 2 chains or 100 draws per chain.
  std::vector<inference::ConvergenceStats> convergence;
  inference::DrawSummary ate_log;
  std::optional<inference::DrawSummary> ate_dollar;
  std::vector<std::string> warnings;

  // Throws std::out_of_range for unknown names.
  const inference::DrawSummary& summary(std::string_view name) const;
  double max_rhat() const;
  double min_ess() const;
};

FitResult fit_model(ModelKind kind, const ExperimentDataset& data,
                    const inference::SamplerConfig& sampler,
                    const std::vector<std::string>& covariates = {});

// 1 - sd(model)^2 / sd(baseline)^2 for the log-scale ATE.
double variance_reduction(const FitResult& model, const FitResult& baseline);

}  // namespace stratlift::models

#endif  // STRATLIFT_MODELS_FIT_H_
