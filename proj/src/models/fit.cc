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
#include "stratlift/models/fit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stratlift/errors.h"
#include "stratlift/models/posteriors.h"

namespace stratlift::models {

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDiffMeans:
      return "dim";
    case ModelKind::kZeroInflated:
      return "zi";
    case ModelKind::kZeroInflatedPositive:
      return "zi-pos";
    case ModelKind::kStrata:
      return "ps";
    case ModelKind::kStrataCovariates:
      return "ps-cov";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  for (auto kind : {ModelKind::kDiffMeans, ModelKind::kZeroInflated,
                    ModelKind::kZeroInflatedPositive, ModelKind::kStrata,
                    ModelKind::kStrataCovariates}) {
    if (model_name(kind) == name) return kind;
  }
  throw PreconditionError("unknown model '" + std::string(name) +
                          "' (expected dim, zi, zi-pos, ps or ps-cov)");
}

std::unique_ptr<inference::TargetDensity> make_posterior(
    ModelKind kind, const ExperimentDataset& data,
    const std::vector<std::string>& covariates) {
  switch (kind) {
    case ModelKind::kDiffMeans:
      return std::make_unique<DimPosterior>(data);
    case ModelKind::kZeroInflated:
      return std::make_unique<ZiPosterior>(data, false);
    case ModelKind::kZeroInflatedPositive:
      return std::make_unique<ZiPosterior>(data, true);
    case ModelKind::kStrata:
      return std::make_unique<PsPosterior>(data);
    case ModelKind::kStrataCovariates:
      if (covariates.empty()) {
        throw PreconditionError("model ps-cov needs at least one covariate");
      }
      return std::make_unique<PscPosterior>(data, covariates);
  }
  throw PreconditionError("unknown model kind");
}

const inference::DrawSummary& FitResult::summary(std::string_view name) const {
  for (const auto& s : summaries) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("no summary for '" + std::string(name) + "'");
}

double FitResult::max_rhat() const {
  double out = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : convergence) {
    if (std::isnan(c.split_rhat)) continue;
    if (std::isnan(out) || c.split_rhat > out) out = c.split_rhat;
  }
  return out;
}

double FitResult::min_ess() const {
  double out = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : convergence) {
    if (std::isnan(c.ess_bulk)) continue;
    if (std::isnan(out) || c.ess_bulk < out) out = c.ess_bulk;
  }
  return out;
}

FitResult fit_model(ModelKind kind, const ExperimentDataset& data,
                    const inference::SamplerConfig& sampler,
                    const std::vector<std::string>& covariates) {
  const auto target = make_posterior(kind, data, covariates);
  FitResult out;
  out.kind = kind;
  if (kind == ModelKind::kStrataCovariates) out.covariates = covariates;
  out.draws = inference::sample(*target, sampler);
  out.summaries = inference::summarize_draws(out.draws);
  if (out.draws.chains() >= 2 && out.draws.iters() >= 100) {
    out.convergence = inference::convergence(out.draws);
    const double rhat = out.max_rhat();
    if (rhat > 1.01) {
      out.warnings.push_back("max split R-hat " + std::to_string(rhat) +
                             " exceeds 1.01");
    }
  } else {
    out.warnings.push_back(
        "convergence diagnostics skipped (need >= 2 chains and >= 100 draws)");
  }
  out.ate_log = out.summary("ate_log");
  if (out.draws.has("ate_dollar")) out.ate_dollar = out.summary("ate_dollar");
  for (const auto& w : out.draws.warnings) out.warnings.push_back(w);
  return out;
}

double variance_reduction(const FitResult& model, const FitResult& baseline) {
  const double a = model.ate_log.sd;
  const double b = baseline.ate_log.sd;
  return 1.0 - (a * a) / (b * b);
}

}  // namespace stratlift::models
