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
// Posterior densities of the outcome models, expressed on an unconstrained
// vector for the sampler.
//
// Positive log outcomes are standardized internally by the control
// purchasers' mean and sd before inference; the mean priors N(0, 20) and
// the half-normal(0, 1) on sigma apply on that scale. Every value handed
// out by constrain() and derived() is back on the log(y+1) scale.
#ifndef STRATLIFT_MODELS_POSTERIORS_H_
#define STRATLIFT_MODELS_POSTERIORS_H_

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stratlift/data.h"
#include "stratlift/inference/hmc.h"
#include "stratlift/inference/target_density.h"
#include "stratlift/models/params.h"

namespace stratlift::models {

// Affine map log(y+1) -> (log(y+1) - center) / scale.
struct Standardization {
  double center = 0;
  double scale = 1;

  double forward(double l) const { return (l - center) / scale; }
  double back(double s) const { return center + scale * s; }
};

// Mean and sd of log(y+1) over control purchasers; sd falls back to 1 when
// fewer than two purchasers or zero spread.
Standardization control_purchaser_standardization(const ExperimentDataset& data);

// Counts and standardized purchase amounts of one covariate pattern.
struct StrataCell {
  std::vector<double> x;  // leading 1, then the covariate flags
  double treated_zero = 0;
  double control_zero = 0;
  double control_pos = 0;
  double customers = 0;
  std::vector<double> treated_pos;  // standardized log outcomes
};

// Everything the stratification likelihood reads from the data.
struct StrataData {
  Standardization standardization;
  std::vector<StrataCell> cells;
  // Pooled control purchasers (standardized): count, mean, centered SS.
  double control_pos_n = 0;
  double control_pos_mean = 0;
  double control_pos_ss = 0;
  double treated_pos_n = 0;
  double treated_pos_mean = 0;
  double treated_pos_sd = 0;
  double n = 0;
};

// Groups the data by covariate pattern (one cell when `covariates` is
// empty). Throws PreconditionError for unknown covariate names.
StrataData build_strata_data(const ExperimentDataset& data,
                             std::span<const std::string> covariates,
                             const Standardization& standardization);

struct StrataGradient {
  std::vector<std::array<double, 3>> dlog_pi;  // per cell
  double dmu_a0 = 0;
  double dmu_a1 = 0;
  double dmu_i1 = 0;
  double dsigma = 0;
};

// Log likelihood on the standardized scale given per-cell log strata
// probabilities, including the -log(scale) Jacobian per purchaser so the
// value equals the likelihood of the raw log(y+1) data.
double strata_loglik(const StrataData& d,
                     std::span<const std::array<double, 3>> log_pi,
                     double mu_a0, double mu_a1, double mu_i1, double sigma,
                     StrataGradient* grad);

// Stratification model without covariates. Unconstrained coordinates:
// logit ratios log(pi_i/pi_a), log(pi_n/pi_a), the three standardized
// means, log of the standardized sigma. Prior Dirichlet(2,2,2) on pi.
class PsPosterior : public inference::TargetDensity {
 public:
  // Throws IdentificationError when either arm has no purchasers.
  explicit PsPosterior(const ExperimentDataset& data);

  std::size_t dim() const override { return 6; }
  double log_density(std::span<const double> x,
                     std::span<double> grad) const override;
  std::vector<std::string> unconstrained_names() const override;
  std::vector<std::string> param_names() const override;
  std::vector<double> constrain(std::span<const double> x) const override;
  std::vector<std::string> derived_names() const override;
  std::vector<double> derived(std::span<const double> params) const override;
  std::vector<double> initial_point() const override;

  std::vector<double> unconstrain(const StrataParams& p) const;
  static StrataParams to_params(std::span<const double> constrained);
  const Standardization& standardization() const {
    return data_.standardization;
  }

 private:
  StrataData data_;
  std::vector<double> init_;
};

// Stratification model with multinomial-logit strata probabilities.
// Unconstrained coordinates: beta_i, beta_n (each 1 + #covariates), the
// three standardized means, log sigma. Prior N(0, 1) on every coefficient.
// Derived strata shares and ATEs average pi(x) over all customers.
class PscPosterior : public inference::TargetDensity {
 public:
  // Throws PreconditionError for unknown covariate names and
  // IdentificationError when either arm has no purchasers.
  PscPosterior(const ExperimentDataset& data,
               std::vector<std::string> covariates);

  std::size_t dim() const override { return 2 * width() + 4; }
  double log_density(std::span<const double> x,
                     std::span<double> grad) const override;
  std::vector<std::string> unconstrained_names() const override;
  std::vector<std::string> param_names() const override;
  std::vector<double> constrain(std::span<const double> x) const override;
  std::vector<std::string> derived_names() const override;
  std::vector<double> derived(std::span<const double> params) const override;
  std::vector<double> initial_point() const override;

  std::vector<double> unconstrain(const CovStrataParams& p) const;
  CovStrataParams to_params(std::span<const double> constrained) const;
  // "beta_i[intercept]", "beta_i[<cov>]", ..., then the beta_n labels.
  static std::vector<std::string> coefficient_names(
      std::span<const std::string> covariates);
  std::size_t width() const { return covariates_.size() + 1; }
  const Standardization& standardization() const {
    return data_.standardization;
  }

 private:
  std::vector<std::string> covariates_;
  StrataData data_;
  std::vector<double> init_;
};

// Zero-inflated normal per arm. Unconstrained coordinates: logit q0, then
// logit q1 (or, constrained, logit u with q1 = q0 + (1 - q0) u), the two
// standardized means, log sigma. Uniform prior on (q0, q1), restricted to
// q1 >= q0 in the constrained variant.
class ZiPosterior : public inference::TargetDensity {
 public:
  ZiPosterior(const ExperimentDataset& data, bool constrained);

  std::size_t dim() const override { return 5; }
  double log_density(std::span<const double> x,
                     std::span<double> grad) const override;
  std::vector<std::string> unconstrained_names() const override;
  std::vector<std::string> param_names() const override;
  std::vector<double> constrain(std::span<const double> x) const override;
  std::vector<std::string> derived_names() const override;
  std::vector<double> derived(std::span<const double> params) const override;
  std::vector<double> initial_point() const override;

  std::vector<double> unconstrain(const ZeroInflatedParams& p) const;
  ZeroInflatedParams to_params(std::span<const double> constrained) const;
  bool constrained() const { return constrained_; }

 private:
  struct Arm {
    double zero = 0;
    double pos = 0;
    double mean = 0;  // standardized, purchasers only
    double ss = 0;
  };
  bool constrained_;
  Standardization std_;
  Arm control_;
  Arm treated_;
};

// Normal regression of log(y+1) on the treatment flag. Outcomes are
// standardized by the control-arm mean and pooled sd of log(y+1);
// N(0, 20) priors on both coefficients, half-normal(0, 1) on sigma.
class DimPosterior : public inference::TargetDensity {
 public:
  // Throws PreconditionError when an arm is empty.
  explicit DimPosterior(const ExperimentDataset& data);

  std::size_t dim() const override { return 3; }
  double log_density(std::span<const double> x,
                     std::span<double> grad) const override;
  std::vector<std::string> unconstrained_names() const override;
  std::vector<std::string> param_names() const override;
  std::vector<double> constrain(std::span<const double> x) const override;
  std::vector<std::string> derived_names() const override;
  std::vector<double> derived(std::span<const double> params) const override;
  std::vector<double> initial_point() const override;

  // Ordinary least squares estimate of tau_d (difference of arm means).
  double ols_tau() const { return (treated_.mean - control_.mean) * std_.scale; }

 private:
  struct Arm {
    double n = 0;
    double mean = 0;  // standardized
    double ss = 0;
  };
  Standardization std_;
  Arm control_;
  Arm treated_;
};

struct PsAteDraws {
  std::vector<double> ate_log;
  std::vector<double> ate_dollar;
};

// Per-draw ATEs from draws holding pi_a, pi_i, mu_a0, mu_a1, mu_i1, sigma
// columns. Throws std::out_of_range when a column is missing.
PsAteDraws ps_ate_draws(const inference::PosteriorDraws& draws);

}  // namespace stratlift::models

#endif  // STRATLIFT_MODELS_POSTERIORS_H_
