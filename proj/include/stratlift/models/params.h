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
// Parameter types of the outcome models and the closed-form quantities
// derived from them.
#ifndef STRATLIFT_MODELS_PARAMS_H_
#define STRATLIFT_MODELS_PARAMS_H_

#include <array>
#include <span>
#include <vector>

#include "stratlift/data.h"

namespace stratlift::models {

// Principal-stratification parameters. Strata order is (A, I, N): always
// buy, influenced (buy only when treated), never buy. Means and sigma are
// on the log(y+1) scale.
struct StrataParams {
  std::array<double, 3> pi{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double mu_a0 = 0;
  double mu_a1 = 0;
  double mu_i1 = 0;
  double sigma = 1;

  // Throws PreconditionError unless pi is a simplex and sigma > 0.
  void validate() const;
};

// Arm-wise zero-inflated normal: log(y+1) ~ N(alpha, sigma) with
// probability q0 under control, N(beta, sigma) with probability q1 under
// treatment, else 0.
struct ZeroInflatedParams {
  double q0 = 0.5;
  double q1 = 0.5;
  double alpha = 0;
  double beta = 0;
  double sigma = 1;
  bool constrained = false;  // q1 >= q0 enforced
};

// Strata probabilities follow a multinomial logit in the covariates with A
// as the base category. Both coefficient vectors carry a leading intercept.
struct CovStrataParams {
  std::vector<double> beta_i;
  std::vector<double> beta_n;
  double mu_a0 = 0;
  double mu_a1 = 0;
  double mu_i1 = 0;
  double sigma = 1;
};

// log(y+1) = alpha + tau_d * z + e,  e ~ N(0, sigma).
struct DiffMeansParams {
  double alpha = 0;
  double tau_d = 0;
  double sigma = 1;
};

// Strata probabilities for covariate row x (leading 1 included):
// proportional to (1, exp(x.beta_i), exp(x.beta_n)). Throws
// PreconditionError when the lengths differ.
std::array<double, 3> mnl_strata_probs(std::span<const double> beta_i,
                                       std::span<const double> beta_n,
                                       std::span<const double> x);

// Exact log likelihood of the stratification model, constants included.
double ps_loglik(const StrataParams& params, const ExperimentDataset& data);

// Same model with strata probabilities from the covariate logit. Uses the
// dataset columns named in `covariates`, in order.
double psc_loglik(const CovStrataParams& params, const ExperimentDataset& data,
                  std::span<const std::string> covariates);

struct AteValue {
  double log_scale = 0;
  double dollar = 0;
};

// Population ATE with the never-buy effect fixed at zero:
//   log:    pi_a (mu_a1 - mu_a0) + pi_i mu_i1
//   dollar: pi_a [m(mu_a1) - m(mu_a0)] + pi_i m(mu_i1),  m = lognormal mean - 1
AteValue ps_ate(const StrataParams& params);

// q1 beta - q0 alpha, and its dollar analogue q1 m(beta) - q0 m(alpha).
AteValue zi_ate(const ZeroInflatedParams& params);

}  // namespace stratlift::models

#endif  // STRATLIFT_MODELS_PARAMS_H_
