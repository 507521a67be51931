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
#include "stratlift/models/params.h"

#include <cmath>
#include <string>

#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/inference/transforms.h"
#include "stratlift/models/posteriors.h"

namespace stratlift::models {

void StrataParams::validate() const {
  double total = 0;
  for (double p : pi) {
    if (!(p >= 0 && p <= 1)) {
      throw PreconditionError("strata probabilities must lie in [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw PreconditionError("strata probabilities must sum to 1 (got " +
                            std::to_string(total) + ")");
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw PreconditionError("sigma must be positive and finite");
  }
  if (!std::isfinite(mu_a0) || !std::isfinite(mu_a1) || !std::isfinite(mu_i1)) {
    throw PreconditionError("strata means must be finite");
  }
}

std::array<double, 3> mnl_strata_probs(std::span<const double> beta_i,
                                       std::span<const double> beta_n,
                                       std::span<const double> x) {
  if (beta_i.size() != x.size() || beta_n.size() != x.size()) {
    throw PreconditionError(
        "covariate row has " + std::to_string(x.size()) +
        " entries but the coefficient vectors have " +
        std::to_string(beta_i.size()) + " and " + std::to_string(beta_n.size()));
  }
  double eta_i = 0;
  double eta_n = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    eta_i += x[j] * beta_i[j];
    eta_n += x[j] * beta_n[j];
  }
  const double eta[3] = {0.0, eta_i, eta_n};
  const double lse = inference::log_sum_exp(eta);
  return {std::exp(-lse), std::exp(eta_i - lse), std::exp(eta_n - lse)};
}

double ps_loglik(const StrataParams& params, const ExperimentDataset& data) {
  params.validate();
  const StrataData d = build_strata_data(data, {}, Standardization{});
  const std::array<double, 3> log_pi = {std::log(params.pi[0]),
                                        std::log(params.pi[1]),
                                        std::log(params.pi[2])};
  return strata_loglik(d, std::span(&log_pi, 1), params.mu_a0, params.mu_a1,
                       params.mu_i1, params.sigma, nullptr);
}

double psc_loglik(const CovStrataParams& params, const ExperimentDataset& data,
                  std::span<const std::string> covariates) {
  const StrataData d = build_strata_data(data, covariates, Standardization{});
  std::vector<std::array<double, 3>> log_pi;
  for (const auto& cell : d.cells) {
    const auto p = mnl_strata_probs(params.beta_i, params.beta_n, cell.x);
    log_pi.push_back({std::log(p[0]), std::log(p[1]), std::log(p[2])});
  }
  return strata_loglik(d, log_pi, params.mu_a0, params.mu_a1, params.mu_i1,
                       params.sigma, nullptr);
}

AteValue ps_ate(const StrataParams& p) {
  AteValue out;
  out.log_scale = p.pi[0] * (p.mu_a1 - p.mu_a0) + p.pi[1] * p.mu_i1;
  out.dollar = p.pi[0] * (expected_lognormal_mean(p.mu_a1, p.sigma) -
                          expected_lognormal_mean(p.mu_a0, p.sigma)) +
               p.pi[1] * expected_lognormal_mean(p.mu_i1, p.sigma);
  return out;
}

AteValue zi_ate(const ZeroInflatedParams& p) {
  AteValue out;
  out.log_scale = p.q1 * p.beta - p.q0 * p.alpha;
  out.dollar = p.q1 * expected_lognormal_mean(p.beta, p.sigma) -
               p.q0 * expected_lognormal_mean(p.alpha, p.sigma);
  return out;
}

}  // namespace stratlift::models
