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
#include "stratlift/presets.h"

#include "stratlift/covariates.h"
#include "stratlift/errors.h"

namespace stratlift::presets {

models::StrataParams expt2_truth() {
  models::StrataParams p;
  p.pi = {0.162, 0.004, 0.834};
  p.mu_a0 = 4.616;
  p.mu_a1 = 4.691;
  p.mu_i1 = 3.078;
  p.sigma = 1.101;
  return p;
}

sim::GeneratorSpec table_a1_spec(std::uint64_t seed) {
  sim::GeneratorSpec spec;
  spec.truth.pi = {0.2, 0.01, 0.79};
  spec.truth.mu_a0 = 4.6;
  spec.truth.mu_a1 = 4.7;
  spec.truth.mu_i1 = 3.1;
  spec.truth.sigma = 1.1;
  spec.n = 140000;
  spec.treat_frac = 0.5;
  spec.seed = seed;
  return spec;
}

sim::GeneratorSpec table_a3_spec(std::uint64_t seed) {
  sim::GeneratorSpec spec;
  models::CovStrataParams t;
  t.beta_i = {-3.0, 1.7, 0.0};
  t.beta_n = {1.0, 1.6, 0.3};
  t.mu_a0 = 4.6;
  t.mu_a1 = 4.7;
  t.mu_i1 = 3.5;
  t.sigma = 1.0;
  spec.cov_truth = t;
  spec.design.names = {covariates::kNoRecentPurchase,
                       covariates::kLowResponsiveness};
  spec.design.probs = {0.5, 0.5};
  spec.n = 140000;
  spec.treat_frac = 0.5;
  spec.seed = seed;
  return spec;
}

sim::GeneratorSpec expt2_spec(std::uint64_t seed) {
  sim::GeneratorSpec spec;
  spec.truth = expt2_truth();
  spec.n = 69268 + 68959;
  spec.treat_frac = 69268.0 / 138227.0;
  spec.seed = seed;
  return spec;
}

sim::HarnessConfig harness_config(std::uint64_t seed) {
  sim::HarnessConfig c;
  c.truth = expt2_truth();
  c.seed = seed;
  return c;
}

PowerSpec expt2_power() {
  PowerSpec s;
  s.total_n = 140000;
  s.cost_per_unit = 1.0;
  s.roi_null = 0.0;
  s.roi_alt = 0.25;
  s.power = 0.9;
  s.alpha = 0.05;
  s.mean_sales = 9.31;
  s.outcome_sd = 1.774;
  s.design = AllocationDesign::kFixedTreated;
  return s;
}

std::vector<std::string> preset_names() {
  return {"table-a1", "table-a3", "fig2", "fig3", "expt2"};
}

Preset find_preset(std::string_view name, std::uint64_t seed) {
  Preset p;
  p.name = std::string(name);
  if (name == "table-a1") {
    p.description = "stratification model recovery, 70K per arm";
    p.generator = table_a1_spec(seed);
  } else if (name == "table-a3") {
    p.description = "covariate stratification model recovery, 140K customers";
    p.generator = table_a3_spec(seed);
    p.model = models::ModelKind::kStrataCovariates;
  } else if (name == "fig2") {
    p.description = "sampling variance of diff-in-means vs post-stratification";
    p.harness = harness_config(seed);
  } else if (name == "fig3") {
    p.description = "realized variance reduction vs the lower bound";
    p.harness = harness_config(seed);
  } else if (name == "expt2") {
    p.description = "second field experiment truth and sample-size inputs";
    p.generator = expt2_spec(seed);
    p.power = expt2_power();
  } else {
    throw PreconditionError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

}  // namespace stratlift::presets
