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
// Plug-in statistics an analyst can compute before fitting any model: the
// stratum shares implied by arm incidences, bounds on the treated-arm
// stratum means, whether stratification should reduce variance, and how
// much, plus the ROI sample-size calculator.
#ifndef STRATLIFT_DIAGNOSTICS_H_
#define STRATLIFT_DIAGNOSTICS_H_

#include <cstddef>
#include <span>

#include "stratlift/data.h"

namespace stratlift {

// Always-buy (A), influenced (I) and never-buy (N) shares.
struct StrataProportions {
  double pi_a = 0;
  double pi_i = 0;
  double pi_n = 1;
  // Treated incidence minus control incidence before clamping at zero.
  double raw_pi_i = 0;
};

// pi_a is the control incidence, pi_i the (clamped) incidence lift.
StrataProportions estimate_strata_proportions(const ExperimentDataset& data);

struct BoundingMeans {
  double mu_a1_min = 0;  // lower bound on the always-buy treated mean
  double mu_i1_max = 0;  // upper bound on the influenced treated mean
};

// Splits the sorted positive treated log-outcomes at floor(n1 * pi_a): the
// low part bounds the always-buy mean from below, the rest bounds the
// influenced mean from above. Throws PreconditionError when there are no
// treated purchasers.
BoundingMeans bounding_means(const ExperimentDataset& data, double pi_a);

// Same split on an explicit set of positive log-outcomes (any order).
BoundingMeans bounding_means(std::span<const double> treated_positive_log,
                             std::size_t n1, double pi_a);

// True when mu_a1_min / mu_i1_max > pi_i / (pi_i + pi_n).
bool benefit_condition(double mu_a1_min, double mu_i1_max,
                       const StrataProportions& p);

// Variance reduction of the post-stratified estimator over the
// difference in means with observed strata and equal allocation:
// 4 pi_a mu_a0 ((1 - pi_a) mu_a1 - pi_i mu_i1) / n.
double prop1_delta(double pi_a, double pi_i, double mu_a0, double mu_a1,
                   double mu_i1, double n);

// prop1_delta with the plug-in shares and the conservative treated-arm
// bounds substituted for mu_a1 and mu_i1.
double delta_min(const StrataProportions& p, double mu_a0_hat,
                 double mu_a1_min, double mu_i1_max, double n);

// exp(mu + sigma^2 / 2) - 1: mean outcome in currency when log(y + 1) is
// N(mu, sigma).
double expected_lognormal_mean(double mu, double sigma);

struct DiagnosticsReport {
  StrataProportions proportions;
  double mu_a0_hat = 0;  // mean log(y+1) of control purchasers
  double mu_a1_min = 0;
  double mu_i1_max = 0;
  bool benefit_condition = false;
  double delta_min = 0;
  double predicted_var_reduction_lb = 0;
  double var_tau_d = 0;  // s1^2/n1 + s0^2/n0 on log(y+1)
  std::size_t n = 0;
};

DiagnosticsReport diagnose(const ExperimentDataset& data);

// How the arm sizes move when the control size n0 changes.
enum class AllocationDesign {
  kFixedTotal,    // n1 = total_n - n0
  kFixedTreated,  // n1 = total_n (campaign size), holdout added on top
};

struct PowerSpec {
  std::size_t total_n = 0;
  double cost_per_unit = 1;
  double roi_null = 0;
  double roi_alt = 0.25;
  double power = 0.9;
  double alpha = 0.05;  // one-sided
  double mean_sales = 0;
  // Used as sqrt(var_tau) when no variance is passed explicitly.
  double outcome_sd = 0;
  AllocationDesign design = AllocationDesign::kFixedTotal;
};

struct SampleSizeResult {
  bool feasible = false;
  std::size_t n0 = 0;
  double effect_log = 0;  // log-scale effect separating the hypotheses
  double achieved_power = 0;
};

// Log-scale distance between the ROI hypotheses:
// log(1 + mean_sales + c (roi_alt - roi_null)) - log(1 + mean_sales).
double roi_log_effect(const PowerSpec& spec);

// Power of the one-sided z-test at control size n0.
double power_at(const PowerSpec& spec, double var_tau, std::size_t n0);

// Smallest n0 reaching spec.power, by integer bisection. var_tau <= 0
// falls back to outcome_sd^2. Infeasible when roi_alt <= roi_null or the
// power cannot be reached with n0 <= total_n (or n0 <= total_n / 2 for
// a fixed total, where power peaks).
SampleSizeResult required_control_size(const PowerSpec& spec,
                                       double var_tau = 0);

}  // namespace stratlift

#endif  // STRATLIFT_DIAGNOSTICS_H_
