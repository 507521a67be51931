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
// Synthetic experiments with known strata, oracle estimators that use the
// true strata, and replication harnesses built on them.
#ifndef STRATLIFT_SIMULATION_H_
#define STRATLIFT_SIMULATION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratlift/data.h"
#include "stratlift/inference/hmc.h"
#include "stratlift/models/fit.h"
#include "stratlift/models/params.h"

namespace stratlift::sim {

enum class Stratum : std::uint8_t { kAlways = 0, kInfluenced = 1, kNever = 2 };

// Binary covariate flags drawn independently with the given probabilities.
struct CovariateDesign {
  std::vector<std::string> names;
  std::vector<double> probs;
};

struct GeneratorSpec {
  models::StrataParams truth;
  // When set, strata probabilities come from the covariate logit instead
  // of truth.pi, and the means/sigma are taken from here.
  std::optional<models::CovStrataParams> cov_truth;
  CovariateDesign design;
  std::size_t n = 0;
  double treat_frac = 0.5;
  std::uint64_t seed = 1;

  // Throws PreconditionError naming the first invalid field.
  void validate() const;
};

struct Generated {
  ExperimentDataset data;
  std::vector<Stratum> strata;
};

// Purchasers' log(y+1) are drawn from the cell's normal truncated to
// (0, inf), so every purchaser has y > 0.
Generated generate(const GeneratorSpec& spec);

// Population ATEs implied by the spec (covariate model: averaged over the
// design distribution).
models::AteValue true_ate(const GeneratorSpec& spec);

// Population strata shares implied by the spec.
std::array<double, 3> true_strata_shares(const GeneratorSpec& spec);

struct OracleFit {
  double tau_d = 0;
  double tau_ps = 0;
  // Regression of log(y+1) on Z, stratum dummies and centered
  // treatment-by-stratum interactions. Dummies are created for the strata
  // present in the data, with the last present stratum as baseline.
  std::vector<std::string> coef_names;
  std::vector<double> coefficients;
  std::array<double, 3> strata_share{};  // means of the stratum indicators
  bool singular = false;
};

// Throws PreconditionError when sizes differ or an arm is empty.
OracleFit oracle_estimates(const ExperimentDataset& data,
                           std::span<const Stratum> strata);

// sum_s share_s * (mean_s1 - mean_s0) from cell means; NaN when a present
// stratum lacks one arm.
double plugin_tau_ps(const ExperimentDataset& data,
                     std::span<const Stratum> strata);

struct ReplicationRecord {
  double tau_d = 0;
  double tau_ps = 0;
  double delta_min = 0;
  double var_tau_d_hat = 0;  // estimated from the replication itself
  bool singular = false;
};

// `reps` independent datasets at (n, frac); replication r uses the stream
// mix_seed(seed, r).
std::vector<ReplicationRecord> run_replications(const models::StrataParams& truth,
                                                std::size_t n, double frac,
                                                std::size_t reps,
                                                std::uint64_t seed,
                                                std::size_t threads = 0);

struct EstimatorStats {
  double mean = 0;
  double var = 0;
  double mean_se = 0;  // batch-means standard errors
  double var_se = 0;
};

struct HarnessConfig {
  models::StrataParams truth;
  std::vector<std::size_t> n_grid = {2000, 5000, 10000, 20000};
  std::vector<double> frac_grid = {0.1, 0.3, 0.5};
  std::size_t reps = 500;
  std::size_t batches = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 0;

  void validate() const;
};

struct Fig2Cell {
  std::size_t n = 0;
  double frac = 0;
  double true_ate = 0;
  EstimatorStats d;
  EstimatorStats ps;
  double gap = 0;     // var(tau_d) - var(tau_ps)
  double gap_se = 0;  // batch-means standard error
  double prop1_delta = 0;
  std::size_t used = 0;
  std::size_t singular = 0;
};

std::vector<Fig2Cell> replicate_fig2(const HarnessConfig& config);

struct Fig3Cell {
  std::size_t n = 0;
  double frac = 0;
  double realized_reduction = 0;  // (var_d - var_ps) / var_d
  double reduction_se = 0;
  double bound_pilot = 0;  // delta_min / var_tau_d from replication 0
  double bound_mean = 0;   // average of the per-replication bounds
  // Share of batches whose realized reduction is at least bound_pilot.
  double bound_batch_share = 0;
  std::size_t used = 0;
  std::size_t singular = 0;
};

std::vector<Fig3Cell> replicate_fig3(const HarnessConfig& config);

struct BatchBoundCheck {
  std::size_t batches = 0;
  std::size_t holds = 0;
  double share = 0;
  std::vector<double> realized_gap;    // per batch
  std::vector<double> mean_delta_min;  // per batch
};

// Splits the non-singular records into consecutive batches of
// `batch_size` and compares the batch-mean delta_min with the batch's
// realized var(tau_d) - var(tau_ps).
BatchBoundCheck delta_min_batches(std::span<const ReplicationRecord> records,
                                  std::size_t batch_size);

void write_fig2_csv(const std::vector<Fig2Cell>& cells, const std::string& path);
void write_fig3_csv(const std::vector<Fig3Cell>& cells, const std::string& path);

struct RecoveryRow {
  std::string name;
  double truth = 0;
  double mean = 0;
  double sd = 0;
  double q025 = 0;
  double q975 = 0;
  bool covered = false;
  bool is_param = true;  // false for derived quantities
};

struct RecoveryReport {
  models::ModelKind model = models::ModelKind::kStrata;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<RecoveryRow> rows;
  models::FitResult fit;
  bool all_params_covered = false;

  const RecoveryRow& row(std::string_view name) const;
};

// Generates one dataset from `spec` and fits `model` to it. For ps-cov the
// design's covariate names are used.
RecoveryReport recover(const GeneratorSpec& spec, models::ModelKind model,
                       const inference::SamplerConfig& sampler);

// Same, on an already generated dataset.
RecoveryReport recover_on(const GeneratorSpec& spec, const ExperimentDataset& data,
                          models::ModelKind model,
                          const inference::SamplerConfig& sampler);

struct Prop2Customer {
  double pi_a = 0;
  double pi_i = 0;
};

struct Prop2Config {
  Prop2Customer first{0.3, 0.1};
  Prop2Customer second{0.1, 0.02};
  // Correlation of the latent Gaussians driving stratum and exposure.
  double rho = 0.3;
  double p_exposure = 0.5;
  int T = 13;
  std::size_t reps = 100000;
  std::uint64_t seed = 1;
};

struct Prop2Arm {
  double mean_q = 0;
  double se_q = 0;
  double mean_r = 0;
  double se_r = 0;
  std::size_t n_q = 0;
  std::size_t n_r = 0;
  std::size_t undefined_q = 0;
  std::size_t no_purchase = 0;
  // Realized Pearson correlations of exposure with the A and I indicators.
  double corr_a = 0;
  double corr_i = 0;
};

struct Prop2Result {
  Prop2Arm first;
  Prop2Arm second;
  double q_diff = 0;  // first - second
  double q_diff_se = 0;
  double r_diff = 0;
  double r_diff_se = 0;
};

// Each replication simulates T periods for each customer. Per period a
// latent N(0,1) U picks the stratum (A below the pi_a quantile, then I,
// else N); exposure is 1 when -rho U + sqrt(1 - rho^2) e exceeds the
// (1 - p_exposure) quantile. Buying: A always, I when exposed.
Prop2Result prop2_monte_carlo(const Prop2Config& config);

}  // namespace stratlift::sim

#endif  // STRATLIFT_SIMULATION_H_
