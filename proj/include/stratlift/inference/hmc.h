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
// Static-trajectory Hamiltonian Monte Carlo.
//
// Warmup follows the familiar windowed scheme: a fast phase tuning only the
// step size, a sequence of doubling slow windows that re-estimate the
// (dense or diagonal) metric from the window's draws, and a final fast
// phase. Step size is tuned by dual averaging toward target_accept. Each
// iteration integrates a leapfrog count jittered +/-20% around its base.
#ifndef STRATLIFT_INFERENCE_HMC_H_
#define STRATLIFT_INFERENCE_HMC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stratlift/inference/target_density.h"

namespace stratlift::inference {

struct SamplerConfig {
  int chains = 4;
  int warmup_iters = 1000;
  int sampling_iters = 1000;
  std::uint64_t seed = 1;
  double target_accept = 0.8;
  // Base leapfrog count. 0 derives it from integration_time and the
  // adapted step size (in whitened coordinates).
  int leapfrog_steps = 0;
  double integration_time = 2.0;
  int max_leapfrog = 256;
  // Uniform jitter applied to each coordinate of the initial point.
  double init_jitter = 0.1;
  bool dense_metric = true;
  // Worker threads for chains; 0 = STRATLIFT_THREADS / hardware.
  int threads = 0;

  // Throws PreconditionError describing the first invalid field.
  void validate() const;
};

struct ChainStats {
  double step_size = 0;
  int leapfrog_steps = 0;
  double mean_accept = 0;
  std::size_t divergences = 0;
};

// chains x iters x columns, where the columns are the constrained
// parameters followed by derived quantities.
class PosteriorDraws {
 public:
  PosteriorDraws() = default;
  PosteriorDraws(std::vector<std::string> names, std::size_t num_params,
                 std::size_t chains, std::size_t iters);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t num_params() const { return num_params_; }
  std::size_t num_columns() const { return names_.size(); }
  std::size_t chains() const { return chains_; }
  std::size_t iters() const { return iters_; }
  std::size_t total_draws() const { return chains_ * iters_; }

  double& at(std::size_t chain, std::size_t iter, std::size_t col) {
    return values_[(chain * iters_ + iter) * names_.size() + col];
  }
  double at(std::size_t chain, std::size_t iter, std::size_t col) const {
    return values_[(chain * iters_ + iter) * names_.size() + col];
  }

  // Index of a column, or npos.
  std::size_t index_of(std::string_view name) const;
  bool has(std::string_view name) const;
  // Throws std::out_of_range for unknown names.
  std::size_t require(std::string_view name) const;

  std::vector<double> chain_column(std::size_t chain, std::size_t col) const;
  // All chains concatenated.
  std::vector<double> column(std::size_t col) const;
  std::vector<double> column(std::string_view name) const {
    return column(require(name));
  }

  // Appends a derived column; `values` is ordered like column().
  void add_column(std::string name, const std::vector<double>& values);

  std::vector<ChainStats> chain_stats;
  std::vector<std::string> warnings;

  std::size_t divergences() const;
  double divergence_rate() const;

 private:
  std::vector<std::string> names_;
  std::size_t num_params_ = 0;
  std::size_t chains_ = 0;
  std::size_t iters_ = 0;
  std::vector<double> values_;
};

// Runs config.chains independent chains. Bit-reproducible for a fixed
// (target, config): each chain draws from its own stream derived from
// (seed, chain index), regardless of thread scheduling.
//
// Throws PreconditionError for an invalid config and Error naming the
// offending coordinate when log p or its gradient is not finite at a
// chain's initial point. A post-warmup divergence rate above 10% is
// reported in PosteriorDraws::warnings.
PosteriorDraws sample(const TargetDensity& target, const SamplerConfig& config);

}  // namespace stratlift::inference

#endif  // STRATLIFT_INFERENCE_HMC_H_
