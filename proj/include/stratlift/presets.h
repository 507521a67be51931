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
// Named parameter sets for the synthetic studies, so each study runs from a
// single name.
#ifndef STRATLIFT_PRESETS_H_
#define STRATLIFT_PRESETS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stratlift/diagnostics.h"
#include "stratlift/models/fit.h"
#include "stratlift/models/params.h"
#include "stratlift/simulation.h"

namespace stratlift::presets {

// Ratio of post-stratified to diff-in-means sampling variance observed in
// the second field experiment (a 49.2% reduction).
inline constexpr double kExpt2PsVarianceFactor = 0.508;

// Parameters estimated for the second field experiment.
models::StrataParams expt2_truth();

// 140K customers, equal split, single-stratum-share truth.
sim::GeneratorSpec table_a1_spec(std::uint64_t seed);

// 140K customers with two Bernoulli(0.5) flags driving the strata.
sim::GeneratorSpec table_a3_spec(std::uint64_t seed);

// Expt-2 sized dataset (138,227 customers, 50.1% treated) at expt2_truth.
sim::GeneratorSpec expt2_spec(std::uint64_t seed);

// Replication grid around expt2_truth.
sim::HarnessConfig harness_config(std::uint64_t seed);

// ROI test of 0 vs 25% with a 140K campaign and holdout added on top.
PowerSpec expt2_power();

struct Preset {
  std::string name;
  std::string description;
  // Set for generator-driven presets (table-a1, table-a3, expt2).
  std::optional<sim::GeneratorSpec> generator;
  // Set for harness presets (fig2, fig3).
  std::optional<sim::HarnessConfig> harness;
  std::optional<PowerSpec> power;
  models::ModelKind model = models::ModelKind::kStrata;
};

std::vector<std::string> preset_names();

// Throws PreconditionError for unknown names.
Preset find_preset(std::string_view name, std::uint64_t seed);

}  // namespace stratlift::presets

#endif  // STRATLIFT_PRESETS_H_
