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
// JSON and plain-text renderings of the analysis results.
#ifndef STRATLIFT_REPORT_H_
#define STRATLIFT_REPORT_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "stratlift/diagnostics.h"
#include "stratlift/inference/hmc.h"
#include "stratlift/models/fit.h"
#include "stratlift/simulation.h"

namespace stratlift::report {

using Json = nlohmann::ordered_json;

Json to_json(const DiagnosticsReport& r);
Json to_json(const SampleSizeResult& r);
Json to_json(const PowerSpec& s);
Json to_json(const inference::SamplerConfig& c);
Json to_json(const models::FitResult& fit);
Json to_json(const sim::RecoveryReport& r);
Json to_json(const std::vector<sim::Fig2Cell>& cells);
Json to_json(const std::vector<sim::Fig3Cell>& cells);
Json to_json(const sim::Prop2Result& r);
Json to_json(const models::StrataParams& p);

// Monospace tables.
std::string render(const DiagnosticsReport& r);
std::string render(const models::FitResult& fit);
std::string render(const sim::RecoveryReport& r);

// One row per draw: chain, iteration, then every column of the draws.
void write_draws_csv(const inference::PosteriorDraws& draws,
                     const std::string& path);

// Writes `j` indented by two spaces with a trailing newline.
void write_json(const Json& j, const std::string& path);

}  // namespace stratlift::report

#endif  // STRATLIFT_REPORT_H_
