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
// Pre-randomization covariates built from purchase/exposure panels:
// responsiveness Q (purchase rate when exposed minus when not exposed)
// and recency R (periods since the last purchase, counting the most recent
// period as 1).
#ifndef STRATLIFT_COVARIATES_H_
#define STRATLIFT_COVARIATES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratlift/data.h"

namespace stratlift::covariates {

inline constexpr const char* kNoRecentPurchase = "no_recent_purchase";
inline constexpr const char* kLowResponsiveness = "low_responsiveness";

// sum(y z) / sum(z) - sum(y (1 - z)) / sum(1 - z). Empty when the customer
// was exposed in every period or in none. Throws PreconditionError for an
// empty history.
std::optional<double> responsiveness(std::span<const PeriodObservation> history);

// `history` holds periods T - size + 1 .. T. Returns T + 1 - t_last for the
// latest purchase period t_last, or empty when there was no purchase.
// Throws PreconditionError when T < 1 or the history is longer than T.
std::optional<int> recency(std::span<const PeriodObservation> history, int T);

// pi (1 - pi)^(k-1) / (1 - (1 - pi)^T) for k in 1..T. Throws
// PreconditionError outside that range or for pi outside (0, 1).
double recency_pmf(int k, double pi, int T);

// Mean of recency_pmf: 1/pi - T (1 - pi)^T / (1 - (1 - pi)^T).
double expected_recency(double pi, int T);

struct CustomerCovariates {
  std::string customer_id;
  std::optional<double> q;
  std::optional<int> r;
  bool no_recent_purchase = false;   // r > threshold or no purchase
  bool low_responsiveness = false;   // q < 0 or undefined
};

// One row per panel customer, sorted by id. Throws PreconditionError for an
// empty panel.
std::vector<CustomerCovariates> build_covariates(const PanelHistory& panel,
                                                 int r_threshold = 5);

void save_covariates(const std::vector<CustomerCovariates>& rows,
                     const std::string& path);

struct JoinReport {
  std::size_t matched = 0;
  std::vector<std::string> missing;  // in the experiment, not in the panel
  std::size_t panel_only = 0;
};

// Appends the two flag columns to every record. Customers without a panel
// history are listed in the report; when `drop_missing` is false they make
// the join fail with ValidationError instead of being dropped.
ExperimentDataset join_covariates(const ExperimentDataset& data,
                                  const std::vector<CustomerCovariates>& rows,
                                  JoinReport* report, bool drop_missing = false);

}  // namespace stratlift::covariates

#endif  // STRATLIFT_COVARIATES_H_
