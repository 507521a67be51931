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
#ifndef STRATLIFT_DATA_H_
#define STRATLIFT_DATA_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stratlift {

// Modeled response. Outcomes are stored in currency units and transformed
// on use.
inline double log_outcome(double y) { return std::log1p(y); }

struct ExperimentRecord {
  std::string customer_id;
  int z = 0;     // 1 = treated (exposed), 0 = holdout
  double y = 0;  // outcome in currency units, >= 0
  // Binary flags aligned with ExperimentDataset::covariate_names().
  std::vector<std::uint8_t> covariates;
};

// Immutable, validated collection of experiment records.
class ExperimentDataset {
 public:
  ExperimentDataset() = default;

  // Validates ids (unique), z in {0,1}, y >= 0 and finite, flags in {0,1}
  // and one flag per covariate name. Throws ValidationError.
  static ExperimentDataset create(std::vector<ExperimentRecord> records,
                                  std::vector<std::string> covariate_names = {});

  const std::vector<ExperimentRecord>& records() const { return records_; }
  const std::vector<std::string>& covariate_names() const {
    return covariate_names_;
  }
  std::size_t size() const { return records_.size(); }
  std::size_t n1() const { return n1_; }
  std::size_t n0() const { return n0_; }

  // Position of a covariate column, or -1.
  int covariate_index(std::string_view name) const;

  // Throws PreconditionError unless both arms are non-empty.
  void require_both_arms(std::string_view what) const;

 private:
  std::vector<ExperimentRecord> records_;
  std::vector<std::string> covariate_names_;
  std::size_t n1_ = 0;
  std::size_t n0_ = 0;
};

struct ExperimentSchema {
  std::string id_column = "customer_id";
  std::string z_column = "z";
  std::string y_column = "y";
  std::vector<std::string> covariate_columns;
  // Map y < 0 to 0 instead of rejecting the file.
  bool clip_negative = false;
};

struct LoadStats {
  std::size_t rows = 0;
  std::size_t clipped_negative = 0;
};

ExperimentDataset load_experiment(const std::string& path,
                                  const ExperimentSchema& schema = {},
                                  LoadStats* stats = nullptr);

// Writes the canonical CSV layout (customer_id,z,y[,covariates...]) with
// shortest round-trip formatting, so load(save(d)) == d field for field.
void save_experiment(const ExperimentDataset& data, const std::string& path);

struct ExperimentSummary {
  std::size_t n1 = 0;
  std::size_t n0 = 0;
  double mean_log1p_treated = 0;
  double mean_log1p_control = 0;
  double incidence_treated = 0;
  double incidence_control = 0;

  double diff_in_means() const {
    return mean_log1p_treated - mean_log1p_control;
  }
};

ExperimentSummary summarize(const ExperimentDataset& data);

struct PanelRecord {
  std::string customer_id;
  int t = 0;
  int y = 0;
  int z = 0;
};

struct PeriodObservation {
  int y = 0;  // purchased in the period
  int z = 0;  // exposed in the period
};

struct CustomerHistory {
  std::string customer_id;
  int first_period = 1;
  // Consecutive periods first_period .. first_period + size() - 1.
  std::vector<PeriodObservation> periods;

  int last_period() const {
    return first_period + static_cast<int>(periods.size()) - 1;
  }
};

// Per-customer purchase/exposure history. Period T is the most recent
// pre-experiment period.
class PanelHistory {
 public:
  PanelHistory() = default;

  // Groups, orders and validates the records. Throws ValidationError on a
  // duplicate (customer, period) pair, a gap in a customer's periods,
  // t < 1, or a customer whose history does not reach the global T.
  static PanelHistory create(std::vector<PanelRecord> records);

  const std::vector<CustomerHistory>& customers() const { return customers_; }
  int T() const { return T_; }
  bool empty() const { return customers_.empty(); }

  const CustomerHistory* find(std::string_view customer_id) const;

 private:
  std::vector<CustomerHistory> customers_;  // sorted by id
  int T_ = 0;
};

PanelHistory load_panel(const std::string& path);

}  // namespace stratlift

#endif  // STRATLIFT_DATA_H_
