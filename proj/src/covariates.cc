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
#include "stratlift/covariates.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "csv.h"
#include "stratlift/errors.h"

namespace stratlift::covariates {

std::optional<double> responsiveness(
    std::span<const PeriodObservation> history) {
  if (history.empty()) {
    throw PreconditionError("responsiveness needs a non-empty history");
  }
  double exposed = 0, exposed_buy = 0, unexposed = 0, unexposed_buy = 0;
  for (const auto& p : history) {
    if (p.z == 1) {
      exposed += 1;
      exposed_buy += p.y;
    } else {
      unexposed += 1;
      unexposed_buy += p.y;
    }
  }
  if (exposed == 0 || unexposed == 0) return std::nullopt;
  return exposed_buy / exposed - unexposed_buy / unexposed;
}

std::optional<int> recency(std::span<const PeriodObservation> history, int T) {
  if (T < 1) throw PreconditionError("recency needs T >= 1");
  if (history.size() > static_cast<std::size_t>(T)) {
    throw PreconditionError("history is longer than T");
  }
  const int n = static_cast<int>(history.size());
  for (int idx = n - 1; idx >= 0; --idx) {
    if (history[static_cast<std::size_t>(idx)].y == 1) return n - idx;
  }
  return std::nullopt;
}

double recency_pmf(int k, double pi, int T) {
  if (T < 1 || k < 1 || k > T) {
    throw PreconditionError("recency_pmf: k must lie in [1, T]");
  }
  if (!(pi > 0 && pi < 1)) {
    throw PreconditionError("recency_pmf: pi must lie in (0, 1)");
  }
  // 1 - (1 - pi)^T without cancellation for small pi.
  const double norm = -std::expm1(T * std::log1p(-pi));
  return pi * std::pow(1.0 - pi, k - 1) / norm;
}

double expected_recency(double pi, int T) {
  if (T < 1) throw PreconditionError("expected_recency needs T >= 1");
  if (!(pi > 0 && pi < 1)) {
    throw PreconditionError("expected_recency: pi must lie in (0, 1)");
  }
  if (T == 1) return 1.0;
  const double tail = std::exp(T * std::log1p(-pi));  // (1 - pi)^T
  return 1.0 / pi - T * tail / -std::expm1(T * std::log1p(-pi));
}

std::vector<CustomerCovariates> build_covariates(const PanelHistory& panel,
                                                 int r_threshold) {
  if (panel.empty()) {
    throw PreconditionError("cannot build covariates from an empty panel");
  }
  std::vector<CustomerCovariates> out;
  out.reserve(panel.customers().size());
  for (const auto& c : panel.customers()) {
    CustomerCovariates row;
    row.customer_id = c.customer_id;
    row.q = responsiveness(c.periods);
    row.r = recency(c.periods, panel.T());
    row.no_recent_purchase = !row.r || *row.r > r_threshold;
    row.low_responsiveness = !row.q || *row.q < 0;
    out.push_back(std::move(row));
  }
  return out;
}

void save_covariates(const std::vector<CustomerCovariates>& rows,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "customer_id,q,r," << kNoRecentPurchase << ',' << kLowResponsiveness
      << '\n';
  for (const auto& row : rows) {
    out << csv::escape(row.customer_id) << ','
        << (row.q ? csv::format_double(*row.q) : "") << ','
        << (row.r ? std::to_string(*row.r) : "") << ','
        << (row.no_recent_purchase ? 1 : 0) << ','
        << (row.low_responsiveness ? 1 : 0) << '\n';
  }
}

ExperimentDataset join_covariates(const ExperimentDataset& data,
                                  const std::vector<CustomerCovariates>& rows,
                                  JoinReport* report, bool drop_missing) {
  std::unordered_map<std::string_view, const CustomerCovariates*> by_id;
  by_id.reserve(rows.size());
  for (const auto& row : rows) by_id.emplace(row.customer_id, &row);

  JoinReport local;
  std::vector<ExperimentRecord> records;
  records.reserve(data.size());
  for (const auto& r : data.records()) {
    const auto it = by_id.find(r.customer_id);
    if (it == by_id.end()) {
      local.missing.push_back(r.customer_id);
      continue;
    }
    ++local.matched;
    ExperimentRecord copy = r;
    copy.covariates.push_back(it->second->no_recent_purchase ? 1 : 0);
    copy.covariates.push_back(it->second->low_responsiveness ? 1 : 0);
    records.push_back(std::move(copy));
  }
  local.panel_only = rows.size() - local.matched;
  if (report) *report = local;
  if (!local.missing.empty() && !drop_missing) {
    throw ValidationError(std::to_string(local.missing.size()) +
                          " experiment customers have no panel history "
                          "(first: '" + local.missing.front() + "')");
  }
  auto names = data.covariate_names();
  for (const char* n : {kNoRecentPurchase, kLowResponsiveness}) {
    if (std::find(names.begin(), names.end(), n) != names.end()) {
      throw ValidationError(std::string("dataset already has a '") + n +
                            "' column");
    }
    names.emplace_back(n);
  }
  return ExperimentDataset::create(std::move(records), std::move(names));
}

}  // namespace stratlift::covariates
