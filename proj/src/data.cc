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
#include "stratlift/data.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>
#include <utility>

#include "csv.h"
#include "stratlift/errors.h"

namespace stratlift {

ExperimentDataset ExperimentDataset::create(
    std::vector<ExperimentRecord> records,
    std::vector<std::string> covariate_names) {
  ExperimentDataset d;
  std::unordered_set<std::string_view> seen;
  seen.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!seen.insert(r.customer_id).second) {
      throw ValidationError("duplicate customer_id '" + r.customer_id + "'");
    }
    if (r.z != 0 && r.z != 1) {
      throw ValidationError("record " + std::to_string(i + 1) +
                            ": z must be 0 or 1");
    }
    if (!std::isfinite(r.y) || r.y < 0) {
      throw ValidationError("record " + std::to_string(i + 1) + " ('" +
                            r.customer_id + "'): outcome must be >= 0");
    }
    if (r.covariates.size() != covariate_names.size()) {
      throw ValidationError("record " + std::to_string(i + 1) +
                            ": expected " +
                            std::to_string(covariate_names.size()) +
                            " covariate flags");
    }
    for (auto f : r.covariates) {
      if (f > 1) {
        throw ValidationError("record " + std::to_string(i + 1) +
                              ": covariate flags must be 0 or 1");
      }
    }
    (r.z == 1 ? d.n1_ : d.n0_)++;
  }
  d.records_ = std::move(records);
  d.covariate_names_ = std::move(covariate_names);
  return d;
}

int ExperimentDataset::covariate_index(std::string_view name) const {
  for (std::size_t i = 0; i < covariate_names_.size(); ++i) {
    if (covariate_names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void ExperimentDataset::require_both_arms(std::string_view what) const {
  if (n1_ == 0 || n0_ == 0) {
    throw PreconditionError(std::string(what) +
                            " requires both a treated and a control arm");
  }
}

ExperimentDataset load_experiment(const std::string& path,
                                  const ExperimentSchema& schema,
                                  LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open experiment file '" + path + "'");
  std::vector<std::string> header;
  if (!csv::read_row(in, header) ||
      (header.size() == 1 && header[0].empty())) {
    throw SchemaError("experiment file '" + path + "' has no header row");
  }
  auto require = [&](const std::string& name) {
    const auto idx = csv::column_index(header, name);
    if (idx == std::string_view::npos) {
      throw SchemaError("experiment file is missing column '" + name + "'");
    }
    return idx;
  };
  const auto id_col = require(schema.id_column);
  const auto z_col = require(schema.z_column);
  const auto y_col = require(schema.y_column);
  std::vector<std::size_t> cov_cols;
  for (const auto& c : schema.covariate_columns) cov_cols.push_back(require(c));

  std::vector<ExperimentRecord> records;
  std::vector<std::string> fields;
  std::size_t row = 1;  // header is row 1
  std::size_t clipped = 0;
  while (csv::read_row(in, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() < header.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    ExperimentRecord r;
    r.customer_id = fields[id_col];
    const auto z = csv::parse_int(fields[z_col]);
    if (!z || (*z != 0 && *z != 1)) {
      throw ParseError("row " + std::to_string(row) +
                       ": treatment indicator must be 0 or 1, got '" +
                       fields[z_col] + "'");
    }
    r.z = static_cast<int>(*z);
    const auto y = csv::parse_double(fields[y_col]);
    if (!y) {
      throw ParseError("row " + std::to_string(row) +
                       ": outcome is not numeric: '" + fields[y_col] + "'");
    }
    r.y = *y;
    if (r.y < 0) {
      if (!schema.clip_negative) {
        throw ValidationError("row " + std::to_string(row) +
                              ": negative outcome " + fields[y_col] +
                              " (use --clip-negative to map it to 0)");
      }
      r.y = 0;
      ++clipped;
    }
    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      const auto f = csv::parse_int(fields[cov_cols[k]]);
      if (!f || (*f != 0 && *f != 1)) {
        throw ParseError("row " + std::to_string(row) + ": covariate '" +
                         schema.covariate_columns[k] +
                         "' must be 0 or 1, got '" + fields[cov_cols[k]] +
                         "'");
      }
      r.covariates.push_back(static_cast<std::uint8_t>(*f));
    }
    records.push_back(std::move(r));
  }
  if (stats) {
    stats->rows = records.size();
    stats->clipped_negative = clipped;
  }
  return ExperimentDataset::create(std::move(records),
                                   schema.covariate_columns);
}

void save_experiment(const ExperimentDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "customer_id,z,y";
  for (const auto& c : data.covariate_names()) out << ',' << csv::escape(c);
  out << '\n';
  for (const auto& r : data.records()) {
    out << csv::escape(r.customer_id) << ',' << r.z << ','
        << csv::format_double(r.y);
    for (auto f : r.covariates) out << ',' << static_cast<int>(f);
    out << '\n';
  }
}

ExperimentSummary summarize(const ExperimentDataset& data) {
  data.require_both_arms("summarize");
  ExperimentSummary s;
  s.n1 = data.n1();
  s.n0 = data.n0();
  double sum[2] = {0, 0};
  std::size_t buyers[2] = {0, 0};
  for (const auto& r : data.records()) {
    sum[r.z] += log_outcome(r.y);
    if (r.y > 0) ++buyers[r.z];
  }
  s.mean_log1p_treated = sum[1] / static_cast<double>(s.n1);
  s.mean_log1p_control = sum[0] / static_cast<double>(s.n0);
  s.incidence_treated = static_cast<double>(buyers[1]) / static_cast<double>(s.n1);
  s.incidence_control = static_cast<double>(buyers[0]) / static_cast<double>(s.n0);
  return s;
}

PanelHistory PanelHistory::create(std::vector<PanelRecord> records) {
  std::map<std::string, std::map<int, PeriodObservation>> grouped;
  for (const auto& r : records) {
    if (r.t < 1) {
      throw ValidationError("panel customer '" + r.customer_id +
                            "': period index must be >= 1");
    }
    if ((r.y != 0 && r.y != 1) || (r.z != 0 && r.z != 1)) {
      throw ValidationError("panel customer '" + r.customer_id +
                            "': indicators must be 0 or 1");
    }
    auto& periods = grouped[r.customer_id];
    if (!periods.emplace(r.t, PeriodObservation{r.y, r.z}).second) {
      throw ValidationError("panel customer '" + r.customer_id +
                            "' has duplicate period " + std::to_string(r.t));
    }
  }
  PanelHistory h;
  for (auto& [id, periods] : grouped) {
    CustomerHistory c;
    c.customer_id = id;
    c.first_period = periods.begin()->first;
    int expected = c.first_period;
    for (const auto& [t, obs] : periods) {
      if (t != expected) {
        throw ValidationError("panel customer '" + id + "' is missing period " +
                              std::to_string(expected));
      }
      c.periods.push_back(obs);
      ++expected;
    }
    h.T_ = std::max(h.T_, c.last_period());
    h.customers_.push_back(std::move(c));
  }
  for (const auto& c : h.customers_) {
    if (c.last_period() != h.T_) {
      throw ValidationError("panel customer '" + c.customer_id +
                            "' has no record for the most recent period " +
                            std::to_string(h.T_));
    }
  }
  return h;
}

const CustomerHistory* PanelHistory::find(std::string_view customer_id) const {
  auto it = std::lower_bound(
      customers_.begin(), customers_.end(), customer_id,
      [](const CustomerHistory& c, std::string_view id) {
        return c.customer_id < id;
      });
  if (it == customers_.end() || it->customer_id != customer_id) return nullptr;
  return &*it;
}

PanelHistory load_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open panel file '" + path + "'");
  std::vector<std::string> header;
  if (!csv::read_row(in, header) ||
      (header.size() == 1 && header[0].empty())) {
    return PanelHistory{};
  }
  std::size_t cols[4];
  const char* names[4] = {"customer_id", "t", "y", "z"};
  for (int k = 0; k < 4; ++k) {
    cols[k] = csv::column_index(header, names[k]);
    if (cols[k] == std::string_view::npos) {
      throw SchemaError(std::string("panel file is missing column '") +
                        names[k] + "'");
    }
  }
  std::vector<PanelRecord> records;
  std::vector<std::string> fields;
  std::size_t row = 1;
  while (csv::read_row(in, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() < header.size()) {
      throw ParseError("panel row " + std::to_string(row) +
                       ": too few fields");
    }
    PanelRecord r;
    r.customer_id = fields[cols[0]];
    const auto t = csv::parse_int(fields[cols[1]]);
    const auto y = csv::parse_int(fields[cols[2]]);
    const auto z = csv::parse_int(fields[cols[3]]);
    if (!t) {
      throw ParseError("panel row " + std::to_string(row) +
                       ": period is not an integer");
    }
    if (!y || (*y != 0 && *y != 1) || !z || (*z != 0 && *z != 1)) {
      throw ParseError("panel row " + std::to_string(row) +
                       ": purchase/exposure indicators must be 0 or 1");
    }
    r.t = static_cast<int>(*t);
    r.y = static_cast<int>(*y);
    r.z = static_cast<int>(*z);
    records.push_back(std::move(r));
  }
  return PanelHistory::create(std::move(records));
}

}  // namespace stratlift
