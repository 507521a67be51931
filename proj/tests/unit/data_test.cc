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
#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "stratlift/data.h"
#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/presets.h"
#include "stratlift/simulation.h"
#include "test_util.h"

namespace stratlift {
namespace {

using testing::make_data;
using testing::TempFile;

TEST(LoadExperiment, CountsArms) {
  TempFile f("exp", "customer_id,z,y\nc1,1,50.0\nc2,0,0.0\n");
  const auto d = load_experiment(f.path());
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.n1(), 1u);
  EXPECT_EQ(d.n0(), 1u);
  EXPECT_EQ(d.records()[0].customer_id, "c1");
  EXPECT_DOUBLE_EQ(d.records()[0].y, 50.0);
}

TEST(LoadExperiment, NegativeOutcomeNamesRow) {
  TempFile f("exp", "customer_id,z,y\nc1,1,50.0\nc2,0,-3\n");
  try {
    load_experiment(f.path());
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(LoadExperiment, ClipNegative) {
  TempFile f("exp", "customer_id,z,y\nc1,1,50.0\nc2,0,-3\n");
  ExperimentSchema schema;
  schema.clip_negative = true;
  LoadStats stats;
  const auto d = load_experiment(f.path(), schema, &stats);
  EXPECT_EQ(stats.clipped_negative, 1u);
  EXPECT_EQ(d.records()[1].y, 0.0);
}

TEST(LoadExperiment, Errors) {
  TempFile missing("exp", "customer_id,z\nc1,1\n");
  EXPECT_THROW(load_experiment(missing.path()), SchemaError);
  TempFile text("exp", "customer_id,z,y\nc1,1,abc\n");
  try {
    load_experiment(text.path());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
  TempFile dup("exp", "customer_id,z,y\nc1,1,1\nc1,0,2\n");
  EXPECT_THROW(load_experiment(dup.path()), ValidationError);
  TempFile empty("exp", "");
  EXPECT_THROW(load_experiment(empty.path()), SchemaError);
  EXPECT_THROW(load_experiment("/nonexistent/file.csv"), SchemaError);
}

TEST(LoadExperiment, CovariateColumns) {
  TempFile f("exp", "customer_id,z,y,a,b\nc1,1,5,1,0\nc2,0,0,0,1\n");
  ExperimentSchema schema;
  schema.covariate_columns = {"b"};
  const auto d = load_experiment(f.path(), schema);
  ASSERT_EQ(d.covariate_names().size(), 1u);
  EXPECT_EQ(d.records()[1].covariates[0], 1);
  EXPECT_EQ(d.covariate_index("b"), 0);
  EXPECT_EQ(d.covariate_index("a"), -1);

  TempFile bad("exp", "customer_id,z,y,a\nc1,1,5,2\n");
  schema.covariate_columns = {"a"};
  EXPECT_THROW(load_experiment(bad.path(), schema), ParseError);
}

TEST(Dataset, ValidatesRecords) {
  EXPECT_THROW(make_data({{2, 1.0}}), ValidationError);
  EXPECT_THROW(make_data({{1, -1.0}}), ValidationError);
  EXPECT_THROW(make_data({{1, NAN}}), ValidationError);
  EXPECT_THROW(make_data({{1, 1.0}}).require_both_arms("x"), PreconditionError);
}

TEST(Summarize, LogOneIsOne) {
  const auto s = summarize(make_data({{1, std::exp(1.0) - 1.0}, {0, 0.0}}));
  EXPECT_NEAR(s.mean_log1p_treated, 1.0, 1e-15);
  EXPECT_EQ(s.mean_log1p_control, 0.0);
  EXPECT_NEAR(s.diff_in_means(), 1.0, 1e-15);
}

TEST(Summarize, AllZero) {
  const auto s = summarize(make_data({{1, 0}, {0, 0}, {1, 0}}));
  EXPECT_EQ(s.incidence_treated, 0.0);
  EXPECT_EQ(s.incidence_control, 0.0);
  EXPECT_EQ(s.mean_log1p_treated, 0.0);
  EXPECT_EQ(s.mean_log1p_control, 0.0);
}

TEST(Summarize, EmptyArm) {
  EXPECT_THROW(summarize(make_data({{1, 3.0}})), PreconditionError);
}

TEST(Summarize, PermutationInvariant) {
  auto g = sim::generate(presets::table_a1_spec(5)).data;
  auto recs = g.records();
  std::mt19937_64 rng(1);
  std::shuffle(recs.begin(), recs.end(), rng);
  const auto a = summarize(g);
  const auto b = summarize(ExperimentDataset::create(recs));
  EXPECT_EQ(a.n1, b.n1);
  EXPECT_NEAR(a.mean_log1p_treated, b.mean_log1p_treated, 1e-12);
  EXPECT_NEAR(a.mean_log1p_control, b.mean_log1p_control, 1e-12);
  EXPECT_DOUBLE_EQ(a.incidence_treated, b.incidence_treated);
}

TEST(Summarize, Expt2Incidences) {
  const auto d = sim::generate(presets::expt2_spec(11)).data;
  const auto s = summarize(d);
  const double se0 = std::sqrt(0.162 * 0.838 / static_cast<double>(s.n0));
  const double se1 = std::sqrt(0.166 * 0.834 / static_cast<double>(s.n1));
  EXPECT_NEAR(s.incidence_control, 0.162, 3 * se0);
  EXPECT_NEAR(s.incidence_treated, 0.166, 3 * se1);
  // Cross-module consistency with the plug-in share.
  EXPECT_DOUBLE_EQ(estimate_strata_proportions(d).pi_a, s.incidence_control);
}

TEST(SaveExperiment, RoundTripIsExact) {
  const auto spec = presets::table_a1_spec(3);
  const auto g = sim::generate(spec);
  TempFile f("roundtrip");
  save_experiment(g.data, f.path());
  const auto back = load_experiment(f.path());
  ASSERT_EQ(back.size(), g.data.size());
  EXPECT_EQ(back.n1(), g.data.n1());
  EXPECT_EQ(back.n0(), g.data.n0());
  for (std::size_t i = 0; i < back.size(); ++i) {
    ASSERT_EQ(back.records()[i].customer_id, g.data.records()[i].customer_id);
    ASSERT_EQ(back.records()[i].z, g.data.records()[i].z);
    ASSERT_EQ(back.records()[i].y, g.data.records()[i].y);
  }
}

TEST(SaveExperiment, RoundTripWithCovariates) {
  const auto g = sim::generate(presets::table_a3_spec(2));
  TempFile f("roundtrip_cov");
  save_experiment(g.data, f.path());
  ExperimentSchema schema;
  schema.covariate_columns = g.data.covariate_names();
  const auto back = load_experiment(f.path(), schema);
  for (std::size_t i = 0; i < back.size(); i += 997) {
    ASSERT_EQ(back.records()[i].covariates, g.data.records()[i].covariates);
  }
}

std::string panel_csv(int periods) {
  std::string s = "customer_id,t,y,z\n";
  for (int t = 1; t <= periods; ++t) {
    s += "a," + std::to_string(t) + "," + std::to_string(t % 2) + ",1\n";
  }
  return s;
}

TEST(LoadPanel, ThirteenPeriods) {
  TempFile f("panel", panel_csv(13));
  const auto p = load_panel(f.path());
  EXPECT_EQ(p.T(), 13);
  ASSERT_EQ(p.customers().size(), 1u);
  EXPECT_EQ(p.customers()[0].periods.size(), 13u);
  EXPECT_EQ(p.customers()[0].periods[0].y, 1);
  EXPECT_EQ(p.customers()[0].periods[1].y, 0);
  EXPECT_NE(p.find("a"), nullptr);
  EXPECT_EQ(p.find("b"), nullptr);
}

TEST(LoadPanel, EmptyFile) {
  TempFile f("panel", "");
  const auto p = load_panel(f.path());
  EXPECT_TRUE(p.empty());
  EXPECT_EQ(p.T(), 0);
}

TEST(LoadPanel, Errors) {
  TempFile dup("panel", "customer_id,t,y,z\na,1,0,0\na,1,1,0\n");
  EXPECT_THROW(load_panel(dup.path()), ValidationError);
  TempFile gap("panel", "customer_id,t,y,z\na,1,0,0\na,3,1,0\n");
  EXPECT_THROW(load_panel(gap.path()), ValidationError);
  TempFile bad("panel", "customer_id,t,y,z\na,1,2,0\n");
  EXPECT_THROW(load_panel(bad.path()), ParseError);
  TempFile cols("panel", "customer_id,t,y\na,1,1\n");
  EXPECT_THROW(load_panel(cols.path()), SchemaError);
}

TEST(LoadPanel, UnorderedRowsAreSorted) {
  TempFile f("panel", "customer_id,t,y,z\nb,2,1,0\na,2,0,1\nb,1,0,0\na,1,1,1\n");
  const auto p = load_panel(f.path());
  ASSERT_EQ(p.customers().size(), 2u);
  EXPECT_EQ(p.customers()[0].customer_id, "a");
  EXPECT_EQ(p.customers()[1].periods[1].y, 1);
  EXPECT_EQ(p.T(), 2);
}

}  // namespace
}  // namespace stratlift
