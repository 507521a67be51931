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
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/presets.h"
#include "stratlift/simulation.h"
#include "test_util.h"

namespace stratlift {
namespace {

using testing::make_data;

// Builds n1 treated / n0 control customers with the given purchaser counts
// (all purchasers spend `y`).
ExperimentDataset incidence_data(int n1, int buy1, int n0, int buy0, double y = 10) {
  std::vector<std::pair<int, double>> zy;
  for (int i = 0; i < n1; ++i) zy.emplace_back(1, i < buy1 ? y : 0.0);
  for (int i = 0; i < n0; ++i) zy.emplace_back(0, i < buy0 ? y : 0.0);
  return make_data(zy);
}

TEST(StrataProportions, Expt2Example) {
  const auto p = estimate_strata_proportions(incidence_data(1000, 166, 1000, 162));
  EXPECT_NEAR(p.pi_a, 0.162, 1e-12);
  EXPECT_NEAR(p.pi_i, 0.004, 1e-12);
  EXPECT_NEAR(p.pi_n, 0.834, 1e-12);
  EXPECT_EQ(p.pi_a + p.pi_i + p.pi_n, 1.0);
}

TEST(StrataProportions, NoPurchasers) {
  const auto p = estimate_strata_proportions(incidence_data(10, 0, 10, 0));
  EXPECT_EQ(p.pi_a, 0.0);
  EXPECT_EQ(p.pi_i, 0.0);
  EXPECT_EQ(p.pi_n, 1.0);
}

TEST(StrataProportions, NegativeLiftIsClamped) {
  const auto p = estimate_strata_proportions(incidence_data(100, 10, 100, 20));
  EXPECT_NEAR(p.raw_pi_i, -0.1, 1e-12);
  EXPECT_EQ(p.pi_i, 0.0);
  EXPECT_NEAR(p.pi_n, 0.8, 1e-12);
}

TEST(StrataProportions, EmptyArm) {
  EXPECT_THROW(estimate_strata_proportions(incidence_data(5, 1, 0, 0)),
               PreconditionError);
}

TEST(BoundingMeans, SplitsSortedPositives) {
  const std::vector<double> pos = {4, 2, 3, 1};
  // n1 = 4, pi_a = 0.5 -> floor(2) lowest go to the always-buy bound.
  const auto b = bounding_means(pos, 4, 0.5);
  EXPECT_DOUBLE_EQ(b.mu_a1_min, 1.5);
  EXPECT_DOUBLE_EQ(b.mu_i1_max, 3.5);
}

TEST(BoundingMeans, BoundaryRules) {
  const std::vector<double> pos = {1, 2, 3, 4};
  const auto zero = bounding_means(pos, 4, 0.0);
  EXPECT_EQ(zero.mu_a1_min, 0.0);
  EXPECT_DOUBLE_EQ(zero.mu_i1_max, 2.5);
  const auto all = bounding_means(pos, 10, 0.9);
  EXPECT_DOUBLE_EQ(all.mu_a1_min, 2.5);
  EXPECT_EQ(all.mu_i1_max, 0.0);
}

TEST(BoundingMeans, NeedsTreatedPurchasers) {
  EXPECT_THROW(bounding_means(incidence_data(5, 0, 5, 1), 0.2), PreconditionError);
}

TEST(BoundingMeans, UsesLogOutcomes) {
  // Treated positives log1p: {log 2, log 3, log 4, log 5}, n1 = 4, pi_a = 0.5.
  const auto d = make_data({{1, 1}, {1, 2}, {1, 3}, {1, 4}, {0, 0}});
  const auto b = bounding_means(d, 0.5);
  EXPECT_NEAR(b.mu_a1_min, (std::log(2.0) + std::log(3.0)) / 2, 1e-14);
  EXPECT_NEAR(b.mu_i1_max, (std::log(4.0) + std::log(5.0)) / 2, 1e-14);
}

TEST(BenefitCondition, Examples) {
  StrataProportions p{0.2, 0.01, 0.79, 0.01};
  EXPECT_TRUE(benefit_condition(4.7, 3.1, p));
  StrataProportions no_i{0.2, 0.0, 0.8, 0.0};
  EXPECT_TRUE(benefit_condition(0.1, 3.1, no_i));
  EXPECT_FALSE(benefit_condition(0.0, 3.1, p));
  EXPECT_TRUE(benefit_condition(2.0, 0.0, p));
}

TEST(Prop1Delta, Examples) {
  EXPECT_EQ(prop1_delta(0.3, 0.1, 0.0, 5, 2, 1000), 0.0);
  EXPECT_NEAR(prop1_delta(0.2, 0.01, 4.6, 4.7, 3.1, 140000), 9.80194e-5, 1e-9);
  EXPECT_THROW(prop1_delta(0.2, 0.01, 4.6, 4.7, 3.1, 0), PreconditionError);
}

// The stratified-covariance form with stratum means A (mu_a1, mu_a0),
// I (mu_i1, 0), N (0, 0).
double general_delta(double pa, double pi, double a0, double a1, double i1, double n) {
  const double pn = 1 - pa - pi;
  const double m1 = pa * a1 + pi * i1;
  const double m0 = pa * a0;
  return 4 *
         (pa * (a1 - m1) * (a0 - m0) + pi * (i1 - m1) * (0 - m0) +
          pn * (0 - m1) * (0 - m0)) /
         n;
}

TEST(Prop1Delta, MatchesGeneralForm) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 1000; ++k) {
    const double pa = u(rng) * 0.9;
    const double pi = u(rng) * (1 - pa);
    const double a0 = 6 * u(rng), a1 = 6 * u(rng), i1 = 6 * u(rng);
    const double n = 100 + 1e5 * u(rng);
    const double got = prop1_delta(pa, pi, a0, a1, i1, n);
    const double want = general_delta(pa, pi, a0, a1, i1, n);
    ASSERT_NEAR(got, want, 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(Prop1Delta, SignMatchesBenefitCondition) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int k = 0; k < 1000; ++k) {
    const double pa = u(rng) * 0.9;
    const double pi = u(rng) * (1 - pa) * 0.99;
    const double a0 = 5 * u(rng), a1 = 5 * u(rng), i1 = 5 * u(rng);
    StrataProportions p{pa, pi, 1 - pa - pi, pi};
    const double d = prop1_delta(pa, pi, a0, a1, i1, 1000);
    if (std::abs(d) < 1e-12) continue;
    ASSERT_EQ(d > 0, benefit_condition(a1, i1, p));
  }
}

TEST(DeltaMin, SubstitutionIdentity) {
  StrataProportions p{0.162, 0.004, 0.834, 0.004};
  EXPECT_EQ(delta_min(p, 4.616, 4.691, 3.078, 138227),
            prop1_delta(0.162, 0.004, 4.616, 4.691, 3.078, 138227));
  StrataProportions zero{0.0, 0.01, 0.99, 0.01};
  EXPECT_EQ(delta_min(zero, 4.6, 4.7, 3.1, 1000), 0.0);
}

TEST(DeltaMin, MonotoneInBounds) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 500; ++k) {
    const double pa = 0.5 * u(rng), pi = 0.2 * u(rng);
    StrataProportions p{pa, pi, 1 - pa - pi, pi};
    const double a0 = 5 * u(rng), a1 = 5 * u(rng), i1 = 5 * u(rng);
    const double lo = a1 * u(rng), hi = i1 + 3 * u(rng);
    ASSERT_LE(delta_min(p, a0, lo, hi, 1000),
              prop1_delta(pa, pi, a0, a1, i1, 1000) + 1e-15);
  }
}

TEST(LognormalMean, PublishedArithmetic) {
  EXPECT_NEAR(expected_lognormal_mean(3.078, 1.101), 38.81, 0.01);
  EXPECT_EQ(expected_lognormal_mean(0, 0), 0.0);
  EXPECT_NEAR(expected_lognormal_mean(4.691, 1.101) -
                  expected_lognormal_mean(4.616, 1.101),
              14.43, 0.01);
}

TEST(LognormalMean, IncreasingInBothArguments) {
  for (double mu = -1; mu < 5; mu += 0.5) {
    for (double s = 0.1; s < 2; s += 0.3) {
      EXPECT_LT(expected_lognormal_mean(mu, s), expected_lognormal_mean(mu + 0.1, s));
      EXPECT_LT(expected_lognormal_mean(mu, s), expected_lognormal_mean(mu, s + 0.1));
    }
  }
}

TEST(Diagnose, ReportFields) {
  const auto d = sim::generate(presets::expt2_spec(4)).data;
  const auto r = diagnose(d);
  EXPECT_TRUE(r.benefit_condition);
  EXPECT_GT(r.delta_min, 0);
  EXPECT_GT(r.var_tau_d, 0);
  EXPECT_NEAR(r.predicted_var_reduction_lb, r.delta_min / r.var_tau_d, 1e-15);
  EXPECT_EQ(r.n, d.size());
  EXPECT_NEAR(r.proportions.pi_a + r.proportions.pi_i + r.proportions.pi_n, 1, 1e-12);
}

TEST(Diagnose, BoundsBracketTruth) {
  // Bounds are conservative relative to the generating means.
  const auto d = sim::generate(presets::expt2_spec(8)).data;
  const auto r = diagnose(d);
  EXPECT_LE(r.mu_a1_min, 4.691);
  EXPECT_GE(r.mu_i1_max, 3.078);
}

TEST(RequiredControlSize, ZeroEffectIsInfeasible) {
  auto spec = presets::expt2_power();
  spec.roi_alt = spec.roi_null;
  const auto r = required_control_size(spec);
  EXPECT_FALSE(r.feasible);
}

TEST(RequiredControlSize, Expt2Calibration) {
  const auto spec = presets::expt2_power();
  const double var = spec.outcome_sd * spec.outcome_sd;
  // Closed-form solution of effect / sqrt(v/n0 + v/140000) = z_.95 + z_.9,
  // rounded up.
  const auto dim = required_control_size(spec, var);
  ASSERT_TRUE(dim.feasible);
  EXPECT_EQ(dim.n0, 70641u);
  EXPECT_NEAR(static_cast<double>(dim.n0), 66000, 0.2 * 66000);
  EXPECT_GE(dim.achieved_power, 0.9);
  const auto ps = required_control_size(spec, var * presets::kExpt2PsVarianceFactor);
  ASSERT_TRUE(ps.feasible);
  EXPECT_EQ(ps.n0, 28749u);
  EXPECT_NEAR(static_cast<double>(ps.n0), 33000, 0.2 * 33000);
  EXPECT_NEAR(dim.effect_log, std::log(10.56) - std::log(10.31), 1e-15);
}

TEST(RequiredControlSize, FixedTotalPeaksAtHalf) {
  PowerSpec s = presets::expt2_power();
  s.design = AllocationDesign::kFixedTotal;
  s.total_n = 1000;
  const auto r = required_control_size(s);
  EXPECT_FALSE(r.feasible);
  EXPECT_LE(power_at(s, 0, 400), power_at(s, 0, 500));
  EXPECT_THROW({ s.power = 1.5; required_control_size(s); }, PreconditionError);
}

TEST(RequiredControlSize, SmallestSize) {
  PowerSpec s = presets::expt2_power();
  const auto r = required_control_size(s);
  ASSERT_TRUE(r.feasible);
  EXPECT_GE(power_at(s, 0, r.n0), s.power);
  EXPECT_LT(power_at(s, 0, r.n0 - 1), s.power);
}

}  // namespace
}  // namespace stratlift
