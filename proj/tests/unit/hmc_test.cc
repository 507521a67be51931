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
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "stratlift/errors.h"
#include "stratlift/inference/convergence.h"
#include "stratlift/inference/hmc.h"
#include "test_targets.h"

namespace stratlift::inference {
namespace {

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double ess_of(const PosteriorDraws& d, std::size_t col) {
  std::vector<std::vector<double>> chains;
  for (std::size_t c = 0; c < d.chains(); ++c) chains.push_back(d.chain_column(c, col));
  return ess_raw(chains);
}

SamplerConfig config(std::uint64_t seed) {
  SamplerConfig c;
  c.seed = seed;
  return c;
}

TEST(Hmc, StandardNormal) {
  testing::GaussianTarget target(1);
  const auto d = sample(target, config(11));
  ASSERT_EQ(d.chains(), 4u);
  ASSERT_EQ(d.iters(), 1000u);
  const auto x = d.column(0);
  const double mcse = sd(x) / std::sqrt(ess_of(d, 0));
  EXPECT_LT(std::abs(mean(x)), 3 * mcse);
  EXPECT_NEAR(sd(x), 1.0, 0.05);
  for (const auto& s : convergence(d)) EXPECT_LT(s.split_rhat, 1.01);
  EXPECT_EQ(d.divergences(), 0u);
}

TEST(Hmc, CorrelatedGaussian) {
  testing::GaussianTarget target(2, 0.8);
  const auto d = sample(target, config(12));
  const auto x = d.column(0), y = d.column(1);
  const double mx = mean(x), my = mean(y);
  double sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double corr = sxy / static_cast<double>(x.size() - 1) / (sd(x) * sd(y));
  EXPECT_NEAR(corr, 0.8, 0.05);
  for (std::size_t col = 0; col < 2; ++col) {
    const auto v = d.column(col);
    EXPECT_LT(std::abs(mean(v)), 3 * sd(v) / std::sqrt(ess_of(d, col)));
  }
  for (const auto& s : convergence(d)) EXPECT_LT(s.split_rhat, 1.01);
}

TEST(Hmc, KolmogorovSmirnov) {
  testing::GaussianTarget target(1);
  auto c = config(13);
  c.sampling_iters = 2500;  // 10,000 draws
  const auto d = sample(target, c);
  auto x = d.column(0);
  std::sort(x.begin(), x.end());
  const boost::math::normal n;
  double stat = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = boost::math::cdf(n, x[i]);
    stat = std::max({stat, f - static_cast<double>(i) / m,
                     static_cast<double>(i + 1) / m - f});
  }
  // Asymptotic critical value at alpha = 0.01.
  EXPECT_LT(stat, 1.628 / std::sqrt(m));
}

TEST(Hmc, Deterministic) {
  testing::GaussianTarget target(2, 0.5);
  auto c = config(99);
  c.warmup_iters = 200;
  c.sampling_iters = 200;
  const auto a = sample(target, c);
  c.threads = 1;
  const auto b = sample(target, c);
  ASSERT_EQ(a.total_draws(), b.total_draws());
  for (std::size_t ch = 0; ch < a.chains(); ++ch) {
    for (std::size_t i = 0; i < a.iters(); ++i) {
      ASSERT_EQ(a.at(ch, i, 0), b.at(ch, i, 0));
      ASSERT_EQ(a.at(ch, i, 1), b.at(ch, i, 1));
    }
  }
  c.seed = 100;
  const auto other = sample(target, c);
  EXPECT_NE(other.at(0, 0, 0), a.at(0, 0, 0));
}

TEST(Hmc, DiagonalMetricAndFixedSteps) {
  testing::GaussianTarget target(2, 0.3);
  auto c = config(21);
  c.dense_metric = false;
  c.leapfrog_steps = 5;
  const auto d = sample(target, c);
  for (const auto& s : d.chain_stats) EXPECT_GT(s.mean_accept, 0.6);
  EXPECT_NEAR(sd(d.column(0)), 1.0, 0.08);
}

TEST(Hmc, DirichletMeans) {
  testing::DirichletTarget target(2.0);
  const auto d = sample(target, config(31));
  ASSERT_EQ(d.names().size(), 3u);
  for (std::size_t col = 0; col < 3; ++col) {
    const auto v = d.column(col);
    std::vector<std::vector<double>> chains;
    for (std::size_t c = 0; c < d.chains(); ++c) chains.push_back(d.chain_column(c, col));
    const double mcse = sd(v) / std::sqrt(ess_raw(chains));
    EXPECT_NEAR(mean(v), 1.0 / 3, 3 * mcse);
  }
  for (std::size_t i = 0; i < d.iters(); ++i) {
    ASSERT_NEAR(d.at(0, i, 0) + d.at(0, i, 1) + d.at(0, i, 2), 1.0, 1e-10);
  }
}

TEST(Hmc, NonFiniteInitNamesCoordinate) {
  testing::BrokenTarget target;
  try {
    sample(target, config(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos) << e.what();
  }
}

TEST(Hmc, InvalidConfig) {
  testing::GaussianTarget target(1);
  auto c = config(1);
  c.target_accept = 0.3;
  EXPECT_THROW(sample(target, c), PreconditionError);
  c = config(1);
  c.chains = 0;
  EXPECT_THROW(sample(target, c), PreconditionError);
  c = config(1);
  c.sampling_iters = 0;
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(PosteriorDraws, Columns) {
  PosteriorDraws d({"a", "b"}, 2, 2, 3);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 3; ++i) {
      d.at(c, i, 0) = static_cast<double>(10 * c + i);
    }
  }
  EXPECT_EQ(d.column("a"), (std::vector<double>{0, 1, 2, 10, 11, 12}));
  EXPECT_EQ(d.chain_column(1, 0), (std::vector<double>{10, 11, 12}));
  d.add_column("c", {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(d.num_columns(), 3u);
  EXPECT_EQ(d.num_params(), 2u);
  EXPECT_EQ(d.at(1, 0, 2), 4.0);
  EXPECT_TRUE(d.has("c"));
  EXPECT_FALSE(d.has("z"));
  EXPECT_THROW(d.require("z"), std::out_of_range);
}

}  // namespace
}  // namespace stratlift::inference
