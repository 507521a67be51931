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
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/inference/convergence.h"
#include "stratlift/inference/gradient_check.h"
#include "stratlift/models/fit.h"
#include "stratlift/models/params.h"
#include "stratlift/models/posteriors.h"
#include "stratlift/presets.h"
#include "stratlift/simulation.h"
#include "test_util.h"

namespace stratlift::models {
namespace {

using testing::make_data;

double log_normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2 * std::numbers::pi);
}

// Record-by-record likelihood with no aggregation.
double naive_ps_loglik(const std::array<double, 3>& pi, double a0, double a1,
                       double i1, double sigma, const ExperimentRecord& r) {
  const double l = std::log1p(r.y);
  if (r.z == 1 && r.y > 0) {
    return std::log(pi[0] * std::exp(log_normal_pdf(l, a1, sigma)) +
                    pi[1] * std::exp(log_normal_pdf(l, i1, sigma)));
  }
  if (r.z == 1) return std::log(pi[2]);
  if (r.y > 0) return std::log(pi[0]) + log_normal_pdf(l, a0, sigma);
  return std::log(pi[1] + pi[2]);
}

TEST(PsLoglik, ControlNonPurchaser) {
  StrataParams p;
  p.pi = {0.162, 0.004, 0.834};
  p.mu_a0 = p.mu_a1 = p.mu_i1 = 4;
  const auto d = make_data({{0, 0.0}});
  EXPECT_NEAR(ps_loglik(p, d), std::log(0.838), 1e-14);
}

TEST(PsLoglik, ControlPurchaserAtMean) {
  StrataParams p;
  p.pi = {0.2, 0.01, 0.79};
  p.mu_a0 = std::log1p(99.0);
  p.mu_a1 = 1;
  p.mu_i1 = 1;
  p.sigma = 1.3;
  const auto d = make_data({{0, 99.0}});
  EXPECT_NEAR(ps_loglik(p, d),
              std::log(0.2) - std::log(1.3 * std::sqrt(2 * std::numbers::pi)), 1e-12);
}

TEST(PsLoglik, MatchesNaiveReference) {
  const auto g = sim::generate(presets::table_a1_spec(17));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 0.9);
  for (int k = 0; k < 5; ++k) {
    StrataParams p;
    const double a = u(rng) * 0.5, i = u(rng) * 0.1;
    p.pi = {a, i, 1 - a - i};
    p.mu_a0 = 3 + 2 * u(rng);
    p.mu_a1 = 3 + 2 * u(rng);
    p.mu_i1 = 2 + 2 * u(rng);
    p.sigma = 0.5 + u(rng);
    double want = 0;
    for (const auto& r : g.data.records()) {
      want += naive_ps_loglik(p.pi, p.mu_a0, p.mu_a1, p.mu_i1, p.sigma, r);
    }
    EXPECT_NEAR(ps_loglik(p, g.data), want, 1e-8 * std::abs(want));
  }
}

TEST(PscLoglik, MatchesNaiveReference) {
  auto spec = presets::table_a3_spec(5);
  spec.n = 20000;
  const auto g = sim::generate(spec);
  const auto& t = *spec.cov_truth;
  double want = 0;
  for (const auto& r : g.data.records()) {
    const std::vector<double> x = {1.0, static_cast<double>(r.covariates[0]),
                                   static_cast<double>(r.covariates[1])};
    want += naive_ps_loglik(mnl_strata_probs(t.beta_i, t.beta_n, x), t.mu_a0,
                            t.mu_a1, t.mu_i1, t.sigma, r);
  }
  EXPECT_NEAR(psc_loglik(t, g.data, g.data.covariate_names()), want,
              1e-8 * std::abs(want));
}

TEST(PsAte, TableA1Truth) {
  const auto spec = presets::table_a1_spec(1);
  const auto ate = ps_ate(spec.truth);
  EXPECT_NEAR(ate.log_scale, 0.051, 1e-12);
  EXPECT_NEAR(ate.dollar, 4.239, 0.02);
}

TEST(PsAte, NoEffect) {
  StrataParams p;
  p.pi = {0.3, 0.0, 0.7};
  p.mu_a0 = p.mu_a1 = 4.2;
  p.mu_i1 = 3;
  const auto ate = ps_ate(p);
  EXPECT_EQ(ate.log_scale, 0.0);
  EXPECT_EQ(ate.dollar, 0.0);
}

TEST(ZiAte, SymmetricArms) {
  ZeroInflatedParams p;
  p.q0 = p.q1 = 0.2;
  p.alpha = p.beta = 4;
  EXPECT_EQ(zi_ate(p).log_scale, 0.0);
  EXPECT_EQ(zi_ate(p).dollar, 0.0);
}

TEST(Mnl, PublishedTableValues) {
  const std::vector<double> bi = {-3.548, 1.684, 0.0};
  const std::vector<double> bn = {0.997, 1.608, 0.0};
  const auto base = mnl_strata_probs(bi, bn, std::vector<double>{1, 0, 0});
  EXPECT_NEAR(base[0], 0.268, 0.002);
  EXPECT_NEAR(base[1], 0.008, 0.002);
  EXPECT_NEAR(base[2], 0.725, 0.002);
  const auto nrp = mnl_strata_probs(bi, bn, std::vector<double>{1, 1, 0});
  EXPECT_NEAR(nrp[0], 0.068, 0.002);
  EXPECT_NEAR(nrp[1], 0.011, 0.002);
  EXPECT_NEAR(nrp[2], 0.921, 0.002);
}

TEST(Mnl, SymmetryAndErrors) {
  const std::vector<double> zero = {0, 0};
  const auto p = mnl_strata_probs(zero, zero, std::vector<double>{1, 1});
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
  EXPECT_THROW(mnl_strata_probs(zero, zero, std::vector<double>{1}), PreconditionError);
  // Large coefficients stay normalized.
  const std::vector<double> big = {800.0};
  const auto q = mnl_strata_probs(big, std::vector<double>{-800.0}, std::vector<double>{1});
  EXPECT_NEAR(q[0] + q[1] + q[2], 1.0, 1e-15);
  EXPECT_NEAR(q[1], 1.0, 1e-15);
}

// Small synthetic datasets shared by the posterior checks.
ExperimentDataset small_a1(std::uint64_t seed, std::size_t n = 6000) {
  auto spec = presets::table_a1_spec(seed);
  spec.n = n;
  return sim::generate(spec).data;
}

ExperimentDataset small_a3(std::uint64_t seed, std::size_t n = 6000) {
  auto spec = presets::table_a3_spec(seed);
  spec.n = n;
  return sim::generate(spec).data;
}

std::vector<std::unique_ptr<inference::TargetDensity>> all_posteriors() {
  std::vector<std::unique_ptr<inference::TargetDensity>> out;
  const auto a1 = small_a1(3);
  const auto a3 = small_a3(4);
  out.push_back(make_posterior(ModelKind::kDiffMeans, a1));
  out.push_back(make_posterior(ModelKind::kZeroInflated, a1));
  out.push_back(make_posterior(ModelKind::kZeroInflatedPositive, a1));
  out.push_back(make_posterior(ModelKind::kStrata, a1));
  out.push_back(make_posterior(ModelKind::kStrataCovariates, a3, a3.covariate_names()));
  return out;
}

TEST(Posteriors, GradientAudit) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0, 1);
  for (const auto& post : all_posteriors()) {
    const auto init = post->initial_point();
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x = init;
      for (auto& v : x) v += n(rng);
      const auto check = inference::check_gradient(*post, x);
      worst = std::max(worst, check.relative_error);
    }
    EXPECT_LT(worst, 1e-6) << post->param_names().front();
  }
}

TEST(Posteriors, InitialPointIsFinite) {
  for (const auto& post : all_posteriors()) {
    const auto x = post->initial_point();
    ASSERT_EQ(x.size(), post->dim());
    EXPECT_TRUE(std::isfinite(post->logp(x)));
    EXPECT_EQ(post->constrain(x).size(), post->param_names().size());
    EXPECT_EQ(post->unconstrained_names().size(), post->dim());
  }
}

TEST(Posteriors, BowlShape) {
  // Moving the standardized means 10 units from the initial point lowers
  // the density in every direction tried.
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0, 1);
  for (const auto& post : all_posteriors()) {
    const auto names = post->unconstrained_names();
    std::vector<std::size_t> mu_idx;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& nm = names[i];
      if (nm.starts_with("mu") || nm.starts_with("alpha (") ||
          nm.starts_with("beta (") || nm.starts_with("tau_d (")) {
        mu_idx.push_back(i);
      }
    }
    ASSERT_FALSE(mu_idx.empty()) << names.front();
    const auto x0 = post->initial_point();
    const double lp0 = post->logp(x0);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> dir(mu_idx.size());
      double norm = 0;
      for (auto& d : dir) {
        d = n(rng);
        norm += d * d;
      }
      auto x = x0;
      for (std::size_t j = 0; j < mu_idx.size(); ++j) {
        x[mu_idx[j]] += 10 * dir[j] / std::sqrt(norm);
      }
      EXPECT_LT(post->logp(x), lp0);
    }
  }
}

TEST(PsPosterior, BoundaryIsFinite) {
  const auto d = small_a1(5);
  PsPosterior post(d);
  auto x = post.initial_point();
  for (double v : {-30.0, -200.0, -700.0}) {
    x[0] = v;  // log(pi_i / pi_a)
    std::vector<double> g(post.dim());
    const double lp = post.log_density(x, g);
    EXPECT_TRUE(std::isfinite(lp)) << v;
    for (double gi : g) EXPECT_TRUE(std::isfinite(gi)) << v;
  }
}

TEST(PsPosterior, UnconstrainRoundTrip) {
  const auto d = small_a1(6);
  PsPosterior post(d);
  StrataParams p;
  p.pi = {0.21, 0.02, 0.77};
  p.mu_a0 = 4.5;
  p.mu_a1 = 4.8;
  p.mu_i1 = 3.0;
  p.sigma = 1.2;
  const auto back = PsPosterior::to_params(post.constrain(post.unconstrain(p)));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(back.pi[k], p.pi[k], 1e-12);
  EXPECT_NEAR(back.mu_a0, 4.5, 1e-12);
  EXPECT_NEAR(back.mu_i1, 3.0, 1e-12);
  EXPECT_NEAR(back.sigma, 1.2, 1e-12);
}

TEST(PsPosterior, LikelihoodDifferencesMatchPsLoglik) {
  // Moving only the means changes log density by exactly the likelihood
  // change plus the (standardized) normal prior change.
  const auto d = small_a1(7);
  PsPosterior post(d);
  StrataParams a;
  a.pi = {0.2, 0.01, 0.79};
  a.mu_a0 = 4.6;
  a.mu_a1 = 4.7;
  a.mu_i1 = 3.1;
  a.sigma = 1.1;
  StrataParams b = a;
  b.mu_a1 = 4.5;
  const auto& st = post.standardization();
  const double prior = [&] {
    const double za = st.forward(a.mu_a1), zb = st.forward(b.mu_a1);
    return -(zb * zb - za * za) / (2 * 400.0);
  }();
  const double got = post.logp(post.unconstrain(b)) - post.logp(post.unconstrain(a));
  const double want = ps_loglik(b, d) - ps_loglik(a, d) + prior;
  EXPECT_NEAR(got, want, 1e-8 * std::abs(want) + 1e-9);
}

TEST(PsPosterior, RequiresPurchasersInBothArms) {
  const auto no_control = make_data({{1, 5}, {1, 0}, {0, 0}, {0, 0}});
  EXPECT_THROW(PsPosterior{no_control}, IdentificationError);
  const auto no_treated = make_data({{1, 0}, {0, 3}});
  EXPECT_THROW(PsPosterior{no_treated}, IdentificationError);
  EXPECT_THROW(ZiPosterior(no_control, false), IdentificationError);
}

TEST(PscPosterior, Names) {
  const auto d = small_a3(1);
  PscPosterior post(d, d.covariate_names());
  const auto names = post.param_names();
  ASSERT_EQ(names.size(), 10u);
  EXPECT_EQ(names[0], "beta_i[intercept]");
  EXPECT_EQ(names[1], "beta_i[no_recent_purchase]");
  EXPECT_EQ(names[3], "beta_n[intercept]");
  EXPECT_EQ(names[9], "sigma");
  EXPECT_EQ(PscPosterior::coefficient_names(d.covariate_names()).size(), 6u);
  EXPECT_THROW(PscPosterior(d, {"missing"}), PreconditionError);
  EXPECT_THROW(make_posterior(ModelKind::kStrataCovariates, d), PreconditionError);
}

TEST(ModelKind, Names) {
  for (auto k : {ModelKind::kDiffMeans, ModelKind::kZeroInflated,
                 ModelKind::kZeroInflatedPositive, ModelKind::kStrata,
                 ModelKind::kStrataCovariates}) {
    EXPECT_EQ(parse_model(model_name(k)), k);
  }
  EXPECT_EQ(model_name(ModelKind::kZeroInflatedPositive), "zi-pos");
  EXPECT_THROW(parse_model("nuts"), PreconditionError);
}

inference::SamplerConfig quick(std::uint64_t seed, int iters = 500) {
  inference::SamplerConfig c;
  c.seed = seed;
  c.warmup_iters = iters;
  c.sampling_iters = iters;
  return c;
}

TEST(ZiPosterior, ConstrainedDrawsRespectOrder) {
  const auto d = small_a1(8, 4000);
  const auto fit = fit_model(ModelKind::kZeroInflatedPositive, d, quick(1, 300));
  const auto q0 = fit.draws.column("q0");
  const auto q1 = fit.draws.column("q1");
  for (std::size_t i = 0; i < q0.size(); ++i) ASSERT_GE(q1[i], q0[i]);
}

TEST(ZiPosterior, DerivedAteIsPerDraw) {
  const auto d = small_a1(9, 4000);
  const auto fit = fit_model(ModelKind::kZeroInflated, d, quick(2, 200));
  const auto& dr = fit.draws;
  for (std::size_t i = 0; i < dr.total_draws(); i += 37) {
    const std::size_t c = i / dr.iters(), it = i % dr.iters();
    ZeroInflatedParams p;
    p.q0 = dr.at(c, it, dr.require("q0"));
    p.q1 = dr.at(c, it, dr.require("q1"));
    p.alpha = dr.at(c, it, dr.require("alpha"));
    p.beta = dr.at(c, it, dr.require("beta"));
    p.sigma = dr.at(c, it, dr.require("sigma"));
    ASSERT_NEAR(dr.at(c, it, dr.require("ate_log")), zi_ate(p).log_scale, 1e-12);
  }
}

TEST(PsAteDraws, MatchesClosedFormPerDraw) {
  const auto d = small_a1(10, 8000);
  const auto fit = fit_model(ModelKind::kStrata, d, quick(3, 200));
  const auto ate = ps_ate_draws(fit.draws);
  const auto& dr = fit.draws;
  ASSERT_EQ(ate.ate_log.size(), dr.total_draws());
  for (std::size_t i = 0; i < dr.total_draws(); i += 13) {
    const std::size_t c = i / dr.iters(), it = i % dr.iters();
    StrataParams p;
    p.pi = {dr.at(c, it, 0), dr.at(c, it, 1), dr.at(c, it, 2)};
    p.mu_a0 = dr.at(c, it, 3);
    p.mu_a1 = dr.at(c, it, 4);
    p.mu_i1 = dr.at(c, it, 5);
    p.sigma = dr.at(c, it, 6);
    const auto want = ps_ate(p);
    ASSERT_EQ(ate.ate_log[i], want.log_scale);
    ASSERT_EQ(ate.ate_dollar[i], want.dollar);
    ASSERT_NEAR(p.pi[0] + p.pi[1] + p.pi[2], 1.0, 1e-10);
    ASSERT_GT(p.sigma, 0);
  }
}

TEST(DimPosterior, AgreesWithOls) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto d = small_a1(100 + s, 3000);
    DimPosterior post(d);
    const double ols = summarize(d).diff_in_means();
    EXPECT_NEAR(post.ols_tau(), ols, 1e-12);
    const auto fit = fit_model(ModelKind::kDiffMeans, d, quick(s, 500));
    const auto draws = fit.draws.column("tau_d");
    std::vector<std::vector<double>> chains;
    const auto col = fit.draws.require("tau_d");
    for (std::size_t c = 0; c < fit.draws.chains(); ++c) {
      chains.push_back(fit.draws.chain_column(c, col));
    }
    const double mcse = fit.summary("tau_d").sd / std::sqrt(inference::ess_raw(chains));
    EXPECT_NEAR(fit.summary("tau_d").mean, ols, 4 * mcse) << "seed " << s;
  }
}

TEST(DimPosterior, NullDataStraddlesZero) {
  std::vector<std::pair<int, double>> zy;
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(0.05);
  for (int i = 0; i < 4000; ++i) {
    const double y = e(rng);
    zy.emplace_back(0, y);
    zy.emplace_back(1, y);  // identical arms
  }
  const auto fit = fit_model(ModelKind::kDiffMeans, make_data(zy), quick(4));
  EXPECT_LT(fit.summary("tau_d").q025, 0);
  EXPECT_GT(fit.summary("tau_d").q975, 0);
  EXPECT_NEAR(fit.summary("tau_d").mean, 0, 3 * fit.summary("tau_d").sd / 20);
}

TEST(PscPosterior, ZeroCovariatesMatchNoCovariateModel) {
  auto spec = presets::table_a1_spec(12);
  spec.n = 30000;
  spec.design.names = {"flag"};
  spec.design.probs = {0.0};
  const auto d = sim::generate(spec).data;
  const auto ps = fit_model(ModelKind::kStrata, d, quick(5, 400));
  const auto psc = fit_model(ModelKind::kStrataCovariates, d, quick(6, 400), {"flag"});
  const double tol = 2 * std::max(ps.ate_log.sd, psc.ate_log.sd);
  EXPECT_NEAR(ps.ate_log.mean, psc.ate_log.mean, tol);
  EXPECT_NEAR(ps.summary("pi_a").mean, psc.summary("pi_a").mean,
              2 * ps.summary("pi_a").sd);
}

TEST(Fit, ReportsSummariesAndReduction) {
  const auto d = small_a1(13, 20000);
  const auto ps = fit_model(ModelKind::kStrata, d, quick(7, 400));
  const auto dim = fit_model(ModelKind::kDiffMeans, d, quick(7, 400));
  EXPECT_EQ(ps.summaries.size(), ps.draws.num_columns());
  EXPECT_EQ(ps.convergence.size(), ps.draws.num_columns());
  ASSERT_TRUE(ps.ate_dollar.has_value());
  EXPECT_FALSE(dim.ate_dollar.has_value());
  EXPECT_LT(ps.max_rhat(), 1.05);
  EXPECT_GT(ps.min_ess(), 100);
  const double red = variance_reduction(ps, dim);
  EXPECT_NEAR(red, 1 - std::pow(ps.ate_log.sd / dim.ate_log.sd, 2), 1e-15);
  EXPECT_THROW(ps.summary("nope"), std::out_of_range);
}

TEST(Fit, SingleChainSkipsDiagnostics) {
  const auto d = small_a1(14, 3000);
  auto c = quick(8, 200);
  c.chains = 1;
  const auto fit = fit_model(ModelKind::kDiffMeans, d, c);
  EXPECT_TRUE(fit.convergence.empty());
  EXPECT_FALSE(fit.warnings.empty());
}

}  // namespace
}  // namespace stratlift::models
