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
#include "stratlift/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "stratlift/errors.h"

namespace stratlift {

StrataProportions estimate_strata_proportions(const ExperimentDataset& data) {
  data.require_both_arms("estimate_strata_proportions");
  std::size_t buyers[2] = {0, 0};
  for (const auto& r : data.records()) {
    if (r.y > 0) ++buyers[r.z];
  }
  StrataProportions p;
  p.pi_a = static_cast<double>(buyers[0]) / static_cast<double>(data.n0());
  const double treated =
      static_cast<double>(buyers[1]) / static_cast<double>(data.n1());
  p.raw_pi_i = treated - p.pi_a;
  p.pi_i = std::max(p.raw_pi_i, 0.0);
  p.pi_n = 1.0 - p.pi_a - p.pi_i;
  return p;
}

BoundingMeans bounding_means(std::span<const double> treated_positive_log,
                             std::size_t n1, double pi_a) {
  if (treated_positive_log.empty()) {
    throw PreconditionError(
        "no treated purchasers: bounding means are undefined");
  }
  if (!(pi_a >= 0 && pi_a <= 1)) {
    throw PreconditionError("pi_a must lie in [0, 1]");
  }
  std::vector<double> v(treated_positive_log.begin(),
                        treated_positive_log.end());
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(
      std::floor(static_cast<double>(n1) * pi_a));
  auto mean = [](auto first, auto last) {
    const auto n = static_cast<double>(std::distance(first, last));
    return std::accumulate(first, last, 0.0) / n;
  };
  BoundingMeans b;
  if (k == 0) {
    b.mu_i1_max = mean(v.begin(), v.end());
  } else if (k >= v.size()) {
    b.mu_a1_min = mean(v.begin(), v.end());
  } else {
    const auto split = v.begin() + static_cast<std::ptrdiff_t>(k);
    b.mu_a1_min = mean(v.begin(), split);
    b.mu_i1_max = mean(split, v.end());
  }
  return b;
}

BoundingMeans bounding_means(const ExperimentDataset& data, double pi_a) {
  std::vector<double> positives;
  for (const auto& r : data.records()) {
    if (r.z == 1 && r.y > 0) positives.push_back(log_outcome(r.y));
  }
  return bounding_means(positives, data.n1(), pi_a);
}

bool benefit_condition(double mu_a1_min, double mu_i1_max,
                       const StrataProportions& p) {
  if (mu_i1_max <= 0) return mu_a1_min > 0;
  const double denom = p.pi_i + p.pi_n;
  const double rhs = denom > 0 ? p.pi_i / denom : 0.0;
  return mu_a1_min / mu_i1_max > rhs;
}

double prop1_delta(double pi_a, double pi_i, double mu_a0, double mu_a1,
                   double mu_i1, double n) {
  if (!(n > 0)) throw PreconditionError("sample size must be positive");
  return 4.0 * pi_a * mu_a0 * ((1.0 - pi_a) * mu_a1 - pi_i * mu_i1) / n;
}

double delta_min(const StrataProportions& p, double mu_a0_hat,
                 double mu_a1_min, double mu_i1_max, double n) {
  return prop1_delta(p.pi_a, p.pi_i, mu_a0_hat, mu_a1_min, mu_i1_max, n);
}

double expected_lognormal_mean(double mu, double sigma) {
  return std::expm1(mu + 0.5 * sigma * sigma);
}

DiagnosticsReport diagnose(const ExperimentDataset& data) {
  DiagnosticsReport rep;
  rep.proportions = estimate_strata_proportions(data);
  rep.n = data.size();

  double sum[2] = {0, 0}, sumsq[2] = {0, 0};
  double control_buyer_sum = 0;
  std::size_t control_buyers = 0;
  std::vector<double> treated_positive;
  for (const auto& r : data.records()) {
    const double l = log_outcome(r.y);
    sum[r.z] += l;
    sumsq[r.z] += l * l;
    if (r.y > 0) {
      if (r.z == 1) {
        treated_positive.push_back(l);
      } else {
        control_buyer_sum += l;
        ++control_buyers;
      }
    }
  }
  rep.mu_a0_hat = control_buyers > 0
                      ? control_buyer_sum / static_cast<double>(control_buyers)
                      : 0.0;
  const auto b = bounding_means(treated_positive, data.n1(),
                                rep.proportions.pi_a);
  rep.mu_a1_min = b.mu_a1_min;
  rep.mu_i1_max = b.mu_i1_max;
  rep.benefit_condition =
      benefit_condition(b.mu_a1_min, b.mu_i1_max, rep.proportions);
  rep.delta_min = delta_min(rep.proportions, rep.mu_a0_hat, b.mu_a1_min,
                            b.mu_i1_max, static_cast<double>(rep.n));

  auto arm_var = [&](int z, std::size_t n) {
    if (n < 2) return 0.0;
    const double m = sum[z] / static_cast<double>(n);
    return (sumsq[z] - static_cast<double>(n) * m * m) /
           static_cast<double>(n - 1);
  };
  rep.var_tau_d = arm_var(1, data.n1()) / static_cast<double>(data.n1()) +
                  arm_var(0, data.n0()) / static_cast<double>(data.n0());
  rep.predicted_var_reduction_lb =
      rep.var_tau_d > 0 ? rep.delta_min / rep.var_tau_d : 0.0;
  return rep;
}

double roi_log_effect(const PowerSpec& spec) {
  const double base = 1.0 + spec.mean_sales;
  return std::log(base + spec.cost_per_unit * (spec.roi_alt - spec.roi_null)) -
         std::log(base);
}

namespace {

double resolve_variance(const PowerSpec& spec, double var_tau) {
  if (var_tau > 0) return var_tau;
  if (spec.outcome_sd > 0) return spec.outcome_sd * spec.outcome_sd;
  throw PreconditionError("a positive per-unit variance is required");
}

double estimator_sd(const PowerSpec& spec, double v, std::size_t n0) {
  const double treated =
      spec.design == AllocationDesign::kFixedTotal
          ? static_cast<double>(spec.total_n - n0)
          : static_cast<double>(spec.total_n);
  return std::sqrt(v / static_cast<double>(n0) + v / treated);
}

}  // namespace

double power_at(const PowerSpec& spec, double var_tau, std::size_t n0) {
  const double v = resolve_variance(spec, var_tau);
  if (n0 == 0 || n0 > spec.total_n ||
      (spec.design == AllocationDesign::kFixedTotal && n0 >= spec.total_n)) {
    return 0.0;
  }
  const boost::math::normal std_normal;
  const double z_alpha = boost::math::quantile(std_normal, 1.0 - spec.alpha);
  const double shift = roi_log_effect(spec) / estimator_sd(spec, v, n0);
  return boost::math::cdf(std_normal, shift - z_alpha);
}

SampleSizeResult required_control_size(const PowerSpec& spec, double var_tau) {
  if (!(spec.power > 0 && spec.power < 1)) {
    throw PreconditionError("power must lie in (0, 1)");
  }
  if (!(spec.alpha > 0 && spec.alpha < 0.5)) {
    throw PreconditionError("alpha must lie in (0, 0.5)");
  }
  if (spec.total_n < 2) throw PreconditionError("total_n must be >= 2");
  const double v = resolve_variance(spec, var_tau);
  SampleSizeResult res;
  res.effect_log = roi_log_effect(spec);
  if (!(spec.roi_alt > spec.roi_null)) return res;

  // Power is increasing in n0 up to `hi`.
  std::size_t hi = spec.design == AllocationDesign::kFixedTotal
                       ? spec.total_n / 2
                       : spec.total_n;
  if (power_at(spec, v, hi) < spec.power) {
    res.achieved_power = power_at(spec, v, hi);
    return res;
  }
  std::size_t lo = 1;
  if (power_at(spec, v, lo) < spec.power) {
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (power_at(spec, v, mid) >= spec.power) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  } else {
    hi = lo;
  }
  res.feasible = true;
  res.n0 = hi;
  res.achieved_power = power_at(spec, v, hi);
  return res;
}

}  // namespace stratlift
