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
#include "stratlift/inference/convergence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "stratlift/errors.h"

namespace stratlift::inference {

namespace {

using Chains = std::vector<std::vector<double>>;

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

Chains split_chains(const Chains& chains) {
  Chains out;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

// Replaces every value by the normal score of its pooled fractional rank.
Chains rank_normalize(const Chains& chains) {
  std::vector<std::pair<double, std::size_t>> pooled;
  for (const auto& c : chains) {
    for (double x : c) pooled.emplace_back(x, pooled.size());
  }
  std::sort(pooled.begin(), pooled.end());
  const auto s = static_cast<double>(pooled.size());
  std::vector<double> score(pooled.size());
  const boost::math::normal std_normal;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // average of i+1..j
    const double z =
        boost::math::quantile(std_normal, (rank - 0.375) / (s + 0.25));
    for (std::size_t k = i; k < j; ++k) score[pooled[k].second] = z;
    i = j;
  }
  Chains out;
  std::size_t k = 0;
  for (const auto& c : chains) {
    out.emplace_back(score.begin() + static_cast<std::ptrdiff_t>(k),
                     score.begin() + static_cast<std::ptrdiff_t>(k + c.size()));
    k += c.size();
  }
  return out;
}

void check_shape(const Chains& chains) {
  if (chains.size() < 2) {
    throw PreconditionError("convergence diagnostics need at least 2 chains");
  }
  for (const auto& c : chains) {
    if (c.size() < 100) {
      throw PreconditionError(
          "convergence diagnostics need at least 100 draws per chain");
    }
    if (c.size() != chains.front().size()) {
      throw PreconditionError("chains must have equal length");
    }
  }
}

bool all_identical(const Chains& chains) {
  const double first = chains.front().front();
  for (const auto& c : chains) {
    for (double x : c) {
      if (x != first) return false;
    }
  }
  return true;
}

}  // namespace

double split_rhat_raw(const Chains& chains) {
  const Chains split = split_chains(chains);
  const auto n = static_cast<double>(split.front().size());
  std::vector<double> means;
  double w = 0;
  for (const auto& c : split) {
    means.push_back(mean_of(c));
    w += sample_var(c);
  }
  w /= static_cast<double>(split.size());
  const double b_over_n = sample_var(means);
  if (w == 0) {
    return b_over_n == 0 ? std::numeric_limits<double>::quiet_NaN()
                         : std::numeric_limits<double>::infinity();
  }
  const double var_plus = (n - 1.0) / n * w + b_over_n;
  return std::sqrt(var_plus / w);
}

double ess_raw(const Chains& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();
  std::vector<double> means(m);
  for (std::size_t c = 0; c < m; ++c) means[c] = mean_of(chains[c]);
  // Biased (1/n) autocovariance at lag t, averaged over chains.
  auto mean_acov = [&](std::size_t t) {
    double total = 0;
    for (std::size_t c = 0; c < m; ++c) {
      const auto& x = chains[c];
      double s = 0;
      for (std::size_t i = 0; i + t < n; ++i) {
        s += (x[i] - means[c]) * (x[i + t] - means[c]);
      }
      total += s / static_cast<double>(n);
    }
    return total / static_cast<double>(m);
  };
  const double nd = static_cast<double>(n);
  const double mean_var = mean_acov(0) * nd / (nd - 1.0);
  double var_plus = mean_var * (nd - 1.0) / nd;
  if (m > 1) var_plus += sample_var(means);
  if (!(var_plus > 0)) return std::numeric_limits<double>::quiet_NaN();

  std::vector<double> rho(n + 2, 0.0);
  double rho_even = 1.0;
  rho[0] = rho_even;
  double rho_odd = 1.0 - (mean_var - mean_acov(1)) / var_plus;
  rho[1] = rho_odd;
  std::size_t s = 1;
  while (s + 4 < n && rho_even + rho_odd > 0) {
    rho_even = 1.0 - (mean_var - mean_acov(s + 1)) / var_plus;
    rho_odd = 1.0 - (mean_var - mean_acov(s + 2)) / var_plus;
    if (rho_even + rho_odd >= 0) {
      rho[s + 1] = rho_even;
      rho[s + 2] = rho_odd;
    }
    s += 2;
  }
  const std::size_t max_s = s;
  if (rho_even > 0) rho[max_s + 1] = rho_even;
  // Initial monotone sequence.
  for (std::size_t k = 1; k + 3 <= max_s; k += 2) {
    if (rho[k + 1] + rho[k + 2] > rho[k - 1] + rho[k]) {
      rho[k + 1] = 0.5 * (rho[k - 1] + rho[k]);
      rho[k + 2] = rho[k + 1];
    }
  }
  const double total = static_cast<double>(m) * nd;
  double tau = -1.0 + rho[max_s + 1];
  for (std::size_t k = 0; k <= max_s; ++k) tau += 2.0 * rho[k];
  return std::min(total / tau, total * std::log10(total));
}

ConvergenceStats convergence(const Chains& chains) {
  check_shape(chains);
  ConvergenceStats out;
  if (all_identical(chains)) {
    out.split_rhat = std::numeric_limits<double>::quiet_NaN();
    out.ess_bulk = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const Chains z = rank_normalize(chains);
  out.split_rhat = split_rhat_raw(z);
  out.ess_bulk = ess_raw(split_chains(z));
  return out;
}

std::vector<ConvergenceStats> convergence(const PosteriorDraws& draws) {
  std::vector<ConvergenceStats> out;
  for (std::size_t col = 0; col < draws.num_columns(); ++col) {
    Chains chains;
    for (std::size_t c = 0; c < draws.chains(); ++c) {
      chains.push_back(draws.chain_column(c, col));
    }
    auto s = convergence(chains);
    s.name = draws.names()[col];
    out.push_back(std::move(s));
  }
  return out;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

DrawSummary summarize_values(std::string name, std::span<const double> values) {
  DrawSummary s;
  s.name = std::move(name);
  if (values.empty()) {
    s.mean = s.sd = s.q025 = s.q975 = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  std::vector<double> v(values.begin(), values.end());
  s.mean = mean_of(v);
  s.sd = v.size() > 1 ? std::sqrt(sample_var(v)) : 0.0;
  s.q025 = quantile(v, 0.025);
  s.q975 = quantile(v, 0.975);
  return s;
}

std::vector<DrawSummary> summarize_draws(const PosteriorDraws& draws) {
  if (draws.total_draws() == 0) {
    throw PreconditionError("cannot summarize an empty set of draws");
  }
  std::vector<DrawSummary> out;
  for (std::size_t col = 0; col < draws.num_columns(); ++col) {
    out.push_back(summarize_values(draws.names()[col], draws.column(col)));
  }
  return out;
}

}  // namespace stratlift::inference
