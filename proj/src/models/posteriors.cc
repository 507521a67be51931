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
#include "stratlift/models/posteriors.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/inference/transforms.h"

namespace stratlift::models {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2 pi) / 2
constexpr double kMeanPriorVar = 20.0 * 20.0;

using inference::log_sum_exp;

struct Moments {
  double n = 0;
  double mean = 0;
  double ss = 0;  // centered sum of squares

  void add(double v) {
    n += 1;
    const double delta = v - mean;
    mean += delta / n;
    ss += delta * (v - mean);
  }
  double sd() const { return n > 1 ? std::sqrt(ss / (n - 1)) : 0.0; }
};

double logistic(double v) {
  return v >= 0 ? 1.0 / (1.0 + std::exp(-v))
                : std::exp(v) / (1.0 + std::exp(v));
}

// log(1 + e^d) and its derivative e^d / (1 + e^d).
void softplus(double d, double* value, double* slope) {
  if (d > 0) {
    const double e = std::exp(-d);
    *value = d + std::log1p(e);
    *slope = 1.0 / (1.0 + e);
  } else {
    const double e = std::exp(d);
    *value = std::log1p(e);
    *slope = e / (1.0 + e);
  }
}

double clamp_prob(double p) { return std::clamp(p, 1e-3, 1.0 - 1e-3); }

// Dataset-level plug-ins used as chain starting values.
std::array<double, 3> plugin_strata(const ExperimentDataset& data) {
  const auto p = estimate_strata_proportions(data);
  std::array<double, 3> out = {std::max(p.pi_a, 1e-3), std::max(p.pi_i, 1e-3),
                               std::max(p.pi_n, 1e-3)};
  const double total = out[0] + out[1] + out[2];
  for (double& v : out) v /= total;
  return out;
}

void require_purchasers(const ExperimentDataset& data) {
  data.require_both_arms("model fitting");
  bool control = false;
  bool treated = false;
  for (const auto& r : data.records()) {
    if (r.y > 0) (r.z == 1 ? treated : control) = true;
  }
  if (!control) {
    throw IdentificationError(
        "no purchasers in the control arm: the always-buy control mean and "
        "sigma are not identified");
  }
  if (!treated) {
    throw IdentificationError(
        "no purchasers in the treated arm: the treated strata means are not "
        "identified");
  }
}

std::vector<std::string> covariate_labels(const std::string& prefix,
                                          std::span<const std::string> names) {
  std::vector<std::string> out = {prefix + "[intercept]"};
  for (const auto& n : names) out.push_back(prefix + "[" + n + "]");
  return out;
}

}  // namespace

Standardization control_purchaser_standardization(
    const ExperimentDataset& data) {
  Moments m;
  for (const auto& r : data.records()) {
    if (r.z == 0 && r.y > 0) m.add(log_outcome(r.y));
  }
  Standardization s;
  s.center = m.n > 0 ? m.mean : 0.0;
  const double sd = m.sd();
  s.scale = sd > 0 ? sd : 1.0;
  return s;
}

StrataData build_strata_data(const ExperimentDataset& data,
                             std::span<const std::string> covariates,
                             const Standardization& standardization) {
  std::vector<int> columns;
  for (const auto& name : covariates) {
    const int idx = data.covariate_index(name);
    if (idx < 0) {
      throw PreconditionError("covariate '" + name +
                              "' is not present in the dataset");
    }
    columns.push_back(idx);
  }
  StrataData d;
  d.standardization = standardization;
  std::map<std::vector<std::uint8_t>, std::size_t> cell_of;
  Moments control;
  Moments treated;
  for (const auto& r : data.records()) {
    std::vector<std::uint8_t> key;
    key.reserve(columns.size());
    for (int c : columns) key.push_back(r.covariates[static_cast<std::size_t>(c)]);
    auto [it, inserted] = cell_of.emplace(key, d.cells.size());
    if (inserted) {
      StrataCell cell;
      cell.x.push_back(1.0);
      for (auto v : key) cell.x.push_back(static_cast<double>(v));
      d.cells.push_back(std::move(cell));
    }
    StrataCell& cell = d.cells[it->second];
    cell.customers += 1;
    const bool bought = r.y > 0;
    if (r.z == 1) {
      if (bought) {
        const double s = standardization.forward(log_outcome(r.y));
        cell.treated_pos.push_back(s);
        treated.add(s);
      } else {
        cell.treated_zero += 1;
      }
    } else {
      if (bought) {
        cell.control_pos += 1;
        control.add(standardization.forward(log_outcome(r.y)));
      } else {
        cell.control_zero += 1;
      }
    }
  }
  d.control_pos_n = control.n;
  d.control_pos_mean = control.mean;
  d.control_pos_ss = control.ss;
  d.treated_pos_n = treated.n;
  d.treated_pos_mean = treated.mean;
  d.treated_pos_sd = treated.sd();
  d.n = static_cast<double>(data.size());
  return d;
}

double strata_loglik(const StrataData& d,
                     std::span<const std::array<double, 3>> log_pi,
                     double mu_a0, double mu_a1, double mu_i1, double sigma,
                     StrataGradient* grad) {
  const double log_sigma = std::log(sigma);
  const double inv_var = 1.0 / (sigma * sigma);
  const double per_purchaser =
      -log_sigma - kHalfLog2Pi - std::log(d.standardization.scale);
  if (grad) {
    grad->dlog_pi.assign(d.cells.size(), {0.0, 0.0, 0.0});
    grad->dmu_a0 = grad->dmu_a1 = grad->dmu_i1 = grad->dsigma = 0;
  }

  // Control purchasers: always-buy, so the normal part pools across cells.
  const double n_cp = d.control_pos_n;
  const double dev0 = d.control_pos_mean - mu_a0;
  const double sq0 = d.control_pos_ss + n_cp * dev0 * dev0;
  double lp = n_cp * per_purchaser - 0.5 * sq0 * inv_var;
  if (grad) {
    grad->dmu_a0 = n_cp * dev0 * inv_var;
    grad->dsigma = -n_cp / sigma + sq0 * inv_var / sigma;
  }

  double sum_a = 0, sum_i = 0, sq_a = 0, sq_i = 0;
  for (std::size_t c = 0; c < d.cells.size(); ++c) {
    const StrataCell& cell = d.cells[c];
    const double lpa = log_pi[c][0];
    const double lpi = log_pi[c][1];
    const double lpn = log_pi[c][2];
    const double l_in = log_sum_exp(lpi, lpn);
    // Empty groups are skipped so a zero probability does not give 0 * -inf.
    if (cell.control_pos > 0) lp += cell.control_pos * lpa;
    if (cell.treated_zero > 0) lp += cell.treated_zero * lpn;
    if (cell.control_zero > 0) lp += cell.control_zero * l_in;

    // Treated purchasers: A/I mixture. With a shared sigma the log odds of
    // I versus A is linear in s.
    double weight_i = 0;
    const double k = static_cast<double>(cell.treated_pos.size());
    const double odds0 = lpi - lpa;
    // A zero strata probability (only reachable through ps_loglik) leaves a
    // single component.
    const bool single = !std::isfinite(odds0);
    for (double s : cell.treated_pos) {
      const double ea = s - mu_a1;
      const double ei = s - mu_i1;
      double sp, w;
      if (single) {
        w = lpa == -INFINITY ? 1.0 : 0.0;
        sp = 0;
        lp += log_sum_exp(lpa - 0.5 * ea * ea * inv_var,
                          lpi - 0.5 * ei * ei * inv_var);
      } else {
        const double dlog = odds0 + 0.5 * (ea * ea - ei * ei) * inv_var;
        softplus(dlog, &sp, &w);
        lp += sp - 0.5 * ea * ea * inv_var;
      }
      if (grad) {
        weight_i += w;
        sum_a += (1.0 - w) * ea;
        sum_i += w * ei;
        sq_a += (1.0 - w) * ea * ea;
        sq_i += w * ei * ei;
      }
    }
    if (k > 0) lp += k * ((single ? 0.0 : lpa) + per_purchaser);

    if (grad) {
      auto& g = grad->dlog_pi[c];
      g[0] += cell.control_pos + (k - weight_i);
      g[1] += weight_i;
      g[2] += cell.treated_zero;
      if (cell.control_zero > 0) {
        const double share_i = std::exp(lpi - l_in);
        g[1] += cell.control_zero * share_i;
        g[2] += cell.control_zero * (1.0 - share_i);
      }
      grad->dsigma -= k / sigma;
    }
  }
  if (grad) {
    grad->dmu_a1 = sum_a * inv_var;
    grad->dmu_i1 = sum_i * inv_var;
    grad->dsigma += (sq_a + sq_i) * inv_var / sigma;
  }
  return lp;
}

// ---------------------------------------------------------------------------
// PsPosterior

PsPosterior::PsPosterior(const ExperimentDataset& data) {
  require_purchasers(data);
  data_ = build_strata_data(data, {}, control_purchaser_standardization(data));
  StrataParams p;
  p.pi = plugin_strata(data);
  const auto& st = data_.standardization;
  const double sd0 =
      data_.control_pos_n > 1 ? std::sqrt(data_.control_pos_ss / (data_.control_pos_n - 1)) : 1.0;
  p.mu_a0 = st.back(data_.control_pos_mean);
  p.sigma = (sd0 > 0 ? sd0 : 1.0) * st.scale;
  p.mu_a1 = st.back(data_.treated_pos_mean);
  p.mu_i1 = st.back(data_.treated_pos_mean - 1.5 * data_.treated_pos_sd);
  init_ = unconstrain(p);
}

double PsPosterior::log_density(std::span<const double> x,
                                std::span<double> grad) const {
  const double eta[3] = {0.0, x[0], x[1]};
  const double lse = log_sum_exp(eta);
  const std::array<double, 3> log_pi = {-lse, x[0] - lse, x[1] - lse};
  const double sigma = std::exp(x[5]);
  StrataGradient g;
  double lp = strata_loglik(data_, std::span(&log_pi, 1), x[2], x[3], x[4],
                            sigma, grad.empty() ? nullptr : &g);
  // Dirichlet(2,2,2) density and the simplex Jacobian are both sum log pi.
  lp += 2.0 * (log_pi[0] + log_pi[1] + log_pi[2]);
  lp -= 0.5 * (x[2] * x[2] + x[3] * x[3] + x[4] * x[4]) / kMeanPriorVar;
  lp += -0.5 * sigma * sigma + x[5];
  if (!grad.empty()) {
    std::array<double, 3> a = g.dlog_pi[0];
    double total = 0;
    for (double& v : a) {
      v += 2.0;
      total += v;
    }
    grad[0] = a[1] - std::exp(log_pi[1]) * total;
    grad[1] = a[2] - std::exp(log_pi[2]) * total;
    grad[2] = g.dmu_a0 - x[2] / kMeanPriorVar;
    grad[3] = g.dmu_a1 - x[3] / kMeanPriorVar;
    grad[4] = g.dmu_i1 - x[4] / kMeanPriorVar;
    grad[5] = (g.dsigma - sigma) * sigma + 1.0;
  }
  return lp;
}

std::vector<std::string> PsPosterior::unconstrained_names() const {
  return {"log(pi_i/pi_a)", "log(pi_n/pi_a)", "mu_a0 (standardized)",
          "mu_a1 (standardized)", "mu_i1 (standardized)",
          "log sigma (standardized)"};
}

std::vector<std::string> PsPosterior::param_names() const {
  return {"pi_a", "pi_i", "pi_n", "mu_a0", "mu_a1", "mu_i1", "sigma"};
}

std::vector<double> PsPosterior::constrain(std::span<const double> x) const {
  const auto simplex = inference::transform_simplex(x.subspan(0, 2)).simplex;
  const auto& st = data_.standardization;
  return {simplex[0],     simplex[1],     simplex[2],
          st.back(x[2]),  st.back(x[3]),  st.back(x[4]),
          std::exp(x[5]) * st.scale};
}

std::vector<std::string> PsPosterior::derived_names() const {
  return {"ate_log", "ate_dollar"};
}

std::vector<double> PsPosterior::derived(std::span<const double> params) const {
  const auto ate = ps_ate(to_params(params));
  return {ate.log_scale, ate.dollar};
}

std::vector<double> PsPosterior::initial_point() const { return init_; }

std::vector<double> PsPosterior::unconstrain(const StrataParams& p) const {
  const auto v = inference::inverse_simplex(p.pi);
  const auto& st = data_.standardization;
  return {v[0],
          v[1],
          st.forward(p.mu_a0),
          st.forward(p.mu_a1),
          st.forward(p.mu_i1),
          std::log(p.sigma / st.scale)};
}

StrataParams PsPosterior::to_params(std::span<const double> c) {
  StrataParams p;
  p.pi = {c[0], c[1], c[2]};
  p.mu_a0 = c[3];
  p.mu_a1 = c[4];
  p.mu_i1 = c[5];
  p.sigma = c[6];
  return p;
}

// ---------------------------------------------------------------------------
// PscPosterior

PscPosterior::PscPosterior(const ExperimentDataset& data,
                           std::vector<std::string> covariates)
    : covariates_(std::move(covariates)) {
  require_purchasers(data);
  data_ = build_strata_data(data, covariates_,
                            control_purchaser_standardization(data));
  const auto pi = plugin_strata(data);
  CovStrataParams p;
  p.beta_i.assign(width(), 0.0);
  p.beta_n.assign(width(), 0.0);
  p.beta_i[0] = std::log(pi[1] / pi[0]);
  p.beta_n[0] = std::log(pi[2] / pi[0]);
  const auto& st = data_.standardization;
  const double sd0 =
      data_.control_pos_n > 1 ? std::sqrt(data_.control_pos_ss / (data_.control_pos_n - 1)) : 1.0;
  p.mu_a0 = st.back(data_.control_pos_mean);
  p.sigma = (sd0 > 0 ? sd0 : 1.0) * st.scale;
  p.mu_a1 = st.back(data_.treated_pos_mean);
  p.mu_i1 = st.back(data_.treated_pos_mean - 1.5 * data_.treated_pos_sd);
  init_ = unconstrain(p);
}

double PscPosterior::log_density(std::span<const double> x,
                                 std::span<double> grad) const {
  const std::size_t w = width();
  const auto beta_i = x.subspan(0, w);
  const auto beta_n = x.subspan(w, w);
  const std::size_t m = 2 * w;
  const double sigma = std::exp(x[m + 3]);

  std::vector<std::array<double, 3>> log_pi(data_.cells.size());
  for (std::size_t c = 0; c < data_.cells.size(); ++c) {
    const auto& xc = data_.cells[c].x;
    double eta_i = 0, eta_n = 0;
    for (std::size_t j = 0; j < w; ++j) {
      eta_i += xc[j] * beta_i[j];
      eta_n += xc[j] * beta_n[j];
    }
    const double eta[3] = {0.0, eta_i, eta_n};
    const double lse = log_sum_exp(eta);
    log_pi[c] = {-lse, eta_i - lse, eta_n - lse};
  }
  StrataGradient g;
  double lp = strata_loglik(data_, log_pi, x[m], x[m + 1], x[m + 2], sigma,
                            grad.empty() ? nullptr : &g);
  for (std::size_t j = 0; j < m; ++j) lp -= 0.5 * x[j] * x[j];
  lp -= 0.5 * (x[m] * x[m] + x[m + 1] * x[m + 1] + x[m + 2] * x[m + 2]) /
        kMeanPriorVar;
  lp += -0.5 * sigma * sigma + x[m + 3];

  if (!grad.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t c = 0; c < data_.cells.size(); ++c) {
      const auto& a = g.dlog_pi[c];
      const double total = a[0] + a[1] + a[2];
      const double d_eta_i = a[1] - std::exp(log_pi[c][1]) * total;
      const double d_eta_n = a[2] - std::exp(log_pi[c][2]) * total;
      const auto& xc = data_.cells[c].x;
      for (std::size_t j = 0; j < w; ++j) {
        grad[j] += xc[j] * d_eta_i;
        grad[w + j] += xc[j] * d_eta_n;
      }
    }
    for (std::size_t j = 0; j < m; ++j) grad[j] -= x[j];
    grad[m] = g.dmu_a0 - x[m] / kMeanPriorVar;
    grad[m + 1] = g.dmu_a1 - x[m + 1] / kMeanPriorVar;
    grad[m + 2] = g.dmu_i1 - x[m + 2] / kMeanPriorVar;
    grad[m + 3] = (g.dsigma - sigma) * sigma + 1.0;
  }
  return lp;
}

std::vector<std::string> PscPosterior::unconstrained_names() const {
  auto names = param_names();
  const std::size_t m = 2 * width();
  names[m] += " (standardized)";
  names[m + 1] += " (standardized)";
  names[m + 2] += " (standardized)";
  names[m + 3] = "log sigma (standardized)";
  return names;
}

std::vector<std::string> PscPosterior::coefficient_names(
    std::span<const std::string> covariates) {
  auto names = covariate_labels("beta_i", covariates);
  for (auto& n : covariate_labels("beta_n", covariates)) names.push_back(n);
  return names;
}

std::vector<std::string> PscPosterior::param_names() const {
  auto names = coefficient_names(covariates_);
  for (const char* n : {"mu_a0", "mu_a1", "mu_i1", "sigma"}) names.push_back(n);
  return names;
}

std::vector<double> PscPosterior::constrain(std::span<const double> x) const {
  const std::size_t m = 2 * width();
  const auto& st = data_.standardization;
  std::vector<double> out(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m));
  out.push_back(st.back(x[m]));
  out.push_back(st.back(x[m + 1]));
  out.push_back(st.back(x[m + 2]));
  out.push_back(std::exp(x[m + 3]) * st.scale);
  return out;
}

std::vector<std::string> PscPosterior::derived_names() const {
  return {"pi_a", "pi_i", "pi_n", "ate_log", "ate_dollar"};
}

std::vector<double> PscPosterior::derived(
    std::span<const double> params) const {
  const CovStrataParams p = to_params(params);
  StrataParams avg;
  avg.pi = {0.0, 0.0, 0.0};
  for (const auto& cell : data_.cells) {
    const auto pi = mnl_strata_probs(p.beta_i, p.beta_n, cell.x);
    for (int k = 0; k < 3; ++k) avg.pi[k] += pi[k] * cell.customers / data_.n;
  }
  avg.mu_a0 = p.mu_a0;
  avg.mu_a1 = p.mu_a1;
  avg.mu_i1 = p.mu_i1;
  avg.sigma = p.sigma;
  const auto ate = ps_ate(avg);
  return {avg.pi[0], avg.pi[1], avg.pi[2], ate.log_scale, ate.dollar};
}

std::vector<double> PscPosterior::initial_point() const { return init_; }

std::vector<double> PscPosterior::unconstrain(const CovStrataParams& p) const {
  if (p.beta_i.size() != width() || p.beta_n.size() != width()) {
    throw PreconditionError("coefficient vectors must have length " +
                            std::to_string(width()));
  }
  const auto& st = data_.standardization;
  std::vector<double> x = p.beta_i;
  x.insert(x.end(), p.beta_n.begin(), p.beta_n.end());
  x.push_back(st.forward(p.mu_a0));
  x.push_back(st.forward(p.mu_a1));
  x.push_back(st.forward(p.mu_i1));
  x.push_back(std::log(p.sigma / st.scale));
  return x;
}

CovStrataParams PscPosterior::to_params(std::span<const double> c) const {
  const std::size_t w = width();
  CovStrataParams p;
  p.beta_i.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(w));
  p.beta_n.assign(c.begin() + static_cast<std::ptrdiff_t>(w),
                  c.begin() + static_cast<std::ptrdiff_t>(2 * w));
  p.mu_a0 = c[2 * w];
  p.mu_a1 = c[2 * w + 1];
  p.mu_i1 = c[2 * w + 2];
  p.sigma = c[2 * w + 3];
  return p;
}

// ---------------------------------------------------------------------------
// ZiPosterior

ZiPosterior::ZiPosterior(const ExperimentDataset& data, bool constrained)
    : constrained_(constrained) {
  require_purchasers(data);
  std_ = control_purchaser_standardization(data);
  Moments c, t;
  for (const auto& r : data.records()) {
    Arm& arm = r.z == 1 ? treated_ : control_;
    if (r.y > 0) {
      (r.z == 1 ? t : c).add(std_.forward(log_outcome(r.y)));
    } else {
      arm.zero += 1;
    }
  }
  control_.pos = c.n;
  control_.mean = c.mean;
  control_.ss = c.ss;
  treated_.pos = t.n;
  treated_.mean = t.mean;
  treated_.ss = t.ss;
}

double ZiPosterior::log_density(std::span<const double> x,
                                std::span<double> grad) const {
  const double q0 = logistic(x[0]);
  const double u = logistic(x[1]);
  // log q0, log(1 - q0) etc. from the logits, stable in both tails.
  const double log_q0 = -log_sum_exp(0.0, -x[0]);
  const double log_1mq0 = -log_sum_exp(0.0, x[0]);
  const double log_u = -log_sum_exp(0.0, -x[1]);
  const double log_1mu = -log_sum_exp(0.0, x[1]);
  double log_q1, log_1mq1, q1;
  if (constrained_) {
    q1 = q0 + (1.0 - q0) * u;
    log_q1 = std::log(q1);
    log_1mq1 = log_1mq0 + log_1mu;
  } else {
    q1 = u;
    log_q1 = log_u;
    log_1mq1 = log_1mu;
  }
  const double alpha = x[2];
  const double beta = x[3];
  const double sigma = std::exp(x[4]);
  const double inv_var = 1.0 / (sigma * sigma);
  const double per_purchaser = -x[4] - kHalfLog2Pi - std::log(std_.scale);

  const double dev0 = control_.mean - alpha;
  const double dev1 = treated_.mean - beta;
  const double sq0 = control_.ss + control_.pos * dev0 * dev0;
  const double sq1 = treated_.ss + treated_.pos * dev1 * dev1;
  double lp = control_.pos * log_q0 + control_.zero * log_1mq0 +
              treated_.pos * log_q1 + treated_.zero * log_1mq1;
  lp += (control_.pos + treated_.pos) * per_purchaser -
        0.5 * (sq0 + sq1) * inv_var;
  // Logistic Jacobians; the constrained map adds log(1 - q0) so the prior is
  // uniform on {q1 >= q0}.
  lp += log_q0 + log_1mq0 + log_u + log_1mu;
  if (constrained_) lp += log_1mq0;
  lp -= 0.5 * (alpha * alpha + beta * beta) / kMeanPriorVar;
  lp += -0.5 * sigma * sigma + x[4];

  if (!grad.empty()) {
    double g0 = control_.pos * (1.0 - q0) - control_.zero * q0 + 1.0 - 2.0 * q0;
    double g1 = 1.0 - 2.0 * u;
    if (constrained_) {
      g0 -= treated_.zero * q0;
      g0 += treated_.pos / q1 * (1.0 - u) * q0 * (1.0 - q0);
      g0 -= q0;
      g1 += treated_.pos / q1 * (1.0 - q0) * u * (1.0 - u);
      g1 -= treated_.zero * u;
    } else {
      g1 += treated_.pos * (1.0 - u) - treated_.zero * u;
    }
    grad[0] = g0;
    grad[1] = g1;
    grad[2] = control_.pos * dev0 * inv_var - alpha / kMeanPriorVar;
    grad[3] = treated_.pos * dev1 * inv_var - beta / kMeanPriorVar;
    const double dsigma =
        -(control_.pos + treated_.pos) / sigma + (sq0 + sq1) * inv_var / sigma;
    grad[4] = (dsigma - sigma) * sigma + 1.0;
  }
  return lp;
}

std::vector<std::string> ZiPosterior::unconstrained_names() const {
  return {"logit q0", constrained_ ? "logit u" : "logit q1",
          "alpha (standardized)", "beta (standardized)",
          "log sigma (standardized)"};
}

std::vector<std::string> ZiPosterior::param_names() const {
  return {"q0", "q1", "alpha", "beta", "sigma"};
}

std::vector<double> ZiPosterior::constrain(std::span<const double> x) const {
  const double q0 = logistic(x[0]);
  const double u = logistic(x[1]);
  const double q1 = constrained_ ? q0 + (1.0 - q0) * u : u;
  return {q0, q1, std_.back(x[2]), std_.back(x[3]),
          std::exp(x[4]) * std_.scale};
}

std::vector<std::string> ZiPosterior::derived_names() const {
  return {"ate_log", "ate_dollar"};
}

std::vector<double> ZiPosterior::derived(std::span<const double> params) const {
  const auto ate = zi_ate(to_params(params));
  return {ate.log_scale, ate.dollar};
}

std::vector<double> ZiPosterior::initial_point() const {
  ZeroInflatedParams p;
  p.constrained = constrained_;
  p.q0 = clamp_prob(control_.pos / (control_.pos + control_.zero));
  p.q1 = clamp_prob(treated_.pos / (treated_.pos + treated_.zero));
  if (constrained_ && p.q1 <= p.q0) p.q1 = p.q0 + 1e-3 * (1.0 - p.q0);
  p.alpha = std_.back(control_.mean);
  p.beta = std_.back(treated_.mean);
  const double n = control_.pos + treated_.pos;
  const double pooled = n > 2 ? std::sqrt((control_.ss + treated_.ss) / (n - 2)) : 1.0;
  p.sigma = (pooled > 0 ? pooled : 1.0) * std_.scale;
  return unconstrain(p);
}

std::vector<double> ZiPosterior::unconstrain(const ZeroInflatedParams& p) const {
  double second;
  if (constrained_) {
    const double u = clamp_prob((p.q1 - p.q0) / (1.0 - p.q0));
    second = inference::inverse_unit(u);
  } else {
    second = inference::inverse_unit(p.q1);
  }
  return {inference::inverse_unit(p.q0), second, std_.forward(p.alpha),
          std_.forward(p.beta), std::log(p.sigma / std_.scale)};
}

ZeroInflatedParams ZiPosterior::to_params(std::span<const double> c) const {
  ZeroInflatedParams p;
  p.q0 = c[0];
  p.q1 = c[1];
  p.alpha = c[2];
  p.beta = c[3];
  p.sigma = c[4];
  p.constrained = constrained_;
  return p;
}

// ---------------------------------------------------------------------------
// DimPosterior

DimPosterior::DimPosterior(const ExperimentDataset& data) {
  data.require_both_arms("the difference-in-means model");
  Moments c, t, all;
  for (const auto& r : data.records()) {
    const double l = log_outcome(r.y);
    (r.z == 1 ? t : c).add(l);
    all.add(l);
  }
  std_.center = c.mean;
  std_.scale = all.sd() > 0 ? all.sd() : 1.0;
  auto fill = [&](const Moments& m, Arm& arm) {
    arm.n = m.n;
    arm.mean = std_.forward(m.mean);
    arm.ss = m.ss / (std_.scale * std_.scale);
  };
  fill(c, control_);
  fill(t, treated_);
}

double DimPosterior::log_density(std::span<const double> x,
                                 std::span<double> grad) const {
  const double alpha = x[0];
  const double tau = x[1];
  const double sigma = std::exp(x[2]);
  const double inv_var = 1.0 / (sigma * sigma);
  const double n = control_.n + treated_.n;
  const double dev0 = control_.mean - alpha;
  const double dev1 = treated_.mean - alpha - tau;
  const double sq = control_.ss + control_.n * dev0 * dev0 + treated_.ss +
                    treated_.n * dev1 * dev1;
  double lp = n * (-x[2] - kHalfLog2Pi - std::log(std_.scale)) -
              0.5 * sq * inv_var;
  lp -= 0.5 * (alpha * alpha + tau * tau) / kMeanPriorVar;
  lp += -0.5 * sigma * sigma + x[2];
  if (!grad.empty()) {
    grad[0] = (control_.n * dev0 + treated_.n * dev1) * inv_var -
              alpha / kMeanPriorVar;
    grad[1] = treated_.n * dev1 * inv_var - tau / kMeanPriorVar;
    const double dsigma = -n / sigma + sq * inv_var / sigma;
    grad[2] = (dsigma - sigma) * sigma + 1.0;
  }
  return lp;
}

std::vector<std::string> DimPosterior::unconstrained_names() const {
  return {"alpha (standardized)", "tau_d (standardized)",
          "log sigma (standardized)"};
}

std::vector<std::string> DimPosterior::param_names() const {
  return {"alpha", "tau_d", "sigma"};
}

std::vector<double> DimPosterior::constrain(std::span<const double> x) const {
  return {std_.back(x[0]), x[1] * std_.scale, std::exp(x[2]) * std_.scale};
}

std::vector<std::string> DimPosterior::derived_names() const {
  return {"ate_log"};
}

std::vector<double> DimPosterior::derived(std::span<const double> params) const {
  return {params[1]};
}

std::vector<double> DimPosterior::initial_point() const {
  const double n = control_.n + treated_.n;
  const double pooled = n > 2 ? std::sqrt((control_.ss + treated_.ss) / (n - 2)) : 1.0;
  return {control_.mean, treated_.mean - control_.mean,
          std::log(pooled > 0 ? pooled : 1.0)};
}

// ---------------------------------------------------------------------------

PsAteDraws ps_ate_draws(const inference::PosteriorDraws& draws) {
  const std::size_t cols[6] = {draws.require("pi_a"),  draws.require("pi_i"),
                               draws.require("mu_a0"), draws.require("mu_a1"),
                               draws.require("mu_i1"), draws.require("sigma")};
  PsAteDraws out;
  for (std::size_t c = 0; c < draws.chains(); ++c) {
    for (std::size_t i = 0; i < draws.iters(); ++i) {
      StrataParams p;
      p.pi = {draws.at(c, i, cols[0]), draws.at(c, i, cols[1]),
              1.0 - draws.at(c, i, cols[0]) - draws.at(c, i, cols[1])};
      p.mu_a0 = draws.at(c, i, cols[2]);
      p.mu_a1 = draws.at(c, i, cols[3]);
      p.mu_i1 = draws.at(c, i, cols[4]);
      p.sigma = draws.at(c, i, cols[5]);
      const auto ate = ps_ate(p);
      out.ate_log.push_back(ate.log_scale);
      out.ate_dollar.push_back(ate.dollar);
    }
  }
  return out;
}

}  // namespace stratlift::models
