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
#include "stratlift/simulation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/QR>
#include <boost/math/distributions/normal.hpp>

#include "csv.h"
#include "stratlift/covariates.h"
#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/models/posteriors.h"
#include "stratlift/parallel.h"

namespace stratlift::sim {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double batch_se(const std::vector<double>& batch_values) {
  if (batch_values.size() < 2) return std::nan("");
  return std::sqrt(var_of(batch_values) /
                   static_cast<double>(batch_values.size()));
}

std::string customer_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "c%07zu", i + 1);
  return buf;
}

// Truth means/sigma whichever parameterization is active.
struct Cells {
  double mu_a0, mu_a1, mu_i1, sigma;
};

Cells cells_of(const GeneratorSpec& spec) {
  if (spec.cov_truth) {
    const auto& c = *spec.cov_truth;
    return {c.mu_a0, c.mu_a1, c.mu_i1, c.sigma};
  }
  return {spec.truth.mu_a0, spec.truth.mu_a1, spec.truth.mu_i1,
          spec.truth.sigma};
}

}  // namespace

void GeneratorSpec::validate() const {
  if (n < 2) throw PreconditionError("generator needs n >= 2");
  if (!(treat_frac > 0 && treat_frac < 1)) {
    throw PreconditionError("treat_frac must lie in (0, 1)");
  }
  if (design.names.size() != design.probs.size()) {
    throw PreconditionError("covariate design names and probs differ in length");
  }
  for (double p : design.probs) {
    if (!(p >= 0 && p <= 1)) {
      throw PreconditionError("covariate probabilities must lie in [0, 1]");
    }
  }
  if (cov_truth) {
    const std::size_t w = design.names.size() + 1;
    if (cov_truth->beta_i.size() != w || cov_truth->beta_n.size() != w) {
      throw PreconditionError("coefficient vectors must have length " +
                              std::to_string(w));
    }
    if (!(cov_truth->sigma > 0)) throw PreconditionError("sigma must be > 0");
  } else {
    truth.validate();
  }
}

Generated generate(const GeneratorSpec& spec) {
  spec.validate();
  const Cells cells = cells_of(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto positive_log = [&](double mu) {
    double l;
    do {
      l = mu + cells.sigma * normal(rng);
    } while (!(l > 0));
    return l;
  };

  const std::size_t p = spec.design.names.size();
  std::vector<double> x(p + 1, 1.0);
  Generated out;
  out.strata.reserve(spec.n);
  std::vector<ExperimentRecord> records;
  records.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    ExperimentRecord r;
    r.customer_id = customer_id(i);
    r.covariates.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
      r.covariates[j] = unif(rng) < spec.design.probs[j] ? 1 : 0;
      x[j + 1] = r.covariates[j];
    }
    const std::array<double, 3> pi =
        spec.cov_truth ? models::mnl_strata_probs(spec.cov_truth->beta_i,
                                                  spec.cov_truth->beta_n, x)
                       : spec.truth.pi;
    const double u = unif(rng);
    const Stratum s = u < pi[0]           ? Stratum::kAlways
                      : u < pi[0] + pi[1] ? Stratum::kInfluenced
                                          : Stratum::kNever;
    r.z = unif(rng) < spec.treat_frac ? 1 : 0;
    double l = 0;
    if (s == Stratum::kAlways) {
      l = positive_log(r.z == 1 ? cells.mu_a1 : cells.mu_a0);
    } else if (s == Stratum::kInfluenced && r.z == 1) {
      l = positive_log(cells.mu_i1);
    }
    r.y = std::expm1(l);
    records.push_back(std::move(r));
    out.strata.push_back(s);
  }
  out.data = ExperimentDataset::create(std::move(records), spec.design.names);
  return out;
}

std::array<double, 3> true_strata_shares(const GeneratorSpec& spec) {
  if (!spec.cov_truth) return spec.truth.pi;
  const std::size_t p = spec.design.names.size();
  if (p > 20) throw PreconditionError("too many covariates to enumerate");
  std::array<double, 3> out = {0, 0, 0};
  std::vector<double> x(p + 1, 1.0);
  for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
    double weight = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      const bool on = (mask >> j) & 1;
      x[j + 1] = on ? 1.0 : 0.0;
      weight *= on ? spec.design.probs[j] : 1.0 - spec.design.probs[j];
    }
    const auto pi =
        models::mnl_strata_probs(spec.cov_truth->beta_i, spec.cov_truth->beta_n, x);
    for (int k = 0; k < 3; ++k) out[k] += weight * pi[k];
  }
  return out;
}

models::AteValue true_ate(const GeneratorSpec& spec) {
  const Cells c = cells_of(spec);
  models::StrataParams p;
  p.pi = true_strata_shares(spec);
  p.mu_a0 = c.mu_a0;
  p.mu_a1 = c.mu_a1;
  p.mu_i1 = c.mu_i1;
  p.sigma = c.sigma;
  return models::ps_ate(p);
}

// ---------------------------------------------------------------------------
// Oracle estimators

namespace {

struct CellMeans {
  double sum[3][2] = {};
  double count[3][2] = {};
};

CellMeans cell_means(const ExperimentDataset& data,
                     std::span<const Stratum> strata) {
  if (strata.size() != data.size()) {
    throw PreconditionError("strata labels and dataset differ in length");
  }
  data.require_both_arms("oracle estimation");
  CellMeans c;
  const auto& recs = data.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto s = static_cast<int>(strata[i]);
    c.sum[s][recs[i].z] += log_outcome(recs[i].y);
    c.count[s][recs[i].z] += 1;
  }
  return c;
}

}  // namespace

double plugin_tau_ps(const ExperimentDataset& data,
                     std::span<const Stratum> strata) {
  const CellMeans c = cell_means(data, strata);
  const double n = static_cast<double>(data.size());
  double tau = 0;
  for (int s = 0; s < 3; ++s) {
    const double total = c.count[s][0] + c.count[s][1];
    if (total == 0) continue;
    if (c.count[s][0] == 0 || c.count[s][1] == 0) return std::nan("");
    tau += total / n *
           (c.sum[s][1] / c.count[s][1] - c.sum[s][0] / c.count[s][0]);
  }
  return tau;
}

OracleFit oracle_estimates(const ExperimentDataset& data,
                           std::span<const Stratum> strata) {
  const CellMeans c = cell_means(data, strata);
  OracleFit fit;
  const double n = static_cast<double>(data.size());
  const double y1 = c.sum[0][1] + c.sum[1][1] + c.sum[2][1];
  const double y0 = c.sum[0][0] + c.sum[1][0] + c.sum[2][0];
  fit.tau_d = y1 / static_cast<double>(data.n1()) -
              y0 / static_cast<double>(data.n0());

  static const char* kLabel[3] = {"A", "I", "N"};
  std::vector<int> present;
  for (int s = 0; s < 3; ++s) {
    fit.strata_share[s] = (c.count[s][0] + c.count[s][1]) / n;
    if (fit.strata_share[s] > 0) {
      present.push_back(s);
      if (c.count[s][0] == 0 || c.count[s][1] == 0) fit.singular = true;
    }
  }
  std::vector<int> dummies(present.begin(), present.end() - 1);
  const std::size_t k = dummies.size();
  const std::size_t p = 2 + 2 * k;
  fit.coef_names = {"intercept", "z"};
  for (int s : dummies) fit.coef_names.push_back(std::string("x_") + kLabel[s]);
  for (int s : dummies) {
    fit.coef_names.push_back(std::string("z:(x_") + kLabel[s] + " - mean)");
  }
  if (fit.singular) {
    fit.tau_ps = std::nan("");
    fit.coefficients.assign(p, std::nan(""));
    return fit;
  }

  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                              static_cast<Eigen::Index>(p));
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  Eigen::VectorXd row(static_cast<Eigen::Index>(p));
  const auto& recs = data.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const double z = recs[i].z;
    const auto s = static_cast<int>(strata[i]);
    row[0] = 1.0;
    row[1] = z;
    for (std::size_t j = 0; j < k; ++j) {
      const double d = s == dummies[j] ? 1.0 : 0.0;
      row[static_cast<Eigen::Index>(2 + j)] = d;
      row[static_cast<Eigen::Index>(2 + k + j)] =
          z * (d - fit.strata_share[dummies[j]]);
    }
    xtx.selfadjointView<Eigen::Lower>().rankUpdate(row);
    xty += row * log_outcome(recs[i].y);
  }
  xtx = xtx.selfadjointView<Eigen::Lower>();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtx);
  qr.setThreshold(1e-12);
  if (qr.rank() < static_cast<Eigen::Index>(p)) {
    fit.singular = true;
    fit.tau_ps = std::nan("");
    fit.coefficients.assign(p, std::nan(""));
    return fit;
  }
  const Eigen::VectorXd beta = xtx.ldlt().solve(xty);
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.tau_ps = beta[1];
  return fit;
}

// ---------------------------------------------------------------------------
// Replication harnesses

std::vector<ReplicationRecord> run_replications(const models::StrataParams& truth,
                                                std::size_t n, double frac,
                                                std::size_t reps,
                                                std::uint64_t seed,
                                                std::size_t threads) {
  std::vector<ReplicationRecord> out(reps);
  parallel_for(
      reps,
      [&](std::size_t r) {
        GeneratorSpec spec;
        spec.truth = truth;
        spec.n = n;
        spec.treat_frac = frac;
        spec.seed = mix_seed(seed, r);
        const Generated g = generate(spec);
        ReplicationRecord rec;
        if (g.data.n1() == 0 || g.data.n0() == 0) {
          rec.singular = true;
          out[r] = rec;
          return;
        }
        const OracleFit fit = oracle_estimates(g.data, g.strata);
        rec.tau_d = fit.tau_d;
        rec.tau_ps = fit.tau_ps;
        rec.singular = fit.singular;
        try {
          const DiagnosticsReport d = diagnose(g.data);
          rec.delta_min = d.delta_min;
          rec.var_tau_d_hat = d.var_tau_d;
        } catch (const PreconditionError&) {
          // No treated purchasers: the bound is undefined; count it as 0.
          rec.delta_min = 0;
        }
        out[r] = rec;
      },
      threads);
  return out;
}

void HarnessConfig::validate() const {
  if (reps < 100) throw PreconditionError("harness needs reps >= 100");
  if (batches < 2 || batches > reps) {
    throw PreconditionError("batches must lie in [2, reps]");
  }
  if (n_grid.empty() || frac_grid.empty()) {
    throw PreconditionError("harness grids must be non-empty");
  }
  truth.validate();
}

namespace {

struct CellRun {
  std::vector<ReplicationRecord> used;
  std::size_t singular = 0;
  ReplicationRecord pilot;
};

CellRun run_cell(const HarnessConfig& config, std::size_t cell_index,
                 std::size_t n, double frac) {
  const auto records =
      run_replications(config.truth, n, frac, config.reps,
                       mix_seed(config.seed, cell_index), config.threads);
  CellRun run;
  run.pilot = records.front();
  for (const auto& r : records) {
    if (r.singular) {
      ++run.singular;
    } else {
      run.used.push_back(r);
    }
  }
  return run;
}

// Consecutive, equally sized batches (the remainder joins the last one).
std::vector<std::span<const ReplicationRecord>> split_batches(
    const std::vector<ReplicationRecord>& v, std::size_t batches) {
  std::vector<std::span<const ReplicationRecord>> out;
  const std::size_t size = v.size() / batches;
  if (size < 2) return out;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * size;
    const std::size_t end = b + 1 == batches ? v.size() : begin + size;
    out.emplace_back(v.data() + begin, end - begin);
  }
  return out;
}

struct Columns {
  std::vector<double> d, ps, dmin, lb;
};

Columns columns(std::span<const ReplicationRecord> recs) {
  Columns c;
  for (const auto& r : recs) {
    c.d.push_back(r.tau_d);
    c.ps.push_back(r.tau_ps);
    c.dmin.push_back(r.delta_min);
    c.lb.push_back(r.var_tau_d_hat > 0 ? r.delta_min / r.var_tau_d_hat : 0.0);
  }
  return c;
}

}  // namespace

std::vector<Fig2Cell> replicate_fig2(const HarnessConfig& config) {
  config.validate();
  const double ate = models::ps_ate(config.truth).log_scale;
  std::vector<Fig2Cell> out;
  std::size_t cell_index = 0;
  for (std::size_t n : config.n_grid) {
    for (double frac : config.frac_grid) {
      const CellRun run = run_cell(config, cell_index++, n, frac);
      Fig2Cell cell;
      cell.n = n;
      cell.frac = frac;
      cell.true_ate = ate;
      cell.used = run.used.size();
      cell.singular = run.singular;
      cell.prop1_delta =
          prop1_delta(config.truth.pi[0], config.truth.pi[1],
                      config.truth.mu_a0, config.truth.mu_a1,
                      config.truth.mu_i1, static_cast<double>(n));
      if (run.used.size() < 2) {
        out.push_back(cell);
        continue;
      }
      const Columns all = columns(run.used);
      cell.d.mean = mean_of(all.d);
      cell.d.var = var_of(all.d);
      cell.ps.mean = mean_of(all.ps);
      cell.ps.var = var_of(all.ps);
      cell.gap = cell.d.var - cell.ps.var;
      std::vector<double> md, vd, mp, vp, gap;
      for (auto batch : split_batches(run.used, config.batches)) {
        const Columns b = columns(batch);
        md.push_back(mean_of(b.d));
        vd.push_back(var_of(b.d));
        mp.push_back(mean_of(b.ps));
        vp.push_back(var_of(b.ps));
        gap.push_back(vd.back() - vp.back());
      }
      cell.d.mean_se = batch_se(md);
      cell.d.var_se = batch_se(vd);
      cell.ps.mean_se = batch_se(mp);
      cell.ps.var_se = batch_se(vp);
      cell.gap_se = batch_se(gap);
      out.push_back(cell);
    }
  }
  return out;
}

std::vector<Fig3Cell> replicate_fig3(const HarnessConfig& config) {
  config.validate();
  std::vector<Fig3Cell> out;
  std::size_t cell_index = 0;
  for (std::size_t n : config.n_grid) {
    for (double frac : config.frac_grid) {
      const CellRun run = run_cell(config, cell_index++, n, frac);
      Fig3Cell cell;
      cell.n = n;
      cell.frac = frac;
      cell.used = run.used.size();
      cell.singular = run.singular;
      cell.bound_pilot = run.pilot.var_tau_d_hat > 0
                             ? run.pilot.delta_min / run.pilot.var_tau_d_hat
                             : 0.0;
      if (run.used.size() < 2) {
        out.push_back(cell);
        continue;
      }
      const Columns all = columns(run.used);
      const double vd = var_of(all.d);
      cell.realized_reduction = vd > 0 ? (vd - var_of(all.ps)) / vd : 0.0;
      cell.bound_mean = mean_of(all.lb);
      std::vector<double> reductions;
      std::size_t holds = 0;
      for (auto batch : split_batches(run.used, config.batches)) {
        const Columns b = columns(batch);
        const double bvd = var_of(b.d);
        const double red = bvd > 0 ? (bvd - var_of(b.ps)) / bvd : 0.0;
        reductions.push_back(red);
        if (cell.bound_pilot <= red) ++holds;
      }
      cell.reduction_se = batch_se(reductions);
      cell.bound_batch_share =
          reductions.empty() ? 0.0
                             : static_cast<double>(holds) /
                                   static_cast<double>(reductions.size());
      out.push_back(cell);
    }
  }
  return out;
}

BatchBoundCheck delta_min_batches(std::span<const ReplicationRecord> records,
                                  std::size_t batch_size) {
  if (batch_size < 2) throw PreconditionError("batch_size must be >= 2");
  std::vector<ReplicationRecord> used;
  for (const auto& r : records) {
    if (!r.singular) used.push_back(r);
  }
  BatchBoundCheck out;
  for (std::size_t begin = 0; begin + batch_size <= used.size();
       begin += batch_size) {
    const Columns b =
        columns(std::span<const ReplicationRecord>(used.data() + begin, batch_size));
    const double gap = var_of(b.d) - var_of(b.ps);
    const double dmin = mean_of(b.dmin);
    out.realized_gap.push_back(gap);
    out.mean_delta_min.push_back(dmin);
    ++out.batches;
    if (dmin <= gap) ++out.holds;
  }
  out.share = out.batches > 0 ? static_cast<double>(out.holds) /
                                    static_cast<double>(out.batches)
                              : 0.0;
  return out;
}

void write_fig2_csv(const std::vector<Fig2Cell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "n,frac,estimator,mean,variance,mean_se,variance_se,true_ate,"
         "prop1_delta,reps,singular\n";
  for (const auto& c : cells) {
    for (int e = 0; e < 2; ++e) {
      const EstimatorStats& s = e == 0 ? c.d : c.ps;
      out << c.n << ',' << csv::format_double(c.frac) << ','
          << (e == 0 ? "diff_in_means" : "post_stratified") << ','
          << csv::format_double(s.mean) << ',' << csv::format_double(s.var)
          << ',' << csv::format_double(s.mean_se) << ','
          << csv::format_double(s.var_se) << ','
          << csv::format_double(c.true_ate) << ','
          << csv::format_double(c.prop1_delta) << ',' << c.used << ','
          << c.singular << '\n';
    }
  }
}

void write_fig3_csv(const std::vector<Fig3Cell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "n,frac,realized_reduction,reduction_se,bound_pilot,bound_mean,"
         "bound_batch_share,reps,singular\n";
  for (const auto& c : cells) {
    out << c.n << ',' << csv::format_double(c.frac) << ','
        << csv::format_double(c.realized_reduction) << ','
        << csv::format_double(c.reduction_se) << ','
        << csv::format_double(c.bound_pilot) << ','
        << csv::format_double(c.bound_mean) << ','
        << csv::format_double(c.bound_batch_share) << ',' << c.used << ','
        << c.singular << '\n';
  }
}

// ---------------------------------------------------------------------------
// Recovery

const RecoveryRow& RecoveryReport::row(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no recovery row '" + std::string(name) + "'");
}

RecoveryReport recover(const GeneratorSpec& spec, models::ModelKind model,
                       const inference::SamplerConfig& sampler) {
  const Generated g = generate(spec);
  return recover_on(spec, g.data, model, sampler);
}

RecoveryReport recover_on(const GeneratorSpec& spec, const ExperimentDataset& data,
                          models::ModelKind model,
                          const inference::SamplerConfig& sampler) {
  using models::ModelKind;
  if (model == ModelKind::kStrataCovariates && !spec.cov_truth) {
    throw PreconditionError("ps-cov recovery needs a covariate truth");
  }
  RecoveryReport rep;
  rep.model = model;
  rep.n = data.size();
  rep.seed = spec.seed;
  rep.fit = models::fit_model(model, data, sampler,
                              model == ModelKind::kStrataCovariates
                                  ? spec.design.names
                                  : std::vector<std::string>{});

  std::vector<std::pair<std::string, double>> truths;
  const Cells c = cells_of(spec);
  if (model == ModelKind::kStrata) {
    const auto pi = true_strata_shares(spec);
    truths = {{"pi_a", pi[0]},       {"pi_i", pi[1]},       {"pi_n", pi[2]},
              {"mu_a0", c.mu_a0},    {"mu_a1", c.mu_a1},    {"mu_i1", c.mu_i1},
              {"sigma", c.sigma}};
  } else if (model == ModelKind::kStrataCovariates) {
    const auto& t = *spec.cov_truth;
    const auto names = models::PscPosterior::coefficient_names(spec.design.names);
    for (std::size_t j = 0; j < t.beta_i.size(); ++j) {
      truths.emplace_back(names[j], t.beta_i[j]);
    }
    for (std::size_t j = 0; j < t.beta_n.size(); ++j) {
      truths.emplace_back(names[t.beta_i.size() + j], t.beta_n[j]);
    }
    truths.insert(truths.end(), {{"mu_a0", c.mu_a0},
                                 {"mu_a1", c.mu_a1},
                                 {"mu_i1", c.mu_i1},
                                 {"sigma", c.sigma}});
  }
  auto add_row = [&](const std::string& name, double truth, bool is_param) {
    const auto& s = rep.fit.summary(name);
    RecoveryRow row;
    row.name = name;
    row.truth = truth;
    row.mean = s.mean;
    row.sd = s.sd;
    row.q025 = s.q025;
    row.q975 = s.q975;
    row.covered = s.q025 <= truth && truth <= s.q975;
    row.is_param = is_param;
    rep.rows.push_back(row);
  };
  for (const auto& [name, value] : truths) add_row(name, value, true);
  const auto ate = true_ate(spec);
  add_row("ate_log", ate.log_scale, false);
  if (rep.fit.draws.has("ate_dollar")) add_row("ate_dollar", ate.dollar, false);

  rep.all_params_covered = true;
  for (const auto& r : rep.rows) {
    if (r.is_param && !r.covered) rep.all_params_covered = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Responsiveness / recency ordering

namespace {

struct Welford {
  double n = 0, mean = 0, m2 = 0;
  void add(double v) {
    n += 1;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double se() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : std::nan(""); }
};

double pearson(double n, double sx, double sy, double sxy) {
  const double mx = sx / n, my = sy / n;
  const double cov = sxy / n - mx * my;
  const double vx = mx * (1 - mx), vy = my * (1 - my);  // binary variables
  return vx > 0 && vy > 0 ? cov / std::sqrt(vx * vy) : std::nan("");
}

Prop2Arm simulate_customer(const Prop2Customer& cust, const Prop2Config& cfg,
                           std::uint64_t stream) {
  const boost::math::normal std_normal;
  const double cut_a = boost::math::quantile(std_normal, cust.pi_a);
  const double cut_ai = boost::math::quantile(std_normal, cust.pi_a + cust.pi_i);
  const double cut_z = boost::math::quantile(std_normal, 1.0 - cfg.p_exposure);
  const double mix = std::sqrt(1.0 - cfg.rho * cfg.rho);
  std::mt19937_64 rng(mix_seed(cfg.seed, stream));
  std::normal_distribution<double> normal(0.0, 1.0);

  Prop2Arm arm;
  Welford q, r;
  double n = 0, sa = 0, si = 0, sz = 0, saz = 0, siz = 0;
  std::vector<PeriodObservation> history(static_cast<std::size_t>(cfg.T));
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    for (auto& obs : history) {
      const double u = normal(rng);
      const double e = normal(rng);
      const int a = u < cut_a ? 1 : 0;
      const int i = !a && u < cut_ai ? 1 : 0;
      obs.z = -cfg.rho * u + mix * e > cut_z ? 1 : 0;
      obs.y = a || (i && obs.z) ? 1 : 0;
      n += 1;
      sa += a;
      si += i;
      sz += obs.z;
      saz += a * obs.z;
      siz += i * obs.z;
    }
    if (const auto v = covariates::responsiveness(history)) {
      q.add(*v);
    } else {
      ++arm.undefined_q;
    }
    if (const auto v = covariates::recency(history, cfg.T)) {
      r.add(*v);
    } else {
      ++arm.no_purchase;
    }
  }
  arm.mean_q = q.mean;
  arm.se_q = q.se();
  arm.n_q = static_cast<std::size_t>(q.n);
  arm.mean_r = r.mean;
  arm.se_r = r.se();
  arm.n_r = static_cast<std::size_t>(r.n);
  arm.corr_a = pearson(n, sa, sz, saz);
  arm.corr_i = pearson(n, si, sz, siz);
  return arm;
}

}  // namespace

Prop2Result prop2_monte_carlo(const Prop2Config& config) {
  if (config.T < 2) throw PreconditionError("T must be >= 2");
  if (!(config.rho >= 0 && config.rho < 1)) {
    throw PreconditionError("rho must lie in [0, 1)");
  }
  if (!(config.p_exposure > 0 && config.p_exposure < 1)) {
    throw PreconditionError("p_exposure must lie in (0, 1)");
  }
  for (const auto& c : {config.first, config.second}) {
    if (!(c.pi_a > 0 && c.pi_i >= 0 && c.pi_a + c.pi_i < 1)) {
      throw PreconditionError("customer strata probabilities are invalid");
    }
  }
  if (config.reps < 2) throw PreconditionError("reps must be >= 2");
  Prop2Result out;
  out.first = simulate_customer(config.first, config, 0);
  out.second = simulate_customer(config.second, config, 1);
  out.q_diff = out.first.mean_q - out.second.mean_q;
  out.q_diff_se = std::hypot(out.first.se_q, out.second.se_q);
  out.r_diff = out.first.mean_r - out.second.mean_r;
  out.r_diff_se = std::hypot(out.first.se_r, out.second.se_r);
  return out;
}

}  // namespace stratlift::sim
