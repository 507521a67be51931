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
#include "stratlift/report.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csv.h"
#include "stratlift/errors.h"

namespace stratlift::report {

namespace {

// JSON has no NaN or infinity; both become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json summary_json(const inference::DrawSummary& s) {
  Json j;
  j["name"] = s.name;
  j["mean"] = num(s.mean);
  j["sd"] = num(s.sd);
  j["q025"] = num(s.q025);
  j["q975"] = num(s.q975);
  return j;
}

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

Json to_json(const DiagnosticsReport& r) {
  Json j;
  j["n"] = r.n;
  j["pi_a"] = num(r.proportions.pi_a);
  j["pi_i"] = num(r.proportions.pi_i);
  j["pi_n"] = num(r.proportions.pi_n);
  j["raw_pi_i"] = num(r.proportions.raw_pi_i);
  j["mu_a0_hat"] = num(r.mu_a0_hat);
  j["mu_a1_min"] = num(r.mu_a1_min);
  j["mu_i1_max"] = num(r.mu_i1_max);
  j["benefit_condition"] = r.benefit_condition;
  j["delta_min"] = num(r.delta_min);
  j["var_tau_d"] = num(r.var_tau_d);
  j["predicted_var_reduction_lb"] = num(r.predicted_var_reduction_lb);
  return j;
}

Json to_json(const SampleSizeResult& r) {
  Json j;
  j["feasible"] = r.feasible;
  j["n0"] = r.n0;
  j["effect_log"] = num(r.effect_log);
  j["achieved_power"] = num(r.achieved_power);
  return j;
}

Json to_json(const PowerSpec& s) {
  Json j;
  j["total_n"] = s.total_n;
  j["cost_per_unit"] = s.cost_per_unit;
  j["roi_null"] = s.roi_null;
  j["roi_alt"] = s.roi_alt;
  j["power"] = s.power;
  j["alpha"] = s.alpha;
  j["mean_sales"] = s.mean_sales;
  j["outcome_sd"] = s.outcome_sd;
  j["design"] = s.design == AllocationDesign::kFixedTotal ? "fixed-total"
                                                          : "fixed-treated";
  return j;
}

Json to_json(const inference::SamplerConfig& c) {
  Json j;
  j["chains"] = c.chains;
  j["warmup"] = c.warmup_iters;
  j["samples"] = c.sampling_iters;
  j["seed"] = c.seed;
  j["target_accept"] = c.target_accept;
  j["leapfrog_steps"] = c.leapfrog_steps;
  j["integration_time"] = c.integration_time;
  j["max_leapfrog"] = c.max_leapfrog;
  j["init_jitter"] = c.init_jitter;
  j["dense_metric"] = c.dense_metric;
  return j;
}

Json to_json(const models::FitResult& fit) {
  Json j;
  j["model"] = std::string(models::model_name(fit.kind));
  j["covariates"] = fit.covariates;
  j["ate_log"] = summary_json(fit.ate_log);
  j["ate_dollar"] =
      fit.ate_dollar ? summary_json(*fit.ate_dollar) : Json(nullptr);
  Json params = Json::array();
  for (const auto& s : fit.summaries) params.push_back(summary_json(s));
  j["summaries"] = params;
  Json conv = Json::array();
  for (const auto& c : fit.convergence) {
    conv.push_back({{"name", c.name},
                    {"split_rhat", num(c.split_rhat)},
                    {"ess_bulk", num(c.ess_bulk)}});
  }
  j["convergence"] = conv;
  Json chains = Json::array();
  for (const auto& c : fit.draws.chain_stats) {
    chains.push_back({{"step_size", c.step_size},
                      {"leapfrog_steps", c.leapfrog_steps},
                      {"mean_accept", c.mean_accept},
                      {"divergences", c.divergences}});
  }
  j["chains"] = chains;
  j["warnings"] = fit.warnings;
  return j;
}

Json to_json(const models::StrataParams& p) {
  return {{"pi_a", p.pi[0]},   {"pi_i", p.pi[1]},   {"pi_n", p.pi[2]},
          {"mu_a0", p.mu_a0},  {"mu_a1", p.mu_a1},  {"mu_i1", p.mu_i1},
          {"sigma", p.sigma}};
}

Json to_json(const sim::RecoveryReport& r) {
  Json j;
  j["model"] = std::string(models::model_name(r.model));
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["all_params_covered"] = r.all_params_covered;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"name", row.name},
                    {"truth", num(row.truth)},
                    {"mean", num(row.mean)},
                    {"sd", num(row.sd)},
                    {"q025", num(row.q025)},
                    {"q975", num(row.q975)},
                    {"covered", row.covered},
                    {"parameter", row.is_param}});
  }
  j["rows"] = rows;
  j["fit"] = to_json(r.fit);
  return j;
}

Json to_json(const std::vector<sim::Fig2Cell>& cells) {
  Json out = Json::array();
  for (const auto& c : cells) {
    const double z = c.gap_se > 0 ? (c.gap - c.prop1_delta) / c.gap_se : NAN;
    out.push_back({{"n", c.n},
                   {"frac", c.frac},
                   {"true_ate", num(c.true_ate)},
                   {"mean_d", num(c.d.mean)},
                   {"var_d", num(c.d.var)},
                   {"mean_ps", num(c.ps.mean)},
                   {"var_ps", num(c.ps.var)},
                   {"gap", num(c.gap)},
                   {"gap_se", num(c.gap_se)},
                   {"prop1_delta", num(c.prop1_delta)},
                   {"prop1_within_3se", std::isfinite(z) && std::abs(z) < 3},
                   {"reps", c.used},
                   {"singular", c.singular}});
  }
  return out;
}

Json to_json(const std::vector<sim::Fig3Cell>& cells) {
  Json out = Json::array();
  for (const auto& c : cells) {
    out.push_back({{"n", c.n},
                   {"frac", c.frac},
                   {"realized_reduction", num(c.realized_reduction)},
                   {"reduction_se", num(c.reduction_se)},
                   {"bound_pilot", num(c.bound_pilot)},
                   {"bound_mean", num(c.bound_mean)},
                   {"bound_batch_share", num(c.bound_batch_share)},
                   {"bound_holds", c.bound_batch_share >= 0.95},
                   {"reps", c.used},
                   {"singular", c.singular}});
  }
  return out;
}

Json to_json(const sim::Prop2Result& r) {
  auto arm = [](const sim::Prop2Arm& a) {
    return Json{{"mean_q", num(a.mean_q)},   {"se_q", num(a.se_q)},
                {"n_q", a.n_q},              {"undefined_q", a.undefined_q},
                {"mean_r", num(a.mean_r)},   {"se_r", num(a.se_r)},
                {"n_r", a.n_r},              {"no_purchase", a.no_purchase},
                {"corr_exposure_a", num(a.corr_a)},
                {"corr_exposure_i", num(a.corr_i)}};
  };
  return {{"first", arm(r.first)},
          {"second", arm(r.second)},
          {"q_diff", num(r.q_diff)},
          {"q_diff_se", num(r.q_diff_se)},
          {"r_diff", num(r.r_diff)},
          {"r_diff_se", num(r.r_diff_se)}};
}

std::string render(const DiagnosticsReport& r) {
  std::ostringstream out;
  auto line = [&](const std::string& k, const std::string& v) {
    out << pad_right(k, 30) << v << '\n';
  };
  line("customers", std::to_string(r.n));
  line("pi_a", fixed(r.proportions.pi_a));
  line("pi_i", fixed(r.proportions.pi_i));
  line("pi_n", fixed(r.proportions.pi_n));
  line("mu_a0_hat", fixed(r.mu_a0_hat));
  line("mu_a1_min", fixed(r.mu_a1_min));
  line("mu_i1_max", fixed(r.mu_i1_max));
  line("expect benefit", r.benefit_condition ? "yes" : "no");
  line("delta_min", fixed(r.delta_min, 8));
  line("var(tau_d)", fixed(r.var_tau_d, 8));
  line("variance reduction >=", fixed(100 * r.predicted_var_reduction_lb, 1) + "%");
  return out.str();
}

std::string render(const models::FitResult& fit) {
  std::ostringstream out;
  out << "model " << models::model_name(fit.kind) << '\n';
  out << pad_right("", 22) << pad("mean", 12) << pad("sd", 12)
      << pad("2.5%", 12) << pad("97.5%", 12) << pad("rhat", 8)
      << pad("ess", 8) << '\n';
  for (std::size_t i = 0; i < fit.summaries.size(); ++i) {
    const auto& s = fit.summaries[i];
    out << pad_right(s.name, 22) << pad(fixed(s.mean), 12)
        << pad(fixed(s.sd), 12) << pad(fixed(s.q025), 12)
        << pad(fixed(s.q975), 12);
    if (i < fit.convergence.size()) {
      out << pad(fixed(fit.convergence[i].split_rhat, 3), 8)
          << pad(fixed(fit.convergence[i].ess_bulk, 0), 8);
    }
    out << '\n';
  }
  for (const auto& w : fit.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string render(const sim::RecoveryReport& r) {
  std::ostringstream out;
  out << "recovery " << models::model_name(r.model) << " n=" << r.n
      << " seed=" << r.seed << '\n';
  out << pad_right("", 22) << pad("truth", 10) << pad("mean", 10)
      << pad("sd", 10) << pad("2.5%", 10) << pad("97.5%", 10)
      << "  covered\n";
  for (const auto& row : r.rows) {
    out << pad_right(row.name, 22) << pad(fixed(row.truth), 10)
        << pad(fixed(row.mean), 10) << pad(fixed(row.sd), 10)
        << pad(fixed(row.q025), 10) << pad(fixed(row.q975), 10) << "  "
        << (row.covered ? "yes" : "NO") << '\n';
  }
  return out.str();
}

void write_draws_csv(const inference::PosteriorDraws& draws,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "chain,iteration";
  for (const auto& n : draws.names()) out << ',' << csv::escape(n);
  out << '\n';
  for (std::size_t c = 0; c < draws.chains(); ++c) {
    for (std::size_t i = 0; i < draws.iters(); ++i) {
      out << c << ',' << i;
      for (std::size_t k = 0; k < draws.num_columns(); ++k) {
        out << ',' << csv::format_double(draws.at(c, i, k));
      }
      out << '\n';
    }
  }
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace stratlift::report
