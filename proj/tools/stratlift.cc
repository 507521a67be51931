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
// stratlift: command-line front end.
//
//   stratlift diagnose --input data.csv
//   stratlift analyze --input data.csv --model ps --baseline
//   stratlift covariates --panel panel.csv --output cov.csv
//   stratlift simulate --preset fig2 --reps 100 --seed 1 --output fig2.csv
//   stratlift recover --preset table-a1 --seed 1
//
// Exit codes: 0 success, 2 bad input or configuration, 3 model not
// identified on the data.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stratlift/covariates.h"
#include "stratlift/data.h"
#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/models/fit.h"
#include "stratlift/presets.h"
#include "stratlift/report.h"
#include "stratlift/simulation.h"

namespace {

using stratlift::report::Json;
namespace sl = stratlift;

constexpr int kExitInput = 2;
constexpr int kExitIdentification = 3;

struct SamplerFlags {
  int chains = 4;
  int warmup = 1000;
  int samples = 1000;
};

struct PowerFlags {
  std::size_t total_n = 0;
  double mean_sales = 0;
  double outcome_sd = 0;
  double cost = 1;
  double roi_null = 0;
  double roi_alt = 0.25;
  double power = 0.9;
  double alpha = 0.05;
  bool fixed_treated = false;
};

struct Options {
  std::string input;
  std::string panel;
  std::string model = "ps";
  std::vector<std::string> covariates;
  std::string output;
  std::string preset;
  std::string truth;
  std::string draws;
  std::string summary;
  std::optional<std::uint64_t> seed;
  bool baseline = false;
  bool clip_negative = false;
  bool drop_missing = false;
  int recency_threshold = 5;
  std::size_t n = 0;
  std::optional<double> frac;
  std::size_t reps = 0;
  std::size_t batches = 0;
  std::vector<std::size_t> n_grid;
  std::vector<double> frac_grid;
  SamplerFlags sampler;
  PowerFlags power;
};

void add_sampler_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--chains", o.sampler.chains, "Number of chains")
      ->check(CLI::Range(1, 64));
  cmd->add_option("--warmup", o.sampler.warmup, "Warmup iterations per chain")
      ->check(CLI::Range(1, 1000000));
  cmd->add_option("--samples", o.sampler.samples, "Kept draws per chain")
      ->check(CLI::Range(1, 1000000));
}

sl::inference::SamplerConfig sampler_config(const Options& o) {
  sl::inference::SamplerConfig c;
  c.chains = o.sampler.chains;
  c.warmup_iters = o.sampler.warmup;
  c.sampling_iters = o.sampler.samples;
  c.seed = o.seed.value_or(1);
  return c;
}

void emit(const Json& j, const std::string& path, const std::string& table) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  sl::report::write_json(j, path);
  if (!table.empty()) std::cout << table;
}

std::vector<double> json_vector(const Json& j, const char* key) {
  if (!j.contains(key)) throw sl::PreconditionError(std::string("truth lacks '") + key + "'");
  return j.at(key).get<std::vector<double>>();
}

double json_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw sl::PreconditionError(std::string("truth lacks numeric '") + key + "'");
  }
  return j.at(key).get<double>();
}

// Truth file: {"pi": [a, i, n], "mu_a0", "mu_a1", "mu_i1", "sigma"} or,
// for the covariate model, "beta_i", "beta_n", "covariates", "probs" in
// place of "pi".
sl::sim::GeneratorSpec read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sl::Error("cannot read '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw sl::ParseError("malformed truth file '" + path + "': " + e.what());
  }
  sl::sim::GeneratorSpec spec;
  try {
    if (j.contains("beta_i")) {
      sl::models::CovStrataParams t;
      t.beta_i = json_vector(j, "beta_i");
      t.beta_n = json_vector(j, "beta_n");
      t.mu_a0 = json_number(j, "mu_a0");
      t.mu_a1 = json_number(j, "mu_a1");
      t.mu_i1 = json_number(j, "mu_i1");
      t.sigma = json_number(j, "sigma");
      spec.cov_truth = t;
      spec.design.names = j.at("covariates").get<std::vector<std::string>>();
      spec.design.probs = json_vector(j, "probs");
    } else {
      const auto pi = json_vector(j, "pi");
      if (pi.size() != 3) throw sl::PreconditionError("'pi' needs 3 entries");
      spec.truth.pi = {pi[0], pi[1], pi[2]};
      spec.truth.mu_a0 = json_number(j, "mu_a0");
      spec.truth.mu_a1 = json_number(j, "mu_a1");
      spec.truth.mu_i1 = json_number(j, "mu_i1");
      spec.truth.sigma = json_number(j, "sigma");
    }
  } catch (const nlohmann::json::exception& e) {
    throw sl::ParseError("malformed truth file '" + path + "': " + e.what());
  }
  spec.n = 140000;
  return spec;
}

Json truth_json(const sl::sim::GeneratorSpec& spec) {
  if (!spec.cov_truth) return sl::report::to_json(spec.truth);
  const auto& t = *spec.cov_truth;
  return {{"beta_i", t.beta_i},     {"beta_n", t.beta_n},
          {"covariates", spec.design.names},
          {"probs", spec.design.probs},
          {"mu_a0", t.mu_a0},       {"mu_a1", t.mu_a1},
          {"mu_i1", t.mu_i1},       {"sigma", t.sigma}};
}

// Generator spec from --preset or --truth, with --n/--frac/--seed applied.
sl::sim::GeneratorSpec generator_spec(const Options& o, sl::models::ModelKind* model) {
  sl::sim::GeneratorSpec spec;
  if (!o.preset.empty()) {
    const auto p = sl::presets::find_preset(o.preset, *o.seed);
    if (!p.generator) {
      throw sl::PreconditionError("preset '" + o.preset +
                                  "' does not define a data generator");
    }
    spec = *p.generator;
    if (model) *model = p.model;
  } else if (!o.truth.empty()) {
    spec = read_truth(o.truth);
    if (model) {
      *model = spec.cov_truth ? sl::models::ModelKind::kStrataCovariates
                              : sl::models::ModelKind::kStrata;
    }
  } else {
    throw sl::PreconditionError("pass --preset or --truth");
  }
  if (o.n > 0) spec.n = o.n;
  if (o.frac) spec.treat_frac = *o.frac;
  spec.seed = *o.seed;
  spec.validate();
  return spec;
}

sl::ExperimentDataset load_input(const Options& o, Json& config,
                                 std::vector<std::string>& covariates) {
  if (o.input.empty()) throw sl::PreconditionError("--input is required");
  sl::ExperimentSchema schema;
  schema.clip_negative = o.clip_negative;
  covariates = o.covariates;
  if (o.panel.empty()) schema.covariate_columns = o.covariates;
  sl::LoadStats stats;
  auto data = sl::load_experiment(o.input, schema, &stats);
  config["rows"] = stats.rows;
  config["clipped_negative"] = stats.clipped_negative;
  if (!o.panel.empty()) {
    const auto panel = sl::load_panel(o.panel);
    const auto rows = sl::covariates::build_covariates(panel, o.recency_threshold);
    sl::covariates::JoinReport join;
    data = sl::covariates::join_covariates(data, rows, &join, o.drop_missing);
    config["join"] = {{"matched", join.matched},
                      {"missing", join.missing.size()},
                      {"panel_only", join.panel_only}};
    std::cerr << "joined covariates: " << join.matched << " matched, "
              << join.missing.size() << " missing, " << join.panel_only
              << " panel-only\n";
    if (covariates.empty()) {
      covariates = {sl::covariates::kNoRecentPurchase,
                    sl::covariates::kLowResponsiveness};
    }
  }
  return data;
}

sl::PowerSpec power_spec(const Options& o) {
  sl::PowerSpec s;
  s.total_n = o.power.total_n;
  s.mean_sales = o.power.mean_sales;
  s.outcome_sd = o.power.outcome_sd;
  s.cost_per_unit = o.power.cost;
  s.roi_null = o.power.roi_null;
  s.roi_alt = o.power.roi_alt;
  s.power = o.power.power;
  s.alpha = o.power.alpha;
  s.design = o.power.fixed_treated ? sl::AllocationDesign::kFixedTreated
                                   : sl::AllocationDesign::kFixedTotal;
  return s;
}

Json sample_sizes(const sl::PowerSpec& spec, double ps_factor) {
  const double var = spec.outcome_sd * spec.outcome_sd;
  Json j;
  j["spec"] = sl::report::to_json(spec);
  j["ps_variance_factor"] = ps_factor;
  j["diff_in_means"] = sl::report::to_json(sl::required_control_size(spec, var));
  j["post_stratified"] =
      sl::report::to_json(sl::required_control_size(spec, var * ps_factor));
  return j;
}

int cmd_diagnose(const Options& o) {
  Json config = {{"command", "diagnose"}};
  sl::ExperimentDataset data;
  std::optional<sl::PowerSpec> power;
  double ps_factor = 1.0;
  if (!o.preset.empty()) {
    if (!o.seed) throw sl::PreconditionError("--seed is required with --preset");
    sl::models::ModelKind ignored;
    const auto spec = generator_spec(o, &ignored);
    config["preset"] = o.preset;
    config["seed"] = *o.seed;
    config["truth"] = truth_json(spec);
    data = sl::sim::generate(spec).data;
    const auto p = sl::presets::find_preset(o.preset, *o.seed);
    if (p.power) {
      power = *p.power;
      ps_factor = sl::presets::kExpt2PsVarianceFactor;
    }
  } else {
    std::vector<std::string> covs;
    config["input"] = o.input;
    data = load_input(o, config, covs);
  }
  const auto diag = sl::diagnose(data);
  if (o.power.total_n > 0) {
    power = power_spec(o);
    // Without a measured ratio, fall back to the data's own lower bound.
    ps_factor = 1.0 - diag.predicted_var_reduction_lb;
  }
  Json j;
  j["config"] = config;
  j["diagnostics"] = sl::report::to_json(diag);
  if (power) j["sample_size"] = sample_sizes(*power, ps_factor);
  emit(j, o.output, sl::report::render(diag));
  return 0;
}

int cmd_analyze(const Options& o) {
  Json config = {{"command", "analyze"}, {"input", o.input}, {"model", o.model}};
  const auto kind = sl::models::parse_model(o.model);
  std::vector<std::string> covariates;
  const auto data = load_input(o, config, covariates);
  if (kind == sl::models::ModelKind::kStrataCovariates && covariates.empty()) {
    throw sl::PreconditionError("model ps-cov needs --covariates or --panel");
  }
  const auto sampler = sampler_config(o);
  config["covariates"] = covariates;
  config["panel"] = o.panel;
  config["baseline"] = o.baseline;
  config["clip_negative"] = o.clip_negative;
  config["sampler"] = sl::report::to_json(sampler);

  const auto fit = sl::models::fit_model(kind, data, sampler, covariates);
  Json j;
  j["config"] = config;
  const auto summary = sl::summarize(data);
  j["data"] = {{"n1", summary.n1},
               {"n0", summary.n0},
               {"incidence_treated", summary.incidence_treated},
               {"incidence_control", summary.incidence_control},
               {"diff_in_means", summary.diff_in_means()}};
  j["fit"] = sl::report::to_json(fit);
  std::string table = sl::report::render(fit);
  if (o.baseline) {
    const auto base =
        sl::models::fit_model(sl::models::ModelKind::kDiffMeans, data, sampler);
    const double red = sl::models::variance_reduction(fit, base);
    j["baseline"] = sl::report::to_json(base);
    j["var_reduction_pct"] = 100.0 * red;
    std::ostringstream extra;
    extra << "Var Reduction (%) vs dim: " << 100.0 * red << '\n';
    table += extra.str();
  }
  if (!o.draws.empty()) sl::report::write_draws_csv(fit.draws, o.draws);
  emit(j, o.output, table);
  return 0;
}

int cmd_covariates(const Options& o) {
  if (o.panel.empty()) throw sl::PreconditionError("--panel is required");
  const auto panel = sl::load_panel(o.panel);
  const auto rows = sl::covariates::build_covariates(panel, o.recency_threshold);
  sl::covariates::save_covariates(rows, o.output);
  std::size_t nrp = 0, low = 0;
  for (const auto& r : rows) {
    nrp += r.no_recent_purchase;
    low += r.low_responsiveness;
  }
  std::cerr << "customers: " << rows.size() << ", T = " << panel.T()
            << ", no_recent_purchase: " << nrp
            << ", low_responsiveness: " << low << '\n';
  if (!o.input.empty()) {
    auto opts = o;
    opts.panel.clear();
    opts.covariates.clear();
    Json config;
    std::vector<std::string> ignored;
    const auto data = load_input(opts, config, ignored);
    sl::covariates::JoinReport join;
    sl::covariates::join_covariates(data, rows, &join, true);
    std::cerr << "join: " << join.matched << " matched, "
              << join.missing.size() << " missing, " << join.panel_only
              << " panel-only\n";
  }
  return 0;
}

int cmd_simulate(const Options& o) {
  Json config = {{"command", "simulate"}, {"seed", *o.seed}};
  if (o.preset == "fig2" || o.preset == "fig3") {
    auto h = *sl::presets::find_preset(o.preset, *o.seed).harness;
    if (o.reps > 0) h.reps = o.reps;
    if (o.batches > 0) h.batches = o.batches;
    if (!o.n_grid.empty()) h.n_grid = o.n_grid;
    if (!o.frac_grid.empty()) h.frac_grid = o.frac_grid;
    config["preset"] = o.preset;
    config["truth"] = sl::report::to_json(h.truth);
    config["n_grid"] = h.n_grid;
    config["frac_grid"] = h.frac_grid;
    config["reps"] = h.reps;
    config["batches"] = h.batches;
    Json j;
    j["config"] = config;
    const std::string csv_path =
        o.output.empty() ? o.preset + ".csv" : o.output;
    if (o.preset == "fig2") {
      const auto cells = sl::sim::replicate_fig2(h);
      sl::sim::write_fig2_csv(cells, csv_path);
      j["cells"] = sl::report::to_json(cells);
    } else {
      const auto cells = sl::sim::replicate_fig3(h);
      sl::sim::write_fig3_csv(cells, csv_path);
      j["cells"] = sl::report::to_json(cells);
    }
    if (o.summary.empty()) {
      std::cout << j.dump(2) << '\n';
    } else {
      sl::report::write_json(j, o.summary);
    }
    return 0;
  }
  const auto spec = generator_spec(o, nullptr);
  const auto g = sl::sim::generate(spec);
  if (o.output.empty() || o.output == "-") {
    throw sl::PreconditionError("--output is required to write generated data");
  }
  sl::save_experiment(g.data, o.output);
  config["preset"] = o.preset;
  config["truth"] = truth_json(spec);
  config["n"] = spec.n;
  config["frac"] = spec.treat_frac;
  Json j;
  j["config"] = config;
  j["data"] = {{"n1", g.data.n1()}, {"n0", g.data.n0()}};
  if (o.summary.empty()) {
    std::cerr << "wrote " << g.data.size() << " customers to " << o.output << '\n';
  } else {
    sl::report::write_json(j, o.summary);
  }
  return 0;
}

int cmd_recover(const Options& o) {
  sl::models::ModelKind model;
  const auto spec = generator_spec(o, &model);
  // An explicit --model overrides the preset's default.
  if (!o.model.empty()) model = sl::models::parse_model(o.model);
  const auto sampler = sampler_config(o);
  Json config = {{"command", "recover"},
                 {"preset", o.preset},
                 {"model", std::string(sl::models::model_name(model))},
                 {"n", spec.n},
                 {"frac", spec.treat_frac},
                 {"seed", *o.seed},
                 {"truth", truth_json(spec)},
                 {"sampler", sl::report::to_json(sampler)}};
  const auto rep = sl::sim::recover(spec, model, sampler);
  Json j;
  j["config"] = config;
  j["recovery"] = sl::report::to_json(rep);
  emit(j, o.output, sl::report::render(rep));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal stratification analysis of holdout experiments"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  Options o;

  auto* diagnose = app.add_subcommand("diagnose", "Plug-in strata diagnostics");
  diagnose->add_option("--input", o.input, "Experiment CSV");
  diagnose->add_flag("--clip-negative", o.clip_negative, "Clip y < 0 to 0");
  diagnose->add_option("--covariates", o.covariates, "Covariate columns")
      ->delimiter(',');
  diagnose->add_option("--preset", o.preset, "Diagnose synthetic preset data");
  diagnose->add_option("--seed", o.seed, "Seed for preset data");
  diagnose->add_option("--output", o.output, "JSON report path");
  diagnose->add_option("--total-n", o.power.total_n, "Power: customers available");
  diagnose->add_option("--mean-sales", o.power.mean_sales, "Power: mean sales");
  diagnose->add_option("--outcome-sd", o.power.outcome_sd, "Power: sd of log(y+1)");
  diagnose->add_option("--cost", o.power.cost, "Power: campaign cost per customer");
  diagnose->add_option("--roi-null", o.power.roi_null, "Power: null ROI");
  diagnose->add_option("--roi-alt", o.power.roi_alt, "Power: alternative ROI");
  diagnose->add_option("--power", o.power.power, "Power: target power");
  diagnose->add_option("--alpha", o.power.alpha, "Power: one-sided level");
  diagnose->add_flag("--fixed-treated", o.power.fixed_treated,
                     "Power: holdout added on top of total-n treated");

  auto* analyze = app.add_subcommand("analyze", "Fit an outcome model");
  analyze->add_option("--input", o.input, "Experiment CSV")->required();
  analyze->add_option("--model", o.model, "dim, zi, zi-pos, ps or ps-cov");
  analyze->add_option("--covariates", o.covariates, "Covariate columns")
      ->delimiter(',');
  analyze->add_option("--panel", o.panel, "Panel CSV to derive covariates from");
  analyze->add_flag("--drop-missing", o.drop_missing,
                    "Drop customers absent from the panel");
  analyze->add_option("--seed", o.seed, "Sampler seed");
  analyze->add_flag("--baseline", o.baseline, "Also fit dim and report the reduction");
  analyze->add_flag("--clip-negative", o.clip_negative, "Clip y < 0 to 0");
  analyze->add_option("--output", o.output, "JSON report path");
  analyze->add_option("--draws", o.draws, "Write posterior draws CSV");
  add_sampler_flags(analyze, o);

  auto* covs = app.add_subcommand("covariates", "Recency/responsiveness table");
  covs->add_option("--panel", o.panel, "Panel CSV")->required();
  covs->add_option("--input", o.input, "Experiment CSV for join statistics");
  covs->add_option("--output", o.output, "Covariate CSV path")->required();
  covs->add_option("--recency-threshold", o.recency_threshold,
                   "Periods without purchase that flag no_recent_purchase");

  auto* simulate = app.add_subcommand("simulate", "Generate data or run harnesses");
  simulate->add_option("--preset", o.preset, "table-a1, table-a3, expt2, fig2, fig3");
  simulate->add_option("--truth", o.truth, "Truth JSON file");
  simulate->add_option("--seed", o.seed, "Seed")->required();
  simulate->add_option("--n", o.n, "Customers per dataset");
  simulate->add_option("--frac", o.frac, "Treated fraction");
  simulate->add_option("--reps", o.reps, "Harness replications per cell");
  simulate->add_option("--batches", o.batches, "Harness batches");
  simulate->add_option("--n-grid", o.n_grid, "Harness n values")->delimiter(',');
  simulate->add_option("--frac-grid", o.frac_grid, "Harness fractions")->delimiter(',');
  simulate->add_option("--output", o.output, "CSV path");
  simulate->add_option("--summary", o.summary, "JSON summary path");

  auto* recover = app.add_subcommand("recover", "Parameter recovery study");
  recover->add_option("--preset", o.preset, "table-a1 or table-a3");
  recover->add_option("--truth", o.truth, "Truth JSON file");
  recover->add_option("--model", o.model, "Model to fit");
  recover->add_option("--seed", o.seed, "Seed")->required();
  recover->add_option("--n", o.n, "Customers");
  recover->add_option("--frac", o.frac, "Treated fraction");
  recover->add_option("--output", o.output, "JSON report path");
  add_sampler_flags(recover, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (recover->parsed() && recover->count("--model") == 0) o.model.clear();
    if (diagnose->parsed()) return cmd_diagnose(o);
    if (analyze->parsed()) return cmd_analyze(o);
    if (covs->parsed()) return cmd_covariates(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (recover->parsed()) return cmd_recover(o);
  } catch (const sl::IdentificationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIdentification;
  } catch (const sl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
