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
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "stratlift/covariates.h"
#include "stratlift/diagnostics.h"
#include "stratlift/errors.h"
#include "stratlift/models/fit.h"
#include "stratlift/models/params.h"
#include "stratlift/presets.h"
#include "stratlift/report.h"
#include "stratlift/simulation.h"

namespace py = pybind11;
namespace sl = stratlift;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;
using FlagArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// Builds a dataset from parallel arrays. `flags` is n x k when given.
sl::ExperimentDataset make_dataset(const IntArray& z, const DoubleArray& y,
                                   std::optional<FlagArray> flags,
                                   std::vector<std::string> names) {
  if (z.ndim() != 1 || y.ndim() != 1 || z.shape(0) != y.shape(0)) {
    throw sl::PreconditionError("z and y must be 1-d arrays of equal length");
  }
  const auto n = static_cast<std::size_t>(z.shape(0));
  std::size_t k = 0;
  if (flags) {
    if (flags->ndim() != 2 || static_cast<std::size_t>(flags->shape(0)) != n) {
      throw sl::PreconditionError("covariates must be an n x k array");
    }
    k = static_cast<std::size_t>(flags->shape(1));
  }
  if (k != names.size()) {
    throw sl::PreconditionError("need one covariate name per covariate column");
  }
  auto zv = z.unchecked<1>();
  auto yv = y.unchecked<1>();
  std::vector<sl::ExperimentRecord> recs(n);
  for (std::size_t i = 0; i < n; ++i) {
    recs[i].customer_id = std::to_string(i);
    recs[i].z = zv(static_cast<py::ssize_t>(i));
    recs[i].y = yv(static_cast<py::ssize_t>(i));
    if (k > 0) {
      auto fv = flags->unchecked<2>();
      recs[i].covariates.resize(k);
      for (std::size_t j = 0; j < k; ++j) {
        recs[i].covariates[j] = fv(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
      }
    }
  }
  return sl::ExperimentDataset::create(std::move(recs), std::move(names));
}

py::dict dataset_arrays(const sl::ExperimentDataset& data) {
  const auto n = static_cast<py::ssize_t>(data.size());
  const auto k = static_cast<py::ssize_t>(data.covariate_names().size());
  py::array_t<int> z(std::vector<py::ssize_t>{n});
  py::array_t<double> y(std::vector<py::ssize_t>{n});
  py::array_t<std::uint8_t> flags(std::vector<py::ssize_t>{n, k});
  auto zm = z.mutable_unchecked<1>();
  auto ym = y.mutable_unchecked<1>();
  auto fm = flags.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& r = data.records()[static_cast<std::size_t>(i)];
    zm(i) = r.z;
    ym(i) = r.y;
    for (py::ssize_t j = 0; j < k; ++j) fm(i, j) = r.covariates[static_cast<std::size_t>(j)];
  }
  py::dict out;
  out["z"] = z;
  out["y"] = y;
  out["covariates"] = flags;
  out["covariate_names"] = data.covariate_names();
  return out;
}

sl::models::StrataParams strata_params(std::array<double, 3> pi, double mu_a0,
                                       double mu_a1, double mu_i1, double sigma) {
  sl::models::StrataParams p;
  p.pi = pi;
  p.mu_a0 = mu_a0;
  p.mu_a1 = mu_a1;
  p.mu_i1 = mu_i1;
  p.sigma = sigma;
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Principal stratification for holdout experiments";

  static py::exception<sl::Error> error(m, "StratliftError", PyExc_ValueError);
  static py::exception<sl::IdentificationError> ident(m, "IdentificationError",
                                                      error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sl::IdentificationError& e) {
      ident(e.what());
    } catch (const sl::Error& e) {
      error(e.what());
    }
  });

  m.def(
      "diagnose_json",
      [](const IntArray& z, const DoubleArray& y) {
        return sl::report::to_json(sl::diagnose(make_dataset(z, y, std::nullopt, {}))).dump();
      },
      py::arg("z"), py::arg("y"));

  m.def(
      "summarize",
      [](const IntArray& z, const DoubleArray& y) {
        const auto s = sl::summarize(make_dataset(z, y, std::nullopt, {}));
        py::dict d;
        d["n1"] = s.n1;
        d["n0"] = s.n0;
        d["mean_log1p_treated"] = s.mean_log1p_treated;
        d["mean_log1p_control"] = s.mean_log1p_control;
        d["incidence_treated"] = s.incidence_treated;
        d["incidence_control"] = s.incidence_control;
        d["diff_in_means"] = s.diff_in_means();
        return d;
      },
      py::arg("z"), py::arg("y"));

  m.def(
      "fit",
      [](const std::string& model, const IntArray& z, const DoubleArray& y,
         std::optional<FlagArray> covariates, std::vector<std::string> covariate_names,
         int chains, int warmup, int samples, std::uint64_t seed) {
        const auto data = make_dataset(z, y, std::move(covariates), covariate_names);
        sl::inference::SamplerConfig cfg;
        cfg.chains = chains;
        cfg.warmup_iters = warmup;
        cfg.sampling_iters = samples;
        cfg.seed = seed;
        const auto kind = sl::models::parse_model(model);
        sl::models::FitResult fit;
        {
          py::gil_scoped_release release;
          fit = sl::models::fit_model(kind, data, cfg, covariate_names);
        }
        const auto& d = fit.draws;
        py::array_t<double> draws(std::vector<py::ssize_t>{
            static_cast<py::ssize_t>(d.chains()), static_cast<py::ssize_t>(d.iters()),
            static_cast<py::ssize_t>(d.num_columns())});
        auto dm = draws.mutable_unchecked<3>();
        for (std::size_t c = 0; c < d.chains(); ++c) {
          for (std::size_t i = 0; i < d.iters(); ++i) {
            for (std::size_t k = 0; k < d.num_columns(); ++k) {
              dm(static_cast<py::ssize_t>(c), static_cast<py::ssize_t>(i),
                 static_cast<py::ssize_t>(k)) = d.at(c, i, k);
            }
          }
        }
        return py::make_tuple(sl::report::to_json(fit).dump(), d.names(), draws);
      },
      py::arg("model"), py::arg("z"), py::arg("y"), py::arg("covariates") = py::none(),
      py::arg("covariate_names") = std::vector<std::string>{}, py::arg("chains") = 4,
      py::arg("warmup") = 1000, py::arg("samples") = 1000, py::arg("seed") = 1);

  m.def(
      "generate",
      [](const std::string& preset, std::uint64_t seed, std::optional<std::size_t> n,
         std::optional<double> frac) {
        const auto p = sl::presets::find_preset(preset, seed);
        if (!p.generator) {
          throw sl::PreconditionError("preset '" + preset + "' has no data generator");
        }
        auto spec = *p.generator;
        if (n) spec.n = *n;
        if (frac) spec.treat_frac = *frac;
        const auto g = sl::sim::generate(spec);
        auto out = dataset_arrays(g.data);
        py::array_t<std::uint8_t> strata(
            std::vector<py::ssize_t>{static_cast<py::ssize_t>(g.strata.size())});
        auto sm = strata.mutable_unchecked<1>();
        for (std::size_t i = 0; i < g.strata.size(); ++i) {
          sm(static_cast<py::ssize_t>(i)) = static_cast<std::uint8_t>(g.strata[i]);
        }
        out["strata"] = strata;
        return out;
      },
      py::arg("preset"), py::arg("seed"), py::arg("n") = py::none(),
      py::arg("frac") = py::none());

  m.def("preset_names", &sl::presets::preset_names);

  m.def("prop1_delta", &sl::prop1_delta, py::arg("pi_a"), py::arg("pi_i"),
        py::arg("mu_a0"), py::arg("mu_a1"), py::arg("mu_i1"), py::arg("n"));
  m.def("expected_lognormal_mean", &sl::expected_lognormal_mean, py::arg("mu"),
        py::arg("sigma"));

  m.def(
      "required_control_size",
      [](std::size_t total_n, double mean_sales, double outcome_sd, double cost,
         double roi_null, double roi_alt, double power, double alpha, bool fixed_treated,
         double var_tau) {
        sl::PowerSpec s;
        s.total_n = total_n;
        s.mean_sales = mean_sales;
        s.outcome_sd = outcome_sd;
        s.cost_per_unit = cost;
        s.roi_null = roi_null;
        s.roi_alt = roi_alt;
        s.power = power;
        s.alpha = alpha;
        s.design = fixed_treated ? sl::AllocationDesign::kFixedTreated
                                 : sl::AllocationDesign::kFixedTotal;
        return sl::report::to_json(sl::required_control_size(s, var_tau)).dump();
      },
      py::arg("total_n"), py::arg("mean_sales"), py::arg("outcome_sd"),
      py::arg("cost") = 1.0, py::arg("roi_null") = 0.0, py::arg("roi_alt") = 0.25,
      py::arg("power") = 0.9, py::arg("alpha") = 0.05, py::arg("fixed_treated") = false,
      py::arg("var_tau") = 0.0);

  m.def("recency_pmf", &sl::covariates::recency_pmf, py::arg("k"), py::arg("pi"),
        py::arg("T"));
  m.def("expected_recency", &sl::covariates::expected_recency, py::arg("pi"),
        py::arg("T"));
  m.def(
      "responsiveness",
      [](const std::vector<int>& y, const std::vector<int>& z) {
        if (y.size() != z.size()) throw sl::PreconditionError("y and z differ in length");
        std::vector<sl::PeriodObservation> h(y.size());
        for (std::size_t t = 0; t < y.size(); ++t) h[t] = {y[t], z[t]};
        return sl::covariates::responsiveness(h);
      },
      py::arg("y"), py::arg("z"));

  m.def(
      "mnl_strata_probs",
      [](const std::vector<double>& beta_i, const std::vector<double>& beta_n,
         const std::vector<double>& x) { return sl::models::mnl_strata_probs(beta_i, beta_n, x); },
      py::arg("beta_i"), py::arg("beta_n"), py::arg("x"));

  m.def(
      "ps_ate",
      [](std::array<double, 3> pi, double mu_a0, double mu_a1, double mu_i1, double sigma) {
        const auto a = sl::models::ps_ate(strata_params(pi, mu_a0, mu_a1, mu_i1, sigma));
        return py::make_tuple(a.log_scale, a.dollar);
      },
      py::arg("pi"), py::arg("mu_a0"), py::arg("mu_a1"), py::arg("mu_i1"),
      py::arg("sigma"));

  m.def(
      "prop2_json",
      [](double rho, double p_exposure, int T, std::size_t reps, std::uint64_t seed) {
        sl::sim::Prop2Config c;
        c.rho = rho;
        c.p_exposure = p_exposure;
        c.T = T;
        c.reps = reps;
        c.seed = seed;
        sl::sim::Prop2Result r;
        {
          py::gil_scoped_release release;
          r = sl::sim::prop2_monte_carlo(c);
        }
        return sl::report::to_json(r).dump();
      },
      py::arg("rho") = 0.3, py::arg("p_exposure") = 0.5, py::arg("T") = 13,
      py::arg("reps") = 100000, py::arg("seed") = 1);
}
