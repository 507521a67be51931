# Copyright 2026 The Stratlift Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Principal stratification analysis of holdout experiments.

Thin wrappers over the compiled ``_core`` module. Functions that produce
reports return plain dicts.
"""

import json

import numpy as np

from . import _core
from ._core import (
    IdentificationError,
    StratliftError,
    expected_lognormal_mean,
    expected_recency,
    mnl_strata_probs,
    preset_names,
    prop1_delta,
    ps_ate,
    recency_pmf,
    responsiveness,
    summarize,
)

__all__ = [
    "IdentificationError",
    "StratliftError",
    "diagnose",
    "expected_lognormal_mean",
    "expected_recency",
    "fit",
    "generate",
    "mnl_strata_probs",
    "preset_names",
    "prop1_delta",
    "prop2_monte_carlo",
    "ps_ate",
    "recency_pmf",
    "required_control_size",
    "responsiveness",
    "summarize",
]


def diagnose(z, y):
    """Plug-in strata shares, bounding means and the variance-reduction bound."""
    return json.loads(_core.diagnose_json(z, y))


def fit(model, z, y, covariates=None, covariate_names=(), chains=4, warmup=1000,
        samples=1000, seed=1):
    """Fits one of dim, zi, zi-pos, ps or ps-cov.

    Returns the JSON report as a dict with two extra keys: ``names`` and
    ``draws``, a (chains, iterations, columns) array.
    """
    if covariates is not None:
        covariates = np.asarray(covariates, dtype=np.uint8)
    report, names, draws = _core.fit(model, z, y, covariates, list(covariate_names),
                                     chains, warmup, samples, seed)
    out = json.loads(report)
    out["names"] = names
    out["draws"] = draws
    return out


def generate(preset, seed, n=None, frac=None):
    """Synthetic data from a named preset, with the true strata."""
    return _core.generate(preset, seed, n, frac)


def required_control_size(total_n, mean_sales, outcome_sd, var_tau=0.0, **kwargs):
    return json.loads(_core.required_control_size(
        total_n, mean_sales, outcome_sd, var_tau=var_tau, **kwargs))


def prop2_monte_carlo(rho=0.3, p_exposure=0.5, T=13, reps=100000, seed=1):
    return json.loads(_core.prop2_json(rho, p_exposure, T, reps, seed))
