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
import math

import numpy as np
import pytest

import stratlift


def test_prop1_delta_value():
    got = stratlift.prop1_delta(0.2, 0.01, 4.6, 4.7, 3.1, 140000)
    assert got == pytest.approx(9.80194e-5, rel=1e-5)


def test_recency():
    pi, T = 0.3, 13
    total = sum(stratlift.recency_pmf(k, pi, T) for k in range(1, T + 1))
    assert total == pytest.approx(1.0, abs=1e-12)
    mean = sum(k * stratlift.recency_pmf(k, pi, T) for k in range(1, T + 1))
    assert stratlift.expected_recency(pi, T) == pytest.approx(mean, abs=1e-12)


def test_responsiveness():
    assert stratlift.responsiveness([1, 0, 1, 0], [1, 0, 1, 0]) == 1.0
    assert stratlift.responsiveness([1, 1], [1, 1]) is None


def test_mnl_and_ate():
    p = stratlift.mnl_strata_probs([-3.548, 1.684, 0.056], [0.997, 1.608, 0.318],
                                   [1, 0, 0])
    assert p[0] == pytest.approx(0.267, abs=0.002)
    log_ate, _ = stratlift.ps_ate((0.2, 0.01, 0.79), 4.6, 4.7, 3.1, 1.1)
    assert log_ate == pytest.approx(0.051, abs=1e-12)


def test_generate_diagnose_fit():
    data = stratlift.generate("table-a1", seed=3, n=4000)
    z, y = data["z"], data["y"]
    assert z.shape == y.shape == (4000,)
    assert set(np.unique(data["strata"])) <= {0, 1, 2}
    assert np.all(y[data["strata"] == 2] == 0)

    diag = stratlift.diagnose(z, y)
    assert diag["n"] == 4000
    assert 0.1 < diag["pi_a"] < 0.3

    res = stratlift.fit("ps", z, y, chains=2, warmup=200, samples=150, seed=4)
    assert res["model"] == "ps"
    assert res["draws"].shape == (2, 150, len(res["names"]))
    assert math.isfinite(res["ate_log"]["mean"])

    again = stratlift.fit("ps", z, y, chains=2, warmup=200, samples=150, seed=4)
    np.testing.assert_array_equal(res["draws"], again["draws"])


def test_covariate_fit():
    data = stratlift.generate("table-a3", seed=5, n=3000)
    res = stratlift.fit("ps-cov", data["z"], data["y"], data["covariates"],
                        data["covariate_names"], chains=2, warmup=150, samples=100)
    assert res["covariates"] == list(data["covariate_names"])


def test_power():
    res = stratlift.required_control_size(140000, 9.31, 1.774, fixed_treated=True)
    assert res["n0"] == 70641


def test_errors():
    with pytest.raises(stratlift.StratliftError):
        stratlift.diagnose(np.array([1, 1]), np.array([-1.0, 2.0]))
    z = np.array([0, 1] * 50)
    with pytest.raises(stratlift.IdentificationError):
        stratlift.fit("ps", z, np.zeros(100), chains=1, warmup=10, samples=10)
    with pytest.raises(ValueError):
        stratlift.generate("nope", seed=1)
