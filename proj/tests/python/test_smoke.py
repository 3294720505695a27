# Copyright 2026 The sparsefed Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the python bindings."""

import json
import math

import pytest

import sparsefed


def test_synthetic_dataset_shape():
    ds = sparsefed.generate_synthetic(50, 120, 8, exponent=2.5, seed=7)
    assert ds.n_users == 50
    assert ds.n_items == 120
    assert ds.train_size + ds.test_size == 400
    assert 0.9 < ds.sparsity < 1.0
    assert len(ds.degrees) == 120


def test_bpr_ops():
    assert sparsefed.predict_score([1.0, 2.0], [3.0, 4.0]) == 11.0
    loss = sparsefed.bpr_pair_loss([0.1, 0.2], [0.3, 0.4], [0.3, 0.4])
    assert loss == pytest.approx(math.log(2.0))
    g_user, g_pos, g_neg = sparsefed.bpr_pair_gradient(
        [0.1, 0.2], [0.3, 0.4], [0.5, 0.6]
    )
    assert len(g_user) == 2
    assert g_pos == pytest.approx([-x for x in g_neg])


def test_aggregators():
    rows = [[1.0, 0.0], [3.0, 2.0]]
    assert sparsefed.aggregate_mean(rows) == [2.0, 1.0]
    assert sparsefed.aggregate_median([[1.0], [2.0], [100.0]]) == [2.0]
    assert sparsefed.aggregate_trimmed_mean(
        [[-100.0], [1.0], [2.0], [3.0], [100.0]], 1
    ) == pytest.approx([2.0])
    assert sparsefed.aggregate_krum(
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [10.0, 10.0]], 1
    ) == [0.0, 0.0]
    clipped = sparsefed.aggregate_norm_clip([[3.0, 4.0]], 2.5)
    assert clipped == pytest.approx([1.5, 2.0])


def test_malicious_count_planning():
    assert sparsefed.plan_malicious_count(943, 0.03) == 29
    assert sparsefed.plan_malicious_count(943, 0.0) == 0


def test_power_law_analysis():
    exponent, norm, x_min = sparsefed.fit_power_law(
        [float(2 ** (i % 8) + 1) for i in range(1000)]
    )
    assert exponent > 1.0
    frac = sparsefed.predicted_breakdown_fraction(2.0, 1.0, 1.0, 0.5, 10)
    assert frac == pytest.approx(0.9)
    emp = sparsefed.empirical_breakdown_fraction([1.0, 1.0, 5.0, 300.0], 0.5, 10)
    assert emp == pytest.approx(0.75)


def test_run_experiment_and_determinism():
    config = {
        "dataset": {
            "kind": "synthetic",
            "users": 40,
            "items": 160,
            "interactions_per_user": 6,
            "exponent": 2.2,
            "seed": 3,
        },
        "model": {"dim": 8},
        "federation": {"epochs": 3, "seed": 11},
        "attack": {"kind": "spattack_od", "malicious_count": 2},
    }
    out = sparsefed.run_experiment(json.dumps(config))
    reports = out["reports"]
    assert len(reports) == 3
    assert all(0.0 <= r["hr10"] <= 1.0 for r in reports)
    assert out["summary"]["resolved"]["malicious_count"] == 2

    csv_a = sparsefed.epoch_csv(json.dumps(config))
    config["federation"]["workers"] = 4
    csv_b = sparsefed.epoch_csv(json.dumps(config))
    assert csv_a == csv_b
