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

"""Federated recommendation simulator with per-item robust aggregation."""

from ._core import (
    Dataset,
    aggregate_krum,
    aggregate_mean,
    aggregate_median,
    aggregate_norm_clip,
    aggregate_trimmed_mean,
    bpr_pair_gradient,
    bpr_pair_loss,
    empirical_breakdown_fraction,
    epoch_csv,
    fit_power_law,
    generate_synthetic,
    load_movielens,
    plan_malicious_count,
    predict_score,
    predicted_breakdown_fraction,
    run_experiment,
)

__all__ = [
    "Dataset",
    "aggregate_krum",
    "aggregate_mean",
    "aggregate_median",
    "aggregate_norm_clip",
    "aggregate_trimmed_mean",
    "bpr_pair_gradient",
    "bpr_pair_loss",
    "empirical_breakdown_fraction",
    "epoch_csv",
    "fit_power_law",
    "generate_synthetic",
    "load_movielens",
    "plan_malicious_count",
    "predict_score",
    "predicted_breakdown_fraction",
    "run_experiment",
]

__version__ = "0.1.0"
