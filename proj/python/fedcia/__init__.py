# Copyright 2026 The fedcia Authors
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

"""Federated recommendation simulation with collaborative information aggregation."""

import json as _json

from ._fedcia import (
    ConfigError,
    DataError,
    InteractionDataset,
    ShapeError,
    add_laplace_noise,
    aggregate_cia,
    aggregate_wsa,
    build_linear_filter,
    gram,
    ideal_global_filter,
    l1_information_gap,
    load_interactions,
    normalize_bipartite,
    rank_items,
    reconstruct,
    truncated_svd,
    user_metrics,
)
from . import _fedcia

__all__ = [
    "ConfigError",
    "DataError",
    "InteractionDataset",
    "ShapeError",
    "add_laplace_noise",
    "aggregate_cia",
    "aggregate_wsa",
    "build_linear_filter",
    "config_hash",
    "expand_manifest",
    "gram",
    "ideal_global_filter",
    "l1_information_gap",
    "load_interactions",
    "normalize_bipartite",
    "rank_items",
    "reconstruct",
    "run_experiment",
    "truncated_svd",
    "user_metrics",
]


def expand_manifest(manifest):
    """Expand a manifest dict (or list of dicts) into a list of config dicts."""
    return [_json.loads(c) for c in _fedcia.expand_manifest_json(_json.dumps(manifest))]


def config_hash(config):
    """16-hex-digit hash of a config dict, as used for output file names."""
    return _fedcia.config_hash_json(_json.dumps(config))


def run_experiment(config, threads=1):
    """Run one config dict and return the report as a dict."""
    return _json.loads(_fedcia.run_experiment_json(_json.dumps(config), threads))
