# -*- coding: utf-8 -*- {{{
# ===----------------------------------------------------------------------===
#
#                 Component of geofuse
#
# ===----------------------------------------------------------------------===
#
# Copyright 2026 The geofuse developers
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy
# of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.
#
# ===----------------------------------------------------------------------===
# }}}

"""Experiment-scale behaviour of the three ego-filter variants.

These run hundreds of full 60 s scenarios and are deselected by default; run them with
``pytest -m slow``.
"""

from pathlib import Path

import numpy as np
import pytest

from geofuse.commands.config import parse_config
from geofuse.sim.montecarlo import run_monte_carlo
from geofuse.sim.scenario import DIRECTIONAL_ONLY, NAIVE, PROPOSED
from geofuse.utils.math_utils import sign_test_pvalue, window_mean

pytestmark = pytest.mark.slow

CONFIGS_PATH = Path(__file__).resolve().parents[3].joinpath("configs")


def _experiment(config_name, runs):
    cfg = parse_config(CONFIGS_PATH / config_name, [f"monte_carlo.num_runs={runs}"])
    return cfg, run_monte_carlo(cfg, threads=0, keep_records=True)


def _window(record, variant, start, end):
    return window_mean(record.time, record.series(variant), start, end)


@pytest.fixture(scope="module")
def physical():
    return _experiment("default.json", 200)


@pytest.fixture(scope="module")
def angular():
    return _experiment("angular.json", 200)


def test_directional_only_stays_unobservable(physical):
    cfg, summary = physical
    # run k depends only on (seed, k), so the first 100 records are the 100-run experiment
    records = summary.records[:100]
    end = cfg.duration_s
    stuck = sum(_window(r, DIRECTIONAL_ONLY, end - 30.0, end) > 0.5 for r in records)
    # the final error is roughly the initial twist about the measured direction, a standard
    # normal component, so a share of the runs ends below 0.5 rad
    assert stuck >= 70


def test_proposed_converges(physical):
    cfg, summary = physical
    records = summary.records[:100]
    end = cfg.duration_s
    mean = np.mean([r.series(PROPOSED) for r in records], axis=0)
    time = records[0].time
    assert window_mean(time, mean, end - 10.0, end) < 0.5 * window_mean(time, mean, 0.0, 5.0)

    better = sum(
        _window(r, PROPOSED, end - 10.0, end) < _window(r, DIRECTIONAL_ONLY, end - 10.0, end)
        for r in records)
    assert better >= 75


@pytest.mark.xfail(strict=False, reason="transient sign not yet measured at the shipped defaults")
def test_physical_model_transient_advantage(physical):
    cfg, summary = physical
    differences = [_window(r, NAIVE, 0.0, 10.0) - _window(r, PROPOSED, 0.0, 10.0)
                   for r in summary.records]
    assert sign_test_pvalue(differences) < 0.05

    end = cfg.duration_s
    proposed = window_mean(summary.time, summary[PROPOSED].mean, end - 10.0, end)
    naive = window_mean(summary.time, summary[NAIVE].mean, end - 10.0, end)
    assert abs(proposed - naive) <= 0.05


@pytest.mark.xfail(strict=False, reason="persistent sign not yet measured at the shipped defaults")
def test_angular_model_persistent_advantage(angular):
    cfg, summary = angular
    end = cfg.duration_s
    differences = [
        _window(r, NAIVE, end - 10.0, end) - _window(r, PROPOSED, end - 10.0, end)
        for r in summary.records
    ]
    assert sign_test_pvalue(differences) < 0.05
