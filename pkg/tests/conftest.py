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

import copy
from pathlib import Path
import sys

import numpy as np
import pytest

# the following assumes that the conftest.py is in the tests directory.
geofuse_src_path = Path(__file__).resolve().parent.parent.joinpath("src")

assert geofuse_src_path.exists()

if str(geofuse_src_path) not in sys.path:
    sys.path.insert(0, str(geofuse_src_path))

CONFIGS_PATH = Path(__file__).resolve().parent.parent.joinpath("configs")

_SMALL_SCENARIO = {
    "dt": 0.02,
    "duration_s": 2.0,
    "directional_rate_hz": 20.0,
    "relative_rate_hz": 1.0,
    "agents": [
        {
            "directions": [[0.0, 1.0, 0.0]],
            "directional_noise_cov": [0.04, 0.01, 0.09],
            "gyro_noise_cov": [0.09, 0.04, 0.01],
            "trajectory": {
                "gains": [10.0, 1.0, 0.1],
                "waves": ["sin", "cos", "sin"]
            },
        },
        {
            "directions": [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]],
            "directional_noise_cov": [0.04, 0.01, 0.09],
            "gyro_noise_cov": [0.09, 0.04, 0.01],
            "trajectory": {
                "gains": [1.0, 0.5, 5.0],
                "waves": ["sin", "cos", "sin"]
            },
        },
    ],
    "relative": {
        "model": "physical",
        "Q": [0.25, 0.09, 0.04]
    },
    "monte_carlo": {
        "num_runs": 2,
        "seed": 7
    },
}


@pytest.fixture()
def scenario_doc():
    """A fresh, valid two-agent configuration document lasting two seconds."""
    return copy.deepcopy(_SMALL_SCENARIO)


@pytest.fixture()
def small_config(scenario_doc):
    from geofuse.commands.config import parse_config_dict

    return parse_config_dict(scenario_doc)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture()
def default_config_path():
    return CONFIGS_PATH.joinpath("default.json")
