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

from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np

from geofuse.lie.so3 import exp_so3_batch, renormalize
from geofuse.types.scenario import ScenarioConfig, TrajectoryProfile

__all__ = ["Trajectory", "generate_trajectory", "event_steps"]

_log = logging.getLogger(__name__)

_SCHEDULE_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class Trajectory:
    """``true_states[k]`` is the attitude at ``times[k]``.

    ``noisy_omegas[k]`` drives step k -> k+1.
    """
    times: np.ndarray
    true_states: np.ndarray
    noisy_omegas: np.ndarray


def generate_trajectory(profile: TrajectoryProfile,
                        cfg: ScenarioConfig,
                        rng: np.random.Generator,
                        initial_state=None) -> Trajectory:
    """Euler-integrate the profile over the scenario horizon.

    The gyro reading is the profile plus additive Gaussian noise.  By default the truth is
    integrated from that corrupted reading; ``simulation.truth_uses_clean_omega`` integrates
    the clean profile instead while the filters still see the noisy one.
    """
    n = cfg.num_steps
    times = np.arange(n + 1) * cfg.dt
    clean = profile.omega(times[:-1])
    noisy = clean + rng.multivariate_normal(np.zeros(3), profile.gyro_noise_cov, size=n)
    driving = clean if cfg.simulation.truth_uses_clean_omega else noisy

    states = np.empty((n + 1, 3, 3))
    states[0] = np.eye(3) if initial_state is None else initial_state
    increments = exp_so3_batch(cfg.dt * driving)
    for k in range(n):
        states[k + 1] = renormalize(states[k] @ increments[k])
    return Trajectory(times, states, noisy)


def event_steps(num_steps: int, dt: float, rate_hz: float) -> np.ndarray:
    """Boolean mask over steps ``0..num_steps``: True where an event at ``rate_hz`` fires.

    An event fires at step k when ``floor(k dt f)`` increments, so the count over the horizon
    is ``floor(num_steps dt f)`` even when ``1 / (dt f)`` is not an integer.
    """
    counter = np.floor(np.arange(num_steps + 1) * dt * rate_hz + _SCHEDULE_EPS)
    fires = np.zeros(num_steps + 1, dtype=bool)
    fires[1:] = counter[1:] > counter[:-1]
    return fires
