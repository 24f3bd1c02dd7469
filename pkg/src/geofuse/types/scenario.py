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

from dataclasses import dataclass, field
import logging
from typing import Any, Dict, Tuple

import numpy as np

from geofuse.filters.fusion import (DEFAULT_ELLIPSOID_SCALE, AlphaPolicy, MeasurementKind,
                                    ProxyKind)

__all__ = [
    "TrajectoryProfile", "AgentConfig", "RelativeConfig", "FusionConfig", "InitialConfig",
    "SimulationConfig", "ScenarioConfig", "scenario_to_dict", "WAVES"
]

_log = logging.getLogger(__name__)

WAVES = {
    "sin": np.sin,
    "cos": np.cos,
    "zero": np.zeros_like,
}


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class TrajectoryProfile:
    """Oscillatory angular velocity ``w_k(t) = gain_k |wave_k(time_scale t)|`` in rad/s.

    The gyro noise covariance lives here as well because the sensor and the motion belong to
    the same agent.
    """
    agent_id: int
    gains: Tuple[float, float, float]
    waves: Tuple[str, str, str]
    gyro_noise_cov: np.ndarray
    time_scale: float = 1.0

    def __post_init__(self):
        if len(self.gains) != 3 or len(self.waves) != 3:
            raise ValueError("a trajectory needs exactly three gains and three waves")
        for wave in self.waves:
            if wave not in WAVES:
                raise ValueError(f"unknown wave {wave!r}, expected one of {sorted(WAVES)}")
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        object.__setattr__(self, "waves", tuple(self.waves))
        object.__setattr__(self, "gyro_noise_cov", _frozen(self.gyro_noise_cov))

    def omega(self, t) -> np.ndarray:
        """Angular velocity at time(s) ``t``; a scalar gives ``(3,)``, an array ``(n, 3)``."""
        tau = self.time_scale * np.asarray(t, dtype=float)
        columns = [g * np.abs(WAVES[w](tau)) for g, w in zip(self.gains, self.waves)]
        return np.stack(columns, axis=-1)


@dataclass(frozen=True, eq=False)
class AgentConfig:
    directions: Tuple[np.ndarray, ...]
    directional_noise_cov: np.ndarray
    trajectory: TrajectoryProfile

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(_frozen(d) for d in self.directions))
        object.__setattr__(self, "directional_noise_cov", _frozen(self.directional_noise_cov))

    @property
    def gyro_noise_cov(self) -> np.ndarray:
        return self.trajectory.gyro_noise_cov


@dataclass(frozen=True, eq=False)
class RelativeConfig:
    model: MeasurementKind
    noise_cov: np.ndarray
    rate_hz: float

    def __post_init__(self):
        object.__setattr__(self, "model", MeasurementKind(self.model))
        object.__setattr__(self, "noise_cov", _frozen(self.noise_cov))


@dataclass(frozen=True)
class FusionConfig:
    alpha_policy: AlphaPolicy = AlphaPolicy()
    proxy: ProxyKind = ProxyKind.MEASUREMENT
    ellipsoid_scale: float = DEFAULT_ELLIPSOID_SCALE


@dataclass(frozen=True, eq=False)
class InitialConfig:
    offset_rad: float = np.pi - 1e-3
    estimate_cov: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        object.__setattr__(self, "estimate_cov", _frozen(self.estimate_cov))


@dataclass(frozen=True)
class SimulationConfig:
    truth_uses_clean_omega: bool = False
    ego_agent: int = 0
    # directed (observer, target) pairs
    edges: Tuple[Tuple[int, int], ...] = ((1, 0), )


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    dt: float
    duration_s: float
    directional_rate_hz: float
    agents: Tuple[AgentConfig, ...]
    relative: RelativeConfig
    fusion: FusionConfig = FusionConfig()
    initial: InitialConfig = field(default_factory=InitialConfig)
    simulation: SimulationConfig = SimulationConfig()
    seed: int = 0
    num_runs: int = 1

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.duration_s > 0.0:
            raise ValueError(f"duration must be positive, got {self.duration_s}")
        if self.num_runs < 1:
            raise ValueError(f"num_runs must be at least 1, got {self.num_runs}")
        object.__setattr__(self, "agents", tuple(self.agents))

    @property
    def num_steps(self) -> int:
        return int(round(self.duration_s / self.dt))

    @property
    def relative_rate_hz(self) -> float:
        return self.relative.rate_hz

    @property
    def alpha_policy(self) -> AlphaPolicy:
        return self.fusion.alpha_policy

    @property
    def ego(self) -> AgentConfig:
        return self.agents[self.simulation.ego_agent]


def _cov_list(M) -> list:
    return [float(x) for x in np.asarray(M).ravel()]


def scenario_to_dict(cfg: ScenarioConfig) -> Dict[str, Any]:
    """The fully resolved configuration document, parseable again by the config loader."""
    return {
        "dt": cfg.dt,
        "duration_s": cfg.duration_s,
        "directional_rate_hz": cfg.directional_rate_hz,
        "agents": [{
            "directions": [[float(x) for x in d] for d in a.directions],
            "directional_noise_cov": _cov_list(a.directional_noise_cov),
            "gyro_noise_cov": _cov_list(a.gyro_noise_cov),
            "trajectory": {
                "gains": list(a.trajectory.gains),
                "waves": list(a.trajectory.waves),
                "time_scale": a.trajectory.time_scale,
            },
        } for a in cfg.agents],
        "relative": {
            "model": cfg.relative.model.value,
            "Q": _cov_list(cfg.relative.noise_cov),
            "rate_hz": cfg.relative.rate_hz,
        },
        "fusion": {
            "alpha_policy": cfg.fusion.alpha_policy.kind.value,
            "alpha": cfg.fusion.alpha_policy.alpha,
            "proxy": cfg.fusion.proxy.value,
            "ellipsoid_scale": cfg.fusion.ellipsoid_scale,
        },
        "initial": {
            "offset_rad": cfg.initial.offset_rad,
            "estimate_cov": _cov_list(cfg.initial.estimate_cov),
        },
        "simulation": {
            "truth_uses_clean_omega": cfg.simulation.truth_uses_clean_omega,
            "ego_agent": cfg.simulation.ego_agent,
            "edges": [list(e) for e in cfg.simulation.edges],
        },
        "monte_carlo": {
            "num_runs": cfg.num_runs,
            "seed": cfg.seed,
        },
    }
