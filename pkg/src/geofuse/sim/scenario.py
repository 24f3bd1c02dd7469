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

"""One simulated run: truth, sensors, message bus and the three ego-filter variants.

Every run draws from its own :class:`numpy.random.SeedSequence` derived from
``(cfg.seed, run_index)``; the sequence is split into independent child streams for the
initial conditions, the relative sensor, each agent's gyro and each agent's directional
sensor, so the variants of the ego agent always see identical sensor realisations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Dict, List

import numpy as np

from geofuse.errors import DomainError, ScheduleError
from geofuse.filters.agent import AttitudeEKF
from geofuse.filters.ekf import AgentEstimate, ImuSample, rotation_error
from geofuse.filters.fusion import FusionOptions, SharePacket
from geofuse.lie.so3 import boxplus, exp_so3
from geofuse.sim.bus import MessageBus, relative_topic
from geofuse.sim.sensors import SensorNoise, synthesize_directional, synthesize_relative
from geofuse.sim.trajectory import event_steps, generate_trajectory
from geofuse.types.scenario import ScenarioConfig

__all__ = [
    "PROPOSED", "DIRECTIONAL_ONLY", "NAIVE", "VARIANTS", "RunRecord", "run_scenario",
    "run_seed_sequence"
]

_log = logging.getLogger(__name__)

PROPOSED = "proposed"
DIRECTIONAL_ONLY = "directional_only"
NAIVE = "naive"
VARIANTS = (PROPOSED, DIRECTIONAL_ONLY, NAIVE)

INITIAL_ERROR_LIMIT = np.pi - 0.05


@dataclass(frozen=True, eq=False)
class RunRecord:
    run_index: int
    time: np.ndarray
    error_proposed: np.ndarray
    error_directional_only: np.ndarray
    error_naive: np.ndarray
    rejections: Dict[str, int] = field(default_factory=dict)
    directional_events: int = 0
    relative_events: int = 0

    @property
    def rejection_count(self) -> int:
        return sum(self.rejections.values())

    def series(self, variant: str) -> np.ndarray:
        if variant not in VARIANTS:
            raise KeyError(f"unknown variant {variant!r}")
        return getattr(self, f"error_{variant}")


def run_seed_sequence(seed: int, run_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(run_index, ))


def _random_axis(rng: np.random.Generator) -> np.ndarray:
    axis = rng.standard_normal(3)
    return axis / np.linalg.norm(axis)


def _initial_error(cov, rng: np.random.Generator) -> np.ndarray:
    while True:
        eps = rng.multivariate_normal(np.zeros(3), cov)
        if np.linalg.norm(eps) < INITIAL_ERROR_LIMIT:
            return eps


def _build_filters(cfg: ScenarioConfig, truths, rng) -> Dict[int, Dict[str, AttitudeEKF]]:
    ego = cfg.simulation.ego_agent
    policy = cfg.fusion.alpha_policy
    scale = cfg.fusion.ellipsoid_scale
    geometric = FusionOptions(geometric=True, proxy=cfg.fusion.proxy, ellipsoid_scale=scale)
    naive = FusionOptions(geometric=False, proxy=cfg.fusion.proxy, ellipsoid_scale=scale)
    filters = {}
    for a in range(len(cfg.agents)):
        eps = _initial_error(cfg.initial.estimate_cov, rng)
        start = AgentEstimate(boxplus(truths[a], eps), cfg.initial.estimate_cov, 0.0)
        if a == ego:
            filters[a] = {
                PROPOSED: AttitudeEKF(start, a, policy, geometric, f"agent-{a}/{PROPOSED}"),
                DIRECTIONAL_ONLY: AttitudeEKF(start, a, policy, geometric,
                                              f"agent-{a}/{DIRECTIONAL_ONLY}"),
                NAIVE: AttitudeEKF(start, a, policy, naive, f"agent-{a}/{NAIVE}"),
            }
        else:
            filters[a] = {PROPOSED: AttitudeEKF(start, a, policy, geometric)}
    return filters


def _packet_handler(variants: Dict[str, AttitudeEKF]):

    def on_packet(sender, topic, headers, packet):
        for name, ekf in variants.items():
            if name != DIRECTIONAL_ONLY:
                ekf.fuse(packet)

    return on_packet


def run_scenario(cfg: ScenarioConfig, run_index: int = 0) -> RunRecord:
    num_agents = len(cfg.agents)
    ego = cfg.simulation.ego_agent
    n = cfg.num_steps
    streams = [
        np.random.default_rng(s)
        for s in run_seed_sequence(cfg.seed, run_index).spawn(2 + 2 * num_agents)
    ]
    setup_rng, relative_rng = streams[0], streams[1]
    gyro_rngs = streams[2:2 + num_agents]
    directional_rngs = streams[2 + num_agents:]

    initial_truth = [
        np.eye(3) if a == ego else exp_so3(cfg.initial.offset_rad * _random_axis(setup_rng))
        for a in range(num_agents)
    ]
    trajectories = [
        generate_trajectory(agent.trajectory, cfg, gyro_rngs[a], initial_truth[a])
        for a, agent in enumerate(cfg.agents)
    ]
    filters = _build_filters(cfg, initial_truth, setup_rng)

    bus = MessageBus()
    for observer, target in cfg.simulation.edges:
        bus.subscribe(relative_topic(observer, target), _packet_handler(filters[target]))

    gyro_covs = [np.array(agent.gyro_noise_cov, dtype=float) for agent in cfg.agents]
    directional_noise = [SensorNoise(agent.directional_noise_cov) for agent in cfg.agents]
    relative_noise = SensorNoise(cfg.relative.noise_cov)

    directional_fires = event_steps(n, cfg.dt, cfg.directional_rate_hz)
    relative_fires = event_steps(n, cfg.dt, cfg.relative.rate_hz)
    skipped = 0
    directional_events = relative_events = 0

    errors = {v: np.empty(n + 1) for v in VARIANTS}
    truth_ego = trajectories[ego].true_states
    for v in VARIANTS:
        errors[v][0] = rotation_error(truth_ego[0], filters[ego][v].estimate.attitude)

    for k in range(1, n + 1):
        t = k * cfg.dt
        for a in range(num_agents):
            imu = ImuSample.trusted(trajectories[a].noisy_omegas[k - 1], cfg.dt, gyro_covs[a])
            for ekf in filters[a].values():
                ekf.propagate(imu)

        if directional_fires[k]:
            directional_events += 1
            for a, agent in enumerate(cfg.agents):
                truth = trajectories[a].true_states[k]
                for idx, d in enumerate(agent.directions):
                    m = synthesize_directional(truth, d, directional_noise[a], directional_rngs[a],
                                               idx)
                    for ekf in filters[a].values():
                        ekf.update(m, d)

        if relative_fires[k]:
            relative_events += 1
            for observer, target in cfg.simulation.edges:
                try:
                    m = synthesize_relative(cfg.relative.model,
                                            trajectories[target].true_states[k],
                                            trajectories[observer].true_states[k],
                                            relative_noise, relative_rng)
                except DomainError as e:
                    if target == ego:
                        skipped += 1
                    _log.debug(f"skipped relative measurement {observer}->{target} at t={t:.2f}: "
                               f"{e}",
                               extra={"run": run_index})
                    continue
                packet = SharePacket(m, filters[observer][PROPOSED].estimate, observer, target, t)
                bus.publish(f"agent-{observer}",
                            relative_topic(observer, target),
                            headers={"timestamp": t},
                            message=packet)
            bus.drain()

        for v in VARIANTS:
            errors[v][k] = rotation_error(truth_ego[k], filters[ego][v].estimate.attitude)

    expected_directional = int(np.floor(n * cfg.dt * cfg.directional_rate_hz + 1e-9))
    expected_relative = int(np.floor(n * cfg.dt * cfg.relative.rate_hz + 1e-9))
    if directional_events != expected_directional or relative_events != expected_relative:
        raise ScheduleError(f"run {run_index}: {directional_events} directional and "
                            f"{relative_events} relative events, expected "
                            f"{expected_directional} and {expected_relative}")
    for v, series in errors.items():
        if not np.all(np.isfinite(series)):
            raise ScheduleError(f"run {run_index}: non-finite error in variant {v}")

    rejections = {
        PROPOSED: filters[ego][PROPOSED].rejections + skipped,
        DIRECTIONAL_ONLY: 0,
        NAIVE: filters[ego][NAIVE].rejections + skipped,
    }
    if rejections[PROPOSED] or rejections[NAIVE]:
        _log.info(f"run {run_index}: rejected {rejections[PROPOSED]} proposed and "
                  f"{rejections[NAIVE]} naive packets",
                  extra={"run": run_index})

    return RunRecord(run_index, np.arange(n + 1) * cfg.dt, errors[PROPOSED],
                     errors[DIRECTIONAL_ONLY], errors[NAIVE], rejections, directional_events,
                     relative_events)
