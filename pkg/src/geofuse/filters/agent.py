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

import logging
from typing import Optional

from geofuse.filters.ekf import (AgentEstimate, DirectionalMeasurement, ImuSample, predict,
                                 update_directional)
from geofuse.filters.fusion import (AlphaPolicy, FusionDiagnostics, FusionOptions, SharePacket,
                                    fuse_relative)

__all__ = ["AttitudeEKF"]

_log = logging.getLogger(__name__)


class AttitudeEKF:
    """Mutable single-owner filter wrapping the pure :mod:`geofuse.filters.ekf` steps.

    One instance belongs to one simulated agent variant; it is not shared between threads.
    """

    def __init__(self,
                 estimate: AgentEstimate,
                 agent_id: int = 0,
                 alpha_policy: AlphaPolicy = AlphaPolicy(),
                 options: FusionOptions = FusionOptions(),
                 name: Optional[str] = None):
        self._estimate = estimate
        self.agent_id = agent_id
        self.alpha_policy = alpha_policy
        self.options = options
        self.name = name or f"agent-{agent_id}"
        self.diagnostics = FusionDiagnostics()
        self._last_fusion_time = float("-inf")

    def __repr__(self):
        return f"AttitudeEKF({self.name!r}, t={self._estimate.time:.3f})"

    @property
    def estimate(self) -> AgentEstimate:
        return self._estimate

    @property
    def rejections(self) -> int:
        return self.diagnostics.rejections

    def propagate(self, imu: ImuSample) -> AgentEstimate:
        self._estimate = predict(self._estimate, imu)
        return self._estimate

    def update(self, measurement: DirectionalMeasurement, direction) -> AgentEstimate:
        self._estimate = update_directional(self._estimate, measurement, direction)
        return self._estimate

    def fuse(self, packet: SharePacket) -> AgentEstimate:
        if packet.target_id != self.agent_id:
            raise ValueError(f"{self.name} received a packet addressed to agent "
                             f"{packet.target_id}")
        if packet.timestamp < self._last_fusion_time:
            raise ValueError(f"{self.name}: packet at t={packet.timestamp} arrived after "
                             f"t={self._last_fusion_time}; fusion must run in timestamp order")
        self._last_fusion_time = packet.timestamp
        self._estimate = fuse_relative(self._estimate, packet, self.alpha_policy, self.options,
                                       self.diagnostics)
        return self._estimate
