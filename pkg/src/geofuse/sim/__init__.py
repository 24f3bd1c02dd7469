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

"""Deterministic multi-agent simulation and Monte-Carlo orchestration."""

from geofuse.sim.trajectory import Trajectory, generate_trajectory, event_steps
from geofuse.sim.sensors import SensorNoise, synthesize_directional, synthesize_relative
from geofuse.sim.bus import MessageBus, relative_topic
from geofuse.sim.scenario import VARIANTS, RunRecord, run_scenario
from geofuse.sim.montecarlo import MonteCarloSummary, VariantSummary, run_monte_carlo, summarize

__all__ = [
    "Trajectory", "generate_trajectory", "event_steps", "SensorNoise", "synthesize_directional",
    "synthesize_relative", "MessageBus", "relative_topic", "VARIANTS", "RunRecord",
    "run_scenario", "MonteCarloSummary", "VariantSummary", "run_monte_carlo", "summarize"
]
