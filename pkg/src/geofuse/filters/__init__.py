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

"""Attitude filters: the single-agent EKF and relative-measurement fusion."""

from geofuse.filters.ekf import (AgentEstimate, ImuSample, DirectionalMeasurement, predict,
                                 update_directional, rotation_error)
from geofuse.filters.fusion import (MeasurementKind, RelativeMeasurement, SharePacket,
                                    AlphaPolicy, FusionOptions, FusionDiagnostics, fuse_relative)
from geofuse.filters.agent import AttitudeEKF

__all__ = [
    "AgentEstimate", "ImuSample", "DirectionalMeasurement", "predict", "update_directional",
    "rotation_error", "MeasurementKind", "RelativeMeasurement", "SharePacket", "AlphaPolicy",
    "FusionOptions", "FusionDiagnostics", "fuse_relative", "AttitudeEKF"
]
