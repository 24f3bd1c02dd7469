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

"""Synthetic directional and relative-attitude sensors.

Noise is drawn as ``L z`` with ``z`` standard normal and ``L`` a square-root factor of the
noise covariance computed once per sensor (:class:`SensorNoise`).  The sensor functions also
accept a bare covariance and factor it on the spot.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from geofuse.filters.ekf import DirectionalMeasurement
from geofuse.filters.fusion import MeasurementKind, RelativeMeasurement
from geofuse.lie.gaussian import as_spd
from geofuse.lie.so3 import boxplus, exp_so3, log_so3

__all__ = ["SensorNoise", "synthesize_directional", "synthesize_relative"]


class SensorNoise:
    """Zero-mean Gaussian noise with covariance ``cov`` and a fixed square-root factor."""

    def __init__(self, cov):
        cov = np.array(as_spd(cov, "sensor noise covariance", strict=False), dtype=float)
        self.definite = True
        try:
            factor = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            self.definite = False
            # semi-definite, e.g. a noiseless sensor
            w, V = np.linalg.eigh(cov)
            factor = V * np.sqrt(np.clip(w, 0.0, None))
        cov.flags.writeable = False
        factor.flags.writeable = False
        self.cov = cov
        self.factor = factor

    def __repr__(self):
        return f"SensorNoise(diag={np.diag(self.cov)})"

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return self.factor @ rng.standard_normal(3)


NoiseLike = Union[SensorNoise, np.ndarray]


def _as_noise(noise: NoiseLike) -> SensorNoise:
    return noise if isinstance(noise, SensorNoise) else SensorNoise(noise)


def synthesize_directional(true_state,
                           d,
                           noise: NoiseLike,
                           rng: np.random.Generator,
                           direction_index: int = 0) -> DirectionalMeasurement:
    """``z = R^T d + n`` with ``n ~ N(0, noise.cov)``; no projection back onto the sphere."""
    noise = _as_noise(noise)
    if not noise.definite:
        raise ValueError("directional noise covariance is not positive definite")
    value = np.asarray(true_state, dtype=float).T @ np.asarray(d, dtype=float) + noise.draw(rng)
    return DirectionalMeasurement.trusted(value, direction_index, noise.cov)


def synthesize_relative(kind,
                        R_i,
                        R_j,
                        noise: NoiseLike,
                        rng: np.random.Generator,
                        strict: bool = True) -> RelativeMeasurement:
    """Agent j's measurement of agent i.

    Physical: ``y = R_j^-1 R_i exp(kappa)``.  Angular: ``z = exp(log(R_j^-1 R_i) + kappa)``,
    which raises :class:`geofuse.errors.DomainError` when the relative angle reaches pi.
    Both kinds consume exactly one draw of ``kappa ~ N(0, noise.cov)``.
    """
    kind = MeasurementKind(kind)
    noise = _as_noise(noise)
    relative = np.asarray(R_j, dtype=float).T @ np.asarray(R_i, dtype=float)
    kappa = noise.draw(rng)
    if kind is MeasurementKind.PHYSICAL:
        value = boxplus(relative, kappa)
    else:
        value = exp_so3(log_so3(relative) + kappa)
    return RelativeMeasurement(kind, value, noise.cov, strict=strict)
