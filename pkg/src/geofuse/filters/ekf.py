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

"""Single-agent extended Kalman filter on SO(3).

The information state is the zero-mean concentrated Gaussian ``R ~ GP_Rhat(0, P)`` with the
body-frame error convention ``R = Rhat exp(eps^)``.  From that convention:

* propagation over one IMU sample ``Rhat+ = Rhat exp(dt w)`` linearises to
  ``eps+ = F eps + G n`` with ``F = exp(dt w)^T`` and ``G = -dt J_{dt w}``;
  ``J`` here is the right-trivialised Jacobian of :mod:`geofuse.lie.so3`, so this ``G`` is
  the usual ``-dt J_r`` and not a transposed variant;
* a known direction ``d`` observed in the body frame, ``z = R^T d + noise``, has the
  output matrix ``H = (Rhat^T d)^``.

Each correction is followed by a covariance reset (:func:`geofuse.lie.gaussian.absorb_mean`)
so the state stays zero-mean.

Inputs are validated when they are constructed from outside the filter.  Intermediate
estimates and measurements built by the filter and the simulator go through the
``trusted`` constructors, which only freeze the arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Tuple

import numpy as np

from geofuse.errors import SingularInnovation
from geofuse.lie.gaussian import (ConcentratedGaussian, absorb_mean, absorb_mean_parts, as_spd,
                                   symmetrize)
from geofuse.lie.so3 import (adjoint_matrix, as_vec3, exp_and_jacobian, is_rotation, renormalize,
                             rotation_angle, wedge)

__all__ = [
    "AgentEstimate", "ImuSample", "DirectionalMeasurement", "predict", "kalman_correction",
    "update_directional", "rotation_error"
]

_log = logging.getLogger(__name__)

MAX_INNOVATION_CONDITION = 1e12
UNIT_TOLERANCE = 1e-9
# corrections longer than this are shortened before the reset
MAX_CORRECTION_ANGLE = np.pi - 1e-3

_I3 = np.eye(3)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


def _readonly(arr) -> np.ndarray:
    view = arr.view()
    view.flags.writeable = False
    return view


def _bypass_init(cls, **values):
    obj = object.__new__(cls)
    for name, value in values.items():
        object.__setattr__(obj, name, value)
    return obj


@dataclass(frozen=True, eq=False)
class AgentEstimate:
    """An agent's attitude estimate, its covariance (rad^2) and the filter time (s)."""
    attitude: np.ndarray
    cov: np.ndarray
    time: float = 0.0
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not is_rotation(self.attitude):
            raise ValueError("attitude is not a rotation matrix")
        as_spd(self.cov, "estimate covariance", self.strict)
        object.__setattr__(self, "attitude", _frozen(self.attitude))
        object.__setattr__(self, "cov", _frozen(self.cov))
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def unchecked(cls, attitude, cov, time: float = 0.0) -> "AgentEstimate":
        return cls(attitude, cov, time, strict=False)

    @classmethod
    def trusted(cls, attitude, cov, time: float, strict: bool = True) -> "AgentEstimate":
        """Wrap arrays the filter has just computed without re-validating them."""
        return _bypass_init(cls,
                            attitude=_readonly(attitude),
                            cov=_readonly(cov),
                            time=float(time),
                            strict=strict)

    @classmethod
    def from_gaussian(cls, d: ConcentratedGaussian, time: float) -> "AgentEstimate":
        if not d.is_zero_mean:
            d = absorb_mean(d)
        return cls(d.ref_point, d.cov, time, strict=d.strict)

    def as_gaussian(self) -> ConcentratedGaussian:
        return ConcentratedGaussian.zero_mean(self.attitude, self.cov, strict=self.strict)


@dataclass(frozen=True, eq=False)
class ImuSample:
    """Body-frame angular velocity (rad/s) held over ``dt`` seconds."""
    omega: np.ndarray
    dt: float
    gyro_cov: np.ndarray

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        # a zero gyro covariance is a legitimate noiseless input
        as_spd(self.gyro_cov, "gyro covariance", strict=False)
        object.__setattr__(self, "omega", _frozen(as_vec3(self.omega)))
        object.__setattr__(self, "gyro_cov", _frozen(self.gyro_cov))

    @classmethod
    def trusted(cls, omega, dt: float, gyro_cov) -> "ImuSample":
        return _bypass_init(cls,
                            omega=_readonly(omega),
                            dt=float(dt),
                            gyro_cov=_readonly(gyro_cov))


@dataclass(frozen=True, eq=False)
class DirectionalMeasurement:
    """A known reference direction observed in the body frame with additive noise."""
    value: np.ndarray
    direction_index: int
    noise_cov: np.ndarray

    def __post_init__(self):
        as_spd(self.noise_cov, "directional noise covariance")
        object.__setattr__(self, "value", _frozen(as_vec3(self.value)))
        object.__setattr__(self, "noise_cov", _frozen(self.noise_cov))

    @classmethod
    def trusted(cls, value, direction_index: int, noise_cov) -> "DirectionalMeasurement":
        return _bypass_init(cls,
                            value=_readonly(value),
                            direction_index=direction_index,
                            noise_cov=_readonly(noise_cov))


def rotation_error(R_true, R_hat) -> float:
    """``arccos((tr(R^-1 Rhat) - 1) / 2)`` in [0, pi]."""
    return rotation_angle(np.asarray(R_true).T @ np.asarray(R_hat))


def predict(est: AgentEstimate, imu: ImuSample) -> AgentEstimate:
    step = imu.dt * imu.omega
    E, J = exp_and_jacobian(step)
    F = adjoint_matrix(E).T
    G = -imu.dt * J
    cov = F @ est.cov @ F.T + G @ imu.gyro_cov @ G.T
    return AgentEstimate.trusted(renormalize(est.attitude @ E), symmetrize(cov, check=False),
                                 est.time + imu.dt, est.strict)


def _unit_direction(d) -> np.ndarray:
    d = as_vec3(d)
    if abs(np.linalg.norm(d) - 1.0) > UNIT_TOLERANCE:
        raise ValueError(f"reference direction {d} is not unit norm")
    return d


def kalman_correction(est: AgentEstimate, m: DirectionalMeasurement,
                      d) -> Tuple[np.ndarray, np.ndarray]:
    """Correction in logarithmic coordinates and the posterior covariance, before reset."""
    predicted = est.attitude.T @ _unit_direction(d)
    residual = m.value - predicted
    H = wedge(predicted)
    P = est.cov
    S = H @ P @ H.T + m.noise_cov
    eigenvalues = np.linalg.eigvalsh(S)
    condition = eigenvalues[-1] / eigenvalues[0] if eigenvalues[0] > 0.0 else np.inf
    if not np.isfinite(condition) or condition > MAX_INNOVATION_CONDITION:
        raise SingularInnovation(f"innovation covariance is singular (cond = {condition:.3e})",
                                 condition)
    # K = P H^T S^-1, solved as (S^-1 H P)^T with S and P symmetric
    K = np.linalg.solve(S, H @ P).T
    correction = K @ residual
    posterior = symmetrize((_I3 - K @ H) @ P, check=False)
    return correction, posterior


def _limit_correction(correction) -> np.ndarray:
    angle = float(np.linalg.norm(correction))
    if angle < MAX_CORRECTION_ANGLE:
        return correction
    _log.warning(f"correction of {angle:.3f} rad leaves the logarithm chart, "
                 f"shortened to {MAX_CORRECTION_ANGLE:.3f} rad")
    return correction * (MAX_CORRECTION_ANGLE / angle)


def update_directional(est: AgentEstimate, m: DirectionalMeasurement, d) -> AgentEstimate:
    correction, posterior = kalman_correction(est, m, d)
    correction = _limit_correction(correction)
    ref, cov = absorb_mean_parts(est.attitude, correction, posterior)
    return AgentEstimate.trusted(ref, cov, est.time, est.strict)
