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

"""Fusion of relative-attitude measurements shared by a neighbouring agent.

A packet from agent j carries a relative measurement of agent i together with j's own
estimate.  The ego agent i turns it into a second estimate of its own attitude and fuses the
two with the convex combination ellipsoid (CCE) rule:

1. ``angular_to_physical``  - angle-axis measurements become right-translated ones,
   ``Q* = J_{log z} Q J_{log z}^T``.
2. ``preprocess_relative``  - ``Rhat^j_i = Rhat_j y`` with
   ``P^j_i = A P_j A^T + Q``, ``A = Ad((Rhat_j^-1 Rhat_i)^-1)``.
3. ``geometric_correction`` - re-express that estimate in the ego's chart (mean + covariance
   transported through ``J^-1``).
4. ``cce_fuse``             - convex combination of the two ellipsoids with gain alpha.
5. reset                    - absorb the fused mean into the attitude through ``J``.

The naive baseline runs the same pipeline with every Jacobian replaced by the identity.

The ellipsoids fused in step 4 are the level sets ``{u : u^T P^-1 u <= scale}``.  With
``scale = 1`` they are the one-sigma sets and the shrink factor is ``k = 1 - d^2``; in general
both priors are scaled, fused and the result scaled back, which gives ``k = 1 - d^2 / scale``
with the same mean correction.  The filters default to ``DEFAULT_ELLIPSOID_SCALE``, the
expected squared Mahalanobis length of a 3-D Gaussian error.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
import logging
from typing import List, Optional

import numpy as np
from scipy.optimize import fminbound

from geofuse.errors import EmptyIntersection, GeofuseError
from geofuse.filters.ekf import AgentEstimate
from geofuse.lie.gaussian import (ConcentratedGaussian, absorb_mean, as_spd, change_reference,
                                  symmetrize)
from geofuse.lie.so3 import adjoint_matrix, boxplus, is_rotation, left_jacobian, log_so3

__all__ = [
    "MeasurementKind", "RelativeMeasurement", "SharePacket", "EllipsoidFusionResult",
    "AlphaPolicy", "AlphaPolicyKind", "ProxyKind", "FusionOptions", "FusionEvent",
    "FusionDiagnostics", "angular_to_physical", "preprocess_relative", "geometric_correction",
    "cce_fuse", "fused_determinant", "optimal_alpha", "fuse_relative", "DEFAULT_ELLIPSOID_SCALE",
    "MIN_SHRINK_FACTOR"
]

_log = logging.getLogger(__name__)

ALPHA_LOW = 1e-3
ALPHA_HIGH = 1.0 - 1e-3
ALPHA_GRID_POINTS = 64
ALPHA_XTOL = 1e-6
DEFAULT_ELLIPSOID_SCALE = 3.0
# optimal_alpha never shrinks the combined ellipsoid by more than this
MIN_SHRINK_FACTOR = 0.5


class MeasurementKind(str, Enum):
    PHYSICAL = "physical"
    ANGULAR = "angular"


class ProxyKind(str, Enum):
    MEASUREMENT = "measurement"
    ESTIMATES = "estimates"


class AlphaPolicyKind(str, Enum):
    FIXED = "fixed"
    OPTIMAL = "optimal"


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class RelativeMeasurement:
    """``y = R_j^-1 R_i exp(kappa)`` (physical) or ``z = exp(log(R_j^-1 R_i) + kappa)``."""
    kind: MeasurementKind
    value: np.ndarray
    noise_cov: np.ndarray
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", MeasurementKind(self.kind))
        if not is_rotation(self.value):
            raise ValueError("relative measurement is not a rotation matrix")
        as_spd(self.noise_cov, "relative noise covariance", self.strict)
        object.__setattr__(self, "value", _frozen(self.value))
        object.__setattr__(self, "noise_cov", _frozen(self.noise_cov))

    @classmethod
    def unchecked(cls, kind, value, noise_cov) -> "RelativeMeasurement":
        return cls(kind, value, noise_cov, strict=False)


@dataclass(frozen=True, eq=False)
class SharePacket:
    """What an observing agent broadcasts about one of its neighbours."""
    measurement: RelativeMeasurement
    sender_estimate: AgentEstimate
    sender_id: int
    target_id: int
    timestamp: float

    def __post_init__(self):
        if self.sender_id == self.target_id:
            raise ValueError(f"agent {self.sender_id} cannot share a measurement of itself")


@dataclass(frozen=True, eq=False)
class EllipsoidFusionResult:
    mean_correction: np.ndarray
    cov: np.ndarray
    alpha_used: float
    shrink_factor: float
    mahalanobis_sq: float


@dataclass(frozen=True)
class AlphaPolicy:
    """How the CCE gain is chosen; a fixed 0.5 unless configured otherwise."""
    kind: AlphaPolicyKind = AlphaPolicyKind.FIXED
    alpha: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", AlphaPolicyKind(self.kind))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def fixed(cls, alpha: float) -> "AlphaPolicy":
        return cls(AlphaPolicyKind.FIXED, alpha)

    @classmethod
    def optimal(cls) -> "AlphaPolicy":
        return cls(AlphaPolicyKind.OPTIMAL)


@dataclass(frozen=True)
class FusionOptions:
    """``geometric=False`` turns every coordinate correction off (naive fusion)."""
    geometric: bool = True
    proxy: ProxyKind = ProxyKind.MEASUREMENT
    ellipsoid_scale: float = DEFAULT_ELLIPSOID_SCALE

    def __post_init__(self):
        if not self.ellipsoid_scale > 0.0:
            raise ValueError(f"ellipsoid scale must be positive, got {self.ellipsoid_scale}")


@dataclass(frozen=True)
class FusionEvent:
    timestamp: float
    sender_id: int
    target_id: int
    accepted: bool
    reason: str = ""
    alpha: float = float("nan")
    mahalanobis_sq: float = float("nan")
    shrink_factor: float = float("nan")


class FusionDiagnostics:
    """Collects one :class:`FusionEvent` per packet handed to :func:`fuse_relative`."""

    def __init__(self):
        self.events: List[FusionEvent] = []

    def record(self, event: FusionEvent):
        self.events.append(event)

    @property
    def rejections(self) -> int:
        return sum(1 for e in self.events if not e.accepted)

    @property
    def accepted(self) -> int:
        return sum(1 for e in self.events if e.accepted)


def angular_to_physical(m: RelativeMeasurement,
                        proxy=None,
                        geometric: bool = True) -> RelativeMeasurement:
    """Re-model an angle-axis measurement as a right-translated (physical) one.

    The Jacobian is evaluated at ``log(proxy)``; by default the measurement itself stands in
    for the unknown true relative attitude.
    """
    if m.kind is not MeasurementKind.ANGULAR:
        raise ValueError("angular_to_physical expects an angular measurement")
    if not geometric:
        return RelativeMeasurement(MeasurementKind.PHYSICAL, m.value, m.noise_cov, m.strict)
    anchor = m.value if proxy is None else np.asarray(proxy, dtype=float)
    J = left_jacobian(log_so3(anchor))
    return RelativeMeasurement(MeasurementKind.PHYSICAL,
                               m.value,
                               symmetrize(J @ m.noise_cov @ J.T),
                               strict=m.strict)


def preprocess_relative(pkt: SharePacket, ego: AgentEstimate) -> ConcentratedGaussian:
    """Agent j's view of agent i as a zero-mean concentrated Gaussian."""
    m = pkt.measurement
    if m.kind is not MeasurementKind.PHYSICAL:
        raise ValueError("convert angular measurements with angular_to_physical first")
    sender = pkt.sender_estimate
    A = adjoint_matrix((sender.attitude.T @ ego.attitude).T)
    cov = A @ sender.cov @ A.T + m.noise_cov
    return ConcentratedGaussian.zero_mean(sender.attitude @ m.value,
                                          symmetrize(cov),
                                          strict=m.strict or sender.strict)


def geometric_correction(shared: ConcentratedGaussian,
                         ego: AgentEstimate,
                         geometric: bool = True) -> ConcentratedGaussian:
    """Move ``shared`` into the ego's logarithmic chart around its attitude estimate."""
    if geometric:
        return change_reference(shared, ego.attitude)
    mean = log_so3(ego.attitude.T @ shared.ref_point)
    return ConcentratedGaussian(ego.attitude, mean, shared.cov, strict=shared.strict)


def _check_scale(scale: float) -> float:
    scale = float(scale)
    if not scale > 0.0:
        raise ValueError(f"ellipsoid scale must be positive, got {scale}")
    return scale


def cce_fuse(ego_cov,
             mean,
             shared_cov,
             alpha: float,
             scale: float = 1.0) -> EllipsoidFusionResult:
    """Convex combination of ``E(0, P)`` and ``E(mean, P*)`` with gain ``alpha``.

    ``alpha = 1`` keeps the ego ellipsoid, ``alpha = 0`` adopts the shared one; both are the
    analytic limits of the general formulas, which divide by ``alpha`` and ``1 - alpha``.
    ``scale`` selects the level set fused (see the module docstring); ``mahalanobis_sq`` is
    always the unscaled ``d^2``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    scale = _check_scale(scale)
    P = as_spd(ego_cov, "ego covariance", strict=False)
    P_shared = as_spd(shared_cov, "shared covariance", strict=False)
    mean = np.asarray(mean, dtype=float)
    if alpha == 1.0:
        return EllipsoidFusionResult(np.zeros(3), P.copy(), 1.0, 1.0, 0.0)
    if alpha == 0.0:
        return EllipsoidFusionResult(mean.copy(), P_shared.copy(), 0.0, 1.0, 0.0)
    try:
        P_inv = np.linalg.inv(P)
        P_shared_inv = np.linalg.inv(P_shared)
    except np.linalg.LinAlgError:
        raise ValueError("covariances must be positive definite when 0 < alpha < 1")
    X = symmetrize(np.linalg.inv(alpha * P_inv + (1.0 - alpha) * P_shared_inv))
    combined = P / alpha + P_shared / (1.0 - alpha)
    d2 = float(mean @ np.linalg.solve(combined, mean))
    if d2 >= scale:
        raise EmptyIntersection(f"ellipsoids do not intersect (d^2 = {d2:.6f}, scale {scale:g})",
                                d2)
    k = 1.0 - d2 / scale
    u = X @ ((1.0 - alpha) * (P_shared_inv @ mean))
    return EllipsoidFusionResult(u, k * X, float(alpha), k, d2)


def fused_determinant(ego_cov,
                      mean,
                      shared_cov,
                      alphas,
                      scale: float = 1.0,
                      min_shrink: float = 0.0) -> np.ndarray:
    """``det(P+(alpha))`` for every alpha in ``alphas``.

    ``inf`` marks the alphas whose shrink factor ``1 - d^2 / scale`` is not above zero or falls
    below ``min_shrink``.
    """
    scale = _check_scale(scale)
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    P = np.asarray(ego_cov, dtype=float)
    P_shared = np.asarray(shared_cov, dtype=float)
    mean = np.asarray(mean, dtype=float)
    out = np.full(alphas.shape, np.inf)
    out[alphas <= 0.0] = np.linalg.det(P_shared)
    out[alphas >= 1.0] = np.linalg.det(P)
    inner = (alphas > 0.0) & (alphas < 1.0)
    if np.any(inner):
        a = alphas[inner][:, None, None]
        info = a * np.linalg.inv(P) + (1.0 - a) * np.linalg.inv(P_shared)
        combined = P / a + P_shared / (1.0 - a)
        d2 = np.einsum("i,nij,j->n", mean, np.linalg.inv(combined), mean)
        k = 1.0 - d2 / scale
        feasible = (k > 0.0) & (k >= min_shrink)
        out[inner] = np.where(feasible, k**3 / np.linalg.det(info), np.inf)
    return out


def optimal_alpha(ego_cov,
                  mean,
                  shared_cov,
                  scale: float = 1.0,
                  min_shrink: float = MIN_SHRINK_FACTOR) -> float:
    """Gain minimising ``det(P+)`` among the alphas whose shrink factor is at least
    ``min_shrink``.

    Without the floor the minimum sits where the ellipsoids barely touch and ``P+`` collapses
    to a point.  A coarse grid (plus both endpoints, where the shrink factor is 1) seeds the
    bracket because the determinant is smooth in alpha but not guaranteed unimodal; the
    bracket is then refined with a bounded scalar minimiser.  A flat determinant returns 0.5.
    """
    candidates = np.concatenate(
        ([0.0], np.linspace(ALPHA_LOW, ALPHA_HIGH, ALPHA_GRID_POINTS), [1.0]))
    dets = fused_determinant(ego_cov, mean, shared_cov, candidates, scale, min_shrink)
    finite = np.isfinite(dets)
    if not np.any(finite):
        raise EmptyIntersection("no alpha in [0, 1] gives intersecting ellipsoids")
    best, worst = float(np.min(dets[finite])), float(np.max(dets[finite]))
    if np.all(finite) and worst - best <= 1e-12 * max(abs(best), np.finfo(float).tiny):
        return 0.5

    idx = int(np.argmin(dets))
    lo = max(candidates[max(idx - 1, 0)], ALPHA_LOW)
    hi = min(candidates[min(idx + 1, len(candidates) - 1)], ALPHA_HIGH)
    alpha, value = float(candidates[idx]), float(dets[idx])
    if lo < hi:
        # infeasible alphas get a finite penalty so the parabolic steps stay well defined
        penalty = 2.0 * worst + 1.0

        def objective(a):
            det = float(fused_determinant(ego_cov, mean, shared_cov, [a], scale, min_shrink)[0])
            return det if np.isfinite(det) else penalty

        refined = float(fminbound(objective, lo, hi, xtol=ALPHA_XTOL))
        refined_value = objective(refined)
        if refined_value < value:
            alpha, value = refined, refined_value
    return alpha


def _reject(sink, pkt: SharePacket, reason: str, **extra):
    _log.debug(f"rejected packet {pkt.sender_id}->{pkt.target_id} at t={pkt.timestamp:.3f}: "
               f"{reason}")
    if sink is not None:
        sink.record(
            FusionEvent(pkt.timestamp, pkt.sender_id, pkt.target_id, False, reason, **extra))


def fuse_relative(ego: AgentEstimate,
                  pkt: SharePacket,
                  alpha_policy: AlphaPolicy = AlphaPolicy(),
                  options: FusionOptions = FusionOptions(),
                  sink: Optional[FusionDiagnostics] = None) -> AgentEstimate:
    """Full preprocessing, correction, CCE fusion and reset of one shared packet.

    Failures (empty intersection, chart violations) leave ``ego`` unchanged and are recorded
    in ``sink`` as rejections.
    """
    try:
        m = pkt.measurement
        if m.kind is MeasurementKind.ANGULAR:
            proxy = None
            if options.proxy is ProxyKind.ESTIMATES:
                proxy = pkt.sender_estimate.attitude.T @ ego.attitude
            pkt = replace(pkt,
                          measurement=angular_to_physical(m, proxy, geometric=options.geometric))
        shared = preprocess_relative(pkt, ego)
        corrected = geometric_correction(shared, ego, geometric=options.geometric)
        if alpha_policy.kind is AlphaPolicyKind.OPTIMAL:
            alpha = optimal_alpha(ego.cov, corrected.mean, corrected.cov, options.ellipsoid_scale)
        else:
            alpha = alpha_policy.alpha
        result = cce_fuse(ego.cov, corrected.mean, corrected.cov, alpha, options.ellipsoid_scale)

        strict = ego.strict and corrected.strict
        if options.geometric:
            posterior = absorb_mean(
                ConcentratedGaussian(ego.attitude, result.mean_correction, result.cov, strict))
        else:
            posterior = ConcentratedGaussian.zero_mean(
                boxplus(ego.attitude, result.mean_correction), result.cov, strict)
    except EmptyIntersection as e:
        _reject(sink, pkt, "empty intersection", mahalanobis_sq=e.mahalanobis_sq or np.nan)
        return ego
    except (GeofuseError, np.linalg.LinAlgError) as e:
        _reject(sink, pkt, str(e))
        return ego

    if sink is not None:
        sink.record(
            FusionEvent(pkt.timestamp, pkt.sender_id, pkt.target_id, True, "", result.alpha_used,
                        result.mahalanobis_sq, result.shrink_factor))
    return AgentEstimate(posterior.ref_point, posterior.cov, ego.time, strict=posterior.strict)
