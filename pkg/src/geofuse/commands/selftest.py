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

"""Fast numerical oracle suite run by ``geofuse selftest``.

Each group returns the worst value it measured next to the tolerance it was held to, so a
failing report says by how much.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import time
from typing import Callable, List

import numpy as np

from geofuse.errors import EmptyIntersection
from geofuse.filters.fusion import cce_fuse, optimal_alpha
from geofuse.lie.gaussian import (ConcentratedGaussian, absorb_mean, log_density_batch, sample,
                                  symmetrize)
from geofuse.lie.so3 import (adjoint_matrix, boxplus, exp_so3, left_jacobian, log_so3, vee,
                             wedge)

__all__ = [
    "GroupResult", "run_selftest", "format_report", "perturbed_jacobian", "check_jacobian_fd",
    "check_exp_log", "check_adjoint", "check_orthogonality_drift", "check_cce_containment",
    "check_absorb_mean_kl", "random_rotation", "random_spd"
]

_log = logging.getLogger(__name__)

_I3 = np.eye(3)


@dataclass(frozen=True)
class GroupResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    seconds: float = 0.0


def random_rotation(rng: np.random.Generator, max_angle: float = np.pi) -> np.ndarray:
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    return exp_so3(rng.uniform(0.0, max_angle) * axis)


def random_spd(rng: np.random.Generator, low: float = 0.02, high: float = 0.3) -> np.ndarray:
    R = random_rotation(rng)
    return symmetrize(R @ np.diag(rng.uniform(low, high, size=3)) @ R.T)


def perturbed_jacobian(eps: float) -> Callable[[np.ndarray], np.ndarray]:
    """``left_jacobian`` with its correction terms scaled by ``1 + eps``."""

    def jacobian(u):
        return _I3 + (1.0 + eps) * (left_jacobian(u) - _I3)

    return jacobian


def check_jacobian_fd(rng, jacobian=left_jacobian, samples: int = 50, step: float = 1e-5,
                      tol: float = 1e-5) -> GroupResult:
    """``exp(-u) d/dt exp(u + t w)|0`` against ``(J_u w)^`` by central differences."""
    worst = 0.0
    for _ in range(samples):
        direction = rng.standard_normal(3)
        u = rng.uniform(0.05, 3.0) * direction / np.linalg.norm(direction)
        w = rng.standard_normal(3)
        derivative = (exp_so3(u + step * w) - exp_so3(u - step * w)) / (2.0 * step)
        err = np.linalg.norm(exp_so3(u).T @ derivative - wedge(jacobian(u) @ w))
        worst = max(worst, float(err))
    return GroupResult("jacobian_fd", worst <= tol, worst, tol)


def check_exp_log(rng, samples: int = 1000, tol: float = 1e-9) -> GroupResult:
    worst = 0.0
    for _ in range(samples):
        direction = rng.standard_normal(3)
        v = rng.uniform(0.0, np.pi - 0.01) * direction / np.linalg.norm(direction)
        worst = max(worst, float(np.max(np.abs(log_so3(exp_so3(v)) - v))))
    return GroupResult("exp_log_roundtrip", worst <= tol, worst, tol)


def check_adjoint(rng, samples: int = 100, tol: float = 1e-10) -> GroupResult:
    worst = 0.0
    for _ in range(samples):
        R = random_rotation(rng)
        u = rng.standard_normal(3)
        err = adjoint_matrix(R) @ u - vee(R @ wedge(u) @ R.T)
        worst = max(worst, float(np.max(np.abs(err))))
    return GroupResult("adjoint", worst <= tol, worst, tol)


def check_orthogonality_drift(rng, steps: int = 10_000, tol: float = 1e-9) -> GroupResult:
    R = _I3
    worst = 0.0
    for u in rng.normal(scale=0.1, size=(steps, 3)):
        R = boxplus(R, u)
        worst = max(worst, float(np.linalg.norm(R.T @ R - _I3)))
    return GroupResult("orthogonality_drift", worst <= tol, worst, tol)


def check_cce_containment(rng, fixtures: int = 20, points: int = 4000,
                          tol: float = 1e-9) -> GroupResult:
    """Points of ``E(0, P) & E(mu, P*)`` must lie in the fused ellipsoid.

    Measured value is the largest excess of the fused Mahalanobis distance over 1.
    """
    worst = -np.inf
    accepted = 0
    while accepted < fixtures:
        P, P_shared = random_spd(rng), random_spd(rng)
        mu = rng.normal(scale=0.2, size=3)
        try:
            fused = cce_fuse(P, mu, P_shared, optimal_alpha(P, mu, P_shared))
        except EmptyIntersection:
            continue
        accepted += 1

        # uniform in the unit ball, mapped into E(0, P)
        x = rng.standard_normal((points, 3))
        x *= (rng.uniform(size=points)**(1.0 / 3.0) / np.linalg.norm(x, axis=1))[:, None]
        pts = x @ np.linalg.cholesky(P).T
        offset = pts - mu
        inside = np.einsum("ni,ij,nj->n", offset, np.linalg.inv(P_shared), offset) <= 1.0
        if not np.any(inside):
            continue
        centred = pts[inside] - fused.mean_correction
        dist = np.einsum("ni,ij,nj->n", centred, np.linalg.inv(fused.cov), centred)
        worst = max(worst, float(np.max(dist)) - 1.0)
    return GroupResult("cce_containment", worst <= tol, worst, tol)


def check_absorb_mean_kl(rng, candidates: int = 20, num_samples: int = 50_000,
                         delta: float = 0.05) -> GroupResult:
    """The reset covariance beats every +-5% perturbation of itself in Monte-Carlo KL.

    All candidates are scored on the same draws.  Measured value is the smallest KL margin
    of a candidate over the reset distribution; it must be positive.
    """
    p = ConcentratedGaussian(_I3, np.array([0.3, -0.2, 0.1]), np.diag([0.01, 0.005, 0.008]))
    q = absorb_mean(p)
    X = sample(p, rng, size=num_samples)
    log_p = log_density_batch(p, X)
    base = float(np.mean(log_p - log_density_batch(q, X)))

    L = np.linalg.cholesky(q.cov)
    margin = np.inf
    for _ in range(candidates):
        R = random_rotation(rng)
        E = R @ np.diag(rng.choice([-1.0, 1.0], size=3)) @ R.T
        cov = symmetrize(L @ (_I3 + delta * symmetrize(E)) @ L.T)
        candidate = ConcentratedGaussian.zero_mean(q.ref_point, cov)
        kl = float(np.mean(log_p - log_density_batch(candidate, X)))
        margin = min(margin, kl - base)
    return GroupResult("absorb_mean_kl", margin > 0.0, margin, 0.0)


def run_selftest(seed: int = 0, perturb_jacobian: float = 0.0) -> List[GroupResult]:
    jacobian = perturbed_jacobian(perturb_jacobian) if perturb_jacobian else left_jacobian
    groups = [
        lambda rng: check_jacobian_fd(rng, jacobian=jacobian),
        check_exp_log,
        check_adjoint,
        check_orthogonality_drift,
        check_cce_containment,
        check_absorb_mean_kl,
    ]
    results = []
    for index, group in enumerate(groups):
        rng = np.random.default_rng([seed, index])
        start = time.perf_counter()
        result = group(rng)
        elapsed = time.perf_counter() - start
        result = GroupResult(result.name, result.passed, result.measured, result.tolerance,
                             elapsed)
        _log.debug(f"{result.name}: measured {result.measured:.3e} in {elapsed:.2f}s")
        results.append(result)
    return results


def format_report(results: List[GroupResult]) -> str:
    lines = [f"{'group':<22} {'status':<6} {'measured':>12} {'tolerance':>12} {'time':>8}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<22} {status:<6} {r.measured:>12.3e} {r.tolerance:>12.3e} "
                     f"{r.seconds:>7.2f}s")
    return "\n".join(lines)
