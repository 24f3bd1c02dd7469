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

"""Concentrated Gaussian distributions on SO(3).

A concentrated Gaussian ``GP_Xhat(mu, Sigma)`` is the push-forward of the Euclidean normal
``N(mu, Sigma)`` through ``x -> Xhat exp(x^)``.  Its density is evaluated with the Euclidean
normaliser ``-1/2 log((2 pi)^3 det Sigma)``, which is the right constant only while Sigma is
concentrated well inside the logarithm chart.

The two coordinate changes used throughout the filters live here:

* :func:`absorb_mean` moves a non-zero mean into the reference point,
  ``GP_X1(mu, S) ~= GP_{X1 exp(mu)}(0, J_mu S J_mu^T)``.
* :func:`change_reference` re-expresses a zero-mean distribution around another point,
  ``GP_X1(0, S) ~= GP_X2(mu2, J_mu2^-1 S J_mu2^-T)`` with ``mu2 = log(X2^-1 X1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.stats import multivariate_normal

from geofuse.errors import DomainError
from geofuse.lie.so3 import (as_vec3, boxplus, exp_so3_batch, is_rotation, left_jacobian,
                             left_jacobian_inv, log_so3, log_so3_batch)

__all__ = [
    "ConcentratedGaussian", "as_spd", "symmetrize", "log_density", "log_density_batch",
    "log_normalizer", "sample", "absorb_mean", "absorb_mean_parts", "change_reference",
    "kl_divergence_mc", "empirical_covariance"
]

_log = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


def as_spd(M, name: str = "covariance", strict: bool = True) -> np.ndarray:
    """Validate a 3x3 covariance.

    ``strict`` demands positive definiteness; otherwise a positive semi-definite (degenerate)
    matrix is accepted, which only test fixtures rely on.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.T)) > SYMMETRY_TOLERANCE * scale:
        raise ValueError(f"{name} is not symmetric")
    if strict:
        try:
            np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            raise ValueError(f"{name} is not positive definite")
    elif np.min(np.linalg.eigvalsh(M)) < -1e-12 * scale:
        raise ValueError(f"{name} is not positive semi-definite")
    return M


def symmetrize(P, check: bool = True) -> np.ndarray:
    """``(P + P^T) / 2``; ``check`` asserts P was symmetric to round-off beforehand."""
    P = np.asarray(P, dtype=float)
    if check:
        scale = max(1.0, float(np.max(np.abs(P))))
        assert np.max(np.abs(P - P.T)) < SYMMETRY_TOLERANCE * scale, "covariance lost symmetry"
    return 0.5 * (P + P.T)


@dataclass(frozen=True, eq=False)
class ConcentratedGaussian:
    """Reference point, mean in local coordinates and covariance of a concentrated Gaussian."""
    ref_point: np.ndarray
    mean: np.ndarray
    cov: np.ndarray
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not is_rotation(self.ref_point):
            raise ValueError("reference point is not a rotation matrix")
        mean = as_vec3(self.mean)
        if np.linalg.norm(mean) >= np.pi:
            raise DomainError(f"mean {mean} leaves the logarithm chart")
        as_spd(self.cov, "covariance", self.strict)
        object.__setattr__(self, "ref_point", _frozen(self.ref_point))
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(self.cov))

    @classmethod
    def zero_mean(cls, ref_point, cov, strict: bool = True) -> "ConcentratedGaussian":
        return cls(ref_point, np.zeros(3), cov, strict=strict)

    @classmethod
    def unchecked(cls, ref_point, mean, cov) -> "ConcentratedGaussian":
        """Accepts degenerate (singular) covariances; meant for test fixtures."""
        return cls(ref_point, mean, cov, strict=False)

    @property
    def is_zero_mean(self) -> bool:
        return not np.any(self.mean)


def log_normalizer(d: ConcentratedGaussian) -> float:
    return -0.5 * float(np.log((2.0 * np.pi)**3 * np.linalg.det(d.cov)))


def log_density(d: ConcentratedGaussian, X) -> float:
    x = log_so3(d.ref_point.T @ np.asarray(X, dtype=float))
    return float(multivariate_normal.logpdf(x, mean=d.mean, cov=d.cov))


def log_density_batch(d: ConcentratedGaussian, X) -> np.ndarray:
    x = log_so3_batch(d.ref_point.T @ np.asarray(X, dtype=float))
    return np.atleast_1d(multivariate_normal.logpdf(x, mean=d.mean, cov=d.cov))


def sample(d: ConcentratedGaussian, rng: np.random.Generator, size: Optional[int] = None):
    """Draw ``Xhat exp((mu + n)^)`` with ``n ~ N(0, Sigma)``.

    Returns a single rotation, or a ``(size, 3, 3)`` stack when ``size`` is given.
    """
    noise = rng.multivariate_normal(np.zeros(3), d.cov, size=size)
    if size is None:
        return boxplus(d.ref_point, d.mean + noise)
    return d.ref_point @ exp_so3_batch(d.mean + noise)


def absorb_mean_parts(ref_point, mean, cov) -> Tuple[np.ndarray, np.ndarray]:
    """Reference point and covariance of :func:`absorb_mean` for already validated arrays.

    The filters reset through this directly to skip re-validating every intermediate
    distribution.
    """
    if np.linalg.norm(mean) >= np.pi:
        raise DomainError(f"mean {mean} leaves the logarithm chart")
    if not np.any(mean):
        return ref_point, cov
    J = left_jacobian(mean)
    return boxplus(ref_point, mean), symmetrize(J @ cov @ J.T, check=False)


def absorb_mean(d: ConcentratedGaussian) -> ConcentratedGaussian:
    """Zero-mean concentrated Gaussian closest (in KL, to second order) to ``d``."""
    ref, cov = absorb_mean_parts(d.ref_point, d.mean, d.cov)
    return ConcentratedGaussian(ref, np.zeros(3), cov, strict=d.strict)


def change_reference(d: ConcentratedGaussian, X2) -> ConcentratedGaussian:
    """Express the zero-mean ``d`` around the reference point ``X2``."""
    if not np.allclose(d.mean, 0.0, rtol=0.0, atol=1e-12):
        raise ValueError("change_reference expects a zero-mean distribution")
    X2 = np.asarray(X2, dtype=float)
    mu2 = log_so3(X2.T @ d.ref_point)
    Jinv = left_jacobian_inv(mu2)
    return ConcentratedGaussian(X2, mu2, symmetrize(Jinv @ d.cov @ Jinv.T), strict=d.strict)


def kl_divergence_mc(p: ConcentratedGaussian,
                     q: ConcentratedGaussian,
                     rng: np.random.Generator,
                     num_samples: int = 10_000) -> float:
    """Monte-Carlo estimate of ``KL(p || q) = E_p[log p - log q]``.

    Candidates compared under identically seeded generators see identical draws from ``p``,
    so their estimates differ only through ``q``.
    """
    X = sample(p, rng, size=num_samples)
    return float(np.mean(log_density_batch(p, X) - log_density_batch(q, X)))


def empirical_covariance(X, ref_point, center=None) -> np.ndarray:
    """Second moment of ``log(ref^-1 X) - center`` over a stack of rotations."""
    x = log_so3_batch(np.asarray(ref_point, dtype=float).T @ X)
    if center is not None:
        x = x - np.asarray(center, dtype=float)
    return x.T @ x / x.shape[0]
