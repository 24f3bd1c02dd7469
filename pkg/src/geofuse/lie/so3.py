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

"""Exact and numerically robust SO(3) / so(3) primitives.

Vectors are ``numpy`` arrays of shape ``(3,)`` and matrices are dense ``(3, 3)`` arrays.
Every function is pure; nothing here keeps state between calls.

The Jacobian follows the convention ``exp(u + d) ~= exp(u) exp(J_u d)``, i.e. the
right-trivialised differential of the exponential (``left_jacobian`` below):

    J_u     = I - (1 - cos|u|)/|u|^2 u^ + (|u| - sin|u|)/|u|^3 u^2
    J_u^-1  = I + 1/2 u^ + (1/|u|^2 - (1 + cos|u|)/(2|u| sin|u|)) u^2
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np
from scipy.linalg import polar

from geofuse.errors import DomainError

__all__ = [
    "wedge", "vee", "exp_so3", "log_so3", "boxplus", "left_jacobian", "left_jacobian_inv",
    "adjoint_matrix", "ad_matrix", "rotation_angle", "project_to_so3", "exp_so3_batch",
    "log_so3_batch", "wedge_batch", "as_vec3", "is_rotation", "renormalize", "exp_and_jacobian"
]

_log = logging.getLogger(__name__)

EXP_SMALL_ANGLE = 1e-6
JACOBIAN_SMALL_ANGLE = 1e-4
LOG_PI_MARGIN = 1e-6
JACOBIAN_INV_MARGIN = 1e-6
SKEW_TOLERANCE = 1e-9
ORTHO_TOLERANCE = 1e-12
ROTATION_TOLERANCE = 1e-9
# Below this cosine the axis is recovered from the symmetric part of R.
_NEAR_PI_COS = -0.99

_I3 = np.eye(3)


def as_vec3(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3, ):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"vector has non-finite entries: {arr}")
    return arr


def is_rotation(R, tol: float = ROTATION_TOLERANCE) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        return False
    return bool(
        np.linalg.norm(R.T @ R - _I3) <= tol and abs(np.linalg.det(R) - 1.0) <= tol)


def wedge(v) -> np.ndarray:
    """Skew-symmetric matrix with ``wedge(v) @ w == cross(v, w)``."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def wedge_batch(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1, 3)
    out = np.zeros((v.shape[0], 3, 3))
    out[:, 0, 1] = -v[:, 2]
    out[:, 0, 2] = v[:, 1]
    out[:, 1, 0] = v[:, 2]
    out[:, 1, 2] = -v[:, 0]
    out[:, 2, 0] = -v[:, 1]
    out[:, 2, 1] = v[:, 0]
    return out


def vee(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    asymmetry = float(np.max(np.abs(M + M.T)))
    if asymmetry > SKEW_TOLERANCE:
        raise DomainError(f"matrix is not skew-symmetric (max |M + M^T| = {asymmetry:.3e})")
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def _exp_coefficients(theta: float):
    if theta < EXP_SMALL_ANGLE:
        t2 = theta * theta
        return 1.0 - t2 / 6.0, 0.5 - t2 / 24.0
    s = np.sin(0.5 * theta)
    return np.sin(theta) / theta, 2.0 * s * s / (theta * theta)


def exp_so3(v) -> np.ndarray:
    """Rodrigues' formula for ``exp(v^)``."""
    v = as_vec3(v)
    a, b = _exp_coefficients(float(np.linalg.norm(v)))
    K = wedge(v)
    return _I3 + a * K + b * (K @ K)


def exp_so3_batch(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1, 3)
    theta = np.linalg.norm(v, axis=1)
    small = theta < EXP_SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - t2 / 24.0, 2.0 * np.sin(0.5 * safe)**2 / (safe * safe))
    K = wedge_batch(v)
    return _I3 + a[:, None, None] * K + b[:, None, None] * (K @ K)


def rotation_angle(R) -> float:
    """Angle of ``R`` in [0, pi] through the clamped arccos of its trace."""
    cos_theta = 0.5 * (float(np.trace(R)) - 1.0)
    return float(np.arccos(np.clip(cos_theta, -1.0, 1.0)))


def _log_near_pi(R, w, theta, cos_theta):
    # (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) a a^T
    B = 0.5 * (R + R.T) - cos_theta * _I3
    k = int(np.argmax(np.diag(B)))
    one_minus_cos = 1.0 - cos_theta
    a_k = np.sqrt(max(B[k, k], 0.0) / one_minus_cos)
    axis = B[:, k] / (one_minus_cos * a_k)
    axis /= np.linalg.norm(axis)
    if axis @ w < 0.0:
        axis = -axis
    return theta * axis


def _log_parts(R):
    w = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    sin_theta = float(np.linalg.norm(w))
    cos_theta = 0.5 * (float(np.trace(R)) - 1.0)
    return w, sin_theta, cos_theta, float(np.arctan2(sin_theta, cos_theta))


def log_so3(R) -> np.ndarray:
    """Inverse of :func:`exp_so3` on rotations strictly below pi radians."""
    R = np.asarray(R, dtype=float)
    w, sin_theta, cos_theta, theta = _log_parts(R)
    if theta >= np.pi - LOG_PI_MARGIN:
        raise DomainError(f"rotation angle {theta:.9f} rad is outside the logarithm chart")
    if theta < EXP_SMALL_ANGLE:
        return w * (1.0 + theta * theta / 6.0)
    if cos_theta < _NEAR_PI_COS:
        return _log_near_pi(R, w, theta, cos_theta)
    return (theta / sin_theta) * w


def log_so3_batch(R) -> np.ndarray:
    R = np.asarray(R, dtype=float).reshape(-1, 3, 3)
    w = 0.5 * np.stack(
        [R[:, 2, 1] - R[:, 1, 2], R[:, 0, 2] - R[:, 2, 0], R[:, 1, 0] - R[:, 0, 1]], axis=1)
    sin_theta = np.linalg.norm(w, axis=1)
    cos_theta = 0.5 * (np.trace(R, axis1=1, axis2=2) - 1.0)
    theta = np.arctan2(sin_theta, cos_theta)
    outside = theta >= np.pi - LOG_PI_MARGIN
    if np.any(outside):
        raise DomainError(
            f"{int(np.count_nonzero(outside))} of {len(theta)} rotations are outside the "
            "logarithm chart")
    out = np.empty_like(w)
    small = theta < EXP_SMALL_ANGLE
    near_pi = cos_theta < _NEAR_PI_COS
    regular = ~(small | near_pi)
    out[small] = w[small] * (1.0 + theta[small]**2 / 6.0)[:, None]
    out[regular] = (theta[regular] / sin_theta[regular])[:, None] * w[regular]
    for idx in np.flatnonzero(near_pi):
        out[idx] = _log_near_pi(R[idx], w[idx], theta[idx], cos_theta[idx])
    return out


def project_to_so3(M) -> np.ndarray:
    """Nearest rotation to ``M`` in the Frobenius norm (orthogonal polar factor)."""
    U, _ = polar(np.asarray(M, dtype=float))
    if np.linalg.det(U) < 0.0:
        raise DomainError("matrix is a reflection and cannot be projected onto SO(3)")
    return U


def renormalize(R) -> np.ndarray:
    """``R`` itself, or its projection onto SO(3) once round-off has drifted it off."""
    drift = np.linalg.norm(R.T @ R - _I3)
    if drift > ORTHO_TOLERANCE:
        return project_to_so3(R)
    return R


def boxplus(R, u) -> np.ndarray:
    """``R exp(u^)``, re-orthonormalised once the product drifts off SO(3)."""
    return renormalize(np.asarray(R, dtype=float) @ exp_so3(u))


def _jacobian_coefficients(theta: float):
    if theta < JACOBIAN_SMALL_ANGLE:
        return 0.5, 1.0 / 6.0
    s = np.sin(0.5 * theta)
    return 2.0 * s * s / (theta * theta), (theta - np.sin(theta)) / theta**3


def left_jacobian(u) -> np.ndarray:
    u = as_vec3(u)
    a, b = _jacobian_coefficients(float(np.linalg.norm(u)))
    K = wedge(u)
    return _I3 - a * K + b * (K @ K)


def exp_and_jacobian(u) -> Tuple[np.ndarray, np.ndarray]:
    """``(exp_so3(u), left_jacobian(u))`` from one norm and one ``u^ u^`` product."""
    u = as_vec3(u)
    theta = float(np.linalg.norm(u))
    a, b = _exp_coefficients(theta)
    c, e = _jacobian_coefficients(theta)
    K = wedge(u)
    K2 = K @ K
    return _I3 + a * K + b * K2, _I3 - c * K + e * K2


def left_jacobian_inv(u) -> np.ndarray:
    u = as_vec3(u)
    theta = float(np.linalg.norm(u))
    if theta >= 2.0 * np.pi - JACOBIAN_INV_MARGIN:
        raise DomainError(f"Jacobian is singular at |u| = {theta:.9f}")
    if theta < JACOBIAN_SMALL_ANGLE:
        c = 1.0 / 12.0
    else:
        # (1 + cos t) / sin t == 1 / tan(t / 2) keeps the removable point t = pi finite.
        c = 1.0 / (theta * theta) - 1.0 / (2.0 * theta * np.tan(0.5 * theta))
    K = wedge(u)
    return _I3 + 0.5 * K + c * (K @ K)


def adjoint_matrix(R) -> np.ndarray:
    """Matrix of ``u -> vee(R u^ R^T)``; on SO(3) this is ``R`` itself."""
    return np.array(R, dtype=float, copy=True)


def ad_matrix(u) -> np.ndarray:
    """Matrix of ``v -> vee([u^, v^])``; on so(3) this is ``u^``."""
    return wedge(as_vec3(u))
