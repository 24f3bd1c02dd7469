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

import math

import numpy as np
import pytest
from scipy.linalg import expm

from geofuse.errors import DomainError
from geofuse.lie.so3 import (JACOBIAN_SMALL_ANGLE, ad_matrix, adjoint_matrix, as_vec3, boxplus,
                             exp_and_jacobian, exp_so3, exp_so3_batch, is_rotation,
                             left_jacobian, left_jacobian_inv, log_so3, log_so3_batch,
                             project_to_so3, renormalize, rotation_angle, vee, wedge)


def _random_vectors(rng, count, low, high):
    directions = rng.standard_normal((count, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    return rng.uniform(low, high, size=count)[:, None] * directions


def _series_exp(v, order=12):
    K = wedge(v)
    out = np.eye(3)
    term = np.eye(3)
    for k in range(1, order + 1):
        term = term @ K / k
        out = out + term
    return out


def _series_jacobian(u, order=12):
    # sum of (-u^)^k / (k + 1)!
    K = -wedge(u)
    out = np.eye(3)
    term = np.eye(3)
    for k in range(1, order + 1):
        term = term @ K / (k + 1)
        out = out + term
    return out


def test_wedge_is_cross_product(rng):
    for _ in range(20):
        v, w = rng.standard_normal(3), rng.standard_normal(3)
        np.testing.assert_allclose(wedge(v) @ w, np.cross(v, w), atol=1e-14)
        M = wedge(v)
        assert np.max(np.abs(M + M.T)) <= 1e-12


def test_vee_inverts_wedge(rng):
    v = rng.standard_normal(3)
    np.testing.assert_array_equal(vee(wedge(v)), v)


def test_vee_rejects_non_skew_matrix():
    with pytest.raises(DomainError) as excinfo:
        vee(np.eye(3))
    assert "not skew-symmetric" in str(excinfo.value)


@pytest.mark.parametrize("bad", [[1.0, 2.0], [0.0, np.nan, 1.0], [[1.0, 0.0, 0.0]]])
def test_as_vec3_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        as_vec3(bad)


def test_exp_of_zero_is_identity():
    np.testing.assert_array_equal(exp_so3(np.zeros(3)), np.eye(3))


def test_exp_matches_matrix_exponential(rng):
    for v in _random_vectors(rng, 50, 0.0, 3.0):
        np.testing.assert_allclose(exp_so3(v), expm(wedge(v)), atol=1e-12)


def test_exp_matches_truncated_series(rng):
    for v in _random_vectors(rng, 50, 1e-8, 1.0):
        np.testing.assert_allclose(exp_so3(v), _series_exp(v), atol=1e-9)


def test_exp_small_angle_branch():
    v = np.array([1e-7, -2e-7, 3e-8])
    np.testing.assert_allclose(exp_so3(v), _series_exp(v), atol=1e-15)
    assert is_rotation(exp_so3(v))


def test_log_exp_round_trip(rng):
    for v in _random_vectors(rng, 1000, 0.0, math.pi - 0.01):
        np.testing.assert_allclose(log_so3(exp_so3(v)), v, atol=1e-9)


@pytest.mark.parametrize("angle", [math.pi - 1e-2, math.pi - 1e-4, math.pi - 1e-5])
def test_log_near_pi_recovers_axis(angle):
    axis = np.array([1.0, -2.0, 0.5])
    axis /= np.linalg.norm(axis)
    np.testing.assert_allclose(log_so3(exp_so3(angle * axis)), angle * axis, atol=1e-8)


def test_log_raises_at_pi():
    with pytest.raises(DomainError):
        log_so3(exp_so3([math.pi, 0.0, 0.0]))
    with pytest.raises(DomainError):
        log_so3(np.diag([1.0, -1.0, -1.0]))


def test_batch_functions_match_scalar(rng):
    v = _random_vectors(rng, 64, 0.0, 3.0)
    v[0] = 0.0
    v[1] = [1e-8, 0.0, 0.0]
    v[2] = [0.0, math.pi - 1e-3, 0.0]
    R = exp_so3_batch(v)
    for k in range(len(v)):
        np.testing.assert_allclose(R[k], exp_so3(v[k]), atol=1e-14)
    np.testing.assert_allclose(log_so3_batch(R), np.stack([log_so3(r) for r in R]), atol=1e-12)


def test_log_batch_raises_outside_chart():
    R = exp_so3_batch([[0.1, 0.0, 0.0], [math.pi, 0.0, 0.0]])
    with pytest.raises(DomainError):
        log_so3_batch(R)


def test_boxplus_is_right_multiplication(rng):
    R = exp_so3(rng.standard_normal(3))
    u = rng.standard_normal(3)
    np.testing.assert_allclose(boxplus(R, u), R @ exp_so3(u), atol=1e-12)


def test_boxplus_keeps_orthogonality(rng):
    R = np.eye(3)
    for u in rng.normal(scale=0.1, size=(10_000, 3)):
        R = boxplus(R, u)
    assert np.linalg.norm(R.T @ R - np.eye(3)) <= 1e-9
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-9)


def test_project_to_so3(rng):
    R = exp_so3(rng.standard_normal(3))
    noisy = R + 1e-6 * rng.standard_normal((3, 3))
    projected = project_to_so3(noisy)
    assert is_rotation(projected, tol=1e-12)
    np.testing.assert_allclose(projected, R, atol=1e-5)
    with pytest.raises(DomainError):
        project_to_so3(np.diag([1.0, 1.0, -1.0]))


def test_rotation_angle():
    assert rotation_angle(np.eye(3)) == 0.0
    assert rotation_angle(exp_so3([0.0, 0.3, 0.0])) == pytest.approx(0.3, abs=1e-12)
    # traces drifting just outside [-1, 3] are clamped
    assert rotation_angle(1.0000000001 * np.eye(3)) == 0.0


def test_jacobian_times_inverse_is_identity(rng):
    for u in _random_vectors(rng, 100, 1e-6, 3.0):
        np.testing.assert_allclose(left_jacobian(u) @ left_jacobian_inv(u), np.eye(3), atol=1e-8)


def test_jacobian_finite_differences(rng):
    step = 1e-5
    for u in _random_vectors(rng, 50, 0.05, 3.0):
        w = rng.standard_normal(3)
        derivative = (exp_so3(u + step * w) - exp_so3(u - step * w)) / (2.0 * step)
        err = np.linalg.norm(exp_so3(u).T @ derivative - wedge(left_jacobian(u) @ w))
        assert err <= 1e-5


def test_jacobian_small_angle_limit():
    np.testing.assert_allclose(left_jacobian(np.zeros(3)), np.eye(3))
    np.testing.assert_allclose(left_jacobian_inv(np.zeros(3)), np.eye(3))
    u = np.array([1e-5, 0.0, 0.0])
    np.testing.assert_allclose(left_jacobian(u) @ left_jacobian_inv(u), np.eye(3), atol=1e-12)


def test_jacobian_inverse_finite_at_pi():
    u = np.array([0.0, 0.0, math.pi])
    Jinv = left_jacobian_inv(u)
    assert np.all(np.isfinite(Jinv))
    np.testing.assert_allclose(left_jacobian(u) @ Jinv, np.eye(3), atol=1e-10)


def test_jacobian_inverse_singular_at_two_pi():
    with pytest.raises(DomainError):
        left_jacobian_inv([2.0 * math.pi, 0.0, 0.0])


def test_adjoint_matrix_definition(rng):
    for _ in range(100):
        R = exp_so3(_random_vectors(rng, 1, 0.0, math.pi)[0])
        u = rng.standard_normal(3)
        np.testing.assert_allclose(adjoint_matrix(R) @ u, vee(R @ wedge(u) @ R.T), atol=1e-10)
        np.testing.assert_array_equal(adjoint_matrix(R), R)


def test_ad_matrix_is_commutator(rng):
    for _ in range(20):
        u, v = rng.standard_normal(3), rng.standard_normal(3)
        commutator = wedge(u) @ wedge(v) - wedge(v) @ wedge(u)
        np.testing.assert_allclose(ad_matrix(u) @ v, vee(commutator), atol=1e-10)


def test_jacobian_of_negated_vector_is_transpose(rng):
    for u in _random_vectors(rng, 50, 0.0, 3.0):
        np.testing.assert_allclose(left_jacobian(-u), left_jacobian(u).T, atol=1e-15)


def test_jacobian_matches_series(rng):
    for u in _random_vectors(rng, 20, 1e-3, 0.5):
        np.testing.assert_allclose(left_jacobian(u), _series_jacobian(u, order=20), atol=1e-12)


@pytest.mark.parametrize("offset", [-1e-9, 1e-9])
def test_jacobian_is_continuous_at_small_angle_switch(rng, offset):
    direction = rng.standard_normal(3)
    u = (JACOBIAN_SMALL_ANGLE + offset) * direction / np.linalg.norm(direction)
    assert np.max(np.abs(left_jacobian(u) - _series_jacobian(u))) <= 1e-12


def test_adjoint_commutes_with_exponential(rng):
    for _ in range(50):
        R = exp_so3(_random_vectors(rng, 1, 0.0, math.pi)[0])
        u = _random_vectors(rng, 1, 0.0, 3.0)[0]
        np.testing.assert_allclose(exp_so3(adjoint_matrix(R) @ u), R @ exp_so3(u) @ R.T,
                                   atol=1e-8)


def test_exp_and_jacobian_agree_with_separate_calls(rng):
    vectors = [np.zeros(3), np.array([1e-7, 0.0, 0.0]), np.array([0.0, 5e-5, 0.0])]
    for u in vectors + list(_random_vectors(rng, 20, 1e-3, 3.0)):
        E, J = exp_and_jacobian(u)
        np.testing.assert_allclose(E, exp_so3(u), atol=1e-15)
        np.testing.assert_allclose(J, left_jacobian(u), atol=1e-15)


def test_renormalize_projects_only_drifted_matrices(rng):
    R = exp_so3([0.3, -0.2, 1.1])
    assert renormalize(R) is R
    drifted = R + 1e-7 * rng.standard_normal((3, 3))
    fixed = renormalize(drifted)
    assert is_rotation(fixed, tol=1e-12)
    np.testing.assert_allclose(fixed, R, atol=1e-6)
