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

from geofuse.errors import EmptyIntersection
from geofuse.filters.ekf import AgentEstimate, rotation_error
from geofuse.filters.fusion import (DEFAULT_ELLIPSOID_SCALE, MIN_SHRINK_FACTOR, AlphaPolicy,
                                    AlphaPolicyKind, FusionDiagnostics,
                                    FusionOptions, MeasurementKind, ProxyKind,
                                    RelativeMeasurement, SharePacket, angular_to_physical,
                                    cce_fuse, fuse_relative, fused_determinant,
                                    geometric_correction, optimal_alpha, preprocess_relative)
from geofuse.lie.gaussian import ConcentratedGaussian, empirical_covariance, symmetrize
from geofuse.lie.so3 import (exp_so3, exp_so3_batch, left_jacobian, left_jacobian_inv, log_so3,
                             log_so3_batch)
from geofuse.utils.math_utils import relative_frobenius_error

Q = np.diag([0.25, 0.09, 0.04])


def _spd(rng, low, high):
    R = exp_so3(rng.standard_normal(3))
    return symmetrize(R @ np.diag(rng.uniform(low, high, size=3)) @ R.T)


def _rotation(rng):
    return exp_so3(rng.uniform(0.0, 3.0) * rng.standard_normal(3) / math.sqrt(3.0))


def _packet(value, sender_attitude, sender_cov, noise_cov=Q, kind=MeasurementKind.PHYSICAL,
            timestamp=1.0):
    m = RelativeMeasurement(kind, value, noise_cov)
    return SharePacket(m, AgentEstimate(sender_attitude, sender_cov), 1, 0, timestamp)


def test_relative_measurement_validation():
    with pytest.raises(ValueError):
        RelativeMeasurement("bogus", np.eye(3), Q)
    with pytest.raises(ValueError, match="not a rotation"):
        RelativeMeasurement(MeasurementKind.PHYSICAL, np.zeros((3, 3)), Q)
    m = RelativeMeasurement.unchecked("angular", np.eye(3), np.zeros((3, 3)))
    assert m.kind is MeasurementKind.ANGULAR
    assert not m.strict


def test_share_packet_rejects_self_measurement():
    m = RelativeMeasurement(MeasurementKind.PHYSICAL, np.eye(3), Q)
    with pytest.raises(ValueError, match="cannot share"):
        SharePacket(m, AgentEstimate(np.eye(3), np.eye(3)), 2, 2, 0.0)


@pytest.mark.parametrize("alpha", [-0.1, 1.5])
def test_alpha_policy_range(alpha):
    with pytest.raises(ValueError):
        AlphaPolicy.fixed(alpha)


def test_alpha_policy_defaults_to_fixed_half():
    assert AlphaPolicy() == AlphaPolicy.fixed(0.5)
    assert AlphaPolicy.optimal().kind is AlphaPolicyKind.OPTIMAL
    assert AlphaPolicy.fixed(0.25).kind is AlphaPolicyKind.FIXED


def test_angular_to_physical_transforms_covariance():
    mu = np.array([0.8, 0.0, 0.0])
    m = RelativeMeasurement(MeasurementKind.ANGULAR, exp_so3(mu), Q)
    out = angular_to_physical(m)
    J = left_jacobian(mu)
    assert out.kind is MeasurementKind.PHYSICAL
    np.testing.assert_array_equal(out.value, m.value)
    np.testing.assert_allclose(out.noise_cov, J @ Q @ J.T, atol=1e-14)


def test_angular_to_physical_matches_sampling(rng):
    mu = np.array([0.8, 0.0, 0.0])
    small_q = 0.05 * Q
    out = angular_to_physical(RelativeMeasurement(MeasurementKind.ANGULAR, exp_so3(mu), small_q))
    kappa = rng.multivariate_normal(np.zeros(3), small_q, size=100_000)
    samples = exp_so3_batch(mu + kappa)
    empirical = empirical_covariance(samples, exp_so3(mu))
    assert relative_frobenius_error(empirical, out.noise_cov) <= 0.10


def test_angular_to_physical_naive_keeps_covariance():
    m = RelativeMeasurement(MeasurementKind.ANGULAR, exp_so3([0.8, 0.0, 0.0]), Q)
    out = angular_to_physical(m, geometric=False)
    np.testing.assert_array_equal(out.noise_cov, Q)


def test_angular_to_physical_uses_proxy():
    m = RelativeMeasurement(MeasurementKind.ANGULAR, exp_so3([0.8, 0.0, 0.0]), Q)
    proxy = exp_so3([0.0, 0.5, 0.0])
    J = left_jacobian([0.0, 0.5, 0.0])
    np.testing.assert_allclose(angular_to_physical(m, proxy).noise_cov, J @ Q @ J.T, atol=1e-14)


def test_angular_to_physical_requires_angular():
    with pytest.raises(ValueError):
        angular_to_physical(RelativeMeasurement(MeasurementKind.PHYSICAL, np.eye(3), Q))


def test_preprocess_with_identity_sender(rng):
    R_i = _rotation(rng)
    P_j = _spd(rng, 0.01, 0.1)
    y = _rotation(rng)
    pkt = _packet(y, np.eye(3), P_j)
    ego = AgentEstimate(R_i, np.eye(3))
    shared = preprocess_relative(pkt, ego)
    np.testing.assert_allclose(shared.ref_point, y, atol=1e-15)
    np.testing.assert_allclose(shared.cov, R_i.T @ P_j @ R_i + Q, atol=1e-14)
    assert shared.is_zero_mean


def test_preprocess_requires_physical():
    pkt = _packet(np.eye(3), np.eye(3), np.eye(3), kind=MeasurementKind.ANGULAR)
    with pytest.raises(ValueError, match="angular_to_physical"):
        preprocess_relative(pkt, AgentEstimate(np.eye(3), np.eye(3)))


def test_preprocess_matches_sampling(rng):
    n = 20_000
    R_i = _rotation(rng)
    R_j_hat = _rotation(rng)
    P_j = _spd(rng, 0.01, 0.05)
    noise = _spd(rng, 0.01, 0.05)
    pkt = _packet(R_j_hat.T @ R_i, R_j_hat, P_j, noise_cov=noise)
    shared = preprocess_relative(pkt, AgentEstimate(R_i, np.eye(3)))

    eps_j = rng.multivariate_normal(np.zeros(3), P_j, size=n)
    kappa = rng.multivariate_normal(np.zeros(3), noise, size=n)
    R_j = R_j_hat @ exp_so3_batch(eps_j)
    y = np.swapaxes(R_j, 1, 2) @ R_i @ exp_so3_batch(kappa)
    errors = log_so3_batch(np.swapaxes(y, 1, 2) @ R_j_hat.T @ R_i)
    empirical = errors.T @ errors / n
    assert relative_frobenius_error(empirical, shared.cov) <= 0.15


def test_geometric_correction(rng):
    ego_attitude = _rotation(rng)
    ref = ego_attitude @ exp_so3([0.2, -0.3, 0.1])
    cov = _spd(rng, 0.01, 0.1)
    shared = ConcentratedGaussian.zero_mean(ref, cov)
    ego = AgentEstimate(ego_attitude, np.eye(3))

    corrected = geometric_correction(shared, ego)
    mu = log_so3(ego_attitude.T @ ref)
    Jinv = left_jacobian_inv(mu)
    np.testing.assert_allclose(corrected.mean, mu, atol=1e-12)
    np.testing.assert_allclose(corrected.cov, Jinv @ cov @ Jinv.T, atol=1e-14)

    naive = geometric_correction(shared, ego, geometric=False)
    np.testing.assert_allclose(naive.mean, mu, atol=1e-12)
    np.testing.assert_array_equal(naive.cov, cov)


def test_cce_endpoints():
    P = np.diag([0.1, 0.2, 0.3])
    P_shared = np.diag([0.05, 0.05, 0.05])
    mean = np.array([0.1, 0.0, 0.0])
    keep = cce_fuse(P, mean, P_shared, 1.0)
    np.testing.assert_array_equal(keep.mean_correction, np.zeros(3))
    np.testing.assert_array_equal(keep.cov, P)
    adopt = cce_fuse(P, mean, P_shared, 0.0)
    np.testing.assert_array_equal(adopt.mean_correction, mean)
    np.testing.assert_array_equal(adopt.cov, P_shared)


def test_cce_endpoints_accept_degenerate_covariances():
    P = np.diag([0.1, 0.0, 0.3])
    result = cce_fuse(P, np.zeros(3), np.eye(3), 1.0)
    np.testing.assert_array_equal(result.cov, P)
    with pytest.raises(ValueError, match="positive definite"):
        cce_fuse(P, np.zeros(3), np.eye(3), 0.5)


def test_cce_interior_formula(rng):
    P, P_shared = _spd(rng, 0.05, 0.3), _spd(rng, 0.05, 0.3)
    mean = np.array([0.05, -0.05, 0.02])
    alpha = 0.3
    result = cce_fuse(P, mean, P_shared, alpha)
    X = np.linalg.inv(alpha * np.linalg.inv(P) + (1 - alpha) * np.linalg.inv(P_shared))
    d2 = mean @ np.linalg.inv(P / alpha + P_shared / (1 - alpha)) @ mean
    u = X @ ((1 - alpha) * np.linalg.inv(P_shared) @ mean)
    assert result.mahalanobis_sq == pytest.approx(d2)
    assert result.shrink_factor == pytest.approx(1 - d2)
    np.testing.assert_allclose(result.mean_correction, u, atol=1e-12)
    np.testing.assert_allclose(result.cov, (1 - d2) * X, atol=1e-12)


def test_cce_zero_mean_has_no_shrink():
    P = np.diag([0.1, 0.2, 0.3])
    result = cce_fuse(P, np.zeros(3), 2.0 * P, 0.5)
    assert result.shrink_factor == 1.0
    np.testing.assert_array_equal(result.mean_correction, np.zeros(3))


def test_cce_empty_intersection():
    P = 0.01 * np.eye(3)
    with pytest.raises(EmptyIntersection) as excinfo:
        cce_fuse(P, [1.0, 0.0, 0.0], P, 0.5)
    assert excinfo.value.mahalanobis_sq == pytest.approx(25.0)


@pytest.mark.parametrize("alpha", [-0.01, 1.01])
def test_cce_rejects_alpha_out_of_range(alpha):
    with pytest.raises(ValueError, match="alpha"):
        cce_fuse(np.eye(3), np.zeros(3), np.eye(3), alpha)


def test_cce_containment(rng):
    checked = 0
    while checked < 100:
        P, P_shared = _spd(rng, 0.02, 0.3), _spd(rng, 0.02, 0.3)
        mu = rng.normal(scale=0.2, size=3)
        try:
            fused = cce_fuse(P, mu, P_shared, optimal_alpha(P, mu, P_shared))
        except EmptyIntersection:
            continue
        checked += 1
        x = rng.standard_normal((2000, 3))
        x *= (rng.uniform(size=2000)**(1.0 / 3.0) / np.linalg.norm(x, axis=1))[:, None]
        points = x @ np.linalg.cholesky(P).T
        offset = points - mu
        inside = np.einsum("ni,ij,nj->n", offset, np.linalg.inv(P_shared), offset) <= 1.0
        centred = points[inside] - fused.mean_correction
        dist = np.einsum("ni,ij,nj->n", centred, np.linalg.inv(fused.cov), centred)
        assert np.all(dist <= 1.0 + 1e-9)


def test_fused_determinant_marks_empty_alphas():
    P = 0.01 * np.eye(3)
    dets = fused_determinant(P, [1.0, 0.0, 0.0], P, [0.0, 0.5, 1.0])
    assert dets[0] == pytest.approx(1e-6)
    assert np.isinf(dets[1])
    assert dets[2] == pytest.approx(1e-6)


def test_fused_determinant_matches_cce(rng):
    P, P_shared = _spd(rng, 0.05, 0.3), _spd(rng, 0.05, 0.3)
    mean = np.array([0.1, 0.0, -0.05])
    for alpha in (0.1, 0.5, 0.9):
        det = fused_determinant(P, mean, P_shared, [alpha])[0]
        assert det == pytest.approx(np.linalg.det(cce_fuse(P, mean, P_shared, alpha).cov))


def test_optimal_alpha_matches_dense_grid(rng):
    grid = np.linspace(0.0, 1.0, 100_001)
    for _ in range(10):
        P, P_shared = _spd(rng, 0.02, 0.3), _spd(rng, 0.02, 0.3)
        mean = rng.normal(scale=0.1, size=3)
        dets = fused_determinant(P, mean, P_shared, grid, min_shrink=MIN_SHRINK_FACTOR)
        alpha = optimal_alpha(P, mean, P_shared)
        best = fused_determinant(P, mean, P_shared, [alpha], min_shrink=MIN_SHRINK_FACTOR)[0]
        assert best <= np.min(dets) * (1.0 + 1e-3)


def test_optimal_alpha_flat_determinant_is_half():
    P = np.diag([0.1, 0.2, 0.3])
    assert optimal_alpha(P, np.zeros(3), P) == 0.5


def test_optimal_alpha_prefers_tighter_ellipsoid():
    assert optimal_alpha(np.eye(3), np.zeros(3), 0.01 * np.eye(3)) == 0.0
    assert optimal_alpha(0.01 * np.eye(3), np.zeros(3), np.eye(3)) == 1.0


def test_fuse_relative_adopts_precise_neighbour(rng):
    R_i = _rotation(rng)
    R_j = _rotation(rng)
    ego = AgentEstimate(R_i @ exp_so3([0.3, -0.2, 0.1]), 0.5 * np.eye(3))
    pkt = _packet(R_j.T @ R_i, R_j, 1e-16 * np.eye(3), noise_cov=1e-6 * np.eye(3))
    sink = FusionDiagnostics()
    out = fuse_relative(ego, pkt, AlphaPolicy.optimal(), sink=sink)
    assert rotation_error(R_i, out.attitude) < 1e-6
    assert sink.accepted == 1
    assert sink.rejections == 0
    event = sink.events[0]
    assert event.accepted
    assert event.alpha == 0.0
    assert out.time == ego.time


def test_fuse_relative_reduces_error(rng):
    R_i = _rotation(rng)
    R_j = _rotation(rng)
    ego = AgentEstimate(R_i @ exp_so3([0.4, 0.3, -0.2]), 0.3 * np.eye(3))
    value = R_j.T @ R_i @ exp_so3([0.05, -0.02, 0.03])
    pkt = _packet(value, R_j, 0.01 * np.eye(3), noise_cov=0.01 * np.eye(3))
    out = fuse_relative(ego, pkt)
    assert rotation_error(R_i, out.attitude) < rotation_error(R_i, ego.attitude)
    assert np.linalg.det(out.cov) < np.linalg.det(ego.cov)


def test_fuse_relative_rejects_empty_intersection():
    ego = AgentEstimate(np.eye(3), 0.01 * np.eye(3))
    pkt = _packet(exp_so3([1.0, 0.0, 0.0]), np.eye(3), 1e-4 * np.eye(3),
                  noise_cov=1e-4 * np.eye(3))
    sink = FusionDiagnostics()
    out = fuse_relative(ego, pkt, AlphaPolicy.fixed(0.5), sink=sink)
    assert out is ego
    assert sink.rejections == 1
    assert sink.events[0].reason == "empty intersection"
    assert sink.events[0].mahalanobis_sq > 1.0


def test_fuse_relative_rejects_chart_violation():
    ego = AgentEstimate(np.eye(3), 0.5 * np.eye(3))
    pkt = _packet(exp_so3([math.pi - 1e-9, 0.0, 0.0]), np.eye(3), 0.01 * np.eye(3))
    sink = FusionDiagnostics()
    assert fuse_relative(ego, pkt, sink=sink) is ego
    assert sink.rejections == 1
    assert not sink.events[0].accepted


@pytest.mark.parametrize("proxy", [ProxyKind.MEASUREMENT, ProxyKind.ESTIMATES])
def test_fuse_relative_angular_geometric_differs_from_naive(rng, proxy):
    R_i = _rotation(rng)
    R_j = R_i @ exp_so3([0.0, 1.2, 0.9])
    ego = AgentEstimate(R_i @ exp_so3([0.3, 0.2, -0.3]), 0.4 * np.eye(3))
    z = exp_so3(log_so3(R_j.T @ R_i) + np.array([0.1, -0.05, 0.02]))
    pkt = _packet(z, R_j, 0.02 * np.eye(3), kind=MeasurementKind.ANGULAR)
    policy = AlphaPolicy.fixed(0.5)
    geometric = fuse_relative(ego, pkt, policy, FusionOptions(True, proxy))
    naive = fuse_relative(ego, pkt, policy, FusionOptions(False, proxy))
    assert not np.allclose(geometric.attitude, naive.attitude)
    assert not np.allclose(geometric.cov, naive.cov)


def _kalman_cov(P, P_shared):
    return np.linalg.inv(np.linalg.inv(P) + np.linalg.inv(P_shared))


def _assert_not_collapsed(fused_cov, P, P_shared):
    # P+ >= MIN_SHRINK_FACTOR (P^-1 + P*^-1)^-1 in the Loewner order
    floor = MIN_SHRINK_FACTOR * _kalman_cov(P, P_shared)
    assert np.linalg.eigvalsh(fused_cov - floor).min() >= -1e-12


def test_optimal_alpha_keeps_fused_covariance_comparable_to_priors():
    P = np.diag([2e-3, 2e-3, 0.3])
    P_shared = np.diag([0.25, 0.09, 0.04])
    mean = np.array([0.5, 0.3, 0.5])
    alpha = optimal_alpha(P, mean, P_shared, DEFAULT_ELLIPSOID_SCALE)
    result = cce_fuse(P, mean, P_shared, alpha, DEFAULT_ELLIPSOID_SCALE)
    assert result.shrink_factor >= MIN_SHRINK_FACTOR - 1e-9
    _assert_not_collapsed(result.cov, P, P_shared)


def test_optimal_alpha_never_collapses_random_pairs(rng):
    for _ in range(50):
        P, P_shared = _spd(rng, 1e-3, 0.3), _spd(rng, 1e-3, 0.3)
        mean = rng.normal(scale=0.3, size=3)
        for scale in (1.0, DEFAULT_ELLIPSOID_SCALE):
            alpha = optimal_alpha(P, mean, P_shared, scale)
            result = cce_fuse(P, mean, P_shared, alpha, scale)
            assert result.shrink_factor >= MIN_SHRINK_FACTOR - 1e-9
            if 0.0 < alpha < 1.0:
                _assert_not_collapsed(result.cov, P, P_shared)


def test_cce_scale_sets_the_level_set():
    P = np.diag([0.1, 0.2, 0.3])
    mean = np.array([0.8, 0.0, 0.0])
    with pytest.raises(EmptyIntersection):
        cce_fuse(P, mean, P, 0.5)
    result = cce_fuse(P, mean, P, 0.5, scale=3.0)
    # d^2 = 0.64 / (0.1 / 0.5 + 0.1 / 0.5)
    assert result.mahalanobis_sq == pytest.approx(1.6)
    assert result.shrink_factor == pytest.approx(1.0 - 1.6 / 3.0)
    np.testing.assert_allclose(result.cov, result.shrink_factor * P, atol=1e-15)
    with pytest.raises(ValueError, match="scale"):
        cce_fuse(P, mean, P, 0.5, scale=0.0)


def test_fusion_options_reject_non_positive_scale():
    with pytest.raises(ValueError, match="scale"):
        FusionOptions(ellipsoid_scale=0.0)
    assert FusionOptions().ellipsoid_scale == DEFAULT_ELLIPSOID_SCALE


def test_geometric_correction_vanishes_for_agreeing_estimates(rng):
    ego_attitude = _rotation(rng)
    ego = AgentEstimate(ego_attitude, np.eye(3))
    cov = _spd(rng, 0.01, 0.1)
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    previous = np.inf
    for length in (0.1, 1e-2, 1e-3, 1e-4):
        shared = ConcentratedGaussian.zero_mean(ego_attitude @ exp_so3(length * direction), cov)
        corrected = geometric_correction(shared, ego)
        change = np.linalg.norm(corrected.cov - cov)
        assert change <= 2.0 * length * np.linalg.norm(cov)
        assert change < previous
        previous = change


def test_fuse_relative_with_identical_information_is_unchanged(rng):
    R_i, R_j = _rotation(rng), _rotation(rng)
    sender_cov, noise_cov = _spd(rng, 0.01, 0.1), np.diag([0.02, 0.03, 0.01])
    A = R_i.T @ R_j
    ego = AgentEstimate(R_i, symmetrize(A @ sender_cov @ A.T + noise_cov), time=4.0)
    pkt = _packet(R_j.T @ R_i, R_j, sender_cov, noise_cov=noise_cov)
    out = fuse_relative(ego, pkt, AlphaPolicy.fixed(0.5))
    np.testing.assert_allclose(out.attitude, ego.attitude, atol=1e-12)
    np.testing.assert_allclose(out.cov, ego.cov, atol=1e-12)


def test_fuse_relative_shrinks_unobservable_direction(rng):
    R_i, R_j = _rotation(rng), _rotation(rng)
    Q_axes = exp_so3(rng.standard_normal(3))
    P = symmetrize(Q_axes @ np.diag([0.01, 0.01, 1.0]) @ Q_axes.T)
    ego = AgentEstimate(R_i, P)
    value = R_j.T @ R_i @ exp_so3([0.02, -0.03, 0.05])
    pkt = _packet(value, R_j, 0.01 * np.eye(3), noise_cov=0.01 * np.eye(3))
    sink = FusionDiagnostics()
    out = fuse_relative(ego, pkt, sink=sink)
    assert sink.accepted == 1
    assert np.linalg.eigvalsh(out.cov).max() < np.linalg.eigvalsh(P).max()
    weak_axis = Q_axes[:, 2]
    assert weak_axis @ out.cov @ weak_axis < 0.1
