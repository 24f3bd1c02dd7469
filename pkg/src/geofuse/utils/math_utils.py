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

"""Statistics helpers shared by the tests, the self-test and result post-processing."""

import numpy as np
from scipy.stats import binomtest

__all__ = ["relative_frobenius_error", "window_mean", "sign_test_pvalue", "standard_error"]


def relative_frobenius_error(estimate, reference) -> float:
    """``|A - B|_F / |B|_F``."""
    reference = np.asarray(reference, dtype=float)
    norm = np.linalg.norm(reference)
    if norm == 0.0:
        raise ValueError('relative error requires a non-zero reference')
    return float(np.linalg.norm(np.asarray(estimate, dtype=float) - reference) / norm)


def window_mean(time, series, start: float, end: float) -> float:
    """Mean of ``series`` over samples with ``start <= time <= end``."""
    time = np.asarray(time, dtype=float)
    mask = (time >= start - 1e-9) & (time <= end + 1e-9)
    if not np.any(mask):
        raise ValueError(f'no samples in [{start}, {end}]')
    return float(np.mean(np.asarray(series, dtype=float)[mask]))


def sign_test_pvalue(differences) -> float:
    """One-sided paired sign test that the differences are positive more often than not.

    Zero differences are dropped.
    """
    differences = np.asarray(differences, dtype=float)
    nonzero = differences[differences != 0.0]
    if nonzero.size == 0:
        return 1.0
    wins = int(np.count_nonzero(nonzero > 0.0))
    return float(binomtest(wins, nonzero.size, 0.5, alternative="greater").pvalue)


def standard_error(samples, axis: int = 0):
    """Sample standard deviation over ``sqrt(n)``."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[axis]
    if n < 2:
        raise ValueError('variance requires at least two data points')
    return np.std(samples, axis=axis, ddof=1) / np.sqrt(n)
