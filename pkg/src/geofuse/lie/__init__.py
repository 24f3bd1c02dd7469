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

"""Lie-group primitives and concentrated Gaussians on SO(3)."""

from geofuse.lie.so3 import (wedge, vee, exp_so3, log_so3, boxplus, left_jacobian,
                             left_jacobian_inv, adjoint_matrix, ad_matrix, rotation_angle)
from geofuse.lie.gaussian import (ConcentratedGaussian, log_density, sample, absorb_mean,
                                  change_reference)

__all__ = [
    "wedge", "vee", "exp_so3", "log_so3", "boxplus", "left_jacobian", "left_jacobian_inv",
    "adjoint_matrix", "ad_matrix", "rotation_angle", "ConcentratedGaussian", "log_density",
    "sample", "absorb_mean", "change_reference"
]
