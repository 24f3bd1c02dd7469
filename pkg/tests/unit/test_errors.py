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

import pytest

from geofuse.errors import (CONFIG, DOMAIN, EMPTY_INTERSECTION, ConfigError, DomainError,
                            EmptyIntersection, GeofuseError, SingularInnovation)


def test_error_strings():
    assert str(DomainError("angle at pi")) == f"geofuse error ({DOMAIN}): angle at pi"
    assert str(ConfigError("$.dt", "must be positive")) == "$.dt: must be positive"
    assert ConfigError("$.dt", "x").errno == CONFIG


def test_error_hierarchy():
    assert isinstance(DomainError("x"), ValueError)
    assert isinstance(ConfigError("$", "x"), ValueError)
    assert isinstance(SingularInnovation("x"), ArithmeticError)
    assert isinstance(EmptyIntersection("x"), GeofuseError)


def test_payloads():
    assert SingularInnovation("x", condition=1e13).condition == 1e13
    assert EmptyIntersection("x", mahalanobis_sq=4.0).mahalanobis_sq == 4.0


@pytest.mark.parametrize("code, klass", [(DOMAIN, DomainError),
                                         (EMPTY_INTERSECTION, EmptyIntersection)])
def test_from_code(code, klass):
    err = GeofuseError.from_code(code, "message")
    assert type(err) is klass
    assert err.msg == "message"


def test_from_unknown_code():
    err = GeofuseError.from_code(99, "other")
    assert type(err) is GeofuseError
    assert err.errno == 99
