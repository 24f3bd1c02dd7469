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


__all__ = [
    "GeofuseError", "DomainError", "SingularInnovation", "EmptyIntersection", "ConfigError",
    "ScheduleError"
]

# Numeric codes are stable so that diagnostics and run metadata can refer to them.
DOMAIN = 10
SINGULAR_INNOVATION = 20
EMPTY_INTERSECTION = 30
CONFIG = 40
SCHEDULE = 50


class GeofuseError(Exception):

    def __init__(self, errnum, msg, *args):
        super(GeofuseError, self).__init__(errnum, msg, *args)
        self.errno = int(errnum)
        self.msg = msg

    def __str__(self):
        return "geofuse error (%d): %s" % (self.errno, self.msg)

    def __repr__(self):
        return "%s%r" % (type(self).__name__, self.args)

    @classmethod
    def from_code(cls, errnum, msg):
        klass = {
            DOMAIN: DomainError,
            SINGULAR_INNOVATION: SingularInnovation,
            EMPTY_INTERSECTION: EmptyIntersection,
            SCHEDULE: ScheduleError,
        }.get(int(errnum))
        if klass is None:
            return cls(errnum, msg)
        return klass(msg)


class DomainError(GeofuseError, ValueError):
    """Raised when an argument leaves the chart where log/Jacobian-inverse are defined."""

    def __init__(self, msg, *args):
        super(DomainError, self).__init__(DOMAIN, msg, *args)


class SingularInnovation(GeofuseError, ArithmeticError):

    def __init__(self, msg, condition=None):
        super(SingularInnovation, self).__init__(SINGULAR_INNOVATION, msg)
        self.condition = condition


class EmptyIntersection(GeofuseError):
    """The two prior ellipsoids admit no valid convex combination (d² >= 1)."""

    def __init__(self, msg, mahalanobis_sq=None):
        super(EmptyIntersection, self).__init__(EMPTY_INTERSECTION, msg)
        self.mahalanobis_sq = mahalanobis_sq


class ConfigError(GeofuseError, ValueError):

    def __init__(self, path, msg):
        super(ConfigError, self).__init__(CONFIG, msg, path)
        self.path = path

    def __str__(self):
        return "%s: %s" % (self.path, self.msg)


class ScheduleError(GeofuseError, RuntimeError):

    def __init__(self, msg, *args):
        super(ScheduleError, self).__init__(SCHEDULE, msg, *args)
