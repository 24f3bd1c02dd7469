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

import argparse
import logging

__all__ = ["LogLevelAction"]


class LogLevelAction(argparse.Action):
    """
    Action to set the log level of individual modules, e.g.
    ``--log-level geofuse.filters.fusion:DEBUG,geofuse.sim:WARNING``.
    """

    def __call__(self, parser, namespace, values, option_string=None):
        pairs = getattr(namespace, self.dest, None) or []
        for pair in values.split(","):
            if not pair.strip():
                continue
            try:
                logger_name, level_name = pair.rsplit(":", 1)
            except (ValueError, TypeError):
                raise argparse.ArgumentError(self, "invalid log level pair: {}".format(values))
            try:
                level = int(level_name)
            except (ValueError, TypeError):
                level = logging.getLevelName(level_name.upper())
                if not isinstance(level, int):
                    raise argparse.ArgumentError(self, "invalid log level {!r}".format(level_name))
            logging.getLogger(logger_name).setLevel(level)
            pairs.append((logger_name, level))
        setattr(namespace, self.dest, pairs)
