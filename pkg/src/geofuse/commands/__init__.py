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

from geofuse.commands.config import parse_config, parse_config_dict, apply_overrides
from geofuse.commands.results import emit_results
from geofuse.commands.selftest import run_selftest

__all__ = ["parse_config", "parse_config_dict", "apply_overrides", "emit_results", "run_selftest"]
