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

"""The geofuse.utils package contains generic utilities for loading configurations, json,
logging, versioning and small statistics helpers."""

import logging
from pathlib import Path
from typing import List

import yaml

from geofuse.utils.commands import execute_command
from geofuse.utils.jsonapi import strip_comments, parse_json_config
from geofuse.utils.logs import setup_logging, log_to_file, isapipe
from geofuse.utils.version import get_version, get_build_id

_log = logging.getLogger(__name__)


def load_config(config_path):
    """Load a JSON (or YAML) configuration file."""
    if not config_path or not Path(config_path).exists():
        raise ValueError("Invalid config_path sent to function.")

    # JSON first: YAML 1.1 reads exponent literals such as 1e-3 as strings.
    with open(config_path) as f:
        text = f.read()
    try:
        return parse_json_config(text)
    except ValueError:
        try:
            return yaml.safe_load(text)
        except yaml.YAMLError:
            _log.error(f"Problem parsing configuration {config_path}")
            raise


__all__: List[str] = [
    "load_config", "parse_json_config", "strip_comments", "log_to_file", "setup_logging",
    "isapipe", "execute_command", "get_version", "get_build_id"
]
