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

__all__ = ["get_version", "get_build_id"]

from pathlib import Path
import importlib.metadata as importlib_metadata
import logging

from geofuse.utils.commands import execute_command

_log = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[3]

# Installed wheels carry their own metadata; a source checkout falls back to pyproject.toml.
try:
    __version__ = importlib_metadata.version('geofuse')
except importlib_metadata.PackageNotFoundError:
    tomle_file = PROJECT_ROOT.joinpath("pyproject.toml")
    if not tomle_file.exists():
        raise ValueError(
            f"Couldn't find pyproject.toml file for finding version. ({str(tomle_file)})")
    import toml

    pyproject = toml.load(tomle_file)

    __version__ = pyproject["tool"]["poetry"]["version"]


def get_version():
    """
    Return the version number of the package, either from the installed metadata or from the
    pyproject.toml file of a development checkout.
    """
    return __version__


def get_build_id() -> str:
    """``geofuse <version>`` with ``+g<short sha>`` appended inside a git checkout."""
    build = f"geofuse {__version__}"
    try:
        sha = execute_command(["git", "rev-parse", "--short", "HEAD"], cwd=str(PROJECT_ROOT))
    except (RuntimeError, OSError):
        _log.debug("no git checkout, build id carries the version only")
        return build
    sha = sha.strip()
    return f"{build}+g{sha}" if sha else build
