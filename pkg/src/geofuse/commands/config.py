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

"""Scenario configuration: loading, ``--set`` overrides and validation.

Every validation failure raises :class:`geofuse.errors.ConfigError` carrying the JSON path of
the offending key, e.g. ``$.agents[1].gyro_noise_cov``.
"""

from __future__ import annotations

import copy
import logging
from numbers import Real
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np
import yaml

from geofuse.errors import ConfigError
from geofuse.filters.fusion import (DEFAULT_ELLIPSOID_SCALE, AlphaPolicy, AlphaPolicyKind,
                                    MeasurementKind, ProxyKind)
from geofuse.types.scenario import (WAVES, AgentConfig, FusionConfig, InitialConfig,
                                    RelativeConfig, ScenarioConfig, SimulationConfig,
                                    TrajectoryProfile)
from geofuse.utils import load_config

__all__ = ["parse_config", "parse_config_dict", "apply_overrides", "parse_override"]

_log = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-6
MAX_SEED = 2**64 - 1


class _Section:
    """A JSON object being validated: tracks consumed keys to reject unknown ones."""

    def __init__(self, doc, path: str):
        if not isinstance(doc, dict):
            raise ConfigError(path, f"expected an object, got {type(doc).__name__}")
        self.doc = doc
        self.path = path
        self._seen = set()

    def child(self, key: str) -> str:
        return f"{self.path}.{key}"

    def has(self, key: str) -> bool:
        return key in self.doc

    def get(self, key: str, default: Any = None, required: bool = False) -> Any:
        self._seen.add(key)
        if key not in self.doc:
            if required:
                raise ConfigError(self.child(key), "missing required key")
            return default
        return self.doc[key]

    def finish(self):
        unknown = sorted(set(self.doc) - self._seen)
        if unknown:
            raise ConfigError(self.child(unknown[0]), "unknown key")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(path, "must be finite")
    return value


def _positive(value, path: str) -> float:
    value = _number(value, path)
    if value <= 0.0:
        raise ConfigError(path, f"must be positive, got {value}")
    return value


def _integer(value, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _list(value, path: str, length: Optional[int] = None) -> list:
    if not isinstance(value, list):
        raise ConfigError(path, f"expected a list, got {value!r}")
    if length is not None and len(value) != length:
        raise ConfigError(path, f"expected {length} entries, got {len(value)}")
    return value


def _vec3(value, path: str) -> np.ndarray:
    items = _list(value, path, 3)
    return np.array([_number(x, f"{path}[{i}]") for i, x in enumerate(items)])


def _unit(value, path: str) -> np.ndarray:
    v = _vec3(value, path)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > UNIT_TOLERANCE:
        raise ConfigError(path, f"direction must have unit norm, got {norm:.9f}")
    return v / norm


def _covariance(value, path: str) -> np.ndarray:
    """3 diagonal entries or 9 row-major entries; must be symmetric positive definite."""
    items = _list(value, path)
    numbers = [_number(x, f"{path}[{i}]") for i, x in enumerate(items)]
    if len(numbers) == 3:
        M = np.diag(numbers)
    elif len(numbers) == 9:
        M = np.array(numbers).reshape(3, 3)
    else:
        raise ConfigError(path, f"expected 3 diagonal or 9 row-major entries, got {len(numbers)}")
    if np.max(np.abs(M - M.T)) > 1e-12 * max(1.0, float(np.max(np.abs(M)))):
        raise ConfigError(path, "covariance is not symmetric")
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise ConfigError(path, "covariance is not positive definite")
    return M


def _rate(value, path: str, dt: float) -> float:
    rate = _positive(value, path)
    if rate > 1.0 / dt + 1e-9:
        raise ConfigError(path, f"rate {rate} Hz exceeds the step rate {1.0 / dt:g} Hz")
    return rate


def _choice(value, path: str, enum_cls):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(repr(e.value) for e in enum_cls)
        raise ConfigError(path, f"expected one of {choices}, got {value!r}")


def _trajectory(value, path: str, agent_id: int, gyro_cov) -> TrajectoryProfile:
    section = _Section(value, path)
    raw_gains = _list(section.get("gains", required=True), section.child("gains"), 3)
    gains = [_number(g, f"{path}.gains[{i}]") for i, g in enumerate(raw_gains)]
    waves = _list(section.get("waves", required=True), section.child("waves"), 3)
    for i, w in enumerate(waves):
        if w not in WAVES:
            raise ConfigError(f"{path}.waves[{i}]",
                              f"expected one of {sorted(WAVES)}, got {w!r}")
    time_scale = _positive(section.get("time_scale", 1.0), section.child("time_scale"))
    section.finish()
    return TrajectoryProfile(agent_id, tuple(gains), tuple(waves), gyro_cov, time_scale)


def _agent(value, path: str, agent_id: int) -> AgentConfig:
    section = _Section(value, path)
    directions = [
        _unit(d, f"{path}.directions[{i}]")
        for i, d in enumerate(
            _list(section.get("directions", required=True), section.child("directions")))
    ]
    directional = _covariance(section.get("directional_noise_cov", required=True),
                              section.child("directional_noise_cov"))
    gyro = _covariance(section.get("gyro_noise_cov", required=True),
                       section.child("gyro_noise_cov"))
    trajectory = _trajectory(section.get("trajectory", required=True),
                             section.child("trajectory"), agent_id, gyro)
    section.finish()
    return AgentConfig(tuple(directions), directional, trajectory)


def _relative(root: _Section, dt: float) -> RelativeConfig:
    section = _Section(root.get("relative", required=True), root.child("relative"))
    model = _choice(section.get("model", required=True), section.child("model"),
                    MeasurementKind)
    Q = _covariance(section.get("Q", required=True), section.child("Q"))

    top_rate = root.get("relative_rate_hz")
    nested_rate = section.get("rate_hz")
    if top_rate is None and nested_rate is None:
        raise ConfigError(root.child("relative_rate_hz"), "missing required key")
    if top_rate is not None and nested_rate is not None and top_rate != nested_rate:
        raise ConfigError(section.child("rate_hz"),
                          f"disagrees with $.relative_rate_hz ({nested_rate} != {top_rate})")
    if nested_rate is not None:
        rate = _rate(nested_rate, section.child("rate_hz"), dt)
    else:
        rate = _rate(top_rate, root.child("relative_rate_hz"), dt)
    section.finish()
    return RelativeConfig(model, Q, rate)


def _fusion(root: _Section) -> FusionConfig:
    section = _Section(root.get("fusion", {}), root.child("fusion"))
    kind = _choice(section.get("alpha_policy", AlphaPolicyKind.FIXED.value),
                   section.child("alpha_policy"), AlphaPolicyKind)
    alpha = _number(section.get("alpha", 0.5), section.child("alpha"))
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(section.child("alpha"), f"must lie in [0, 1], got {alpha}")
    proxy = _choice(section.get("proxy", ProxyKind.MEASUREMENT.value), section.child("proxy"),
                    ProxyKind)
    scale = _positive(section.get("ellipsoid_scale", DEFAULT_ELLIPSOID_SCALE),
                      section.child("ellipsoid_scale"))
    section.finish()
    return FusionConfig(AlphaPolicy(kind, alpha), proxy, scale)


def _initial(root: _Section) -> InitialConfig:
    section = _Section(root.get("initial", {}), root.child("initial"))
    offset = _number(section.get("offset_rad", np.pi - 1e-3), section.child("offset_rad"))
    if not 0.0 <= offset < np.pi:
        raise ConfigError(section.child("offset_rad"), f"must lie in [0, pi), got {offset}")
    cov = section.get("estimate_cov")
    cov = np.eye(3) if cov is None else _covariance(cov, section.child("estimate_cov"))
    section.finish()
    return InitialConfig(offset, cov)


def _simulation(root: _Section, num_agents: int) -> SimulationConfig:
    section = _Section(root.get("simulation", {}), root.child("simulation"))
    clean = section.get("truth_uses_clean_omega", False)
    if not isinstance(clean, bool):
        raise ConfigError(section.child("truth_uses_clean_omega"), "expected true or false")
    ego = _integer(section.get("ego_agent", 0), section.child("ego_agent"))
    if ego >= num_agents:
        raise ConfigError(section.child("ego_agent"),
                          f"agent {ego} does not exist ({num_agents} agents)")
    edges_path = section.child("edges")
    edges = []
    for i, edge in enumerate(_list(section.get("edges", [[1, 0]]), edges_path)):
        pair = _list(edge, f"{edges_path}[{i}]", 2)
        observer = _integer(pair[0], f"{edges_path}[{i}][0]")
        target = _integer(pair[1], f"{edges_path}[{i}][1]")
        if observer >= num_agents or target >= num_agents:
            raise ConfigError(f"{edges_path}[{i}]", "edge references a missing agent")
        if observer == target:
            raise ConfigError(f"{edges_path}[{i}]", "an agent cannot observe itself")
        if (observer, target) in edges:
            raise ConfigError(f"{edges_path}[{i}]", "duplicate edge")
        edges.append((observer, target))
    section.finish()
    return SimulationConfig(clean, ego, tuple(edges))


def parse_config_dict(doc) -> ScenarioConfig:
    """Validate a configuration document and build the frozen :class:`ScenarioConfig`."""
    if doc is None:
        raise ConfigError(
            "$", "empty configuration; missing required keys: dt, duration_s, "
            "directional_rate_hz, relative_rate_hz, agents, relative, monte_carlo")
    root = _Section(doc, "$")
    missing = [
        k for k in ("dt", "duration_s", "directional_rate_hz", "agents", "relative",
                    "monte_carlo") if not root.has(k)
    ]
    if missing:
        raise ConfigError(root.child(missing[0]),
                          f"missing required keys: {', '.join(missing)}")

    dt = _positive(root.get("dt"), "$.dt")
    duration = _positive(root.get("duration_s"), "$.duration_s")
    steps = round(duration / dt)
    if steps < 1 or abs(steps * dt - duration) > 1e-9 * max(1.0, duration):
        raise ConfigError("$.duration_s", f"duration {duration} is not a multiple of dt {dt}")
    directional_rate = _rate(root.get("directional_rate_hz"), "$.directional_rate_hz", dt)

    agents_doc = _list(root.get("agents"), "$.agents")
    if len(agents_doc) < 2:
        raise ConfigError("$.agents", "at least two agents are required")
    agents = tuple(_agent(a, f"$.agents[{i}]", i) for i, a in enumerate(agents_doc))

    relative = _relative(root, dt)
    fusion = _fusion(root)
    initial = _initial(root)
    simulation = _simulation(root, len(agents))

    mc = _Section(root.get("monte_carlo"), "$.monte_carlo")
    num_runs = _integer(mc.get("num_runs", required=True), "$.monte_carlo.num_runs", 1)
    seed = _integer(mc.get("seed", required=True), "$.monte_carlo.seed")
    if seed > MAX_SEED:
        raise ConfigError("$.monte_carlo.seed", "seed must fit in 64 bits")
    mc.finish()
    root.finish()

    return ScenarioConfig(dt, duration, directional_rate, agents, relative, fusion, initial,
                          simulation, seed, num_runs)


def parse_override(item: str):
    """``dotted.path=value`` -> (path components, parsed value)."""
    if "=" not in item:
        raise ConfigError(item, "override must have the form key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(item, "override has an empty key")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ConfigError(key, f"cannot parse override value {raw!r}: {e}")
    if isinstance(value, str):
        # YAML 1.1 leaves exponent literals without a dot (1e-3) as strings
        try:
            value = float(value)
        except ValueError:
            pass
    return key.split("."), value


def apply_overrides(doc: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Return a copy of ``doc`` with every ``--set`` override applied in order.

    Integer path components index lists (``agents.0.directions``); missing objects along the
    path are created.
    """
    doc = copy.deepcopy(doc) if doc is not None else {}
    for item in overrides:
        parts, value = parse_override(item)
        node = doc
        for depth, part in enumerate(parts):
            last = depth == len(parts) - 1
            path = "$." + ".".join(parts[:depth + 1])
            if isinstance(node, list):
                try:
                    index = int(part)
                    node[index]
                except (ValueError, IndexError):
                    raise ConfigError(path, f"invalid list index {part!r}")
                if last:
                    node[index] = value
                else:
                    node = node[index]
            elif isinstance(node, dict):
                if last:
                    node[part] = value
                else:
                    node = node.setdefault(part, {})
            else:
                raise ConfigError(path, "cannot descend into a scalar")
        _log.debug(f"override {'.'.join(parts)} = {value!r}")
    return doc


def parse_config(path, overrides: Sequence[str] = ()) -> ScenarioConfig:
    """Load, override and validate the configuration file at ``path``."""
    try:
        doc = load_config(path)
    except (ValueError, yaml.YAMLError) as e:
        raise ConfigError("$", f"cannot read configuration {path}: {e}")
    if overrides:
        doc = apply_overrides(doc, overrides)
    return parse_config_dict(doc)
