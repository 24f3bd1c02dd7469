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

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
import logging
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np
import psutil

from geofuse.sim.scenario import VARIANTS, RunRecord, run_scenario
from geofuse.types.scenario import ScenarioConfig

__all__ = ["VariantSummary", "MonteCarloSummary", "summarize", "run_monte_carlo",
           "resolve_workers"]

_log = logging.getLogger(__name__)

Progress = Callable[[int, int], None]


@dataclass(frozen=True, eq=False)
class VariantSummary:
    mean: np.ndarray
    p25: np.ndarray
    p75: np.ndarray


@dataclass(frozen=True, eq=False)
class MonteCarloSummary:
    time: np.ndarray
    num_runs: int
    variants: Dict[str, VariantSummary]
    rejections: Dict[str, int] = field(default_factory=dict)
    records: Tuple[RunRecord, ...] = ()

    @property
    def num_steps(self) -> int:
        return len(self.time)

    def __getitem__(self, variant: str) -> VariantSummary:
        return self.variants[variant]


def summarize(records: Iterable[RunRecord], keep_records: bool = False) -> MonteCarloSummary:
    """Per-step mean and 25th/75th percentiles of every variant's error over the runs."""
    records = tuple(records)
    if not records:
        raise ValueError("cannot summarise zero runs")
    variants = {}
    for v in VARIANTS:
        stacked = np.stack([r.series(v) for r in records])
        p25, p75 = np.percentile(stacked, [25.0, 75.0], axis=0)
        variants[v] = VariantSummary(np.mean(stacked, axis=0), p25, p75)
    rejections = {v: sum(r.rejections.get(v, 0) for r in records) for v in VARIANTS}
    return MonteCarloSummary(records[0].time, len(records), variants, rejections,
                             records if keep_records else ())


def resolve_workers(threads: int) -> int:
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    if threads == 0:
        return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    return threads


def run_monte_carlo(cfg: ScenarioConfig,
                    threads: int = 1,
                    progress: Optional[Progress] = None,
                    keep_records: bool = False) -> MonteCarloSummary:
    """Run ``cfg.num_runs`` independent scenarios and aggregate them.

    Run k is seeded from ``(cfg.seed, k)`` alone and results are gathered in run order, so the
    worker count never changes the summary.
    """
    workers = min(resolve_workers(threads), cfg.num_runs)
    _log.info(f"starting {cfg.num_runs} runs on {workers} worker(s)")
    records = []
    if workers == 1:
        for k in range(cfg.num_runs):
            records.append(run_scenario(cfg, k))
            if progress is not None:
                progress(k + 1, cfg.num_runs)
    else:
        chunksize = max(1, cfg.num_runs // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            for record in executor.map(run_scenario,
                                       repeat(cfg),
                                       range(cfg.num_runs),
                                       chunksize=chunksize):
                records.append(record)
                if progress is not None:
                    progress(len(records), cfg.num_runs)
    summary = summarize(records, keep_records)
    _log.info(f"finished {cfg.num_runs} runs, rejected packets: {summary.rejections}")
    return summary
