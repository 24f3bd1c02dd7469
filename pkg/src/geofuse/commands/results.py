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

import csv
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from geofuse.sim.montecarlo import MonteCarloSummary
from geofuse.sim.scenario import VARIANTS
from geofuse.utils import jsonapi
from geofuse.utils.version import get_build_id

__all__ = ["emit_results", "ERRORS_CSV", "RUN_META_JSON", "RUN_LOG", "CSV_HEADER",
           "INCOMPLETE_MARKER", "mark_incomplete", "mark_complete"]

_log = logging.getLogger(__name__)

ERRORS_CSV = "errors.csv"
RUN_META_JSON = "run_meta.json"
RUN_LOG = "run.log"
INCOMPLETE_MARKER = ".incomplete"
CSV_HEADER = ("time_s", "variant", "mean_rad", "p25_rad", "p75_rad")


def _fmt(x) -> str:
    return format(float(x), ".9g")


def mark_incomplete(out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    marker = out_dir / INCOMPLETE_MARKER
    marker.write_text("run did not complete\n")
    return marker


def mark_complete(out_dir):
    (Path(out_dir) / INCOMPLETE_MARKER).unlink(missing_ok=True)


def emit_results(summary: MonteCarloSummary,
                 out_dir,
                 config: Optional[Dict[str, Any]] = None,
                 seed: Optional[int] = None,
                 wall_time_s: float = 0.0,
                 threads: int = 1) -> Dict[str, Path]:
    """Write ``errors.csv`` and ``run_meta.json`` into ``out_dir``.

    One CSV row per (step, variant) in the order proposed, directional_only, naive; numbers
    carry 9 significant digits.
    """
    if summary.num_steps == 0:
        raise ValueError("cannot emit an empty summary")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / ERRORS_CSV
        with csv_path.open("w", newline="") as fp:
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for k, t in enumerate(summary.time):
                for v in VARIANTS:
                    stats = summary[v]
                    writer.writerow(
                        (_fmt(t), v, _fmt(stats.mean[k]), _fmt(stats.p25[k]),
                         _fmt(stats.p75[k])))

        meta_path = out_dir / RUN_META_JSON
        meta = {
            "config": config,
            "seed": seed,
            "build": get_build_id(),
            "wall_time_s": wall_time_s,
            "num_runs": summary.num_runs,
            "threads": threads,
        }
        with meta_path.open("w") as fp:
            jsonapi.dump(meta, fp, indent=2, sort_keys=True)
            fp.write("\n")
    except OSError as e:
        raise OSError(e.errno, f"cannot write results to {out_dir}: {e.strerror}",
                      e.filename) from e
    _log.info(f"wrote {csv_path} ({summary.num_steps * len(VARIANTS)} rows) and {meta_path}")
    return {"errors": csv_path, "meta": meta_path}
