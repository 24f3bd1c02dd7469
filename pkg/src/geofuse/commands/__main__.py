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

"""``geofuse`` command line: run | validate-config | selftest.

Exit status is 0 only when the requested work completed: 1 for a failed run or self-test,
2 for usage and configuration errors.
"""

import argparse
import logging
from pathlib import Path
import sys
import time

from geofuse.commands.config import parse_config
from geofuse.commands.log_actions import LogLevelAction
from geofuse.commands.results import RUN_LOG, emit_results, mark_complete, mark_incomplete
from geofuse.commands.selftest import format_report, run_selftest
from geofuse.errors import ConfigError, GeofuseError
from geofuse.sim.montecarlo import resolve_workers, run_monte_carlo
from geofuse.types.scenario import scenario_to_dict
from geofuse.utils import get_version, log_to_file, setup_logging

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geofuse",
        description="Collaborative attitude estimation on SO(3): Monte-Carlo experiments "
        "comparing geometric CCE fusion with directional-only and naive baselines.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    parser.add_argument("-v",
                        "--verbose",
                        action="count",
                        default=0,
                        help="increase logging verbosity (repeatable)")
    parser.add_argument("--log-level",
                        metavar="LOGGER:LEVEL",
                        action=LogLevelAction,
                        help="override the level of individual loggers")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    run = sub.add_parser("run", help="execute the Monte-Carlo experiment")
    run.add_argument("--config", required=True, type=Path, help="scenario configuration file")
    run.add_argument("--out", required=True, type=Path, help="output directory")
    run.add_argument("--threads",
                     type=int,
                     default=1,
                     help="worker processes, 0 for one per physical core (default 1)")
    run.add_argument("--set",
                     dest="overrides",
                     action="append",
                     default=[],
                     metavar="KEY=VALUE",
                     help="override a configuration value, e.g. relative.model=angular")
    run.add_argument("--runs", type=int, help="shortcut for --set monte_carlo.num_runs=N")

    validate = sub.add_parser("validate-config", help="check a configuration file")
    validate.add_argument("--config", required=True, type=Path)
    validate.add_argument("--set", dest="overrides", action="append", default=[],
                          metavar="KEY=VALUE")

    selftest = sub.add_parser("selftest", help="run the numerical oracle suite")
    selftest.add_argument("--seed", type=int, default=0)
    selftest.add_argument("--perturb-jacobian",
                          type=float,
                          default=0.0,
                          metavar="EPS",
                          help=argparse.SUPPRESS)
    return parser


def _run(opts) -> int:
    overrides = list(opts.overrides)
    if opts.runs is not None:
        overrides.append(f"monte_carlo.num_runs={opts.runs}")
    cfg = parse_config(opts.config, overrides)
    threads = resolve_workers(opts.threads)

    mark_incomplete(opts.out)
    root = logging.getLogger()
    previous_level = root.level
    handler = log_to_file(opts.out / RUN_LOG, logging.INFO, handler_class=logging.FileHandler)
    try:
        start = time.perf_counter()
        summary = run_monte_carlo(cfg, threads=threads)
        wall_time = time.perf_counter() - start
        emit_results(summary,
                     opts.out,
                     config=scenario_to_dict(cfg),
                     seed=cfg.seed,
                     wall_time_s=wall_time,
                     threads=threads)
        mark_complete(opts.out)
        _log.info(f"{cfg.num_runs} runs finished in {wall_time:.1f}s, results in {opts.out}")
    finally:
        root.removeHandler(handler)
        root.setLevel(previous_level)
        handler.close()
    return EXIT_OK


def _validate(opts) -> int:
    cfg = parse_config(opts.config, opts.overrides)
    print(f"{opts.config}: ok ({len(cfg.agents)} agents, {cfg.num_steps} steps, "
          f"{cfg.num_runs} runs, {cfg.relative.model.value} relative model)")
    return EXIT_OK


def _selftest(opts) -> int:
    results = run_selftest(seed=opts.seed, perturb_jacobian=opts.perturb_jacobian)
    print(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


_COMMANDS = {
    "run": _run,
    "validate-config": _validate,
    "selftest": _selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    opts = parser.parse_args(argv)
    level = max(logging.DEBUG, logging.WARNING - 10 * opts.verbose)
    setup_logging(level, console=True)
    for name, logger_level in opts.log_level or []:
        logging.getLogger(name).setLevel(logger_level)

    try:
        return _COMMANDS[opts.command](opts)
    except ConfigError as e:
        _log.error(f"invalid configuration: {e}")
        return EXIT_USAGE
    except (GeofuseError, OSError) as e:
        _log.error(str(e))
        return EXIT_FAILURE
    except KeyboardInterrupt:
        _log.error("interrupted")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
