"""Command-line entry point: experiment runner and function listing."""

from __future__ import annotations

import argparse
import json
import sys

from . import benchmarks
from .driver import TesalocsConfig
from .harness import ExperimentSpec, emit_report, run_experiment
from .learning import LearnerConfig
from .local_search import METHODS, LocalSearchConfig

_FORMATS = ("csv", "json", "text-table")


def _add_run_arguments(parser):
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    parser.add_argument("--functions", help="comma-separated names, or 'all'")
    parser.add_argument("--dim", type=int)
    parser.add_argument("--budget", type=int)
    parser.add_argument("--repeats", type=int)
    parser.add_argument("--local", help=f"comma-separated subset of {METHODS}")
    parser.add_argument("--init", choices=["random", "tesalocs", "both"])
    parser.add_argument("--rank", type=int)
    parser.add_argument("--grid-nodes", type=int)
    parser.add_argument("--lower", type=float, help="override the search box lower bound (all dims)")
    parser.add_argument("--upper", type=float, help="override the search box upper bound (all dims)")
    parser.add_argument("--batch", type=int)
    parser.add_argument("--elite", type=int)
    parser.add_argument("--lr", type=float)
    parser.add_argument("--optimizer", choices=["plain-sgd", "adaptive-moment"])
    parser.add_argument("--learner-steps", type=int)
    parser.add_argument("--clamp-floor", type=float)
    parser.add_argument("--fd-step", type=float)
    parser.add_argument("--max-evals-per-candidate", type=int)
    parser.add_argument("--refine-top", type=int)
    parser.add_argument("--expected-iterations", type=int)
    parser.add_argument("--swarm-size", type=int)
    parser.add_argument("--seed0", type=int)
    parser.add_argument("--workers", type=int, help="parallel worker processes for independent cells")
    parser.add_argument("--out-dir")
    parser.add_argument("--format", help=f"comma-separated subset of {_FORMATS}")


_DEFAULTS = {
    "functions": "all",
    "dim": 100,
    "budget": 10_000,
    "repeats": 10,
    "local": "bfgs",
    "init": "both",
    "rank": 5,
    "grid_nodes": 2**10,
    "lower": None,
    "upper": None,
    "batch": 100,
    "elite": 10,
    "lr": 0.05,
    "optimizer": "adaptive-moment",
    "learner_steps": 1,
    "clamp_floor": 1e-12,
    "fd_step": 1e-6,
    "max_evals_per_candidate": None,
    "refine_top": None,
    "expected_iterations": 20,
    "swarm_size": 10,
    "seed0": 0,
    "workers": 1,
    "out_dir": "results",
    "format": "csv,json,text-table",
}


def _settings_from(args) -> dict:
    settings = dict(_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        settings.update(file_cfg)
    for key in _DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _build_spec(settings) -> ExperimentSpec:
    if settings["functions"] in ("all", ""):
        names = [fn.name for fn in benchmarks.catalog()]
    else:
        names = [s.strip() for s in str(settings["functions"]).split(",") if s.strip()]
    methods = tuple(s.strip() for s in str(settings["local"]).split(",") if s.strip())
    init = settings["init"]
    initializers = ("random", "tesalocs") if init == "both" else (init,)

    learner = LearnerConfig(
        learning_rate=settings["lr"],
        steps_per_iteration=settings["learner_steps"],
        clamp_floor=settings["clamp_floor"],
        optimizer_kind=settings["optimizer"],
    )
    local = LocalSearchConfig(
        fd_step=settings["fd_step"],
        max_evals_per_candidate=settings["max_evals_per_candidate"],
        refine_top=settings["refine_top"],
        swarm_size=settings["swarm_size"],
    )
    config = TesalocsConfig(
        budget=settings["budget"],
        grid_nodes=settings["grid_nodes"],
        rank=settings["rank"],
        batch=settings["batch"],
        elite=settings["elite"],
        expected_outer_iterations=settings["expected_iterations"],
        learner=learner,
        local=local,
    )
    box_override = None
    if settings["lower"] is not None or settings["upper"] is not None:
        if settings["lower"] is None or settings["upper"] is None:
            raise SystemExit("--lower and --upper must be given together")
        box_override = (settings["lower"], settings["upper"])
    return ExperimentSpec(
        functions=names,
        dim=settings["dim"],
        budget=settings["budget"],
        repeats=settings["repeats"],
        methods=methods,
        initializers=initializers,
        config=config,
        seed0=settings["seed0"],
        box_override=box_override,
    )


def _cmd_run(args) -> int:
    settings = _settings_from(args)
    spec = _build_spec(settings)
    report = run_experiment(spec, workers=settings["workers"])
    formats = tuple(s.strip() for s in str(settings["format"]).split(",") if s.strip())
    for fmt in formats:
        if fmt not in _FORMATS:
            raise SystemExit(f"unknown format {fmt!r}")
    written = emit_report(report, formats=formats, out_dir=settings["out_dir"])
    for path in written:
        if not path.endswith(".csv") or "traces" not in path:
            print(f"wrote {path}")
    if report.failed_runs:
        print(f"{report.failed_runs} run(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_list_functions(_args) -> int:
    for fn in benchmarks.catalog():
        lo, hi = fn.default_box(2)
        print(f"{fn.name:15s} box [{lo[0]:g}, {hi[0]:g}]  f* (d=2) = {fn.minimum_value(2):g}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tesalocs",
        description="Tensor-train guided sampling with local search refinement",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="run a benchmark experiment")
    _add_run_arguments(run_parser)
    run_parser.set_defaults(func=_cmd_run)
    list_parser = sub.add_parser("list-functions", help="list the benchmark catalog")
    list_parser.set_defaults(func=_cmd_list_functions)
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
