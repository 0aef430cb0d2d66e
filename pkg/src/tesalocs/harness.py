"""Experiment orchestration: multi-seed paired comparisons of random-restart
versus model-guided initialization, error aggregation, and report emission."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import benchmarks
from .driver import TesalocsConfig, run, run_baseline
from .grid import SearchSpace
from .local_search import METHODS, resolve_config

CO_CONVERGENCE = 1e-8
INITIALIZERS = ("random", "tesalocs")


@dataclass
class ExperimentSpec:
    functions: list
    dim: int = 100
    budget: int = 10_000
    repeats: int = 10
    methods: tuple = ("bfgs",)
    initializers: tuple = INITIALIZERS
    config: TesalocsConfig = field(default_factory=TesalocsConfig)
    seed0: int = 0
    box_override: tuple | None = None  # (lower, upper) replacing every default box

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        for name in self.functions:
            benchmarks.get(name)  # raises on unknown names
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown local method {method!r}")
        for init in self.initializers:
            if init not in INITIALIZERS:
                raise ValueError(f"unknown initializer {init!r}")


@dataclass
class CellResult:
    """Aggregate over seeds for one (function, method, initializer)."""

    function: str
    method: str
    initializer: str
    errors: list
    failures: int

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.errors)) if self.errors else math.inf

    @property
    def sigma(self) -> float:
        # Sample standard deviation of the per-seed errors.
        if len(self.errors) < 2:
            return 0.0
        return float(np.std(self.errors, ddof=1))


@dataclass
class ExperimentReport:
    spec_summary: dict
    cells: list
    wins: dict  # (function, method) -> "random" | "tesalocs" | "both"
    traces: dict = field(default_factory=dict, repr=False)

    def cell(self, function, method, initializer) -> CellResult:
        for c in self.cells:
            if (c.function, c.method, c.initializer) == (function, method, initializer):
                return c
        raise KeyError((function, method, initializer))

    @property
    def failed_runs(self) -> int:
        return sum(c.failures for c in self.cells)

    def win_counts(self, method) -> dict:
        counts = {"random": 0, "tesalocs": 0}
        for (_, m), winner in self.wins.items():
            if m != method:
                continue
            if winner in ("random", "both"):
                counts["random"] += 1
            if winner in ("tesalocs", "both"):
                counts["tesalocs"] += 1
        return counts


def _decide_win(e_random: float, e_tesalocs: float) -> str:
    if e_random < CO_CONVERGENCE and e_tesalocs < CO_CONVERGENCE:
        return "both"
    if e_random == e_tesalocs:
        return "both"
    return "tesalocs" if e_tesalocs < e_random else "random"


def _experiment_space(spec: ExperimentSpec, fn):
    if spec.box_override is not None:
        lo, hi = spec.box_override
        return SearchSpace.uniform(spec.dim, lo, hi, spec.config.grid_nodes)
    return fn.search_space(spec.dim, spec.config.grid_nodes)


def _run_one(spec: ExperimentSpec, fname: str, method: str, init: str, seed: int):
    """One (function, method, initializer, seed) run; returns (error, trace rows)."""
    fn = benchmarks.get(fname)
    space = _experiment_space(spec, fn)
    f_star = fn.minimum_value(spec.dim)
    base_local = replace(spec.config.local, method=method)
    shared_local = resolve_config(
        base_local, (space.lower, space.upper), spec.budget,
        spec.config.batch, spec.dim, spec.config.expected_outer_iterations,
    )
    if init == "tesalocs":
        cfg = replace(spec.config, budget=spec.budget, seed=seed, local=shared_local)
        trace = run(fn.evaluate, space, cfg, vectorized=True)
    else:
        trace = run_baseline(
            fn.evaluate, space, shared_local, spec.budget, seed, vectorized=True
        )
    if trace.best_point is None:
        raise RuntimeError("run produced no evaluations")
    return abs(trace.best_value - f_star), trace.rows


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentReport:
    """Run every (function, method, initializer, seed) cell.

    Cells are independent; with workers > 1 they run in parallel processes
    and results are folded in the same sorted key order either way, so the
    report is identical to a sequential run.  Failures of individual runs
    are recorded per cell and excluded from the aggregates; the experiment
    keeps going.
    """
    keys = [
        (fname, method, init, spec.seed0 + rep)
        for fname in spec.functions
        for method in spec.methods
        for init in spec.initializers
        for rep in range(spec.repeats)
    ]
    outcomes = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {key: pool.submit(_run_one, spec, *key) for key in keys}
            for key, fut in futures.items():
                try:
                    outcomes[key] = fut.result()
                except Exception:
                    outcomes[key] = None
    else:
        for key in keys:
            try:
                outcomes[key] = _run_one(spec, *key)
            except Exception:
                outcomes[key] = None

    cells = []
    traces = {}
    for fname in spec.functions:
        for method in spec.methods:
            for init in spec.initializers:
                errors, failures = [], 0
                for rep in range(spec.repeats):
                    seed = spec.seed0 + rep
                    outcome = outcomes[(fname, method, init, seed)]
                    if outcome is None:
                        failures += 1
                        continue
                    errors.append(outcome[0])
                    traces[(fname, method, init, seed)] = outcome[1]
                cells.append(CellResult(fname, method, init, errors, failures))

    report = ExperimentReport(
        spec_summary={
            "functions": list(spec.functions),
            "dim": spec.dim,
            "budget": spec.budget,
            "repeats": spec.repeats,
            "methods": list(spec.methods),
            "initializers": list(spec.initializers),
            "seed0": spec.seed0,
            "grid_nodes": spec.config.grid_nodes,
            "rank": spec.config.rank,
            "batch": spec.config.batch,
            "elite": spec.config.elite,
        },
        cells=cells,
        wins={},
        traces=traces,
    )
    if set(spec.initializers) == set(INITIALIZERS):
        by_key = {(c.function, c.method, c.initializer): c for c in cells}
        for fname in spec.functions:
            for method in spec.methods:
                e_r = by_key[(fname, method, "random")].mean_error
                e_t = by_key[(fname, method, "tesalocs")].mean_error
                report.wins[(fname, method)] = _decide_win(e_r, e_t)
    return report


def _won(report: ExperimentReport, cell: CellResult) -> int:
    winner = report.wins.get((cell.function, cell.method))
    if winner is None:
        return 0
    return int(winner in (cell.initializer, "both"))


def emit_report(report: ExperimentReport, formats=("csv", "json", "text-table"),
                out_dir=".") -> list:
    """Write the report files (and per-run trace CSVs); returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    if "csv" in formats:
        path = os.path.join(out_dir, "report.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["function", "method", "initializer", "E", "sigma", "wins", "seeds"]
            )
            for cell in report.cells:
                writer.writerow([
                    cell.function, cell.method, cell.initializer,
                    repr(cell.mean_error), repr(cell.sigma),
                    _won(report, cell), len(cell.errors),
                ])
        written.append(path)

    if "json" in formats:
        path = os.path.join(out_dir, "report.json")
        payload = {
            "spec": report.spec_summary,
            "cells": [
                {
                    "function": c.function,
                    "method": c.method,
                    "initializer": c.initializer,
                    "E": c.mean_error,
                    "sigma": c.sigma,
                    "errors": c.errors,
                    "failures": c.failures,
                }
                for c in report.cells
            ],
            "wins": [
                {"function": fn, "method": m, "winner": w}
                for (fn, m), w in sorted(report.wins.items())
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
        written.append(path)

    if "text-table" in formats:
        path = os.path.join(out_dir, "report.txt")
        with open(path, "w") as fh:
            fh.write(format_text_table(report))
        written.append(path)

    if report.traces:
        trace_dir = os.path.join(out_dir, "traces")
        os.makedirs(trace_dir, exist_ok=True)
        for (fname, method, init, seed), rows in sorted(report.traces.items()):
            path = os.path.join(trace_dir, f"{fname}__{method}__{init}__seed{seed}.csv")
            write_trace_csv(rows, path)
            written.append(path)
    return written


def write_trace_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "evals", "best_value"])
        for iteration, evals, best in rows:
            writer.writerow([iteration, evals, repr(float(best))])


def load_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def format_text_table(report: ExperimentReport) -> str:
    """Plain-text table, one method pair per column block; the winning arm
    of each row pair is wrapped in asterisks (both, on co-convergence)."""
    methods = list(dict.fromkeys(c.method for c in report.cells))
    functions = list(dict.fromkeys(c.function for c in report.cells))
    by_key = {(c.function, c.method, c.initializer): c for c in report.cells}

    header = ["function", ""]
    for m in methods:
        header += [f"{m}/random", f"{m}/tesalocs"]
    lines = []

    if report.wins:
        row = ["# of best results", ""]
        for m in methods:
            counts = report.win_counts(m)
            row += [str(counts["random"]), str(counts["tesalocs"])]
        lines.append(row)

    for fname in functions:
        e_row, s_row = [fname, "E"], ["", "sigma"]
        for m in methods:
            for init in ("random", "tesalocs"):
                cell = by_key.get((fname, m, init))
                if cell is None or not cell.errors:
                    e_row.append("-")
                    s_row.append("-")
                    continue
                text = f"{cell.mean_error:.1e}"
                if _won(report, cell):
                    text = f"*{text}*"
                e_row.append(text)
                s_row.append(f"{cell.sigma:.1e}")
        lines.append(e_row)
        lines.append(s_row)

    widths = [max(len(r[i]) for r in [header] + lines) for i in range(len(header))]
    def fmt(row):
        return "  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip()
    return "\n".join([fmt(header)] + [fmt(r) for r in lines]) + "\n"
