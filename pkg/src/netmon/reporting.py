"""Method sweeps, report emission, and schedule sampling."""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .colgen import solve_cg
from .decomposition import decompose
from .errors import InputError, InvariantViolation
from .instance import (Instance, MixedStrategy, Placement, TOL,
                       evaluate_strategy, node_basis, require_valid)
from .mwu import solve_mwu
from .oracle import solve_exact
from .pipeline import solve_gcs, upper_bound

METHODS = ("gcs", "ub", "exact", "cg", "mwu")

CSV_COLUMNS = (
    "r", "lb_gcs", "achieved", "ub_packing", "value_exact", "value_cg",
    "value_mwu", "time_gcs_ca", "time_ub", "time_cg", "time_mwu",
    "node_basis_gcs", "node_basis_cg", "node_basis_mwu", "support_gcs",
)

#: columns holding wall-clock measurements, excluded from determinism claims
TIMING_COLUMNS = ("time_gcs_ca", "time_ub", "time_cg", "time_mwu")


@dataclass
class SweepLimits:
    cg_tolerance: float = 1e-7
    cg_time_limit: float = 600.0
    cg_iteration_limit: int = 10_000
    mwu_epsilon: float = 0.1
    mwu_iterations: int | None = None
    mwu_mode: str = "exact"
    max_support: int | None = None


@dataclass
class SweepRow:
    r: int
    cells: dict[str, float | int | None] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    def get(self, column: str):
        if column == "r":
            return self.r
        return self.cells.get(column)


@dataclass
class SweepReport:
    rows: list[SweepRow]
    methods: tuple[str, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(
                ["" if row.get(c) is None else repr(row.get(c))
                 if isinstance(row.get(c), float) else row.get(c)
                 for c in CSV_COLUMNS])
        return out.getvalue()

    def to_json(self) -> str:
        payload = {
            "methods": list(self.methods),
            "rows": [
                {**{c: row.get(c) for c in CSV_COLUMNS},
                 **({"errors": row.errors} if row.errors else {})}
                for row in self.rows
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def run_sweep(instance: Instance, r_list: Sequence[int],
              methods: Sequence[str] = METHODS,
              limits: SweepLimits | None = None) -> SweepReport:
    """Run each requested method for each budget; per-cell failures are
    recorded and the sweep continues."""
    require_valid(instance)
    limits = limits or SweepLimits()
    methods = tuple(methods)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise InputError(f"unknown sweep method {sorted(unknown)[0]!r}")

    rows = []
    for r in r_list:
        row = SweepRow(int(r))
        if "gcs" in methods:
            _run_cell(row, "gcs", _cell_gcs, instance, r, limits)
        if "ub" in methods:
            _run_cell(row, "ub", _cell_ub, instance, r, limits)
        if "exact" in methods:
            _run_cell(row, "exact", _cell_exact, instance, r, limits)
        if "cg" in methods:
            _run_cell(row, "cg", _cell_cg, instance, r, limits)
        if "mwu" in methods:
            _run_cell(row, "mwu", _cell_mwu, instance, r, limits)

        lb = row.cells.get("lb_gcs")
        ub = row.cells.get("ub_packing")
        if lb is not None and ub is not None and lb > ub + 1e-7:
            raise InvariantViolation(
                "bound crossing detected; diagnostics: "
                + json.dumps({"r": row.r, "cells": row.cells}, sort_keys=True))
        rows.append(row)
    return SweepReport(rows, methods)


def _run_cell(row, name, fn, instance, r, limits):
    try:
        fn(row, instance, r, limits)
    except Exception as exc:  # record and continue with the other cells
        row.errors[name] = f"{type(exc).__name__}: {exc}"


def _cell_gcs(row, instance, r, limits):
    t0 = time.perf_counter()
    value, _, rho = solve_gcs(instance, r, limits.max_support)
    strategy = decompose(rho, r)
    elapsed = time.perf_counter() - t0
    achieved, _ = evaluate_strategy(instance, strategy)
    row.cells["lb_gcs"] = value
    row.cells["achieved"] = achieved
    row.cells["time_gcs_ca"] = elapsed
    row.cells["node_basis_gcs"] = len(node_basis(strategy))
    row.cells["support_gcs"] = strategy.support_size()


def _cell_ub(row, instance, r, limits):
    t0 = time.perf_counter()
    value, _ = upper_bound(instance, r)
    row.cells["time_ub"] = time.perf_counter() - t0
    row.cells["ub_packing"] = value


def _cell_exact(row, instance, r, limits):
    value, _ = solve_exact(instance, r)
    row.cells["value_exact"] = value


def _cell_cg(row, instance, r, limits):
    t0 = time.perf_counter()
    result = solve_cg(instance, r, tolerance=limits.cg_tolerance,
                      time_limit=limits.cg_time_limit,
                      iteration_limit=limits.cg_iteration_limit)
    row.cells["time_cg"] = time.perf_counter() - t0
    row.cells["value_cg"] = result.value
    row.cells["node_basis_cg"] = len(node_basis(result.strategy))
    if result.termination != "priced_out":
        row.errors.setdefault("cg", f"stopped early: {result.termination}")


def _cell_mwu(row, instance, r, limits):
    t0 = time.perf_counter()
    result = solve_mwu(instance, r, epsilon=limits.mwu_epsilon,
                       iterations=limits.mwu_iterations, mode=limits.mwu_mode)
    row.cells["time_mwu"] = time.perf_counter() - t0
    row.cells["value_mwu"] = result.achieved_value
    row.cells["node_basis_mwu"] = len(node_basis(result.strategy))


def sample_schedule(strategy: MixedStrategy, days: int, seed: int = 0,
                    mode: str = "iid") -> list[Placement]:
    """Turn a mixed strategy into a day-by-day placement schedule.

    iid mode draws independently from the strategy with a seeded generator;
    cycle mode walks the atoms in order and requires a uniform strategy over
    equal-size placements.
    """
    if days < 1:
        raise InputError("need at least one day")
    atoms = strategy.atoms
    if mode == "iid":
        rng = np.random.default_rng(seed)
        probs = np.array([w for _, w in atoms])
        probs = probs / probs.sum()
        draws = rng.choice(len(atoms), size=days, p=probs)
        return [atoms[i][0] for i in draws]
    if mode == "cycle":
        sizes = {len(p) for p, _ in atoms}
        weights = {round(w, 9) for _, w in atoms}
        if len(sizes) != 1 or len(weights) != 1 or \
                abs(atoms[0][1] - 1.0 / len(atoms)) > TOL:
            raise InputError(
                "cycle mode needs a uniform strategy over equal-size placements")
        return [atoms[d % len(atoms)][0] for d in range(days)]
    raise InputError(f"unknown schedule mode {mode!r}")
