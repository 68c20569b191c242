"""Builders for the optimization problems used across the pipeline.

Each builder returns the problem value plus an index map from model symbols
to variable positions, so solvers and tests can read solutions back without
guessing layouts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .errors import CapacityError, InputError
from .instance import Instance, Placement, location_criticality, payoff_row
from .branch_bound import MilpProblem
from .simplex import LpProblem

FULL_LP_GUARD = 2_000_000


@dataclass(frozen=True)
class GcsVariables:
    """Positions of the covering-set MILP variables."""

    y: dict[str, int]      # location selected
    rho: dict[str, int]    # marginal probability
    z: int                 # guaranteed level


@dataclass(frozen=True)
class NspVariables:
    """Positions of the packing MILP variables."""

    y: dict[str, int]               # component in the packing
    z: dict[int, int]               # packing size indicator, by size
    t: dict[int, int]               # linearized size-weighted sum, by size
    infeasible_sentinel: bool = False


@dataclass(frozen=True)
class McwVariables:
    """Positions of the weighted-covering MILP variables."""

    y: dict[str, int]      # component covered
    z: dict[str, int]      # location receives a sensor


def coverage_big_m(instance: Instance) -> float:
    """Big-M for the covering-set MILP: one minus the lowest security level."""
    return 1.0 - min(instance.security_levels.values())


def packing_big_m(instance: Instance, size_cap: int) -> float:
    """Big-M for the packing MILP under a packing-size cap."""
    return size_cap / (1.0 - max(instance.security_levels.values()))


def build_gcs(instance: Instance, budget: int,
              max_support: int | None = None) -> tuple[MilpProblem, GcsVariables]:
    """Covering-set MILP: pick locations and marginals maximizing the
    equalized worst-case level.

    Variables: binary y per location, continuous marginal per location in
    [0, y], and the level z.  ``max_support`` adds a cardinality bound on
    the number of selected locations.
    """
    if max_support is not None and max_support < budget:
        raise InputError(
            f"max_support={max_support} cannot be below the budget {budget}")
    locs = instance.locations
    comps = instance.components
    nx = len(locs)
    ny = {x: i for i, x in enumerate(locs)}
    nrho = {x: nx + i for i, x in enumerate(locs)}
    zi = 2 * nx
    n = 2 * nx + 1
    big_m = coverage_big_m(instance)

    rows, rels, rhs = [], [], []
    # level bounded by each selected location's equalized expression
    for x in locs:
        crit = location_criticality(instance, x)
        row = np.zeros(n)
        row[zi] = 1.0
        row[nrho[x]] = -(1.0 - crit)
        row[ny[x]] = big_m
        rows.append(row)
        rels.append("<=")
        rhs.append(crit + big_m)
    # level bounded by the security level of any unselected-coverage component
    for u in comps:
        row = np.zeros(n)
        row[zi] = 1.0
        for x in instance.coverers(u):
            row[ny[x]] = -big_m
        rows.append(row)
        rels.append("<=")
        rhs.append(instance.security_levels[u])
    # marginal only where selected
    for x in locs:
        row = np.zeros(n)
        row[nrho[x]] = 1.0
        row[ny[x]] = -1.0
        rows.append(row)
        rels.append("<=")
        rhs.append(0.0)
    # marginals sum to the budget
    row = np.zeros(n)
    for x in locs:
        row[nrho[x]] = 1.0
    rows.append(row)
    rels.append("=")
    rhs.append(float(budget))
    if max_support is not None:
        row = np.zeros(n)
        for x in locs:
            row[ny[x]] = 1.0
        rows.append(row)
        rels.append("<=")
        rhs.append(float(max_support))

    objective = np.zeros(n)
    objective[zi] = 1.0
    lower = np.zeros(n)
    upper = np.ones(n)
    lower[zi] = -np.inf
    upper[zi] = np.inf
    lp = LpProblem("max", objective, lower, upper, np.array(rows),
                   tuple(rels), np.array(rhs))
    return MilpProblem(lp, tuple(ny.values())), GcsVariables(ny, nrho, zi)


def build_gcs_tiebreak(instance: Instance, budget: int, value: float,
                       max_support: int | None = None
                       ) -> tuple[MilpProblem, GcsVariables]:
    """Value-fixed covering-set MILP selecting the lexicographically smallest
    optimal location set (weights 2^-(index+1) on the selection variables)."""
    problem, names = build_gcs(instance, budget, max_support)
    lp = problem.lp
    n = lp.num_vars
    fix = np.zeros(n)
    fix[names.z] = 1.0
    rows = np.vstack([lp.rows, fix])
    rels = lp.relations + (">=",)
    rhs = np.append(lp.rhs, value - 1e-9)
    objective = np.zeros(n)
    for x, j in names.y.items():
        objective[j] = -(2.0 ** -(instance.location_index(x) + 1))
    tie_lp = LpProblem("max", objective, lp.lower, lp.upper, rows, rels, rhs)
    return MilpProblem(tie_lp, problem.binaries), names


def build_nsp(instance: Instance, budget: int,
              packing_size_cap: int | None = None
              ) -> tuple[MilpProblem, NspVariables]:
    """Packing MILP minimizing the size-discounted packing weight.

    Minimizes sum(1/(1 - level)) / (size - budget) over packings larger than
    the budget; the reciprocal of its optimum yields the upper bound on the
    game value.  When no packing size above the budget is admissible the
    returned problem is infeasible by construction (callers map that to an
    upper bound of one).
    """
    comps = instance.components
    cap = len(comps) if packing_size_cap is None else min(packing_size_cap,
                                                          len(comps))
    sizes = list(range(budget + 1, cap + 1))
    if not sizes:
        lp = LpProblem("min", np.zeros(0), np.zeros(0), np.zeros(0),
                       np.zeros((1, 0)), ("=",), np.array([1.0]))
        return MilpProblem(lp, ()), NspVariables({}, {}, {}, True)

    ny = {u: i for i, u in enumerate(comps)}
    nu = len(comps)
    nz = {l: nu + i for i, l in enumerate(sizes)}
    nt = {l: nu + len(sizes) + i for i, l in enumerate(sizes)}
    n = nu + 2 * len(sizes)
    big_m = packing_big_m(instance, cap)
    weight = {u: 1.0 / (1.0 - instance.security_levels[u]) for u in comps}

    rows, rels, rhs = [], [], []
    # at most one packed component per monitoring set
    for x in instance.locations:
        row = np.zeros(n)
        for u in instance.monitoring_sets[x]:
            row[ny[u]] = 1.0
        rows.append(row)
        rels.append("<=")
        rhs.append(1.0)
    # selected size matches the packing cardinality
    row = np.zeros(n)
    for u in comps:
        row[ny[u]] = 1.0
    for l in sizes:
        row[nz[l]] = -float(l)
    rows.append(row)
    rels.append("=")
    rhs.append(0.0)
    # exactly one size indicator
    row = np.zeros(n)
    for l in sizes:
        row[nz[l]] = 1.0
    rows.append(row)
    rels.append("=")
    rhs.append(1.0)
    # t_l picks up the packing weight at the active size
    for l in sizes:
        row = np.zeros(n)
        row[nt[l]] = 1.0
        for u in comps:
            row[ny[u]] = -weight[u]
        row[nz[l]] = -big_m
        rows.append(row)
        rels.append(">=")
        rhs.append(-big_m)

    objective = np.zeros(n)
    for l in sizes:
        objective[nt[l]] = 1.0 / (l - budget)
    lower = np.zeros(n)
    upper = np.ones(n)
    for l in sizes:
        upper[nt[l]] = np.inf
    lp = LpProblem("min", objective, lower, upper, np.array(rows),
                   tuple(rels), np.array(rhs))
    binaries = tuple(ny.values()) + tuple(nz.values())
    return MilpProblem(lp, binaries), NspVariables(ny, nz, nt)


def build_mwc(instance: Instance, budget: int,
              component_weights: Mapping[str, float],
              constant_term: float = 0.0) -> tuple[MilpProblem, McwVariables]:
    """Weighted-covering MILP: place the budget to maximize the expected
    post-security level under the given component weights."""
    if budget > len(instance.locations):
        raise InputError(
            f"budget {budget} exceeds the {len(instance.locations)} locations")
    comps = instance.components
    locs = instance.locations
    weights = {}
    for u, w in component_weights.items():
        if u not in instance._comp_index:
            raise InputError(f"unknown component {u!r} in weights")
        if w < -1e-12:
            raise InputError(f"negative weight {w} on component {u!r}")
        weights[u] = max(float(w), 0.0)
    ny = {u: i for i, u in enumerate(comps)}
    nz = {x: len(comps) + i for i, x in enumerate(locs)}
    n = len(comps) + len(locs)

    rows, rels, rhs = [], [], []
    for u in comps:
        row = np.zeros(n)
        row[ny[u]] = 1.0
        for x in instance.coverers(u):
            row[nz[x]] = -1.0
        rows.append(row)
        rels.append("<=")
        rhs.append(0.0)
    row = np.zeros(n)
    for x in locs:
        row[nz[x]] = 1.0
    rows.append(row)
    rels.append("=")
    rhs.append(float(budget))

    objective = np.zeros(n)
    offset = float(constant_term)
    for u in comps:
        w = weights.get(u, 0.0)
        level = instance.security_levels[u]
        objective[ny[u]] = w * (1.0 - level)
        offset += w * level
    lp = LpProblem("max", objective, np.zeros(n), np.ones(n), np.array(rows),
                   tuple(rels), np.array(rhs), offset=offset)
    return MilpProblem(lp, tuple(range(n))), McwVariables(ny, nz)


def enumerate_placements(instance: Instance, size: int) -> list[Placement]:
    """All placements of exactly ``size`` locations, lexicographic order."""
    total = math.comb(len(instance.locations), size)
    if total > FULL_LP_GUARD:
        raise CapacityError(
            f"{total} placements exceed the enumeration guard {FULL_LP_GUARD}",
            count=total)
    return [Placement(c) for c in combinations(sorted(instance.locations), size)]


def build_full_lp(instance: Instance, budget: int
                  ) -> tuple[LpProblem, list[Placement]]:
    """Game LP over every size-``budget`` placement.

    Smaller placements are dominated (coverage is monotone), so only exact-
    size placements are enumerated.
    """
    if budget > len(instance.locations):
        raise InputError(
            f"budget {budget} exceeds the {len(instance.locations)} locations")
    placements = enumerate_placements(instance, budget)
    return build_restricted_master(instance, placements)[0], placements


def build_restricted_master(instance: Instance, columns: Sequence[Placement]
                            ) -> tuple[LpProblem, dict[str, int]]:
    """Master LP over the given placements: maximize the worst expected level.

    Row order: one row per component (duals are the attacker weights), then
    the probability-sum row (dual is the game-value price).
    """
    if not columns:
        raise InputError("restricted master needs at least one column")
    comps = instance.components
    k = len(columns)
    n = k + 1          # placement probabilities plus the level variable
    zi = k
    rows, rels, rhs = [], [], []
    payoff = np.array([payoff_row(instance, p) for p in columns])  # (k, |U|)
    for ui in range(len(comps)):
        row = np.zeros(n)
        row[zi] = 1.0
        row[:k] = -payoff[:, ui]
        rows.append(row)
        rels.append("<=")
        rhs.append(0.0)
    row = np.zeros(n)
    row[:k] = 1.0
    rows.append(row)
    rels.append("=")
    rhs.append(1.0)

    objective = np.zeros(n)
    objective[zi] = 1.0
    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    lower[zi] = -np.inf
    lp = LpProblem("max", objective, lower, upper, np.array(rows),
                   tuple(rels), np.array(rhs))
    return lp, {"z": zi, "num_columns": k}


def gcs_warm_start(instance: Instance, budget: int,
                   names: GcsVariables) -> np.ndarray | None:
    """Feasible covering-set point selecting every location (equalized
    marginals); used to seed branch-and-bound pruning."""
    from .instance import k_star, optimal_marginals  # local to avoid cycle

    locs = instance.locations
    n = 2 * len(locs) + 1
    x = np.zeros(n)
    for j in names.y.values():
        x[j] = 1.0
    if budget > len(locs):
        return None
    if budget == len(locs):
        value = 1.0
        for xname in locs:
            x[names.rho[xname]] = 1.0
    else:
        _, _, value = k_star(instance, locs, budget)
        marg = optimal_marginals(instance, locs, budget)
        for xname in locs:
            x[names.rho[xname]] = marg.get(xname)
    x[names.z] = value
    return x
