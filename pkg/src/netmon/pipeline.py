"""Three-step solution pipeline: covering-set lower bound, coordination
decomposition, and packing upper bound, plus special-case shortcuts."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .branch_bound import solve_milp
from .decomposition import decompose
from .errors import InputError, InvariantViolation
from .formulations import (build_gcs, build_gcs_tiebreak, build_nsp,
                           gcs_warm_start)
from .instance import (Instance, MarginalVector, MixedStrategy, Placement,
                       evaluate_strategy, k_star, location_criticality,
                       optimal_marginals, require_valid)
from .simplex import LpProblem

logger = logging.getLogger(__name__)


@dataclass
class ApproxSolution:
    """Strategy plus bound certificates from the three-step pipeline."""

    strategy: MixedStrategy
    lower_bound: float
    achieved_value: float
    upper_bound: float
    gap: float
    relative_gap: float
    chosen_locations: tuple[str, ...]
    witness_packing: tuple[str, ...]
    worst_components: tuple[str, ...]
    timings: dict[str, float] = field(default_factory=dict)


# -- covering/packing auxiliaries ---------------------------------------------

def greedy_cover(instance: Instance) -> list[str]:
    """Deterministic greedy set cover (largest new coverage, ties by id)."""
    uncovered = set(instance.components)
    chosen: list[str] = []
    while uncovered:
        best = min(instance.locations,
                   key=lambda x: (-len(instance.monitoring_sets[x] & uncovered),
                                  x))
        if not instance.monitoring_sets[best] & uncovered:
            raise InputError("some component cannot be covered")
        chosen.append(best)
        uncovered -= instance.monitoring_sets[best]
    return chosen


def greedy_packing(instance: Instance, prefer_critical: bool = False) -> list[str]:
    """Deterministic maximal packing; optionally prefers low security levels."""
    if prefer_critical:
        order = sorted(instance.components,
                       key=lambda u: (instance.security_levels[u], u))
    else:
        order = sorted(instance.components)
    used: set[str] = set()
    chosen: list[str] = []
    for u in order:
        hit = instance.coverers(u)
        if hit & used:
            continue
        chosen.append(u)
        used |= hit
    return chosen


@lru_cache(maxsize=512)
def min_set_cover(instance: Instance) -> tuple[int, tuple[str, ...]]:
    """Exact minimum set cover via the standard covering IP."""
    require_valid(instance)
    locs = instance.locations
    n = len(locs)
    idx = {x: i for i, x in enumerate(locs)}
    rows, rhs = [], []
    for u in instance.components:
        row = np.zeros(n)
        for x in instance.coverers(u):
            row[idx[x]] = 1.0
        rows.append(row)
        rhs.append(1.0)
    lp = LpProblem("min", np.ones(n), np.zeros(n), np.ones(n),
                   np.array(rows), (">=",) * len(rows), np.array(rhs))
    seed = np.zeros(n)
    for x in greedy_cover(instance):
        seed[idx[x]] = 1.0
    from .branch_bound import MilpProblem
    sol = solve_milp(MilpProblem(lp, tuple(range(n))), incumbent=seed)
    if sol.status != "optimal":
        raise InvariantViolation(f"set cover IP ended with status {sol.status}")
    cover = tuple(x for x in locs if sol.x[idx[x]] > 0.5)
    return int(round(sol.objective)), cover


@lru_cache(maxsize=512)
def max_set_packing(instance: Instance) -> tuple[int, tuple[str, ...]]:
    """Exact maximum set packing via the standard packing IP."""
    require_valid(instance)
    comps = instance.components
    n = len(comps)
    idx = {u: i for i, u in enumerate(comps)}
    rows, rhs = [], []
    for x in instance.locations:
        row = np.zeros(n)
        for u in instance.monitoring_sets[x]:
            row[idx[u]] = 1.0
        rows.append(row)
        rhs.append(1.0)
    lp = LpProblem("max", np.ones(n), np.zeros(n), np.ones(n),
                   np.array(rows), ("<=",) * len(rows), np.array(rhs))
    seed = np.zeros(n)
    for u in greedy_packing(instance):
        seed[idx[u]] = 1.0
    from .branch_bound import MilpProblem
    sol = solve_milp(MilpProblem(lp, tuple(range(n))), incumbent=seed)
    if sol.status != "optimal":
        raise InvariantViolation(f"set packing IP ended with status {sol.status}")
    packing = tuple(u for u in comps if sol.x[idx[u]] > 0.5)
    return int(round(sol.objective)), packing


# -- pipeline stages -----------------------------------------------------------

def solve_gcs(instance: Instance, budget: int, max_support: int | None = None
              ) -> tuple[float, tuple[str, ...], MarginalVector]:
    """Covering-set step: best guaranteed level, the canonical optimal
    location set, and the equalizing marginals on it."""
    require_valid(instance)
    if budget > len(instance.locations):
        raise InputError(
            f"budget {budget} exceeds the {len(instance.locations)} locations")
    problem, names = build_gcs(instance, budget, max_support)
    seed = gcs_warm_start(instance, budget, names) if max_support is None else None
    sol = solve_milp(problem, incumbent=seed)
    if sol.status != "optimal":
        raise InvariantViolation(f"covering-set MILP status {sol.status}")
    value = float(sol.objective)

    tie_problem, _ = build_gcs_tiebreak(instance, budget, value, max_support)
    tie = solve_milp(tie_problem, gap_tolerance=1e-12, incumbent=sol.x)
    if tie.status != "optimal":
        raise InvariantViolation(f"covering-set tie-break status {tie.status}")
    chosen = tuple(x for x in instance.locations if tie.x[names.y[x]] > 0.5)
    if len(chosen) > budget:
        rho = optimal_marginals(instance, chosen, budget)
    elif len(chosen) == budget:
        rho = MarginalVector({x: 1.0 for x in chosen})
    else:
        raise InvariantViolation(
            f"covering set of size {len(chosen)} below budget {budget}")
    return value, chosen, rho


def upper_bound(instance: Instance, budget: int) -> tuple[float, tuple[str, ...]]:
    """Packing step: tightest packing-based bound and a witness packing."""
    require_valid(instance)
    m_star, _ = max_set_packing(instance)
    if m_star <= budget:
        return 1.0, ()
    problem, names = build_nsp(instance, budget, packing_size_cap=m_star)
    seed = _nsp_seed(instance, budget, m_star, problem.lp.num_vars, names)
    sol = solve_milp(problem, incumbent=seed)
    if sol.status == "infeasible":
        return 1.0, ()
    if sol.status != "optimal":
        raise InvariantViolation(f"packing MILP status {sol.status}")
    value = min(1.0, 1.0 - 1.0 / sol.objective)
    packing = tuple(u for u in instance.components if sol.x[names.y[u]] > 0.5)
    return float(value), packing


def _nsp_seed(instance, budget, cap, num_vars, names):
    """Greedy packing prefix as a feasible starting point for the packing MILP."""
    greedy = greedy_packing(instance, prefer_critical=True)
    if len(greedy) <= budget:
        return None
    weights = [1.0 / (1.0 - instance.security_levels[u]) for u in greedy]
    best_l, best_ratio = None, math.inf
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        size = i + 1
        if budget < size <= cap:
            ratio = acc / (size - budget)
            if ratio < best_ratio:
                best_ratio, best_l = ratio, size
    if best_l is None:
        return None
    x = np.zeros(num_vars)
    total = 0.0
    for u in greedy[:best_l]:
        x[names.y[u]] = 1.0
        total += 1.0 / (1.0 - instance.security_levels[u])
    x[names.z[best_l]] = 1.0
    x[names.t[best_l]] = total
    return x


def solve_approx(instance: Instance, budget: int,
                 max_support: int | None = None) -> ApproxSolution:
    """Run the full pipeline; shortcuts to a covering placement when the
    budget suffices for a set cover."""
    require_valid(instance)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    n_star, cover = min_set_cover(instance)
    timings["set_cover"] = time.perf_counter() - t0

    if budget >= n_star:
        padded = list(cover)
        for x in sorted(instance.locations):
            if len(padded) >= min(budget, len(instance.locations)):
                break
            if x not in padded:
                padded.append(x)
        strategy = MixedStrategy.point_mass(Placement.of(padded))
        return ApproxSolution(strategy, 1.0, 1.0, 1.0, 0.0, 0.0,
                              tuple(cover), (), tuple(), timings)

    t0 = time.perf_counter()
    lower, chosen, rho = solve_gcs(instance, budget, max_support)
    timings["gcs"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    strategy = decompose(rho, budget)
    timings["decompose"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    upper, packing = upper_bound(instance, budget)
    timings["upper_bound"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    achieved, worst = evaluate_strategy(instance, strategy)
    timings["evaluate"] = time.perf_counter() - t0

    if achieved < lower - 1e-7:
        logger.warning(
            "decomposed strategy achieves %.9f, below the covering-set bound "
            "%.9f; reporting both", achieved, lower)
    gap = upper - max(lower, achieved)
    return ApproxSolution(strategy, float(lower), float(achieved),
                          float(upper), float(gap), float(gap / upper),
                          chosen, packing, tuple(worst), timings)


# -- special cases --------------------------------------------------------------

def cycling_strategy(cover: tuple[str, ...], budget: int) -> MixedStrategy:
    """Uniform mixture cycling the budget over a cover; every location in the
    cover is monitored with probability budget/len(cover)."""
    n = len(cover)
    if budget >= n:
        raise InputError("cycling requires a budget below the cover size")
    ordered = sorted(cover)
    rounds = n // math.gcd(n, budget)
    atoms = []
    for t in range(rounds):
        block = [ordered[(t * budget + i) % n] for i in range(budget)]
        atoms.append((Placement.of(block), 1.0 / rounds))
    return MixedStrategy.of(atoms)


def homogeneous_solution(instance: Instance, budget: int) -> ApproxSolution:
    """Closed-form bounds and cycling strategy when all security levels agree."""
    require_valid(instance)
    levels = set(instance.security_levels.values())
    if len(levels) != 1:
        raise InputError("homogeneous_solution requires identical security levels")
    level = levels.pop()
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    n_star, cover = min_set_cover(instance)
    m_star, packing = max_set_packing(instance)
    timings["cover_packing"] = time.perf_counter() - t0
    if budget >= n_star:
        raise InputError(
            f"budget {budget} already covers everything (cover size {n_star})")
    lower = level + (1.0 - level) * budget / n_star
    upper = min(1.0, level + (1.0 - level) * budget / m_star)
    t0 = time.perf_counter()
    strategy = cycling_strategy(cover, budget)
    achieved, worst = evaluate_strategy(instance, strategy)
    timings["strategy"] = time.perf_counter() - t0
    gap = upper - max(lower, achieved)
    return ApproxSolution(strategy, float(lower), float(achieved),
                          float(upper), float(gap), float(gap / upper),
                          tuple(cover), tuple(packing), tuple(worst), timings)


def disjoint_solution(instance: Instance, budget: int) -> ApproxSolution:
    """Exact solution when monitoring sets are pairwise disjoint."""
    require_valid(instance)
    locs = list(instance.locations)
    seen: dict[str, str] = {}
    for x in locs:
        for u in instance.monitoring_sets[x]:
            if u in seen:
                raise InputError(
                    f"monitoring sets of {seen[u]!r} and {x!r} overlap on {u!r}")
            seen[u] = x
    if budget >= len(locs):
        raise InputError("disjoint_solution requires budget below the location count")

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    k, _, value = k_star(instance, locs, budget)
    rho = optimal_marginals(instance, locs, budget)
    strategy = decompose(rho, budget)
    achieved, worst = evaluate_strategy(instance, strategy)
    timings["closed_form"] = time.perf_counter() - t0

    critical = sorted(locs, key=lambda x: (location_criticality(instance, x), x))[:k]
    witness = tuple(
        min(instance.monitoring_sets[x],
            key=lambda u: (instance.security_levels[u], u))
        for x in critical)
    return ApproxSolution(strategy, float(value), float(achieved),
                          float(value), 0.0, 0.0, tuple(instance.locations),
                          witness, tuple(worst), timings)
