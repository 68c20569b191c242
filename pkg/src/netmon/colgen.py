"""Column generation for the exact game value: restricted masters over
generated placements with weighted-covering pricing."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .branch_bound import solve_milp
from .errors import InputError, InvariantViolation
from .formulations import build_mwc, build_restricted_master
from .instance import Instance, MixedStrategy, Placement, require_valid
from .simplex import solve_lp

PRICING_TOL = 1e-7
DEFAULT_TIME_LIMIT = 600.0

PRICED_OUT = "priced_out"
TIME_LIMIT = "time_limit"
ITERATION_LIMIT = "iteration_limit"


@dataclass
class CgResult:
    strategy: MixedStrategy
    value: float
    iterations: int
    columns: list[Placement]
    reduced_costs: list[float] = field(default_factory=list)
    termination: str = PRICED_OUT


def greedy_coverage(instance: Instance, budget: int,
                    gains: dict[str, float]) -> Placement:
    """Pick locations one by one maximizing the remaining weighted coverage
    gain; deterministic (ties by identifier), padded to the exact size."""
    chosen: list[str] = []
    uncovered = {u for u, g in gains.items() if g > 0}
    available = sorted(instance.locations)
    while len(chosen) < budget:
        best, best_gain = None, -1.0
        for x in available:
            if x in chosen:
                continue
            gain = sum(gains.get(u, 0.0)
                       for u in instance.monitoring_sets[x] if u in uncovered)
            if gain > best_gain + 1e-15:
                best, best_gain = x, gain
        chosen.append(best)
        uncovered -= instance.monitoring_sets[best]
    return Placement.of(chosen)


def initial_columns(instance: Instance, budget: int) -> list[Placement]:
    """Feasible starting columns: a greedy coverage placement for uniform
    weights plus one covering placement per most-critical component."""
    num = len(instance.components)
    uniform = {u: (1.0 - instance.security_levels[u]) / num
               for u in instance.components}
    columns = [greedy_coverage(instance, budget, uniform)]
    critical = sorted(instance.components,
                      key=lambda u: (instance.security_levels[u], u))[:budget]
    for u in critical:
        first = min(instance.coverers(u))
        members = {first}
        if budget > 1:
            rest = {v: w for v, w in uniform.items()
                    if v not in instance.monitoring_sets[first]}
            members |= set(greedy_coverage(instance, budget - 1, rest).locations)
        for x in sorted(instance.locations):
            if len(members) >= budget:
                break
            members.add(x)
        column = Placement.of(members)
        if column not in columns:
            columns.append(column)
    return columns


def price(instance: Instance, budget: int, alpha: dict[str, float],
          beta: float) -> tuple[float, Placement]:
    """Exact pricing: the best reduced cost over placements and a maximizer,
    via the weighted-covering MILP."""
    clipped = {u: max(0.0, w) for u, w in alpha.items()}
    problem, names = build_mwc(instance, budget, clipped, constant_term=-beta)
    seed = _mwc_seed(instance, budget, clipped, problem.lp.num_vars, names)
    sol = solve_milp(problem, incumbent=seed)
    if sol.status != "optimal":
        raise InvariantViolation(f"pricing MILP status {sol.status}")
    placement = Placement.of(
        x for x in instance.locations if sol.x[names.z[x]] > 0.5)
    return float(sol.objective), placement


def _mwc_seed(instance, budget, weights, num_vars, names):
    gains = {u: w * (1.0 - instance.security_levels[u])
             for u, w in weights.items()}
    placement = greedy_coverage(instance, budget, gains)
    x = np.zeros(num_vars)
    covered = instance.covered_by(placement.locations)
    for xname in placement.locations:
        x[names.z[xname]] = 1.0
    for u in covered:
        x[names.y[u]] = 1.0
    return x


def solve_cg(instance: Instance, budget: int, tolerance: float = PRICING_TOL,
             time_limit: float = DEFAULT_TIME_LIMIT,
             iteration_limit: int = 10_000) -> CgResult:
    """Generate columns until none prices above the tolerance (exact value)
    or a limit stops the loop (honest partial result)."""
    require_valid(instance)
    if budget > len(instance.locations):
        raise InputError(
            f"budget {budget} exceeds the {len(instance.locations)} locations")
    started = time.perf_counter()
    columns = initial_columns(instance, budget)
    column_set = set(columns)
    comps = instance.components
    reduced_costs: list[float] = []
    termination = ITERATION_LIMIT
    iterations = 0
    master_sol = None

    while iterations < iteration_limit:
        iterations += 1
        master_lp, _ = build_restricted_master(instance, columns)
        master_sol = solve_lp(master_lp)
        if master_sol.status != "optimal":
            raise InvariantViolation(f"master LP status {master_sol.status}")
        alpha = {u: max(0.0, float(master_sol.duals[i]))
                 for i, u in enumerate(comps)}
        beta = float(master_sol.duals[len(comps)])
        reduced_cost, column = price(instance, budget, alpha, beta)
        reduced_costs.append(reduced_cost)
        if reduced_cost <= tolerance:
            termination = PRICED_OUT
            break
        if column in column_set:
            # numerically positive reduced cost on a known column: stop honestly
            termination = PRICED_OUT
            break
        columns.append(column)
        column_set.add(column)
        if time.perf_counter() - started > time_limit:
            termination = TIME_LIMIT
            master_lp, _ = build_restricted_master(instance, columns)
            master_sol = solve_lp(master_lp)
            break

    sigma = np.maximum(master_sol.x[:len(columns)], 0.0)
    atoms = [(p, w) for p, w in zip(columns, sigma) if w > 1e-12]
    mass = sum(w for _, w in atoms)
    strategy = MixedStrategy.of([(p, w / mass) for p, w in atoms])
    return CgResult(strategy, float(master_sol.objective), iterations,
                    columns, reduced_costs, termination)
