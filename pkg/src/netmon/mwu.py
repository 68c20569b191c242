"""Multiplicative weights update: iterated attacker reweighting against
operator best responses, averaged into an approximately optimal strategy."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .branch_bound import MilpProblem, solve_milp
from .errors import InputError, InvariantViolation
from .formulations import build_mwc
from .instance import (AttackerStrategy, Instance, MixedStrategy, Placement,
                       evaluate_strategy, require_valid)
from .simplex import LpProblem

EXACT = "exact"
GREEDY = "greedy"


@dataclass
class MwuResult:
    strategy: MixedStrategy
    achieved_value: float
    guarantee_slack: float     # sqrt(2 ln|U| / N) + ln|U| / N
    eta: float
    iterations: int
    mode: str
    response_log: list[tuple[tuple[str, ...], float]] = field(default_factory=list)


def eta(num_components: float, iterations: int) -> float:
    """Update factor 1 / (1 + sqrt(2 ln|U| / N))."""
    if num_components < 1 or iterations < 1:
        raise InputError("need at least one component and one iteration")
    return 1.0 / (1.0 + math.sqrt(2.0 * math.log(num_components) / iterations))


def iterations_for_gap(num_components: float, epsilon: float) -> int:
    """Iteration count 4 * ceil(ln|U| / eps^2) for an absolute gap of eps."""
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    if num_components < 1:
        raise InputError("need at least one component")
    return 4 * math.ceil(math.log(num_components) / epsilon ** 2)


def best_response(instance: Instance, budget: int,
                  attacker: AttackerStrategy, mode: str = EXACT) -> Placement:
    """Operator best response to an attacker distribution.

    Exact mode solves the weighted-covering MILP; greedy mode iteratively
    takes the location with the largest uncovered weighted gain (ties by
    identifier), matching the classical (1 - 1/e) coverage heuristic.
    """
    if mode == EXACT:
        problem, names = build_mwc(instance, budget, attacker.weights, 0.0)
        seed = _coverage_seed(instance, budget, attacker.weights,
                              problem.lp.num_vars, names)
        sol = solve_milp(problem, incumbent=seed)
        if sol.status != "optimal":
            raise InvariantViolation(f"best-response MILP status {sol.status}")
        return Placement.of(x for x in instance.locations
                            if sol.x[names.z[x]] > 0.5)
    if mode == GREEDY:
        return _greedy_response(instance, budget, attacker.weights)
    raise InputError(f"unknown best-response mode {mode!r}")


def _greedy_response(instance: Instance, budget: int,
                     weights: dict[str, float]) -> Placement:
    if budget > len(instance.locations):
        raise InputError(
            f"budget {budget} exceeds the {len(instance.locations)} locations")
    gains = {u: weights.get(u, 0.0) * (1.0 - instance.security_levels[u])
             for u in instance.components}
    chosen: list[str] = []
    uncovered = set(instance.components)
    ordered = sorted(instance.locations)
    while len(chosen) < budget:
        best, best_gain = None, -1.0
        for x in ordered:
            if x in chosen:
                continue
            gain = sum(gains[u] for u in instance.monitoring_sets[x]
                       if u in uncovered)
            if gain > best_gain + 1e-15:
                best, best_gain = x, gain
        chosen.append(best)
        uncovered -= instance.monitoring_sets[best]
    return Placement.of(chosen)


def _coverage_seed(instance, budget, weights, num_vars, names):
    placement = _greedy_response(instance, budget, weights)
    x = np.zeros(num_vars)
    for loc in placement.locations:
        x[names.z[loc]] = 1.0
    for u in instance.covered_by(placement.locations):
        x[names.y[u]] = 1.0
    return x


def solve_mwu(instance: Instance, budget: int, epsilon: float | None = None,
              iterations: int | None = None, mode: str = EXACT) -> MwuResult:
    """Run the update loop and average the best responses.

    Either ``epsilon`` (which sets the iteration count for that absolute
    gap) or an explicit ``iterations`` must be given.  The algorithm itself
    is deterministic: the attacker starts uniform and is reweighted by
    eta^(post-security) each round.
    """
    require_valid(instance)
    comps = instance.components
    num = len(comps)
    if num < 2:
        raise InputError("multiplicative weights needs at least two components")
    if budget > len(instance.locations):
        raise InputError(
            f"budget {budget} exceeds the {len(instance.locations)} locations")
    if iterations is None:
        if epsilon is None:
            raise InputError("give either epsilon or iterations")
        iterations = iterations_for_gap(num, epsilon)
    rounds = int(iterations)
    factor = eta(num, rounds)

    levels = np.array([instance.security_levels[u] for u in comps])
    cover_mask: dict[Placement, np.ndarray] = {}
    weights = np.full(num, 1.0 / num)
    counts: dict[Placement, int] = {}
    log: list[tuple[tuple[str, ...], float]] = []

    # rebuild the covering MILP once; only the objective changes per round
    problem, names = build_mwc(instance, budget,
                               {u: 1.0 / num for u in comps}, 0.0)
    base_lp = problem.lp
    y_pos = np.array([names.y[u] for u in comps])

    for _ in range(rounds):
        attacker = dict(zip(comps, weights))
        if mode == EXACT:
            objective = np.zeros(base_lp.num_vars)
            objective[y_pos] = weights * (1.0 - levels)
            offset = float(weights @ levels)
            lp = LpProblem("max", objective, base_lp.lower, base_lp.upper,
                           base_lp.rows, base_lp.relations, base_lp.rhs,
                           offset=offset)
            seed = _coverage_seed(instance, budget, attacker,
                                  base_lp.num_vars, names)
            sol = solve_milp(MilpProblem(lp, problem.binaries), incumbent=seed)
            if sol.status != "optimal":
                raise InvariantViolation(
                    f"best-response MILP status {sol.status}")
            placement = Placement.of(
                x for x in instance.locations if sol.x[names.z[x]] > 0.5)
            payoff_value = float(sol.objective)
        else:
            placement = _greedy_response(instance, budget, attacker)
            mask = cover_mask.get(placement)
            if mask is None:
                covered = instance.covered_by(placement.locations)
                mask = np.array([u in covered for u in comps])
                cover_mask[placement] = mask
            payoff_value = float(weights @ np.where(mask, 1.0, levels))

        counts[placement] = counts.get(placement, 0) + 1
        log.append((placement.locations, payoff_value))

        mask = cover_mask.get(placement)
        if mask is None:
            covered = instance.covered_by(placement.locations)
            mask = np.array([u in covered for u in comps])
            cover_mask[placement] = mask
        post = np.where(mask, 1.0, levels)
        weights = weights * factor ** post
        weights /= weights.sum()

    strategy = MixedStrategy.of(
        [(p, c / rounds) for p, c in sorted(counts.items(),
                                            key=lambda kv: kv[0].locations)])
    achieved, _ = evaluate_strategy(instance, strategy)
    slack = math.sqrt(2.0 * math.log(num) / rounds) + math.log(num) / rounds
    return MwuResult(strategy, float(achieved), slack, factor, rounds, mode, log)
