"""Brute-force reference solvers for small instances.

These deliberately share no solver code with the simplex/branch-and-bound
stack: the game LP goes through scipy's HiGHS interface and the bound
computations are plain enumerations, so agreement with the main pipeline is
meaningful cross-validation.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .errors import CapacityError, InputError
from .instance import (Instance, MixedStrategy, Placement, k_star,
                       location_criticality, min_level_outside, require_valid)

FULL_LP_GUARD = 2_000_000
SUBSET_GUARD = 20


def solve_exact(instance: Instance, budget: int
                ) -> tuple[float, MixedStrategy]:
    """Optimal game value and strategy from the LP over all size-``budget``
    placements (solved with HiGHS)."""
    require_valid(instance)
    locs = sorted(instance.locations)
    if budget > len(locs):
        raise InputError(f"budget {budget} exceeds the {len(locs)} locations")
    total = math.comb(len(locs), budget)
    if total > FULL_LP_GUARD:
        raise CapacityError(
            f"{total} placements exceed the enumeration guard {FULL_LP_GUARD}",
            count=total)

    placements = list(combinations(locs, budget))
    comps = instance.components
    levels = np.array([instance.security_levels[u] for u in comps])
    payoff = np.empty((len(placements), len(comps)))
    for i, placement in enumerate(placements):
        covered = instance.covered_by(placement)
        mask = np.array([u in covered for u in comps])
        payoff[i] = np.where(mask, 1.0, levels)

    # maximize z s.t. z <= sigma . payoff[:, u], sum sigma = 1, sigma >= 0
    k = len(placements)
    c = np.zeros(k + 1)
    c[k] = -1.0
    a_ub = np.hstack([-payoff.T, np.ones((len(comps), 1))])
    b_ub = np.zeros(len(comps))
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.array([1.0]),
                  bounds=[(0, None)] * k + [(None, None)], method="highs")
    if res.status != 0:
        raise CapacityError(f"reference LP failed: {res.message}")
    sigma = np.maximum(res.x[:k], 0.0)
    sigma /= sigma.sum()
    atoms = [(Placement(p), float(w)) for p, w in zip(placements, sigma)
             if w > 1e-12]
    mass = sum(w for _, w in atoms)
    strategy = MixedStrategy.of([(p, w / mass) for p, w in atoms])
    return float(res.x[k]), strategy


def brute_gcs(instance: Instance, budget: int) -> float:
    """Best guaranteed level over every nonempty location subset, using the
    equalized closed form (value one when the subset fits the budget)."""
    require_valid(instance)
    locs = sorted(instance.locations)
    if len(locs) > SUBSET_GUARD:
        raise CapacityError(
            f"{len(locs)} locations exceed the subset guard {SUBSET_GUARD}",
            count=len(locs))
    best = -math.inf
    for size in range(1, len(locs) + 1):
        for subset in combinations(locs, size):
            if size <= budget:
                inner = 1.0
            else:
                _, _, inner = k_star(instance, subset, budget)
            outside = min_level_outside(instance, instance.covered_by(subset))
            best = max(best, min(inner, outside))
    return best


def brute_ub(instance: Instance, budget: int) -> float:
    """Tightest packing-based upper bound by depth-first enumeration of all
    packings larger than the budget."""
    require_valid(instance)
    comps = sorted(instance.components)
    if len(comps) > SUBSET_GUARD:
        raise CapacityError(
            f"{len(comps)} components exceed the subset guard {SUBSET_GUARD}",
            count=len(comps))
    weights = {u: 1.0 / (1.0 - instance.security_levels[u]) for u in comps}
    best_ratio = 0.0  # maximize (|T| - budget) / S_T over packings

    def extend(start: int, used: set[str], size: int, weight_sum: float):
        nonlocal best_ratio
        if size > budget:
            best_ratio = max(best_ratio, (size - budget) / weight_sum)
        for i in range(start, len(comps)):
            u = comps[i]
            hit = instance.coverers(u)
            if hit & used:
                continue
            extend(i + 1, used | hit, size + 1, weight_sum + weights[u])

    extend(0, set(), 0, 0.0)
    return min(1.0, 1.0 - best_ratio) if best_ratio > 0 else 1.0


def brute_value_of_subset(instance: Instance, subset: tuple[str, ...],
                          budget: int) -> float:
    """Guaranteed level of one candidate location subset (closed form)."""
    if len(subset) <= budget:
        inner = 1.0
    else:
        _, _, inner = k_star(instance, subset, budget)
    outside = min_level_outside(instance, instance.covered_by(subset))
    return min(inner, outside)


def min_cover_brute(instance: Instance) -> tuple[int, tuple[str, ...]]:
    """Smallest covering location set by subset enumeration."""
    locs = sorted(instance.locations)
    if len(locs) > SUBSET_GUARD:
        raise CapacityError(
            f"{len(locs)} locations exceed the subset guard {SUBSET_GUARD}",
            count=len(locs))
    everything = frozenset(instance.components)
    for size in range(1, len(locs) + 1):
        for subset in combinations(locs, size):
            if instance.covered_by(subset) == everything:
                return size, subset
    raise InputError("no location subset covers every component")


def max_packing_brute(instance: Instance) -> tuple[int, tuple[str, ...]]:
    """Largest packing by depth-first enumeration."""
    comps = sorted(instance.components)
    if len(comps) > SUBSET_GUARD:
        raise CapacityError(
            f"{len(comps)} components exceed the subset guard {SUBSET_GUARD}",
            count=len(comps))
    best: tuple[int, tuple[str, ...]] = (0, ())

    def extend(start: int, used: set[str], chosen: list[str]):
        nonlocal best
        if len(chosen) > best[0]:
            best = (len(chosen), tuple(chosen))
        for i in range(start, len(comps)):
            u = comps[i]
            hit = instance.coverers(u)
            if hit & used:
                continue
            chosen.append(u)
            extend(i + 1, used | hit, chosen)
            chosen.pop()

    extend(0, set(), [])
    return best
