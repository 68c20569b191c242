"""Coordination algorithm: express a marginal vector as a small mixture of
fixed-size placements.

Each step peels off one placement containing the largest residual
probabilities (certain locations first) with the largest step size that
keeps the remainder decomposable; at least one residual entry becomes
integral per step.  The result reproduces the input marginals exactly and
uses at most one more atom than the marginal support.
"""
from __future__ import annotations

from .errors import InputError, InvariantViolation
from .instance import MarginalVector, MixedStrategy, Placement, TOL

_ZERO = 1e-12


def decompose(marginals: MarginalVector, budget: int) -> MixedStrategy:
    """Build a mixed strategy over size-``budget`` placements matching the
    given per-location probabilities (which must sum to the budget).

    Internally the residual probabilities are kept unnormalized (scaled by
    the still-unassigned mass) so each step is a plain subtraction; this is
    algebraically the same recursion as peeling off a placement and
    renormalizing, without the error amplification of repeated division.
    """
    residual = {x: float(v) for x, v in marginals.values.items() if v > _ZERO}
    for x, v in residual.items():
        if v > 1.0 + TOL:
            raise InputError(f"marginal for {x!r} is {v}, above 1")
    total = sum(residual.values())
    if abs(total - budget) > TOL:
        raise InputError(f"marginals sum to {total}, expected budget {budget}")
    if len(residual) < budget:
        raise InputError(
            f"only {len(residual)} positive marginals for budget {budget}")

    atoms: dict[Placement, float] = {}
    mass = 1.0  # unassigned probability; invariant: sum(residual) == budget*mass
    for _ in range(len(residual) + 1):
        if mass <= _ZERO:
            break
        ranked = sorted(residual, key=lambda x: (-residual[x], x))
        chosen = ranked[:budget]
        if len(chosen) != budget:
            raise InvariantViolation(
                f"cannot assemble a placement of size {budget} "
                f"from {len(residual)} positive entries")
        in_chosen = set(chosen)
        step = min(residual[x] for x in chosen)
        for x, v in residual.items():
            if x not in in_chosen:
                step = min(step, mass - v)
        step = max(min(step, mass), 0.0)

        if step > _ZERO:
            placement = Placement.of(chosen)
            atoms[placement] = atoms.get(placement, 0.0) + step
        mass -= step
        new_residual = {}
        for x, v in residual.items():
            nv = v - step if x in in_chosen else v
            nv = min(nv, mass)
            if nv > _ZERO:
                new_residual[x] = nv
        residual = new_residual
    if mass > TOL:
        raise InvariantViolation(
            f"decomposition left {mass} probability mass unassigned")

    total = sum(atoms.values())
    return MixedStrategy.of(
        [(p, w / total) for p, w in sorted(atoms.items(),
                                           key=lambda kv: kv[0].locations)])
