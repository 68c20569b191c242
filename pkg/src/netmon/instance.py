"""Networked-system model: locations, components, monitoring sets, security levels.

All quantities derived from an instance (criticalities, covers, packings,
equalized marginals) live here so every solver shares one definition.
Instances are immutable after construction and safe to share across
concurrent solver runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InputError

#: absolute tolerance for probability/real comparisons throughout the package
TOL = 1e-9


class Instance:
    """A monitoring instance: sensor locations, components, and a budget.

    Each location ``x`` monitors the component subset ``monitoring_sets[x]``;
    component ``u`` carries a security level ``security_levels[u]`` in [0, 1),
    and the operator may deploy at most ``budget`` sensors.
    """

    __slots__ = (
        "locations", "components", "monitoring_sets", "security_levels",
        "budget", "_coverers", "_crit", "_loc_index", "_comp_index", "_key",
    )

    def __init__(
        self,
        locations: Sequence[str],
        components: Sequence[str],
        monitoring_sets: Mapping[str, Iterable[str]],
        security_levels: Mapping[str, float],
        budget: int,
    ):
        self.locations: tuple[str, ...] = tuple(locations)
        self.components: tuple[str, ...] = tuple(components)
        if len(set(self.locations)) != len(self.locations):
            raise InputError("duplicate location identifiers")
        if len(set(self.components)) != len(self.components):
            raise InputError("duplicate component identifiers")
        comp_set = set(self.components)
        loc_set = set(self.locations)
        for x in monitoring_sets:
            if x not in loc_set:
                raise InputError(f"monitoring set for unknown location {x!r}")
        for u in security_levels:
            if u not in comp_set:
                raise InputError(f"security level for unknown component {u!r}")
        missing = [x for x in self.locations if x not in monitoring_sets]
        if missing:
            raise InputError(f"missing monitoring set for location {missing[0]!r}")
        missing = [u for u in self.components if u not in security_levels]
        if missing:
            raise InputError(f"missing security level for component {missing[0]!r}")
        sets = {}
        for x in self.locations:
            members = tuple(monitoring_sets[x])
            unknown = [u for u in members if u not in comp_set]
            if unknown:
                raise InputError(
                    f"monitoring set of {x!r} references unknown component {unknown[0]!r}")
            sets[x] = frozenset(members)
        self.monitoring_sets: dict[str, frozenset[str]] = sets
        self.security_levels: dict[str, float] = {
            u: float(security_levels[u]) for u in self.components}
        self.budget = int(budget)

        coverers: dict[str, set[str]] = {u: set() for u in self.components}
        for x in self.locations:
            for u in sets[x]:
                coverers[u].add(x)
        self._coverers = {u: frozenset(v) for u, v in coverers.items()}
        self._crit = {
            x: min((self.security_levels[u] for u in sets[x]), default=None)
            for x in self.locations
        }
        self._loc_index = {x: i for i, x in enumerate(self.locations)}
        self._comp_index = {u: i for i, u in enumerate(self.components)}
        self._key = (
            self.locations,
            self.components,
            tuple(tuple(sorted(sets[x])) for x in self.locations),
            tuple(self.security_levels[u] for u in self.components),
            self.budget,
        )

    def __eq__(self, other):
        return isinstance(other, Instance) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return (f"Instance(|X|={len(self.locations)}, |U|={len(self.components)}, "
                f"r={self.budget})")

    # -- lookups -----------------------------------------------------------

    def coverers(self, component: str) -> frozenset[str]:
        """Locations whose monitoring set contains the component."""
        try:
            return self._coverers[component]
        except KeyError:
            raise InputError(f"unknown component {component!r}") from None

    def location_index(self, location: str) -> int:
        try:
            return self._loc_index[location]
        except KeyError:
            raise InputError(f"unknown location {location!r}") from None

    def component_index(self, component: str) -> int:
        try:
            return self._comp_index[component]
        except KeyError:
            raise InputError(f"unknown component {component!r}") from None

    def covered_by(self, locations: Iterable[str]) -> frozenset[str]:
        """Union of the monitoring sets of the given locations."""
        out: set[str] = set()
        for x in locations:
            if x not in self._loc_index:
                raise InputError(f"unknown location {x!r}")
            out |= self.monitoring_sets[x]
        return frozenset(out)


@dataclass(frozen=True)
class Placement:
    """A pure operator action: a set of at most ``budget`` sensor locations.

    Stored sorted and duplicate-free so equal placements compare equal.
    """

    locations: tuple[str, ...]

    @classmethod
    def of(cls, locations: Iterable[str]) -> "Placement":
        return cls(tuple(sorted(set(locations))))

    def __post_init__(self):
        canon = tuple(sorted(set(self.locations)))
        if canon != self.locations:
            raise InputError("placement locations must be sorted and unique; use Placement.of")

    def __len__(self):
        return len(self.locations)

    def __iter__(self):
        return iter(self.locations)


@dataclass(frozen=True)
class MixedStrategy:
    """Probability distribution over placements."""

    atoms: tuple[tuple[Placement, float], ...]

    @classmethod
    def of(cls, atoms: Iterable[tuple[Placement, float]]) -> "MixedStrategy":
        atoms = tuple((p, float(w)) for p, w in atoms)
        seen = set()
        total = 0.0
        for placement, weight in atoms:
            if weight < -TOL:
                raise InputError(f"negative atom probability {weight}")
            if placement in seen:
                raise InputError(f"duplicate atom placement {placement.locations}")
            seen.add(placement)
            total += weight
        if abs(total - 1.0) > TOL:
            raise InputError(f"atom probabilities sum to {total}, expected 1")
        return cls(atoms)

    @classmethod
    def point_mass(cls, placement: Placement) -> "MixedStrategy":
        return cls.of([(placement, 1.0)])

    def support_size(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class MarginalVector:
    """Per-location probability of hosting a sensor; sums to the budget."""

    values: dict[str, float]

    def get(self, location: str) -> float:
        return self.values.get(location, 0.0)

    def support(self) -> tuple[str, ...]:
        return tuple(x for x, v in self.values.items() if v > TOL)

    def total(self) -> float:
        return sum(self.values.values())


@dataclass(frozen=True)
class AttackerStrategy:
    """Probability distribution over components."""

    weights: dict[str, float]

    @classmethod
    def of(cls, weights: Mapping[str, float]) -> "AttackerStrategy":
        w = {u: float(v) for u, v in weights.items()}
        if any(v < -TOL for v in w.values()):
            raise InputError("attacker weights must be nonnegative")
        total = sum(w.values())
        if abs(total - 1.0) > TOL:
            raise InputError(f"attacker weights sum to {total}, expected 1")
        return cls(w)

    @classmethod
    def uniform(cls, components: Sequence[str]) -> "AttackerStrategy":
        n = len(components)
        return cls({u: 1.0 / n for u in components})


# -- validation ------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str


def validate(instance: Instance) -> list[Violation]:
    """Check the model assumptions; returns one violation per breach.

    An empty list means the instance is usable by every solver.
    """
    out: list[Violation] = []
    for x in instance.locations:
        if not instance.monitoring_sets[x]:
            out.append(Violation("monitoring set must be nonempty", x))
    for u in instance.components:
        if not instance._coverers[u]:
            out.append(Violation("unmonitored component", u))
        level = instance.security_levels[u]
        if level >= 1.0:
            out.append(Violation("security level must be < 1", u))
        if level < 0.0:
            out.append(Violation("security level must be >= 0", u))
    if instance.budget < 1:
        out.append(Violation("budget must be >= 1", str(instance.budget)))
    return out


def require_valid(instance: Instance) -> None:
    violations = validate(instance)
    if violations:
        first = violations[0]
        raise InputError(f"invalid instance: {first.rule} ({first.subject})")


# -- elementary quantities ---------------------------------------------------

def post_security(instance: Instance, placement: Placement | Iterable[str],
                  component: str) -> float:
    """Post-security level f(X, u): 1 if u is monitored under X, else its level."""
    if component not in instance._comp_index:
        raise InputError(f"unknown component {component!r}")
    locs = placement.locations if isinstance(placement, Placement) else placement
    for x in locs:
        if x not in instance._loc_index:
            raise InputError(f"unknown location {x!r}")
        if component in instance.monitoring_sets[x]:
            return 1.0
    return instance.security_levels[component]


def location_criticality(instance: Instance, location: str) -> float:
    """Lowest security level within the location's monitoring set."""
    if location not in instance._loc_index:
        raise InputError(f"unknown location {location!r}")
    crit = instance._crit[location]
    if crit is None:
        raise InputError(f"location {location!r} has an empty monitoring set")
    return crit


def packing_weight_sum(instance: Instance, components: Iterable[str]) -> float:
    """Sum of 1/(1 - level) over the given components."""
    total = 0.0
    for u in components:
        if u not in instance._comp_index:
            raise InputError(f"unknown component {u!r}")
        total += 1.0 / (1.0 - instance.security_levels[u])
    return total


def check_cover(instance: Instance, locations: Iterable[str]) -> bool:
    """True when the locations' monitoring sets cover every component."""
    return instance.covered_by(locations) == frozenset(instance.components)


def check_packing(instance: Instance, components: Iterable[str]) -> bool:
    """True when no location monitors two of the given components."""
    comps = set()
    for u in components:
        if u not in instance._comp_index:
            raise InputError(f"unknown component {u!r}")
        comps.add(u)
    for x in instance.locations:
        if len(instance.monitoring_sets[x] & comps) > 1:
            return False
    return True


# -- equalizing marginals ----------------------------------------------------

def sort_by_criticality(instance: Instance, locations: Iterable[str]) -> list[str]:
    """Nondecreasing criticality; ties broken by location identifier."""
    return sorted(locations, key=lambda x: (location_criticality(instance, x), x))


def k_star(instance: Instance, locations: Iterable[str], budget: int
           ) -> tuple[int, float, float]:
    """Number of most-critical locations receiving positive marginal mass.

    Returns ``(k, weight_sum, value)`` where ``k`` is the largest count such
    that the k-th criticality does not exceed the equalized level
    ``1 - (k - budget) / weight_sum``, with ``weight_sum`` the sum of
    1/(1 - criticality) over the first k locations.  Requires strictly more
    candidate locations than budget.
    """
    ordered = sort_by_criticality(instance, locations)
    n = len(ordered)
    if n <= budget:
        raise InputError(f"k_star needs more than budget={budget} locations, got {n}")
    best = None
    prefix = 0.0
    for k, x in enumerate(ordered, start=1):
        crit = location_criticality(instance, x)
        prefix += 1.0 / (1.0 - crit)
        threshold = 1.0 - (k - budget) / prefix
        if crit <= threshold + 1e-12:
            best = (k, prefix, threshold)
    k, weight_sum, value = best  # k >= budget + 1 always holds
    return k, weight_sum, value


def optimal_marginals(instance: Instance, locations: Iterable[str], budget: int
                      ) -> MarginalVector:
    """Equalizing marginals on the most critical locations of the candidate set.

    Positive mass goes to the ``k_star`` most critical locations, scaled so
    the guaranteed level is identical across them; the rest get zero.  The
    entries lie in [0, 1] and sum exactly to the budget.
    """
    ordered = sort_by_criticality(instance, locations)
    k, weight_sum, _ = k_star(instance, ordered, budget)
    values = {x: 0.0 for x in ordered}
    for x in ordered[:k]:
        crit = location_criticality(instance, x)
        values[x] = 1.0 - (k - budget) / ((1.0 - crit) * weight_sum)
    return MarginalVector(values)


# -- strategy evaluation -----------------------------------------------------

def evaluate_strategy(instance: Instance, strategy: MixedStrategy
                      ) -> tuple[float, list[str]]:
    """Exact maximin objective of a mixed strategy.

    Returns the lowest expected post-security level over components and the
    list of components attaining it (ties within 1e-9), in component order.
    """
    expected = {u: 0.0 for u in instance.components}
    for placement, weight in strategy.atoms:
        covered = instance.covered_by(placement.locations)
        for u in instance.components:
            expected[u] += weight * (1.0 if u in covered
                                     else instance.security_levels[u])
    value = min(expected.values())
    worst = [u for u in instance.components if expected[u] <= value + TOL]
    return value, worst


def marginals_of(strategy: MixedStrategy) -> MarginalVector:
    """Per-location probability of receiving a sensor under the strategy."""
    values: dict[str, float] = {}
    for placement, weight in strategy.atoms:
        for x in placement:
            values[x] = values.get(x, 0.0) + weight
    return MarginalVector(values)


def node_basis(strategy: MixedStrategy) -> frozenset[str]:
    """Locations monitored with positive probability."""
    out: set[str] = set()
    for placement, weight in strategy.atoms:
        if weight > TOL:
            out |= set(placement.locations)
    return frozenset(out)


def payoff_row(instance: Instance, placement: Placement | Iterable[str]) -> list[float]:
    """Post-security levels of all components under one placement."""
    covered = instance.covered_by(
        placement.locations if isinstance(placement, Placement) else placement)
    return [1.0 if u in covered else instance.security_levels[u]
            for u in instance.components]


def min_level_outside(instance: Instance, covered: frozenset[str]) -> float:
    """Lowest security level among components not in ``covered``; inf if none."""
    levels = [instance.security_levels[u] for u in instance.components
              if u not in covered]
    return min(levels) if levels else math.inf
