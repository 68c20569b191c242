"""Synthetic instance generators and the security-index scale.

All randomness comes from numpy's default generator (PCG64) seeded
explicitly, so the same seed reproduces the same instance on any platform.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .instance import Instance

#: the four-step security-level scale used for random assignment
LEVEL_SCALE = (0.2, 0.4, 0.6, 0.8)


def security_level_from_index(delta: float) -> float:
    """Map a security index (attack effort count, or infinity) to a level:
    0.2 on (0,5], 0.4 on (5,15], 0.6 on (15,20], 0.8 above 20, 1.0 at
    infinity (such components are dropped by the generators since levels
    must stay below one)."""
    if math.isinf(delta) and delta > 0:
        return 1.0
    if delta <= 0:
        raise InputError(f"security index must be positive, got {delta}")
    if delta <= 5:
        return 0.2
    if delta <= 15:
        return 0.4
    if delta <= 20:
        return 0.6
    return 0.8


def generate(kind: str, seed: int, **params) -> Instance:
    """Build a synthetic instance; ``kind`` is one of random, disjoint,
    homogeneous, or grid."""
    builders = {
        "random": _random_instance,
        "disjoint": _disjoint_instance,
        "homogeneous": _homogeneous_instance,
        "grid": _grid_instance,
    }
    if kind not in builders:
        raise InputError(f"unknown generator kind {kind!r}")
    return builders[kind](np.random.default_rng(seed), **params)


def _random_topology(rng, num_locations, num_components, density):
    if num_locations < 1 or num_components < 1:
        raise InputError("need at least one location and one component")
    if not 0.0 <= density <= 1.0:
        raise InputError(f"density must be in [0, 1], got {density}")
    locations = [f"x{i:03d}" for i in range(num_locations)]
    components = [f"u{i:03d}" for i in range(num_components)]
    membership = rng.random((num_locations, num_components)) < density
    for j in range(num_components):
        if not membership[:, j].any():
            membership[rng.integers(num_locations), j] = True
    for i in range(num_locations):
        if not membership[i].any():
            membership[i, rng.integers(num_components)] = True
    sets = {
        locations[i]: [components[j] for j in range(num_components)
                       if membership[i, j]]
        for i in range(num_locations)
    }
    return locations, components, sets


def _random_instance(rng, num_locations=8, num_components=12, density=0.3,
                     budget=1):
    locations, components, sets = _random_topology(
        rng, num_locations, num_components, density)
    levels = {u: float(rng.choice(LEVEL_SCALE)) for u in components}
    return Instance(locations, components, sets, levels, budget)


def _homogeneous_instance(rng, level=0.4, num_locations=8, num_components=12,
                          density=0.3, budget=1):
    if not 0.0 <= level < 1.0:
        raise InputError(f"level must be in [0, 1), got {level}")
    locations, components, sets = _random_topology(
        rng, num_locations, num_components, density)
    levels = {u: float(level) for u in components}
    return Instance(locations, components, sets, levels, budget)


def _disjoint_instance(rng, num_locations=5, components_per_location=2,
                       budget=1):
    if num_locations < 1 or components_per_location < 1:
        raise InputError("need at least one location and one component each")
    locations = [f"x{i:03d}" for i in range(num_locations)]
    components, sets, levels = [], {}, {}
    for i, x in enumerate(locations):
        mine = [f"u{i:03d}_{j}" for j in range(components_per_location)]
        components.extend(mine)
        sets[x] = mine
        for u in mine:
            levels[u] = float(rng.choice(LEVEL_SCALE))
    return Instance(locations, components, sets, levels, budget)


def _grid_instance(rng, rows=7, cols=9, num_components=None, budget=1):
    """Lattice where every node location monitors its incident edges.

    When ``num_components`` trims the edge set, a seeded subsample is kept
    and one incident edge is restored for any node left with nothing to
    monitor, so the instance stays valid.
    """
    if rows < 1 or cols < 1:
        raise InputError("grid needs at least one row and one column")
    nodes = [(r, c) for r in range(rows) for c in range(cols)]
    edges = []
    for r, c in nodes:
        if c + 1 < cols:
            edges.append(((r, c), (r, c + 1)))
        if r + 1 < rows:
            edges.append(((r, c), (r + 1, c)))
    if not edges:
        raise InputError("grid needs at least two nodes")
    if num_components is not None:
        if num_components < 1:
            raise InputError("num_components must be positive")
        order = rng.permutation(len(edges))
        kept = {edges[i] for i in order[:min(num_components, len(edges))]}
        for node in nodes:
            incident = [e for e in edges if node in e]
            if incident and not any(e in kept for e in incident):
                kept.add(incident[0])
        edges = [e for e in edges if e in kept]

    def node_id(node):
        return f"v{node[0]:02d}_{node[1]:02d}"

    def edge_id(edge):
        (r1, c1), (r2, c2) = edge
        return f"e{r1:02d}_{c1:02d}__{r2:02d}_{c2:02d}"

    locations = [node_id(n) for n in nodes]
    components = sorted(edge_id(e) for e in edges)
    sets = {node_id(n): sorted(edge_id(e) for e in edges if n in e)
            for n in nodes}
    empty = [x for x, members in sets.items() if not members]
    if empty:
        # nodes that lost every incident edge cannot host a useful sensor
        locations = [x for x in locations if x not in set(empty)]
        sets = {x: sets[x] for x in locations}
    levels = {u: float(rng.choice(LEVEL_SCALE)) for u in components}
    return Instance(locations, components, sets, levels, budget)
