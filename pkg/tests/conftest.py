import numpy as np
import pytest

from netmon.generators import generate
from netmon.instance import Instance

EX1_LOCATIONS = ("x1", "x2", "x3")
EX1_COMPONENTS = tuple(f"u{i}" for i in range(1, 8))
EX1_SETS = {
    "x1": ["u1", "u2", "u3"],
    "x2": ["u3", "u4", "u5"],
    "x3": ["u4", "u6", "u7"],
}
EX1_LEVELS = {
    "u1": 0.5, "u2": 0.8, "u3": 0.2, "u4": 0.2,
    "u5": 0.5, "u6": 0.8, "u7": 0.5,
}


def make_ex1(budget: int = 1) -> Instance:
    return Instance(EX1_LOCATIONS, EX1_COMPONENTS, EX1_SETS, EX1_LEVELS, budget)


@pytest.fixture
def ex1() -> Instance:
    return make_ex1()


def make_disjoint(budget: int = 1) -> Instance:
    """Two locations with disjoint monitoring sets; criticalities 0.2 and 0.6."""
    return Instance(
        ["a", "b"], ["e1", "e2", "e3", "e4"],
        {"a": ["e1", "e2"], "b": ["e3", "e4"]},
        {"e1": 0.2, "e2": 0.9, "e3": 0.6, "e4": 0.7}, budget)


@pytest.fixture
def disjoint_pair() -> Instance:
    return make_disjoint()


def make_homogeneous_ex1(level: float = 0.2, budget: int = 1) -> Instance:
    return Instance(EX1_LOCATIONS, EX1_COMPONENTS, EX1_SETS,
                    {u: level for u in EX1_COMPONENTS}, budget)


def make_two_triangles(level: float = 0.5, budget: int = 1) -> Instance:
    """Six pairwise-overlapping monitoring sets shaped like two triangles:
    minimum cover 4, maximum packing 2."""
    locations = ["p12", "p13", "p23", "q12", "q13", "q23"]
    components = ["p1", "p2", "p3", "q1", "q2", "q3"]
    sets = {
        "p12": ["p1", "p2"], "p13": ["p1", "p3"], "p23": ["p2", "p3"],
        "q12": ["q1", "q2"], "q13": ["q1", "q3"], "q23": ["q2", "q3"],
    }
    return Instance(locations, components, sets,
                    {u: level for u in components}, budget)


def random_marginal_vector(rng, n: int, r: int) -> np.ndarray:
    """Random point of the unit box with coordinate sum exactly r."""
    if n == r:
        return np.ones(n)
    v = rng.random(n)
    v = v / v.sum() * r
    for _ in range(80):
        over = v > 1.0
        if not over.any():
            break
        excess = (v[over] - 1.0).sum()
        v[over] = 1.0
        room = 1.0 - v[~over]
        if room.sum() <= 0:
            break
        v[~over] += room / room.sum() * excess
    return v


def oracle_suite(count: int = 100, seed: int = 2026):
    """Seeded random instances at oracle scale: up to 8 locations, 12
    components, budget up to 3, levels from the four-step scale."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        nx = int(rng.integers(3, 9))
        nu = int(rng.integers(4, 13))
        density = float(rng.uniform(0.15, 0.5))
        r = min(int(rng.integers(1, 4)), nx)
        inst = generate("random", seed=int(rng.integers(0, 2 ** 31)),
                        num_locations=nx, num_components=nu,
                        density=density, budget=r)
        out.append((inst, r))
    return out


@pytest.fixture(scope="session")
def small_suite():
    return oracle_suite(count=100)
