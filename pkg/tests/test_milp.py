import numpy as np
import pytest

from netmon.branch_bound import (HIGHS, REFERENCE, MilpProblem,
                                 enumerate_binaries, solve_milp)
from netmon.formulations import build_gcs, build_mwc, build_nsp
from netmon.simplex import LpProblem

from conftest import make_ex1

ENGINES = (HIGHS, REFERENCE)


@pytest.mark.parametrize("engine", ENGINES)
class TestExamples:
    def test_covering_set_on_ex1(self, engine):
        problem, _ = build_gcs(make_ex1(), 1)
        sol = solve_milp(problem, engine=engine)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(0.5, abs=1e-7)

    def test_packing_on_ex1(self, engine):
        problem, names = build_nsp(make_ex1(), 1)
        sol = solve_milp(problem, engine=engine)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(3.0, abs=1e-7)
        packed = {u for u, j in names.y.items() if sol.x[j] > 0.5}
        assert packed == {"u1", "u5", "u7"}

    def test_covering_objective_with_zero_weights(self, engine):
        problem, _ = build_mwc(make_ex1(), 1, {}, constant_term=-0.7)
        sol = solve_milp(problem, engine=engine)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(-0.7)

    def test_infeasible_root(self, engine):
        lp = LpProblem("max", np.ones(2), np.zeros(2), np.ones(2),
                       np.array([[1.0, 1.0], [1.0, 1.0]]), ("<=", ">="),
                       np.array([0.5, 1.8]))
        sol = solve_milp(MilpProblem(lp, (0, 1)), engine=engine)
        assert sol.status == "infeasible"


def _random_milp(rng):
    m = int(rng.integers(1, 8))
    nb = int(rng.integers(1, 10))
    nc = int(rng.integers(0, 3))
    n = nb + nc
    rows = np.round(rng.normal(size=(m, n)) * 2, 1)
    rhs = np.round(rng.normal(size=m) * 3, 1)
    c = np.round(rng.normal(size=n) * 2, 1)
    rels = tuple(str(rng.choice(["<=", ">=", "="], p=[0.6, 0.25, 0.15]))
                 for _ in range(m))
    lower = np.zeros(n)
    upper = np.ones(n)
    upper[nb:] = rng.choice([1.0, 5.0], size=nc)
    sense = str(rng.choice(["max", "min"]))
    return MilpProblem(LpProblem(sense, c, lower, upper, rows, rels, rhs),
                       tuple(range(nb)))


def test_engines_agree_with_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(60):
        problem = _random_milp(rng)
        ref = enumerate_binaries(problem)
        for engine in ENGINES:
            got = solve_milp(problem, engine=engine)
            if ref.status == "infeasible":
                assert got.status == "infeasible"
            else:
                assert got.status == "optimal"
                assert got.objective == pytest.approx(ref.objective, abs=1e-7)


def test_node_limit_returns_honest_bound():
    rng = np.random.default_rng(9)
    seen_limit = False
    for _ in range(40):
        problem = _random_milp(rng)
        sol = solve_milp(problem, node_limit=3, engine=REFERENCE)
        if sol.status == "node_limit":
            seen_limit = True
            full = solve_milp(problem, engine=REFERENCE)
            assert full.status == "optimal"
            if problem.lp.sense == "max":
                assert sol.bound >= full.objective - 1e-7
                assert sol.objective <= sol.bound + 1e-9
            else:
                assert sol.bound <= full.objective + 1e-7
                assert sol.objective >= sol.bound - 1e-9
        elif sol.status == "unknown":
            seen_limit = True
    assert seen_limit


def test_incumbent_seed_never_changes_the_optimum():
    rng = np.random.default_rng(21)
    for _ in range(20):
        problem = _random_milp(rng)
        plain = solve_milp(problem, engine=REFERENCE)
        if plain.status != "optimal":
            continue
        seeded = solve_milp(problem, incumbent=plain.x, engine=REFERENCE)
        assert seeded.objective == pytest.approx(plain.objective, abs=1e-9)
        garbage = np.full(problem.lp.num_vars, 0.5)
        ignored = solve_milp(problem, incumbent=garbage, engine=REFERENCE)
        assert ignored.objective == pytest.approx(plain.objective, abs=1e-9)


@pytest.mark.parametrize("engine", ENGINES)
def test_determinism(engine):
    problem, _ = build_gcs(make_ex1(), 1)
    a = solve_milp(problem, engine=engine)
    b = solve_milp(problem, engine=engine)
    assert a.objective == b.objective
    assert (a.x == b.x).all()
    assert a.nodes == b.nodes


def test_binary_index_validation():
    from netmon.errors import InputError
    lp = LpProblem("max", np.ones(2), np.zeros(2), np.ones(2),
                   np.ones((1, 2)), ("<=",), np.ones(1))
    with pytest.raises(InputError):
        MilpProblem(lp, (5,))
