import numpy as np
import pytest

from netmon.errors import InputError
from netmon.generators import generate
from netmon.instance import Instance, marginals_of
from netmon.oracle import brute_gcs, brute_ub, solve_exact
from netmon.pipeline import (cycling_strategy, disjoint_solution,
                             homogeneous_solution, max_set_packing,
                             min_set_cover, solve_approx, solve_gcs,
                             upper_bound)

from conftest import (make_disjoint, make_homogeneous_ex1,
                      make_two_triangles)


class TestSolveGcs:
    def test_ex1_canonical_solution(self, ex1):
        value, chosen, rho = solve_gcs(ex1, 1)
        assert value == pytest.approx(0.5, abs=1e-7)
        assert chosen == ("x2",)
        assert rho.values == {"x2": 1.0}

    def test_ex1_budget_two_matches_brute(self, ex1):
        value, _, rho = solve_gcs(ex1, 2)
        assert value == pytest.approx(brute_gcs(ex1, 2), abs=1e-7)
        assert rho.total() == pytest.approx(2.0)

    def test_disjoint_closed_form(self):
        inst = make_disjoint()
        value, chosen, rho = solve_gcs(inst, 1)
        assert value == pytest.approx(11 / 15, abs=1e-7)
        assert chosen == ("a", "b")
        assert rho.get("a") == pytest.approx(2 / 3)
        assert rho.get("b") == pytest.approx(1 / 3)

    def test_budget_above_locations_rejected(self, ex1):
        with pytest.raises(InputError):
            solve_gcs(ex1, 4)

    def test_max_support_plumbs_through(self, ex1):
        value, chosen, _ = solve_gcs(ex1, 1, max_support=1)
        assert value == pytest.approx(0.5, abs=1e-7)
        assert len(chosen) == 1


class TestUpperBound:
    def test_ex1(self, ex1):
        value, packing = upper_bound(ex1, 1)
        assert value == pytest.approx(2 / 3, abs=1e-7)
        assert packing == ("u1", "u5", "u7")

    def test_budget_meets_packing(self, ex1):
        assert upper_bound(ex1, 3) == (1.0, ())

    def test_homogeneous_closed_form(self):
        value, _ = upper_bound(make_homogeneous_ex1(0.2), 1)
        assert value == pytest.approx(7 / 15, abs=1e-7)


class TestCoverPacking:
    def test_ex1(self, ex1):
        assert min_set_cover(ex1) == (3, ("x1", "x2", "x3"))
        size, packing = max_set_packing(ex1)
        assert size == 3
        assert len(packing) == 3

    def test_single_location(self):
        inst = Instance(["x"], ["u1", "u2"], {"x": ["u1", "u2"]},
                        {"u1": 0.2, "u2": 0.4}, 1)
        assert min_set_cover(inst)[0] == 1
        assert max_set_packing(inst)[0] == 1

    def test_disjoint(self):
        inst = make_disjoint()
        assert min_set_cover(inst)[0] == 2
        assert max_set_packing(inst)[0] == 2


class TestSolveApprox:
    def test_ex1(self, ex1):
        sol = solve_approx(ex1, 1)
        assert sol.lower_bound == pytest.approx(0.5, abs=1e-7)
        assert sol.achieved_value == pytest.approx(0.5, abs=1e-7)
        assert sol.upper_bound == pytest.approx(2 / 3, abs=1e-7)
        assert sol.gap == pytest.approx(1 / 6, abs=1e-7)
        assert sol.strategy.atoms[0][0].locations == ("x2",)

    def test_cover_shortcut(self, ex1):
        sol = solve_approx(ex1, 3)
        assert (sol.lower_bound, sol.achieved_value, sol.upper_bound) == \
            (1.0, 1.0, 1.0)
        assert sol.gap == 0.0
        assert sol.strategy.atoms[0][0].locations == ("x1", "x2", "x3")

    def test_disjoint_gap_closes(self):
        sol = solve_approx(make_disjoint(), 1)
        assert sol.gap == pytest.approx(0.0, abs=1e-7)
        assert sol.lower_bound == pytest.approx(11 / 15, abs=1e-7)

    def test_marginals_of_strategy_match_gcs(self, ex1):
        sol = solve_approx(ex1, 2)
        _, _, rho = solve_gcs(ex1, 2)
        back = marginals_of(sol.strategy)
        for x in ex1.locations:
            assert back.get(x) == pytest.approx(rho.get(x), abs=1e-8)


class TestHomogeneous:
    def test_ex1_topology(self):
        sol = homogeneous_solution(make_homogeneous_ex1(0.2), 1)
        assert sol.lower_bound == pytest.approx(7 / 15, abs=1e-7)
        assert sol.upper_bound == pytest.approx(7 / 15, abs=1e-7)
        assert len(sol.strategy.atoms) == 3
        assert sol.achieved_value >= sol.lower_bound - 1e-9

    def test_two_triangles(self):
        # cover size 4 and packing size 2 with level one half
        inst = make_two_triangles(0.5)
        assert min_set_cover(inst)[0] == 4
        assert max_set_packing(inst)[0] == 2
        sol = homogeneous_solution(inst, 1)
        assert sol.lower_bound == pytest.approx(0.625, abs=1e-7)
        assert sol.upper_bound == pytest.approx(0.75, abs=1e-7)

    def test_zero_level_reduces_to_coverage_game(self):
        inst = make_disjoint()
        zero = Instance(inst.locations, inst.components,
                        {x: sorted(inst.monitoring_sets[x])
                         for x in inst.locations},
                        {u: 0.0 for u in inst.components}, 1)
        sol = homogeneous_solution(zero, 1)
        assert sol.lower_bound == pytest.approx(1 / 2)
        assert sol.upper_bound == pytest.approx(1 / 2)

    def test_rejects_mixed_levels(self, ex1):
        with pytest.raises(InputError):
            homogeneous_solution(ex1, 1)

    def test_cycling_marginals_are_uniform(self):
        strategy = cycling_strategy(("a", "b", "c", "d", "e"), 2)
        rho = marginals_of(strategy)
        for x in "abcde":
            assert rho.get(x) == pytest.approx(2 / 5)
        assert all(len(p) == 2 for p, _ in strategy.atoms)


class TestDisjoint:
    def test_pair_fixture(self):
        sol = disjoint_solution(make_disjoint(), 1)
        assert sol.lower_bound == pytest.approx(11 / 15)
        assert sol.upper_bound == pytest.approx(11 / 15)
        assert sol.achieved_value == pytest.approx(11 / 15)
        assert sol.witness_packing == ("e1", "e3")

    def test_three_symmetric_locations(self):
        inst = Instance(
            ["a", "b", "c"], ["e1", "e2", "e3"],
            {"a": ["e1"], "b": ["e2"], "c": ["e3"]},
            {"e1": 0.2, "e2": 0.2, "e3": 0.2}, 1)
        sol = disjoint_solution(inst, 1)
        assert sol.lower_bound == pytest.approx(7 / 15)
        rho = marginals_of(sol.strategy)
        for x in "abc":
            assert rho.get(x) == pytest.approx(1 / 3)

    def test_full_budget_rejected(self):
        with pytest.raises(InputError):
            disjoint_solution(make_disjoint(), 2)

    def test_overlap_rejected(self, ex1):
        with pytest.raises(InputError):
            disjoint_solution(ex1, 1)


def test_decomposed_strategy_attains_the_relaxed_objective():
    # the strategy built from the equalizing marginals guarantees exactly the
    # covering-set value on its own node basis
    from netmon.decomposition import decompose
    from netmon.instance import (location_criticality, min_level_outside,
                                 node_basis)

    rng = np.random.default_rng(77)
    for _ in range(20):
        inst = generate("random", seed=int(rng.integers(2 ** 31)),
                        num_locations=int(rng.integers(3, 8)),
                        num_components=int(rng.integers(4, 11)),
                        density=0.35)
        r = min(int(rng.integers(1, 4)), len(inst.locations))
        lower, _, rho = solve_gcs(inst, r)
        strategy = decompose(rho, r)
        marg = marginals_of(strategy)
        basis = node_basis(strategy)
        inner = min(
            location_criticality(inst, x)
            + (1 - location_criticality(inst, x)) * marg.get(x)
            for x in basis)
        outside = min_level_outside(inst, inst.covered_by(basis))
        assert min(inner, outside) == pytest.approx(lower, abs=1e-7)


def test_sandwich_on_random_instances():
    rng = np.random.default_rng(2)
    for _ in range(25):
        inst = generate("random", seed=int(rng.integers(2 ** 31)),
                        num_locations=int(rng.integers(3, 8)),
                        num_components=int(rng.integers(4, 11)),
                        density=0.35)
        r = min(int(rng.integers(1, 4)), len(inst.locations))
        lower, _, _ = solve_gcs(inst, r)
        upper, _ = upper_bound(inst, r)
        exact, _ = solve_exact(inst, r)
        assert lower <= exact + 1e-7
        assert exact <= upper + 1e-7
        assert upper == pytest.approx(brute_ub(inst, r), abs=1e-7)
