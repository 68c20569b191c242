"""Branch-and-bound over binary variables.

Two engines sit behind one interface: the default delegates to HiGHS
(scipy.optimize.milp, single-threaded, zero gap) which handles the larger
covering/packing problems comfortably; the reference engine is a best-first
search over LP relaxations from the dense simplex, kept as an independent
cross-check and exercised by the test suite against full enumeration.
"""
from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp as _scipy_milp

from .errors import InputError, SolverFailure
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, solve_lp

_INT_TOL = 1e-6
DEFAULT_GAP = 1e-9
DEFAULT_NODE_LIMIT = 1_000_000
HIGHS = "highs"
REFERENCE = "reference"


@dataclass
class MilpProblem:
    """An LP plus the variable indices required to be binary."""

    lp: LpProblem
    binaries: tuple[int, ...]

    def __post_init__(self):
        self.binaries = tuple(self.binaries)
        n = self.lp.num_vars
        for j in self.binaries:
            if not 0 <= j < n:
                raise InputError(f"binary index {j} out of range")


@dataclass
class MilpSolution:
    status: str          # optimal | infeasible | unbounded | node_limit | unknown
    x: np.ndarray | None
    objective: float | None
    bound: float
    gap: float
    nodes: int


def solve_milp(problem: MilpProblem, gap_tolerance: float = DEFAULT_GAP,
               node_limit: int = DEFAULT_NODE_LIMIT,
               incumbent: np.ndarray | None = None,
               engine: str = HIGHS) -> MilpSolution:
    """Solve to proven optimality (within ``gap_tolerance``) or return the
    best incumbent with an honest bound when the node limit interrupts.

    ``incumbent`` optionally seeds the reference engine's pruning with a
    known feasible point; it is validated first and never changes which
    optimum is returned.  The HiGHS engine has no warm-start hook and
    ignores it.
    """
    if gap_tolerance < 0:
        raise InputError("gap_tolerance must be nonnegative")
    if engine == HIGHS:
        return _solve_highs(problem, node_limit)
    if engine == REFERENCE:
        return _solve_reference(problem, gap_tolerance, node_limit, incumbent)
    raise InputError(f"unknown engine {engine!r}")


# -- HiGHS engine ---------------------------------------------------------------

def _solve_highs(problem: MilpProblem, node_limit: int) -> MilpSolution:
    lp = problem.lp
    if lp.num_vars == 0:
        return _empty_problem_solution(lp)
    c = -lp.objective if lp.sense == "max" else lp.objective
    row_lb = np.array([lp.rhs[i] if rel in (">=", "=") else -np.inf
                       for i, rel in enumerate(lp.relations)])
    row_ub = np.array([lp.rhs[i] if rel in ("<=", "=") else np.inf
                       for i, rel in enumerate(lp.relations)])
    integrality = np.zeros(lp.num_vars, dtype=np.uint8)
    lower = lp.lower.copy()
    upper = lp.upper.copy()
    if problem.binaries:
        idx = list(problem.binaries)
        integrality[idx] = 1
        lower[idx] = np.maximum(lower[idx], 0.0)
        upper[idx] = np.minimum(upper[idx], 1.0)

    with warnings.catch_warnings():
        # mip_abs_gap/threads are valid HiGHS options that scipy forwards
        # verbatim with a RuntimeWarning
        warnings.simplefilter("ignore", RuntimeWarning)
        res = _scipy_milp(
            c,
            constraints=LinearConstraint(lp.rows, row_lb, row_ub),
            integrality=integrality,
            bounds=Bounds(lower, upper),
            options={"mip_rel_gap": 0.0, "mip_abs_gap": 0.0, "threads": 1,
                     "node_limit": node_limit})

    sign = -1.0 if lp.sense == "max" else 1.0

    def back(v):
        return sign * v + lp.offset if v is not None and np.isfinite(v) \
            else None

    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    if res.status == 0:
        objective = back(res.fun)
        bound = back(getattr(res, "mip_dual_bound", res.fun))
        if bound is None:
            bound = objective
        return MilpSolution("optimal", res.x, objective, bound,
                            abs(objective - bound), nodes)
    if res.status == 2:
        return MilpSolution("infeasible", None, None, np.nan, np.nan, nodes)
    if res.status == 3:
        return MilpSolution("unbounded", None, None, np.nan, np.nan, nodes)
    if res.status == 1:
        bound = back(getattr(res, "mip_dual_bound", None))
        if res.x is not None:
            objective = back(res.fun)
            return MilpSolution("node_limit", res.x, objective,
                                bound if bound is not None else objective,
                                abs(objective - (bound if bound is not None
                                                 else objective)), nodes)
        return MilpSolution("unknown", None, None,
                            bound if bound is not None else np.nan,
                            np.nan, nodes)
    raise SolverFailure(f"HiGHS failed: {res.message}")


def _empty_problem_solution(lp: LpProblem) -> MilpSolution:
    activity = np.zeros(lp.num_rows)
    for i, rel in enumerate(lp.relations):
        bad = (rel == "<=" and activity[i] > lp.rhs[i] + 1e-9) or \
              (rel == ">=" and activity[i] < lp.rhs[i] - 1e-9) or \
              (rel == "=" and abs(activity[i] - lp.rhs[i]) > 1e-9)
        if bad:
            return MilpSolution("infeasible", None, None, np.nan, np.nan, 0)
    return MilpSolution("optimal", np.zeros(0), lp.offset, lp.offset, 0.0, 0)


# -- reference engine -------------------------------------------------------------

def _solve_reference(problem: MilpProblem, gap_tolerance: float,
                     node_limit: int,
                     incumbent: np.ndarray | None) -> MilpSolution:
    """Best-first search by relaxation bound (ties first-in-first-out);
    branches on the most fractional binary, ties by variable index."""
    lp = problem.lp
    binaries = np.array(sorted(problem.binaries), dtype=int)
    is_max = lp.sense == "max"
    worse = (lambda a, b: a <= b + gap_tolerance) if is_max \
        else (lambda a, b: a >= b - gap_tolerance)

    lower = lp.lower.copy()
    upper = lp.upper.copy()
    if len(binaries):
        lower[binaries] = np.maximum(lower[binaries], 0.0)
        upper[binaries] = np.minimum(upper[binaries], 1.0)

    best_x = None
    best_val = -np.inf if is_max else np.inf
    if incumbent is not None:
        incumbent = np.asarray(incumbent, dtype=float)
        if _feasible(lp, binaries, incumbent):
            best_x = incumbent.copy()
            best_val = float(lp.objective @ incumbent + lp.offset)

    def relax(lo, hi):
        return solve_lp(LpProblem(lp.sense, lp.objective, lo, hi, lp.rows,
                                  lp.relations, lp.rhs, lp.offset))

    nodes = 0
    counter = 0
    heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    pending = {}

    root = relax(lower, upper)
    nodes += 1
    if root.status == INFEASIBLE:
        return MilpSolution("infeasible", None, None, np.nan, np.nan, nodes)
    if root.status == UNBOUNDED:
        return MilpSolution("unbounded", None, None, np.nan, np.nan, nodes)
    heapq.heappush(heap, (-root.objective if is_max else root.objective,
                          counter, lower, upper))
    pending[counter] = root
    counter += 1

    status = "optimal"
    while heap:
        if nodes >= node_limit:
            status = "node_limit"
            break
        key, tag, lo, hi = heapq.heappop(heap)
        sol = pending.pop(tag)
        bound_here = -key if is_max else key
        if best_x is not None and worse(bound_here, best_val):
            continue

        frac = np.abs(sol.x[binaries] - np.round(sol.x[binaries])) \
            if len(binaries) else np.zeros(0)
        if not len(frac) or frac.max() <= _INT_TOL:
            # integral relaxation: re-solve with binaries pinned so the
            # recorded incumbent is exact
            fixed_lo, fixed_hi = lo.copy(), hi.copy()
            if len(binaries):
                rounded = np.round(sol.x[binaries])
                fixed_lo[binaries] = rounded
                fixed_hi[binaries] = rounded
            exact = relax(fixed_lo, fixed_hi)
            nodes += 1
            if exact.status == OPTIMAL and \
                    (best_x is None or not worse(exact.objective, best_val)):
                best_x = exact.x
                best_val = exact.objective
            if exact.status == OPTIMAL or not len(binaries):
                continue
            # rounding destroyed feasibility: fall through and branch

        order = np.argsort(-frac, kind="stable")
        j = int(binaries[order[0]])
        for fix in (0.0, 1.0):
            clo, chi = lo.copy(), hi.copy()
            clo[j] = fix
            chi[j] = fix
            child = relax(clo, chi)
            nodes += 1
            if child.status != OPTIMAL:
                continue
            if best_x is not None and worse(child.objective, best_val):
                continue
            heapq.heappush(heap, (-child.objective if is_max
                                  else child.objective, counter, clo, chi))
            pending[counter] = child
            counter += 1

    open_bounds = [(-k if is_max else k) for k, t, _, _ in heap]
    if best_x is None:
        if status == "node_limit":
            bound = (max(open_bounds) if is_max else min(open_bounds)) \
                if open_bounds else np.nan
            return MilpSolution("unknown", None, None, bound, np.nan, nodes)
        return MilpSolution("infeasible", None, None, np.nan, np.nan, nodes)

    if status == "node_limit" and open_bounds:
        bound = max(open_bounds + [best_val]) if is_max \
            else min(open_bounds + [best_val])
    else:
        bound = best_val
        status = "optimal"
    gap = abs(bound - best_val)
    return MilpSolution(status, best_x, float(best_val), float(bound),
                        float(gap), nodes)


def _feasible(lp: LpProblem, binaries: np.ndarray, x: np.ndarray,
              tol: float = 1e-7) -> bool:
    if len(x) != lp.num_vars:
        return False
    if np.any(x < lp.lower - tol) or np.any(x > lp.upper + tol):
        return False
    if len(binaries) and np.abs(x[binaries] - np.round(x[binaries])).max() > _INT_TOL:
        return False
    activity = lp.rows @ x
    for i, rel in enumerate(lp.relations):
        if rel == "<=" and activity[i] > lp.rhs[i] + tol:
            return False
        if rel == ">=" and activity[i] < lp.rhs[i] - tol:
            return False
        if rel == "=" and abs(activity[i] - lp.rhs[i]) > tol:
            return False
    return True


def enumerate_binaries(problem: MilpProblem) -> MilpSolution:
    """Exhaustive reference solver: every binary assignment completed by LP.

    Only for cross-checking ``solve_milp`` on problems with few binaries.
    """
    lp = problem.lp
    binaries = np.array(sorted(problem.binaries), dtype=int)
    if len(binaries) > 22:
        raise InputError("enumeration limited to 22 binaries")
    is_max = lp.sense == "max"
    best_val = -np.inf if is_max else np.inf
    best_x = None
    count = 0
    for code in range(1 << len(binaries)):
        lo, hi = lp.lower.copy(), lp.upper.copy()
        for pos, j in enumerate(binaries):
            bit = float((code >> pos) & 1)
            lo[j] = bit
            hi[j] = bit
        sol = solve_lp(LpProblem(lp.sense, lp.objective, lo, hi, lp.rows,
                                 lp.relations, lp.rhs, lp.offset))
        count += 1
        if sol.status == UNBOUNDED:
            return MilpSolution("unbounded", None, None, np.nan, np.nan, count)
        if sol.status != OPTIMAL:
            continue
        if best_x is None or (sol.objective > best_val if is_max
                              else sol.objective < best_val):
            best_val = sol.objective
            best_x = sol.x
    if best_x is None:
        return MilpSolution("infeasible", None, None, np.nan, np.nan, count)
    return MilpSolution("optimal", best_x, float(best_val), float(best_val),
                        0.0, count)
