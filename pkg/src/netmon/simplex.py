"""Dense two-phase primal simplex with variable bounds and dual extraction.

Small LPs only (restricted masters, branch-and-bound relaxations, the
enumerated game LP).  Upper bounds are handled inside the ratio test, free
variables are split, and the final primal/dual solutions are recomputed from
the terminal basis so tableau drift never reaches callers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, SolverFailure

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-7
_DEGENERATE_STEP = 1e-12


@dataclass
class LpProblem:
    """max/min c.x subject to row relations and per-variable bounds."""

    sense: str
    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    rows: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.rows = np.asarray(self.rows, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.relations = tuple(self.relations)
        if self.sense not in ("max", "min"):
            raise InputError(f"unknown sense {self.sense!r}")
        m, n = self.rows.shape
        if (len(self.objective) != n or len(self.lower) != n
                or len(self.upper) != n):
            raise InputError("objective/bounds length does not match column count")
        if len(self.rhs) != m or len(self.relations) != m:
            raise InputError("rhs/relations length does not match row count")
        if not np.all(np.isfinite(self.rows)):
            raise InputError("constraint coefficients must be finite")
        if not np.all(np.isfinite(self.rhs)):
            raise InputError("right-hand sides must be finite")
        if not np.all(np.isfinite(self.objective)):
            raise InputError("objective coefficients must be finite")
        for rel in self.relations:
            if rel not in ("<=", "=", ">="):
                raise InputError(f"unknown relation {rel!r}")

    @property
    def num_vars(self) -> int:
        return self.rows.shape[1]

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None
    duals: np.ndarray | None
    objective: float | None
    iterations: int


def solve_lp(problem: LpProblem, tol: float = _PIVOT_TOL) -> LpSolution:
    """Solve a small dense LP; deterministic for identical input."""
    return _Simplex(problem, tol).run()


class _Simplex:
    def __init__(self, problem: LpProblem, tol: float):
        self.problem = problem
        self.tol = tol
        self.iterations = 0
        self.degenerate = 0
        m, n = problem.rows.shape
        self.max_iterations = 50 * (m + n) * max(m, n, 1)
        self.bland_after = 2 * (m + n)

    # -- setup ---------------------------------------------------------------

    def _build(self):
        p = self.problem
        m, n = p.rows.shape
        self.sense_mult = -1.0 if p.sense == "max" else 1.0
        c_user = self.sense_mult * p.objective

        cols: list[np.ndarray] = []
        c_std: list[float] = []
        ub: list[float] = []
        recover: list[tuple] = []
        base = np.zeros(n)
        for j in range(n):
            lo, hi = p.lower[j], p.upper[j]
            if lo > hi + 1e-12:
                return INFEASIBLE
            if np.isfinite(lo):
                cols.append(p.rows[:, j])
                c_std.append(c_user[j])
                ub.append(hi - lo)
                recover.append(("shift", j, lo))
                base[j] = lo
            elif np.isfinite(hi):
                cols.append(-p.rows[:, j])
                c_std.append(-c_user[j])
                ub.append(np.inf)
                recover.append(("negshift", j, hi))
                base[j] = hi
            else:
                cols.append(p.rows[:, j])
                c_std.append(c_user[j])
                ub.append(np.inf)
                recover.append(("pos", j, 0.0))
                cols.append(-p.rows[:, j])
                c_std.append(-c_user[j])
                ub.append(np.inf)
                recover.append(("neg", j, 0.0))
        b = p.rhs - p.rows @ base

        for i, rel in enumerate(p.relations):
            if rel == "<=":
                e = np.zeros(m)
                e[i] = 1.0
            elif rel == ">=":
                e = np.zeros(m)
                e[i] = -1.0
            else:
                continue
            cols.append(e)
            c_std.append(0.0)
            ub.append(np.inf)
            recover.append(("slack", i, 0.0))

        a = np.column_stack(cols) if cols else np.zeros((m, 0))
        row_sign = np.ones(m)
        for i in range(m):
            if b[i] < 0:
                a[i] *= -1.0
                b[i] *= -1.0
                row_sign[i] = -1.0

        # initial basis: a slack whose post-normalization coefficient is +1,
        # otherwise an artificial column
        basis = np.full(m, -1, dtype=int)
        slack_of_row = {}
        for j, (kind, i, _) in enumerate(recover):
            if kind == "slack":
                slack_of_row[i] = j
        art_cols = []
        extra = []
        for i in range(m):
            j = slack_of_row.get(i)
            if j is not None and a[i, j] > 0.5:
                basis[i] = j
            else:
                e = np.zeros(m)
                e[i] = 1.0
                extra.append(e)
                basis[i] = a.shape[1] + len(extra) - 1
                art_cols.append(basis[i])
        if extra:
            a = np.hstack([a, np.column_stack(extra)])
            c_std.extend([0.0] * len(extra))
            ub.extend([np.inf] * len(extra))

        self.m, self.n_std = m, a.shape[1]
        self.table = np.hstack([a, b[:, None]])
        self.a_std = a.copy()
        self.b_std = b.copy()
        self.c2 = np.array(c_std)
        self.ub = np.array(ub)
        self.basis = basis
        self.in_basis = np.zeros(self.n_std, dtype=bool)
        self.in_basis[basis] = True
        self.flip = np.zeros(self.n_std, dtype=bool)
        self.can_enter = np.ones(self.n_std, dtype=bool)
        self.art_cols = np.array(art_cols, dtype=int)
        self.row_sign = row_sign
        self.recover = recover
        return None

    def _hat_costs(self, c):
        return np.where(self.flip, -c, c)

    def _reduced(self, c):
        chat = self._hat_costs(c)
        return chat - chat[self.basis] @ self.table[:, :-1]

    # -- pivoting ------------------------------------------------------------

    def _iterate(self, c_phase) -> str:
        d = self._reduced(c_phase)
        rebuilds = 0
        while True:
            use_bland = self.degenerate > self.bland_after
            mask = self.can_enter & ~self.in_basis & (self.ub > self.tol) \
                & (d < -self.tol)
            if not mask.any():
                if rebuilds < 3:
                    rebuilds += 1
                    d = self._reduced(c_phase)
                    if (self.can_enter & ~self.in_basis & (self.ub > self.tol)
                            & (d < -self.tol)).any():
                        continue
                return OPTIMAL
            if use_bland:
                j = int(np.argmax(mask))
            else:
                j = int(np.argmin(np.where(mask, d, np.inf)))

            self.iterations += 1
            if self.iterations > self.max_iterations:
                raise SolverFailure(
                    f"simplex iteration cap {self.max_iterations} exceeded",
                    iterations=self.iterations)

            w = self.table[:, j]
            xb = np.maximum(self.table[:, -1], 0.0)
            basic_ub = self.ub[self.basis]

            ratios = np.full(self.m, np.inf)
            up = w > self.tol
            ratios[up] = xb[up] / w[up]
            hit_upper = (w < -self.tol) & np.isfinite(basic_ub)
            ratios[hit_upper] = np.maximum(basic_ub[hit_upper] - xb[hit_upper],
                                           0.0) / (-w[hit_upper])
            t_rows = ratios.min() if self.m else np.inf
            t_enter = self.ub[j]
            t_star = min(t_rows, t_enter)
            if not np.isfinite(t_star):
                return UNBOUNDED
            if t_star <= _DEGENERATE_STEP:
                self.degenerate += 1

            if t_enter <= t_rows:
                # bound flip: the entering variable reaches its other bound
                self.table[:, -1] -= t_enter * w
                self.table[:, j] *= -1.0
                d[j] = -d[j]
                self.flip[j] = ~self.flip[j]
                continue

            near = ratios <= t_star + 1e-12 * (1.0 + abs(t_star))
            idx = np.flatnonzero(near)
            if use_bland:
                i_star = int(idx[np.argmin(self.basis[idx])])
            else:
                i_star = int(idx[np.argmax(np.abs(w[idx]))])

            if w[i_star] < 0.0:
                # leaving variable exits at its upper bound: substitute it so
                # the usual "leave at zero" pivot applies
                leaving = self.basis[i_star]
                self.table[i_star, -1] -= self.ub[leaving]
                self.table[:, leaving] *= -1.0
                self.flip[leaving] = ~self.flip[leaving]
                self.table[i_star, :] *= -1.0

            piv = self.table[i_star, j]
            if abs(piv) <= self.tol:
                raise SolverFailure("zero pivot encountered",
                                    iterations=self.iterations)
            self.table[i_star] /= piv
            col = self.table[:, j].copy()
            col[i_star] = 0.0
            self.table -= np.outer(col, self.table[i_star])
            d -= d[j] * self.table[i_star, :-1]
            self.in_basis[self.basis[i_star]] = False
            self.basis[i_star] = j
            self.in_basis[j] = True

    # -- phases ----------------------------------------------------------------

    def run(self) -> LpSolution:
        early = self._build()
        if early == INFEASIBLE:
            return LpSolution(INFEASIBLE, None, None, None, 0)

        if len(self.art_cols):
            c1 = np.zeros(self.n_std)
            c1[self.art_cols] = 1.0
            status = self._iterate(c1)
            if status != OPTIMAL:
                raise SolverFailure("phase 1 did not terminate at an optimum",
                                    iterations=self.iterations)
            art_basic = np.isin(self.basis, self.art_cols)
            infeas = float(self.table[art_basic, -1].sum()) if art_basic.any() else 0.0
            if infeas > _FEAS_TOL * (1.0 + abs(self.b_std).max(initial=0.0)):
                return LpSolution(INFEASIBLE, None, None, None, self.iterations)
            self._expel_artificials()
            self.can_enter[self.art_cols] = False
            self.ub[self.art_cols] = 0.0

        status = self._iterate(self.c2)
        if status == UNBOUNDED:
            return LpSolution(UNBOUNDED, None, None, None, self.iterations)
        return self._extract()

    def _expel_artificials(self):
        art = set(self.art_cols.tolist())
        for i in range(self.m):
            if self.basis[i] not in art:
                continue
            row = self.table[i, :-1]
            candidates = np.flatnonzero(
                (np.abs(row) > _FEAS_TOL) & ~self.in_basis & self.can_enter)
            candidates = [j for j in candidates if j not in art]
            if not candidates:
                continue  # redundant row; artificial stays basic at zero
            j = max(candidates, key=lambda jj: (abs(row[jj]), -jj))
            piv = self.table[i, j]
            self.table[i] /= piv
            col = self.table[:, j].copy()
            col[i] = 0.0
            self.table -= np.outer(col, self.table[i])
            self.in_basis[self.basis[i]] = False
            self.basis[i] = j
            self.in_basis[j] = True

    # -- solution reconstruction ------------------------------------------------

    def _extract(self) -> LpSolution:
        p = self.problem
        nonbasic_upper = np.flatnonzero(
            self.flip & ~self.in_basis & np.isfinite(self.ub))
        rhs = self.b_std.copy()
        for j in nonbasic_upper:
            rhs -= self.a_std[:, j] * self.ub[j]
        basis_matrix = self.a_std[:, self.basis]
        try:
            xb = np.linalg.solve(basis_matrix, rhs)
            y = np.linalg.solve(basis_matrix.T, self.c2[self.basis])
        except np.linalg.LinAlgError as exc:
            raise SolverFailure(f"singular terminal basis: {exc}",
                                iterations=self.iterations) from exc

        x_std = np.zeros(self.n_std)
        x_std[nonbasic_upper] = self.ub[nonbasic_upper]
        x_std[self.basis] = xb

        x = np.zeros(p.num_vars)
        for col, (kind, j, shift) in enumerate(self.recover):
            if kind == "shift":
                x[j] = shift + x_std[col]
            elif kind == "negshift":
                x[j] = shift - x_std[col]
            elif kind == "pos":
                x[j] += x_std[col]
            elif kind == "neg":
                x[j] -= x_std[col]

        duals = self.sense_mult * self.row_sign * y
        objective = float(p.objective @ x + p.offset)
        return LpSolution(OPTIMAL, x, duals, objective, self.iterations)


def verify_solution(problem: LpProblem, solution: LpSolution,
                    tol: float = _FEAS_TOL) -> list[str]:
    """Check feasibility, complementary slackness, and strong duality.

    Returns human-readable violations; empty when the optimal solution is
    internally consistent.  Intended for tests and debugging.
    """
    if solution.status != OPTIMAL:
        return [f"status is {solution.status}, not optimal"]
    p, x, y = problem, solution.x, solution.duals
    issues = []
    if np.any(x < p.lower - tol) or np.any(x > p.upper + tol):
        issues.append("variable bounds violated")
    activity = p.rows @ x
    is_max = p.sense == "max"
    for i, rel in enumerate(p.relations):
        slack = p.rhs[i] - activity[i]
        if rel == "<=" and slack < -tol:
            issues.append(f"row {i} violates <=")
        if rel == ">=" and slack > tol:
            issues.append(f"row {i} violates >=")
        if rel == "=" and abs(slack) > tol:
            issues.append(f"row {i} violates =")
        sign = y[i] if is_max else -y[i]
        if rel == "<=" and sign < -tol:
            issues.append(f"dual {i} has wrong sign for <=")
        if rel == ">=" and sign > tol:
            issues.append(f"dual {i} has wrong sign for >=")
        if rel != "=" and abs(y[i] * slack) > tol * max(1.0, abs(p.rhs[i])):
            issues.append(f"complementary slackness fails on row {i}")

    reduced = p.objective - y @ p.rows
    bound_terms = 0.0
    for j in range(p.num_vars):
        at_lower = np.isfinite(p.lower[j]) and x[j] <= p.lower[j] + tol
        at_upper = np.isfinite(p.upper[j]) and x[j] >= p.upper[j] - tol
        if at_lower:
            bound_terms += reduced[j] * p.lower[j]
        elif at_upper:
            bound_terms += reduced[j] * p.upper[j]
        else:
            if abs(reduced[j]) > tol:
                issues.append(f"interior variable {j} has nonzero reduced cost")
        if is_max:
            if at_lower and not at_upper and reduced[j] > tol:
                issues.append(f"variable {j} at lower with improving reduced cost")
            if at_upper and not at_lower and reduced[j] < -tol:
                issues.append(f"variable {j} at upper with improving reduced cost")
        else:
            if at_lower and not at_upper and reduced[j] < -tol:
                issues.append(f"variable {j} at lower with improving reduced cost")
            if at_upper and not at_lower and reduced[j] > tol:
                issues.append(f"variable {j} at upper with improving reduced cost")
    dual_obj = float(y @ p.rhs + bound_terms + p.offset)
    if abs(dual_obj - solution.objective) > tol * max(1.0, abs(solution.objective)):
        issues.append(
            f"strong duality gap: primal {solution.objective} vs dual {dual_obj}")
    return issues
