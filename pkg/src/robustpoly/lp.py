"""Dense two-phase simplex for small-dimension linear programs.

The engine is a bounded-variable revised simplex on the equality form

    minimize c.x  subject to  A x = b,  lo <= x <= hi

with an explicit basis inverse (rank-one pivot updates, periodic
refactorisation).  Pricing uses the largest reduced cost until
``2 * (rows + cols)`` pivots have been taken, then switches to Bland's
smallest-index rule, which cannot cycle.

:func:`lp_solve` accepts the inequality form ``A v <= b``.  Problems with
many more constraints than variables (every regression LP in this package)
are solved through their dual, whose basis has only ``len(v)`` rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11
REFACTOR_EVERY = 64


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class LPError(RuntimeError):
    """Raised when an LP cannot be solved to optimality."""


class MaxIterationsError(LPError):
    pass


@dataclass
class LPProblem:
    """minimize ``objective . v`` subject to ``A v <= b`` and optional bounds."""

    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.A.shape[0] != self.b.size:
            raise ValueError("A and b disagree on the number of constraints")
        self.lower = np.full(n, -np.inf) if self.lower is None else np.asarray(self.lower, float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, float)
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("bounds must have one entry per variable")
        for arr in (self.objective, self.A, self.b):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound above upper bound")

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_constraints(self) -> int:
        return self.b.size


@dataclass
class LPSolution:
    status: Status
    v: np.ndarray | None = None
    objective_value: float = float("nan")
    iterations: int = 0
    route: str = "primal"

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass
class EqualityResult:
    status: Status
    x: np.ndarray
    y: np.ndarray  # simplex multipliers: reduced costs are c - A.T @ y
    objective_value: float
    iterations: int


@dataclass
class SimplexSolver:
    """Holds tolerances and the iteration counter for one solve at a time."""

    feas_tol: float = FEAS_TOL
    opt_tol: float = OPT_TOL
    pivot_tol: float = PIVOT_TOL
    max_iter: int | None = None
    iterations: int = field(default=0, init=False)

    def solve_equality(self, c, A, b, lo, hi) -> EqualityResult:
        c = np.asarray(c, float)
        A = np.asarray(A, float)
        b = np.asarray(b, float)
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        m, n = A.shape
        cap = self.max_iter if self.max_iter is not None else 50 * (m + n)
        self.iterations = 0

        # Nonbasic start: finite lower bound, else finite upper, else 0.
        x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        resid = b - A @ x
        sign = np.where(resid >= 0.0, 1.0, -1.0)

        # Artificials occupy columns n..n+m with column sign * e_i.
        Aa = np.hstack([A, np.diag(sign)])
        lo_a = np.concatenate([lo, np.zeros(m)])
        hi_a = np.concatenate([hi, np.full(m, np.inf)])
        xa = np.concatenate([x, np.abs(resid)])
        basis = np.arange(n, n + m)
        Binv = np.diag(sign)
        scale_b = 1.0 + (np.abs(b).max() if m else 0.0)

        c1 = np.concatenate([np.zeros(n), np.ones(m)])
        status, Binv = self._iterate(c1, Aa, b, lo_a, hi_a, xa, basis, Binv, cap)
        if status is Status.UNBOUNDED:  # cannot happen in phase one
            raise LPError("phase one reported unbounded")
        infeas = xa[n:].sum()
        if infeas > self.feas_tol * scale_b:
            return EqualityResult(Status.INFEASIBLE, xa[:n], np.zeros(m), float("nan"), self.iterations)

        # Fix artificials at zero and push basic ones out where possible.
        xa[n:] = 0.0
        hi_a[n:] = 0.0
        Binv = self._evict_artificials(Aa, basis, Binv, n)

        c2 = np.concatenate([c, np.zeros(m)])
        status, Binv = self._iterate(c2, Aa, b, lo_a, hi_a, xa, basis, Binv, cap)
        y = c2[basis] @ Binv
        xs = xa[:n]
        return EqualityResult(status, xs, y, float(c @ xs), self.iterations)

    def _evict_artificials(self, A, basis, Binv, n_struct):
        m = basis.size
        for r in range(m):
            if basis[r] < n_struct:
                continue
            row = Binv[r] @ A[:, :n_struct]
            in_basis = np.zeros(n_struct, bool)
            in_basis[basis[basis < n_struct]] = True
            row[in_basis] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) <= 1e-8:
                continue  # redundant equality; artificial stays basic at zero
            alpha = Binv @ A[:, j]
            Binv = _pivot(Binv, alpha, r)
            basis[r] = j
        return Binv

    def _iterate(self, c, A, b, lo, hi, x, basis, Binv, cap):
        m, n = A.shape
        bland_after = 2 * (m + n)
        movable = lo < hi
        since_refactor = 0
        while True:
            if since_refactor >= REFACTOR_EVERY:
                Binv = np.linalg.inv(A[:, basis])
                nonbasic = np.ones(n, bool)
                nonbasic[basis] = False
                x[basis] = Binv @ (b - A[:, nonbasic] @ x[nonbasic])
                since_refactor = 0

            y = c[basis] @ Binv
            d = c - A.T @ y
            at_lo = x <= lo
            at_hi = x >= hi
            free = ~at_lo & ~at_hi
            improve = (
                (at_lo & (d < -self.opt_tol))
                | (at_hi & (d > self.opt_tol))
                | (free & (np.abs(d) > self.opt_tol))
            ) & movable
            improve[basis] = False
            cand = np.flatnonzero(improve)
            if cand.size == 0:
                return Status.OPTIMAL, Binv
            if self.iterations >= cap:
                raise MaxIterationsError(f"simplex exceeded {cap} iterations")
            bland = self.iterations >= bland_after
            if bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(np.abs(d[cand]))])
            direction = -1.0 if d[j] > 0 else 1.0

            alpha = Binv @ A[:, j]
            delta = -direction * alpha  # rate of change of x_B per unit step
            xb = x[basis]
            lob = lo[basis]
            hib = hi[basis]
            step = np.full(m, np.inf)
            dec = delta < -self.pivot_tol
            inc = delta > self.pivot_tol
            step[dec] = (xb[dec] - lob[dec]) / -delta[dec]
            step[inc] = (hib[inc] - xb[inc]) / delta[inc]
            step = np.maximum(step, 0.0)
            t_basic = step.min() if m else np.inf
            t_flip = hi[j] - lo[j]
            t = min(t_basic, t_flip)
            if not np.isfinite(t):
                return Status.UNBOUNDED, Binv

            self.iterations += 1
            since_refactor += 1
            if t_flip <= t_basic:
                x[basis] = xb + t * delta
                x[j] = hi[j] if direction > 0 else lo[j]
                continue

            ties = np.flatnonzero(step <= t_basic + 1e-12 * (1.0 + t_basic))
            if bland:
                r = int(ties[np.argmin(basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(alpha[ties]))])
            leave = basis[r]
            x[basis] = xb + t * delta
            x[leave] = lo[leave] if delta[r] < 0 else hi[leave]
            x[j] = x[j] + direction * t
            Binv = _pivot(Binv, alpha, r)
            basis[r] = j


def _pivot(Binv, alpha, r):
    """Basis inverse after replacing basic position ``r`` by a column whose
    representation in the current basis is ``alpha``."""
    piv = alpha[r]
    row = Binv[r] / piv
    out = Binv - np.outer(alpha, row)
    out[r] = row
    return out


def _dualisable(prob: LPProblem) -> tuple[np.ndarray, np.ndarray]:
    """Fold finite variable bounds into inequality rows."""
    A, b = [prob.A], [prob.b]
    n = prob.n_vars
    eye = np.eye(n)
    up = np.isfinite(prob.upper)
    lo = np.isfinite(prob.lower)
    if up.any():
        A.append(eye[up])
        b.append(prob.upper[up])
    if lo.any():
        A.append(-eye[lo])
        b.append(-prob.lower[lo])
    return np.vstack(A), np.concatenate(b)


def _solve_primal(prob: LPProblem, solver: SimplexSolver) -> LPSolution:
    k, n = prob.A.shape
    # A v + s = b, s >= 0
    A = np.hstack([prob.A, np.eye(k)])
    c = np.concatenate([prob.objective, np.zeros(k)])
    lo = np.concatenate([prob.lower, np.zeros(k)])
    hi = np.concatenate([prob.upper, np.full(k, np.inf)])
    res = solver.solve_equality(c, A, prob.b, lo, hi)
    if res.status is not Status.OPTIMAL:
        return LPSolution(res.status, iterations=res.iterations, route="primal")
    v = res.x[:n].copy()
    return LPSolution(Status.OPTIMAL, v, float(prob.objective @ v), res.iterations, "primal")


def _solve_dual(prob: LPProblem, solver: SimplexSolver) -> LPSolution:
    A, b = _dualisable(prob)
    n = prob.n_vars
    k = b.size
    # minimize b.lam  s.t.  A.T lam = -c, lam >= 0; the multipliers are v.
    res = solver.solve_equality(b, A.T, -prob.objective, np.zeros(k), np.full(k, np.inf))
    if res.status is Status.UNBOUNDED:
        return LPSolution(Status.INFEASIBLE, iterations=res.iterations, route="dual")
    if res.status is Status.INFEASIBLE:
        # Primal is unbounded or infeasible; the primal route tells which.
        sol = _solve_primal(prob, SimplexSolver(solver.feas_tol, solver.opt_tol, solver.pivot_tol))
        sol.route = "dual->primal"
        return sol
    v = res.y[:n].copy()
    return LPSolution(Status.OPTIMAL, v, float(prob.objective @ v), res.iterations, "dual")


def lp_solve(prob: LPProblem, route: str = "auto") -> LPSolution:
    """Solve ``prob``; ``route`` is ``"auto"``, ``"primal"`` or ``"dual"``.

    Raises :class:`MaxIterationsError` past ``50 * (rows + cols)`` pivots.
    """
    if route not in ("auto", "primal", "dual"):
        raise ValueError(f"unknown route {route!r}")
    n_rows = prob.n_constraints + int(np.isfinite(prob.lower).sum() + np.isfinite(prob.upper).sum())
    if route == "auto":
        route = "dual" if n_rows > 2 * prob.n_vars else "primal"
    solver = SimplexSolver()
    if route == "dual":
        return _solve_dual(prob, solver)
    return _solve_primal(prob, solver)


def constraint_violation(prob: LPProblem, v) -> float:
    """Largest violation of ``A v <= b`` and the bounds (0 when feasible)."""
    v = np.asarray(v, float)
    viol = [np.max(prob.A @ v - prob.b, initial=0.0)]
    viol.append(np.max(prob.lower - v, initial=0.0))
    viol.append(np.max(v - prob.upper, initial=0.0))
    return float(max(viol))


def feasibility_tolerance(prob: LPProblem) -> float:
    return FEAS_TOL * (1.0 + (np.abs(prob.b).max() if prob.b.size else 0.0))
