"""Robust polynomial regression: weighted L1 fit followed by median refinement.

``approx`` runs the complete procedure: an interval-weighted
least-absolute-deviations fit, then a fixed number of rounds of ``refine``
(median of residuals per Chebyshev interval, discrete minimax fit through
those medians, add the correction).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .cheb import ChebPoly, GridSpec, clenshaw, default_inf_grid, norm_1_grid, norm_inf_grid, vander
from .lp import LPError, LPProblem, SimplexSolver, Status, lp_solve
from .partition import Partition, SampleSet, build_partition, bucket_ids, require_nonempty

M_CONSTANT = 8


class DegenerateNodesError(ValueError):
    pass


@dataclass(frozen=True)
class FitConfig:
    degree: int
    epsilon: float = 0.25
    alpha: float = 0.25
    m_override: int | None = None
    max_rounds: int | None = None

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        if not 0.0 < self.alpha < 0.5:
            raise ValueError("alpha must lie in (0, 1/2)")
        if self.m_override is not None and self.m_override < self.degree + 1:
            raise ValueError("partition size must be at least degree + 1")
        if self.max_rounds is not None and self.max_rounds < 0:
            raise ValueError("max_rounds must be nonnegative")

    @property
    def m(self) -> int:
        if self.m_override is not None:
            return self.m_override
        return max(self.degree + 1, math.ceil(M_CONSTANT * (self.degree + 1) / self.epsilon - 1e-9))

    @property
    def scheduled_rounds(self) -> int:
        """ceil(log(4 (d+1)^2) / log(1/eps)) + 2."""
        d = self.degree
        return math.ceil(math.log(4 * (d + 1) ** 2) / math.log(1.0 / self.epsilon)) + 2

    @property
    def rounds(self) -> int:
        if self.max_rounds is None:
            return self.scheduled_rounds
        return min(self.max_rounds, self.scheduled_rounds)


@dataclass
class RoundRecord:
    t: int
    residual_linf_estimate: float  # ||r_t||: this round's estimate of the current error
    residual_l1_estimate: float
    minimax_objective: float
    error_linf: float | None = None  # ||p_hat^(t) - truth|| before the round, if truth known
    error_l1: float | None = None


@dataclass
class FitReport:
    config: FitConfig
    rounds: list = field(default_factory=list)
    final_poly: ChebPoly = None
    l1_init_poly: ChebPoly = None
    converged: bool = True
    non_contraction: bool = False
    final_error_linf: float | None = None
    final_error_l1: float | None = None

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["m"] = self.config.m
        cfg["rounds"] = self.config.rounds
        return {
            "config": cfg,
            "rounds": [asdict(r) for r in self.rounds],
            "l1_init": self.l1_init_poly.to_dict(),
            "final": self.final_poly.to_dict(),
            "converged": self.converged,
            "non_contraction": self.non_contraction,
            "final_error_linf": self.final_error_linf,
            "final_error_l1": self.final_error_l1,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _buckets(s: SampleSet, part: Partition):
    j = bucket_ids(part, s)
    counts = np.bincount(j, minlength=part.m + 1)[1:]
    require_nonempty(part, counts)
    return j, counts


def l1_objective(s: SampleSet, part: Partition, q: ChebPoly) -> float:
    j, counts = _buckets(s, part)
    w = part.lengths[j - 1] / counts[j - 1]
    return float(w @ np.abs(s.y - clenshaw(q.coeffs, s.x)))


def l1_fit(s: SampleSet, part: Partition, d: int) -> ChebPoly:
    """Degree-d minimiser of sum_j |I_j|/|S_j| sum_{i in S_j} |y_i - q(x_i)|.

    Solved through the LP dual

        maximize  y.z   subject to  V^T z = 0,  |z_i| <= w_i

    (d + 1 equality rows, one box-bounded column per sample).  The simplex
    multipliers of the optimal basis are minus the primal coefficients.
    """
    if len(s) < d + 1:
        raise ValueError("need at least degree + 1 samples")
    j, counts = _buckets(s, part)
    w = part.lengths[j - 1] / counts[j - 1]
    V = vander(s.x, d)
    res = SimplexSolver().solve_equality(-s.y, V.T, np.zeros(d + 1), -w, w)
    if res.status is not Status.OPTIMAL:
        raise LPError(f"L1 regression LP ended {res.status.value}")
    return ChebPoly(-res.y)


def interval_medians(s: SampleSet, part: Partition, center: ChebPoly):
    """Midpoint of each I_j and the lower median of y - center(x) over S_j."""
    j, counts = _buckets(s, part)
    resid = s.y - clenshaw(center.coeffs, s.x)
    order = np.lexsort((resid, j))
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    med = resid[order[starts + (counts - 1) // 2]]
    return part.midpoints.copy(), med


def linf_point_fit(xs, ys, d: int):
    """Discrete minimax fit: minimise max_j |q(x_j) - y_j| over degree-d q.

    Returns ``(q, objective)``.
    """
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    if np.unique(xs).size < d + 1:
        raise DegenerateNodesError(f"need {d + 1} distinct nodes, got {np.unique(xs).size}")
    V = vander(xs, d)
    one = np.ones((xs.size, 1))
    # variables (c_0..c_d, t):  V c - t <= y,  -V c - t <= -y
    A = np.vstack([np.hstack([V, -one]), np.hstack([-V, -one])])
    b = np.concatenate([ys, -ys])
    obj = np.zeros(d + 2)
    obj[-1] = 1.0
    sol = lp_solve(LPProblem(obj, A, b))
    if not sol.optimal:
        raise LPError(f"minimax LP ended {sol.status.value}")
    q = ChebPoly(sol.v[:-1])
    return q, float(np.max(np.abs(V @ sol.v[:-1] - ys)))


def refine(s: SampleSet, part: Partition, p_hat: ChebPoly, d: int, return_step: bool = False):
    """One refinement round: p_hat + (minimax fit through the interval medians)."""
    xt, yt = interval_medians(s, part, p_hat)
    r, obj = linf_point_fit(xt, yt, d)
    new = p_hat + r
    if return_step:
        return new, r, obj
    return new


def approx(s: SampleSet, cfg: FitConfig, truth: ChebPoly | None = None,
           grid: GridSpec | None = None) -> FitReport:
    """L1 fit then ``cfg.rounds`` refinement rounds.

    When ``truth`` is given (simulation), each round also records the true
    sup and L1 errors.
    """
    d = cfg.degree
    part = build_partition(cfg.m)
    grid = grid or default_inf_grid(d)

    def errors(p):
        if truth is None:
            return None, None
        diff = p - truth
        return norm_inf_grid(diff, grid), norm_1_grid(diff)

    p0 = l1_fit(s, part, d)
    report = FitReport(cfg, l1_init_poly=p0)
    p = p0
    rising = 0
    prev = None
    for t in range(cfg.rounds):
        e_inf, e_1 = errors(p)
        p, r, obj = refine(s, part, p, d, return_step=True)
        est = norm_inf_grid(r, grid)
        report.rounds.append(RoundRecord(t, est, norm_1_grid(r), obj, e_inf, e_1))
        if prev is not None and est > prev + 1e-9:
            rising += 1
            if rising >= 2:
                report.non_contraction = True
        else:
            rising = 0
        prev = est
    report.final_poly = p
    report.converged = not report.non_contraction
    report.final_error_linf, report.final_error_l1 = errors(p)
    return report
