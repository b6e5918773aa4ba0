"""Executable impossibility gadgets: constructions plus the checks they rely on.

Each constructor returns the objects in Chebyshev form; the ``check_*``
helpers evaluate the claimed inequalities on grids and return plain dicts
(the CLI writes them out as JSON).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cheb import (
    ChebPoly,
    GridSpec,
    clenshaw,
    compose_linear,
    divide_by_x,
    poly_mul,
    vander,
)
from .lp import LPError, LPProblem, lp_solve
from .simulator import uniforms


# ---------------------------------------------------------------- indicators

@dataclass(frozen=True)
class IndicatorSpec:
    d: int
    b: float = 0.0


def _centered_indicator(d: int) -> ChebPoly:
    """(-1)^(d/2) T_{d+1}(x) / ((d+1) x) for even d."""
    q = divide_by_x(ChebPoly.basis(d + 1))
    return q * ((-1) ** (d // 2) / (d + 1))


def indicator_poly(spec: IndicatorSpec) -> ChebPoly:
    """Degree <= d polynomial with p(b) = 1, sup norm 1 and fast decay away from b.

    Odd d falls back to d - 1.  For b = 0 the centred form is returned as
    is; any other centre uses p_0((x - b) / 2).
    """
    if spec.d < 1:
        raise ValueError("indicator degree must be at least 1")
    if abs(spec.b) > 1:
        raise ValueError("centre must lie in [-1, 1]")
    d = spec.d if spec.d % 2 == 0 else spec.d - 1
    if d == 0:
        return ChebPoly([1.0])
    p0 = _centered_indicator(d)
    if spec.b == 0.0:
        return p0
    return compose_linear(p0, 0.5, -0.5 * spec.b)


# ---------------------------------------------------------------- f_S family

@dataclass(frozen=True)
class FamilySpec:
    """Sums of squared indicators f_S = sum_{j in S} p_{b_j}^2.

    Indicators are built at degree floor(d / 2) so deg f_S <= d, and the
    number of centres is m = floor(floor(d / 2) sqrt(alpha) / 2), the count
    that keeps the off-centre tail below alpha at that indicator degree.
    """

    d: int
    alpha: float
    S: frozenset = field(default_factory=frozenset)

    @property
    def indicator_degree(self) -> int:
        return self.d // 2

    @property
    def m(self) -> int:
        return int(math.floor(self.indicator_degree * math.sqrt(self.alpha) / 2 + 1e-12))

    @property
    def centers(self) -> np.ndarray:
        j = np.arange(1, self.m + 1)
        return -1.0 + 2.0 * j / self.m

    def with_subset(self, S) -> FamilySpec:
        return FamilySpec(self.d, self.alpha, frozenset(S))


def _check_family(spec: FamilySpec) -> None:
    if spec.m < 1:
        raise ValueError(f"no centres: floor(d/2) sqrt(alpha) / 2 < 1 for d={spec.d}, alpha={spec.alpha}")
    bad = [j for j in spec.S if not 1 <= j <= spec.m]
    if bad:
        raise ValueError(f"subset entries outside 1..{spec.m}: {sorted(bad)}")


def squared_indicators(spec: FamilySpec) -> list[ChebPoly]:
    _check_family(spec)
    out = []
    for b in spec.centers:
        p = indicator_poly(IndicatorSpec(spec.indicator_degree, float(b)))
        out.append(poly_mul(p, p))
    return out


def fs_family(spec: FamilySpec, squares: list[ChebPoly] | None = None) -> ChebPoly:
    _check_family(spec)
    squares = squares if squares is not None else squared_indicators(spec)
    total = np.zeros(spec.d + 1)
    for j in spec.S:
        c = squares[j - 1].coeffs
        total[: c.size] += c
    return ChebPoly(total)


def nearest_center(spec: FamilySpec, x) -> np.ndarray:
    """k_x: 1-based index of the centre closest to x (ties to the lower index)."""
    x = np.asarray(x, float)
    return np.argmin(np.abs(x[..., None] - spec.centers), axis=-1) + 1


def check_fs_sandwich(spec: FamilySpec, n_grid: int = 2000) -> dict:
    """f_{{k_x} & S}(x) <= f_S(x) <= f_{{k_x} & S}(x) + alpha on a uniform grid."""
    squares = squared_indicators(spec)
    x = np.linspace(-1.0, 1.0, n_grid)
    vals = np.array([clenshaw(sq.coeffs, x) for sq in squares])
    f = fs_family(spec, squares)
    fx = clenshaw(f.coeffs, x)
    k = nearest_center(spec, x)
    in_s = np.array([kk in spec.S for kk in k])
    single = np.where(in_s, vals[k - 1, np.arange(x.size)], 0.0)
    lower_gap = float(np.min(fx - single))
    upper_gap = float(np.max(fx - single))
    return {
        "d": spec.d,
        "alpha": spec.alpha,
        "m": spec.m,
        "S": sorted(spec.S),
        "min_lower_margin": lower_gap,
        "max_excess": upper_gap,
        "holds": bool(lower_gap >= -1e-12 and upper_gap <= spec.alpha),
    }


def listdecode_adversary(spec: FamilySpec, xs, flags=None, seed: int | None = None):
    """Observations that are always f_{} (x) or f_[m](x).

    The branch within alpha of f_S(x) is f_{} when k_x is outside S and f_[m]
    when it is inside.  With ``flags`` given, inliers get that branch and
    outliers the other.  Without flags, a fair per-point coin from ``seed``
    picks the observed branch and the flag is whatever that implies; then
    ``y`` is a function of (xs, seed) alone, and flags are i.i.d. fair coins
    whatever S is.

    Returns ``(y, flags)``.
    """
    xs = np.asarray(xs, float)
    full = spec.with_subset(range(1, spec.m + 1))
    squares = squared_indicators(spec)
    hi_branch = clenshaw(fs_family(full, squares).coeffs, xs)
    lo_branch = np.zeros_like(xs)
    close_is_hi = np.array([k in spec.S for k in nearest_center(spec, xs)], dtype=bool)
    if flags is None:
        if seed is None:
            raise ValueError("need either flags or a seed")
        observe_hi = uniforms(seed, "coin", xs.size) < 0.5
        flags = observe_hi != close_is_hi
    else:
        flags = np.asarray(flags, bool)
        if flags.shape != xs.shape:
            raise ValueError("flags must match xs")
        observe_hi = close_is_hi != flags
    y = np.where(observe_hi, hi_branch, lo_branch)

    fs = clenshaw(fs_family(spec, squares).coeffs, xs)
    worst = np.max(np.abs(y - fs)[~flags], initial=0.0)
    if worst > spec.alpha + 1e-9:
        raise AssertionError(f"inlier off by {worst:g} > alpha; sandwich violated")
    return y, flags


# ------------------------------------------------------- sample-size gadgets

def uniform_lb_instance(d: int, C: float):
    """f = T_d(x + a / d^2) with a = 4 sqrt(2 (C - 1)), g = 0.

    |f| <= 1 on the safe region [-1, 1 - a / d^2] yet |f(1)| > 2C.
    Returns ``(f, g, (lo, hi), a)``.
    """
    if d < 4:
        raise ValueError("construction needs d >= 4")
    if C <= 1:
        raise ValueError("target factor C must exceed 1")
    a = 4.0 * math.sqrt(2.0 * (C - 1.0))
    shift = a / d**2
    f = compose_linear(ChebPoly.basis(d), 1.0, shift)
    return f, ChebPoly.zero(), (-1.0, 1.0 - shift), a


def check_uniform_gap(d: int, C: float, n_grid: int = 1000) -> dict:
    f, g, (lo, hi), a = uniform_lb_instance(d, C)
    x = np.linspace(lo, hi, n_grid)
    f_one = float(clenshaw(f.coeffs, 1.0))
    safe_sup = float(np.max(np.abs(clenshaw(f.coeffs, x))))
    return {
        "d": d,
        "C": C,
        "a": a,
        "safe_region": [lo, hi],
        "f_at_1": f_one,
        "safe_sup": safe_sup,
        "holds": bool(abs(f_one) > 2 * C and safe_sup <= 1 + 1e-9),
    }


# ------------------------------------------------- approximation-factor gadgets

def quad_triple():
    """x + 1, 1 - x and (3 + 2 sqrt 2)/2 (1 - x^2), plus v = 1 / (3 + 2 sqrt 2)."""
    s = 3.0 + 2.0 * math.sqrt(2.0)
    p1 = ChebPoly([1.0, 1.0])
    p2 = ChebPoly([1.0, -1.0])
    # 1 - x^2 = (1 - T_2) / 2
    p3 = ChebPoly([s / 4.0, 0.0, -s / 4.0])
    return p1, p2, p3, 1.0 / s


def minimax_center(funcs, d: int, grid: GridSpec, check_grid: bool = True):
    """Degree-d q minimising max_i max_g |f_i(x_g) - q(x_g)|; returns (q, radius).

    ``funcs`` may be ChebPolys or any vectorised callables.  The radius is a
    lower bound on the continuous Chebyshev-centre radius.
    """
    if check_grid and grid.M < 16 * (d + 1):
        raise ValueError("grid too coarse: need M >= 16 (d + 1)")
    x = grid.nodes()
    V = vander(x, d)
    one = np.ones((x.size, 1))
    rows, rhs = [], []
    for f in funcs:
        fx = clenshaw(f.coeffs, x) if isinstance(f, ChebPoly) else np.asarray(f(x), float)
        rows += [np.hstack([V, -one]), np.hstack([-V, -one])]
        rhs += [fx, -fx]
    obj = np.zeros(d + 2)
    obj[-1] = 1.0
    sol = lp_solve(LPProblem(obj, np.vstack(rows), np.concatenate(rhs)))
    if not sol.optimal:
        raise LPError(f"Chebyshev-centre LP ended {sol.status.value}")
    return ChebPoly(sol.v[:-1]), float(sol.v[-1])


class HingeFunction:
    """(sigma / alpha) max(0, x - (1 - 2 alpha))."""

    def __init__(self, alpha: float, sigma: float):
        self.alpha = alpha
        self.sigma = sigma
        self.knot = 1.0 - 2.0 * alpha

    def __call__(self, x):
        return self.sigma / self.alpha * np.maximum(0.0, np.asarray(x, float) - self.knot)


def linf_projection_instance(alpha: float, sigma: float):
    """p = sigma, the hinge f, and the predicted gap (2 - alpha) sigma."""
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return ChebPoly([sigma]), HingeFunction(alpha, sigma), (2.0 - alpha) * sigma


def check_projection_gap(alpha: float, sigma: float, grid_m: int = 65536) -> dict:
    p, f, gap = linf_projection_instance(alpha, sigma)
    grid = GridSpec(grid_m)
    q, radius = minimax_center([f], 1, grid)
    x = grid.nodes()
    dist = float(np.max(np.abs(clenshaw((q - p).coeffs, x))))
    close = float(np.max(np.abs(clenshaw(p.coeffs, x) - f(x))))
    return {
        "alpha": alpha,
        "sigma": sigma,
        "projection": q.to_dict(),
        "projection_radius": radius,
        "distance_to_p": dist,
        "predicted_gap": gap,
        "max_abs_p_minus_f": close,
        "holds": bool(abs(dist - gap) <= 1e-3 and close <= sigma + 1e-12),
    }


@dataclass(frozen=True, eq=False)
class OscillationFamily:
    d: int
    A: float
    c: float
    t_values: tuple
    members: tuple  # ((t, ChebPoly), ...), four per t

    def polys(self) -> list[ChebPoly]:
        return [p for _, p in self.members]


def _shifted_square(A: float, shift: float) -> ChebPoly:
    """A (x - shift)^2 in Chebyshev form."""
    # x^2 = (T_0 + T_2) / 2
    return ChebPoly([A * (0.5 + shift * shift), -2.0 * A * shift, 0.5 * A])


def oscillation_family(d: int) -> OscillationFamily:
    """Four quadratics per t in [-ceil(1.5 d), ceil(1.5 d)], A = 1/(2d), c = 1/(4d)."""
    if d < 2:
        raise ValueError("family needs d >= 2")
    A = 1.0 / (2 * d)
    c = 1.0 / (4 * d)
    T = math.ceil(1.5 * d)
    members = []
    for t in range(-T, T + 1):
        s = 2 * c * t
        members.append((t, 1.0 - _shifted_square(A, s)))
        members.append((t, _shifted_square(A, s + c)))
        members.append((t, _shifted_square(A, s - c)))
        members.append((t, _shifted_square(A, s) + A * c * c / 2))
    return OscillationFamily(d, A, c, tuple(range(-T, T + 1)), tuple(members))


def max_pairwise_distance(polys, grid: GridSpec) -> float:
    x = grid.nodes()
    vals = np.array([clenshaw(p.coeffs, x) for p in polys])
    worst = 0.0
    for i in range(len(vals)):
        worst = max(worst, float(np.max(np.abs(vals[i] - vals[i + 1:]), initial=0.0)))
    return worst


def check_oscillation(d: int, grid_m: int = 8192) -> dict:
    fam = oscillation_family(d)
    bound = 1.0 - 1.0 / (64 * d**3)
    dist = max_pairwise_distance(fam.polys(), GridSpec(grid_m))
    return {
        "d": d,
        "members": len(fam.members),
        "max_pairwise_distance": dist,
        "bound": bound,
        "holds": bool(dist <= bound + 1e-9),
    }


def check_indicator(d: int, b: float, n_grid: int = 4001) -> dict:
    p = indicator_poly(IndicatorSpec(d, b))
    # the peak sits at b, which a uniform grid generally misses
    x = np.union1d(np.linspace(-1.0, 1.0, n_grid), [b])
    px = clenshaw(p.coeffs, x)
    far = np.abs(x - b) > 1e-9
    ratio = np.abs(px[far]) * d * np.abs(x[far] - b) / 2.0
    return {
        "d": d,
        "b": b,
        "degree": p.degree,
        "value_at_b": float(clenshaw(p.coeffs, b)),
        "sup_on_grid": float(np.max(np.abs(px))),
        "max_decay_ratio": float(np.max(ratio, initial=0.0)),
        "coeffs": p.to_dict()["coeffs"],
        "holds": bool(abs(clenshaw(p.coeffs, b) - 1) <= 1e-9
                      and abs(np.max(np.abs(px)) - 1) <= 1e-6
                      and np.max(ratio, initial=0.0) <= 1 + 1e-9),
    }


def check_quad_triple(grid_m: int = 4096) -> dict:
    p1, p2, p3, v = quad_triple()
    grid = GridSpec(grid_m)
    q, radius = minimax_center([p1, p2, p3], 2, grid)
    return {
        "v": v,
        "pairwise_max_distance": max_pairwise_distance([p1, p2, p3], grid),
        "center": q.to_dict(),
        "radius": radius,
        "holds": bool(radius > 1.09),
    }
