"""Polynomials on [-1, 1] in the Chebyshev basis.

Everything in the package represents polynomials as coefficient vectors
``c_0..c_d`` with ``p(x) = sum_k c_k T_k(x)``.  Sup and L1 norms are
estimated on grids (see :class:`GridSpec`).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as _npcheb

TRIM_TOL = 1e-14
DEFAULT_L1_GRID = 4096
GRID_ENV_VAR = "ROBUSTPOLY_GRID_M"


@dataclass(frozen=True, eq=False)
class ChebPoly:
    """Real polynomial stored by its Chebyshev coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, ndmin=1, copy=True)
        if c.ndim != 1:
            raise ValueError("coefficients must be a flat sequence")
        if c.size == 0:
            c = np.zeros(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls) -> ChebPoly:
        return cls(np.zeros(1))

    @classmethod
    def basis(cls, k: int, scale: float = 1.0) -> ChebPoly:
        """Return ``scale * T_k``."""
        c = np.zeros(k + 1)
        c[k] = scale
        return cls(c)

    @classmethod
    def from_monomial(cls, mono: Sequence[float]) -> ChebPoly:
        return cls(_npcheb.poly2cheb(np.asarray(mono, dtype=float)))

    def to_monomial(self) -> np.ndarray:
        return _npcheb.cheb2poly(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree after trimming negligible trailing coefficients."""
        c = np.abs(self.coeffs)
        scale = c.max()
        if scale == 0.0:
            return 0
        nz = np.nonzero(c > TRIM_TOL * scale)[0]
        return int(nz[-1])

    def __len__(self):
        return self.coeffs.size

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other):
        if isinstance(other, ChebPoly):
            return poly_lincomb(1.0, self, 1.0, other)
        return poly_lincomb(1.0, self, float(other), ChebPoly([1.0]))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ChebPoly):
            return poly_lincomb(1.0, self, -1.0, other)
        return poly_lincomb(1.0, self, -float(other), ChebPoly([1.0]))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return ChebPoly(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, ChebPoly):
            return poly_mul(self, other)
        return ChebPoly(self.coeffs * float(other))

    __rmul__ = __mul__

    def derivative(self) -> ChebPoly:
        return poly_derivative(self)

    def to_dict(self) -> dict:
        return {"basis": "chebyshev", "coeffs": [float(v) for v in self.coeffs]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> ChebPoly:
        if data.get("basis", "chebyshev") != "chebyshev":
            raise ValueError(f"unsupported basis {data.get('basis')!r}")
        return cls(data["coeffs"])

    @classmethod
    def from_json(cls, text: str) -> ChebPoly:
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"ChebPoly({np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid on [-1, 1]: ``M + 1`` nodes, ascending."""

    M: int
    node_kind: str = "chebyshev"

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("grid needs M >= 1")
        if self.node_kind not in ("chebyshev", "uniform"):
            raise ValueError(f"unknown node kind {self.node_kind!r}")

    def nodes(self) -> np.ndarray:
        if self.node_kind == "uniform":
            return np.linspace(-1.0, 1.0, self.M + 1)
        return chebyshev_extrema(self.M)[::-1].copy()


def chebyshev_extrema(M: int) -> np.ndarray:
    """``cos(pi j / M)`` for j = 0..M, computed in a sign-symmetric way.

    Written as ``sin(pi (M - 2j) / (2M))`` so the middle node is exactly 0
    and the set is exactly antisymmetric.
    """
    j = np.arange(M + 1)
    return np.sin(np.pi * (M - 2 * j) / (2 * M))


def default_inf_grid(degree: int) -> GridSpec:
    env = os.environ.get(GRID_ENV_VAR)
    if env:
        return GridSpec(max(int(env), 8 * (degree + 1)))
    return GridSpec(max(512, 16 * (degree + 1)))


def default_l1_grid(degree: int) -> GridSpec:
    env = os.environ.get(GRID_ENV_VAR)
    base = int(env) if env else DEFAULT_L1_GRID
    return GridSpec(max(base, 8 * (degree + 1)))


def _as_poly(p) -> ChebPoly:
    return p if isinstance(p, ChebPoly) else ChebPoly(p)


def _clamp(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("evaluation point outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def cheb_eval(k: int, x):
    """T_k(x) by the three-term recurrence."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    x = _clamp(x)
    t_prev, t = np.ones_like(x), x
    if k == 0:
        return t_prev if t_prev.ndim else float(t_prev)
    for _ in range(k - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t if t.ndim else float(t)


def clenshaw(coeffs, x):
    """Sum c_k T_k(x) by Clenshaw's backward recurrence (no domain check)."""
    c = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    two_x = 2.0 * x
    for ck in c[:0:-1]:
        b1, b2 = ck + two_x * b1 - b2, b1
    out = c[0] + x * b1 - b2
    return out if out.ndim else float(out)


def poly_eval(p, x):
    return clenshaw(_as_poly(p).coeffs, _clamp(x))


def poly_lincomb(a: float, p, b: float, q) -> ChebPoly:
    """Coefficient-wise ``a p + b q``, zero-padded to the longer length."""
    pc, qc = _as_poly(p).coeffs, _as_poly(q).coeffs
    n = max(pc.size, qc.size)
    out = np.zeros(n)
    out[: pc.size] += a * pc
    out[: qc.size] += b * qc
    return ChebPoly(out)


def poly_derivative(p) -> ChebPoly:
    """Exact derivative via c'_{k-1} = c'_{k+1} + 2k c_k."""
    c = _as_poly(p).coeffs
    n = c.size - 1
    if n == 0:
        return ChebPoly([0.0])
    d = np.zeros(n + 2)
    for k in range(n, 0, -1):
        d[k - 1] = d[k + 1] + 2.0 * k * c[k]
    d[0] *= 0.5
    return ChebPoly(d[:n])


def poly_mul(p, q) -> ChebPoly:
    """Product using T_i T_j = (T_{i+j} + T_{|i-j|}) / 2."""
    pc, qc = _as_poly(p).coeffs, _as_poly(q).coeffs
    out = np.zeros(pc.size + qc.size - 1)
    for i, a in enumerate(pc):
        if a == 0.0:
            continue
        j = np.arange(qc.size)
        np.add.at(out, i + j, 0.5 * a * qc)
        np.add.at(out, np.abs(i - j), 0.5 * a * qc)
    return ChebPoly(out)


def mul_x(p) -> ChebPoly:
    """``x * p`` via x T_k = (T_{k+1} + T_{k-1}) / 2 and x T_0 = T_1."""
    c = _as_poly(p).coeffs
    out = np.zeros(c.size + 1)
    out[1] += c[0]
    if c.size > 1:
        out[2:] += 0.5 * c[1:]
        out[: c.size - 1] += 0.5 * c[1:]
    return ChebPoly(out)


def divide_by_x(p, tol: float = 1e-12) -> ChebPoly:
    """Exact quotient ``p / x``; raises if p(0) is not (numerically) zero.

    Inverts :func:`mul_x` from the top coefficient down.
    """
    c = _as_poly(p).coeffs
    n = c.size - 1
    if n == 0:
        if abs(c[0]) > tol:
            raise ValueError("polynomial does not vanish at 0")
        return ChebPoly([0.0])
    q = np.zeros(n + 2)
    q[n - 1] = 2.0 * c[n]
    for j in range(n - 1, 1, -1):
        q[j - 1] = 2.0 * c[j] - q[j + 1]
    if n >= 1:
        q[0] = c[1] - 0.5 * q[2]
    remainder = c[0] - 0.5 * q[1]
    if abs(remainder) > tol * max(1.0, np.abs(c).max()):
        raise ValueError(f"polynomial does not vanish at 0 (remainder {remainder:g})")
    return ChebPoly(q[:n])


def compose_linear(p, scale: float, shift: float) -> ChebPoly:
    """Coefficients of ``x -> p(scale * x + shift)``.

    Clenshaw run in the polynomial algebra, so no monomial round trip.
    """
    c = _as_poly(p).coeffs

    def times_linear(q: ChebPoly) -> ChebPoly:
        return poly_lincomb(scale, mul_x(q), shift, q)

    b1 = ChebPoly([0.0])
    b2 = ChebPoly([0.0])
    for ck in c[:0:-1]:
        b1, b2 = poly_lincomb(2.0, times_linear(b1), -1.0, b2) + ck, b1
    out = poly_lincomb(1.0, times_linear(b1), -1.0, b2) + c[0]
    return ChebPoly(out.coeffs[: c.size])


def norm_inf_grid(p, g: GridSpec | None = None) -> float:
    """Max of |p| over the grid nodes (a lower bound on the true sup)."""
    p = _as_poly(p)
    g = g or default_inf_grid(p.degree)
    return float(np.max(np.abs(clenshaw(p.coeffs, g.nodes()))))


def norm_1_grid(p, g: GridSpec | None = None) -> float:
    """Composite trapezoid estimate of the integral of |p| over [-1, 1]."""
    p = _as_poly(p)
    g = g or default_l1_grid(p.degree)
    x = g.nodes()
    return float(np.trapezoid(np.abs(clenshaw(p.coeffs, x)), x))


def sup_abs(f, g: GridSpec) -> float:
    """Max of |f| on grid nodes for any vectorised callable ``f``."""
    return float(np.max(np.abs(f(g.nodes()))))


def l1_of(f, g: GridSpec) -> float:
    x = g.nodes()
    return float(np.trapezoid(np.abs(f(x)), x))


def vander(x, degree: int) -> np.ndarray:
    """Matrix with columns T_0(x)..T_degree(x)."""
    x = np.asarray(x, dtype=float)
    V = np.empty((x.size, degree + 1))
    V[:, 0] = 1.0
    if degree >= 1:
        V[:, 1] = x
    for k in range(2, degree + 1):
        V[:, k] = 2.0 * x * V[:, k - 1] - V[:, k - 2]
    return V


def random_poly(degree: int, rng: np.random.Generator, decay: float = 0.0) -> ChebPoly:
    """Gaussian coefficients, optionally damped as (k+1)^-decay."""
    k = np.arange(degree + 1)
    return ChebPoly(rng.standard_normal(degree + 1) / (k + 1.0) ** decay)


def as_polys(items: Iterable) -> list[ChebPoly]:
    return [_as_poly(p) for p in items]


__all__ = [
    "ChebPoly",
    "GridSpec",
    "cheb_eval",
    "clenshaw",
    "poly_eval",
    "poly_lincomb",
    "poly_derivative",
    "poly_mul",
    "mul_x",
    "divide_by_x",
    "compose_linear",
    "norm_inf_grid",
    "norm_1_grid",
    "sup_abs",
    "l1_of",
    "vander",
    "chebyshev_extrema",
    "default_inf_grid",
    "default_l1_grid",
    "random_poly",
]
