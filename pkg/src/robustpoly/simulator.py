"""Seeded instance generator for the robust regression model.

x is drawn from the uniform or Chebyshev measure, each sample is an outlier
independently with probability rho, inliers get adversarial noise bounded
by sigma, and outliers get whatever the chosen adversary picks.

Randomness comes from a counter-based SplitMix64 hash: the u-th uniform of
stream ``s`` for seed ``k`` is ``mix(mix(k ^ mix(s)) + (u + 1) * GOLDEN)``.
Draws for sample i never depend on how many other samples exist.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cheb import ChebPoly, clenshaw, norm_inf_grid
from .partition import SampleSet

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1

STREAMS = {"x": 1, "flag": 2, "noise": 3, "outlier": 4, "coin": 5, "trial": 6}
ADVERSARIES = ("constant_offset", "sign_flip", "cheb_confuser", "two_poly_mixture", "custom_values")
MEASURES = ("uniform", "chebyshev")


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _key(seed: int, stream: str) -> np.ndarray:
    s = np.array([seed & _MASK64], dtype=np.uint64)
    tag = np.array([STREAMS[stream]], dtype=np.uint64)
    return _mix(s ^ _mix(tag * GOLDEN))


def uniforms(seed: int, stream: str, n: int, offset: int = 0) -> np.ndarray:
    """n doubles in [0, 1) for indices offset..offset+n-1 of one substream."""
    idx = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    z = _mix(_key(seed, stream) + idx * GOLDEN)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def derive_seed(base_seed: int, index: int) -> int:
    """Child seed for trial ``index`` of a sweep."""
    return int(uniforms(base_seed, "trial", 1, offset=index)[0] * 2.0**53)


@dataclass(frozen=True)
class NoiseModel:
    sigma: float = 0.0
    rho: float = 0.0
    adversary: str = "constant_offset"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.adversary not in ADVERSARIES:
            raise ValueError(f"unknown adversary {self.adversary!r}")

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "rho": self.rho, "adversary": self.adversary,
                "params": _jsonable(self.params)}


def _jsonable(obj):
    if isinstance(obj, ChebPoly):
        return obj.to_dict()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def sample_x(measure: str, n: int, seed: int) -> np.ndarray:
    """uniform: 2U - 1; chebyshev: cos(pi U), density 1 / (pi sqrt(1 - x^2))."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    u = uniforms(seed, "x", n)
    if measure == "uniform":
        return 2.0 * u - 1.0
    if measure == "chebyshev":
        return np.cos(np.pi * u)
    raise ValueError(f"unknown measure {measure!r}")


def outlier_magnitude(truth: ChebPoly) -> float:
    return 1e3 * (1.0 + norm_inf_grid(truth))


def _decoy(truth: ChebPoly, params: dict) -> ChebPoly:
    """Default decoy: truth mirrored through zero and lifted 2(1 + ||p||) above it."""
    if "decoy" in params:
        dec = params["decoy"]
        return dec if isinstance(dec, ChebPoly) else ChebPoly(dec)
    return -truth + 2.0 * (1.0 + norm_inf_grid(truth))


def confuser_shift(k: int, amplitude: float) -> float:
    """delta with T_k(1 + delta) = amplitude."""
    return float(np.cosh(np.arccosh(amplitude) / k) - 1.0)


def confuser_decoy(k: int, sigma: float, amplitude: float = 3.0) -> ChebPoly:
    """sigma * T_k(x + delta): within sigma of zero except on a sliver near x = 1."""
    from .cheb import compose_linear

    return compose_linear(ChebPoly.basis(k, sigma), 1.0, confuser_shift(k, amplitude))


def _cheb_sign(m: int, x: np.ndarray) -> np.ndarray:
    t = np.cos(m * np.arccos(np.clip(x, -1.0, 1.0)))
    return np.where(t >= 0.0, 1.0, -1.0)


def corrupt(truth: ChebPoly, xs, model: NoiseModel, seed: int) -> SampleSet:
    """Flags ~ Bernoulli(rho); y from the adversary named in ``model``.

    Adversary parameters (``model.params``):

    constant_offset   inliers +sigma; outliers p + B (``B`` default 1e3 (1 + ||p||))
    sign_flip         inliers sigma * sign T_m(x) (``m`` default 8); outliers on a decoy
    cheb_confuser     inliers p + clip(sigma T_k(x + delta), +-sigma) (``k``, ``amplitude``)
    two_poly_mixture  inliers uniform in [-sigma, sigma]; outliers on ``decoy``
    custom_values     ``inlier_noise`` and ``outlier_values``, both per sample
    """
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    sigma, params = model.sigma, model.params
    flags = uniforms(seed, "flag", n) < model.rho
    base = clenshaw(truth.coeffs, xs) if n else np.zeros(0)
    adv = model.adversary

    if adv == "constant_offset":
        w = np.full(n, sigma)
        out = base + params.get("B", outlier_magnitude(truth))
    elif adv == "sign_flip":
        w = sigma * _cheb_sign(int(params.get("m", 8)), xs)
        out = clenshaw(_decoy(truth, params).coeffs, xs)
    elif adv == "cheb_confuser":
        k = int(params.get("k", max(truth.degree, 1)))
        decoy = confuser_decoy(k, 1.0, float(params.get("amplitude", 3.0)))
        w = sigma * np.clip(clenshaw(decoy.coeffs, xs), -1.0, 1.0)
        out = base + params.get("B", outlier_magnitude(truth))
    elif adv == "two_poly_mixture":
        w = sigma * (2.0 * uniforms(seed, "noise", n) - 1.0)
        out = clenshaw(_decoy(truth, params).coeffs, xs)
    else:
        w = np.asarray(params.get("inlier_noise", np.zeros(n)), dtype=float)
        out = np.asarray(params.get("outlier_values", base), dtype=float)
        if w.shape != (n,) or out.shape != (n,):
            raise ValueError("custom values need one entry per sample")
        if np.any(np.abs(w[~flags]) > sigma):
            raise ValueError("custom inlier noise exceeds sigma")

    y = np.where(flags, out, base + w)
    return SampleSet(xs, y, flags)


@dataclass(frozen=True, eq=False)
class Instance:
    truth: ChebPoly
    samples: SampleSet
    model: NoiseModel
    measure: str
    seed: int

    def sidecar(self) -> dict:
        return {
            "truth": self.truth.to_dict(),
            "model": self.model.to_dict(),
            "measure": self.measure,
            "seed": self.seed,
            "n": len(self.samples),
        }

    def save(self, prefix) -> tuple[Path, Path]:
        prefix = Path(prefix)
        csv_path = prefix.with_name(prefix.name + ".csv")
        json_path = prefix.with_name(prefix.name + ".json")
        self.samples.to_csv(csv_path)
        json_path.write_text(json.dumps(self.sidecar(), indent=2))
        return csv_path, json_path


def make_instance(truth: ChebPoly, n: int, measure: str, model: NoiseModel, seed: int) -> Instance:
    xs = sample_x(measure, n, seed)
    return Instance(truth, corrupt(truth, xs, model, seed), model, measure, seed)


def interval_masses(measure: str, part) -> np.ndarray:
    """Exact probability of each partition interval under the measure."""
    if measure == "chebyshev":
        return np.full(part.m, 1.0 / part.m)
    if measure == "uniform":
        return part.lengths / 2.0
    raise ValueError(f"unknown measure {measure!r}")
