"""Chebyshev partition of [-1, 1], sample bucketing and goodness checks.

Interval ``I_j = [cos(pi j / m), cos(pi (j - 1) / m)]`` for j = 1..m, so
I_1 touches x = 1 and I_m touches x = -1.  Indices are 1-based throughout,
matching the usual notation; arrays indexed by interval use position j - 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .cheb import ChebPoly, chebyshev_extrema, clenshaw


class EmptyIntervalError(ValueError):
    def __init__(self, index: int):
        super().__init__(f"interval I_{index} contains no samples")
        self.index = index


@dataclass(frozen=True, eq=False)
class Partition:
    m: int
    boundaries: np.ndarray  # cos(pi j / m), j = 0..m (descending)
    lengths: np.ndarray  # |I_j|, j = 1..m

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.boundaries[:-1] + self.boundaries[1:])

    def interval(self, j: int) -> tuple[float, float]:
        return float(self.boundaries[j]), float(self.boundaries[j - 1])


def build_partition(m: int) -> Partition:
    if m < 1:
        raise ValueError("partition size must be positive")
    bounds = chebyshev_extrema(m)
    bounds.setflags(write=False)
    j = np.arange(1, m + 1)
    # cos(a) - cos(b) as a product of sines: no cancellation near the ends
    lengths = 2.0 * np.sin(np.pi * (2 * j - 1) / (2 * m)) * np.sin(np.pi / (2 * m))
    lengths.setflags(write=False)
    return Partition(m, bounds, lengths)


def locate(part: Partition, x):
    """Interval index (1..m) of each x; boundary points go to the larger-x side."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0 + 1e-12) or not np.all(np.isfinite(xa)):
        raise ValueError("sample x outside [-1, 1]")
    # smallest j with x >= cos(pi j / m)
    idx = np.searchsorted(-part.boundaries, -xa, side="left")
    idx = np.clip(idx, 1, part.m)
    return int(idx) if idx.ndim == 0 else idx


@dataclass(frozen=True, eq=False)
class SampleSet:
    x: np.ndarray
    y: np.ndarray
    outlier: np.ndarray | None = None

    def __post_init__(self):
        x = np.array(self.x, dtype=float, ndmin=1)
        y = np.array(self.y, dtype=float, ndmin=1)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be flat arrays of equal length")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.outlier is not None:
            f = np.array(self.outlier, dtype=bool, ndmin=1)
            if f.shape != x.shape:
                raise ValueError("outlier flags must match the sample count")
            object.__setattr__(self, "outlier", f)

    def __len__(self):
        return self.x.size

    def with_y(self, y) -> SampleSet:
        return SampleSet(self.x, y, self.outlier)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            flags = self.outlier is not None
            w.writerow(["x", "y", "outlier"] if flags else ["x", "y"])
            for i in range(len(self)):
                row = [repr(float(self.x[i])), repr(float(self.y[i]))]
                if flags:
                    row.append(int(self.outlier[i]))
                w.writerow(row)

    @classmethod
    def from_csv(cls, path) -> SampleSet:
        with open(Path(path), newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"x", "y"} <= set(reader.fieldnames):
                raise ValueError("sample CSV needs an x,y header")
            has_flags = "outlier" in reader.fieldnames
            xs, ys, fs = [], [], []
            for row in reader:
                xs.append(float(row["x"]))
                ys.append(float(row["y"]))
                if has_flags:
                    if row["outlier"] not in ("0", "1"):
                        raise ValueError(f"outlier flag must be 0 or 1, got {row['outlier']!r}")
                    fs.append(row["outlier"] == "1")
        return cls(np.array(xs), np.array(ys), np.array(fs, bool) if has_flags else None)


def assign(part: Partition, s: SampleSet) -> list[np.ndarray]:
    """Sample indices in each interval, as a list S_1..S_m (0-based indices)."""
    j = locate(part, s.x) if len(s) else np.zeros(0, int)
    order = np.argsort(j, kind="stable")
    counts = np.bincount(j, minlength=part.m + 1)[1:]
    return np.split(order, np.cumsum(counts)[:-1])


def bucket_ids(part: Partition, s: SampleSet) -> np.ndarray:
    return locate(part, s.x) if len(s) else np.zeros(0, int)


def require_nonempty(part: Partition, counts: np.ndarray) -> None:
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise EmptyIntervalError(int(empty[0]) + 1)


@dataclass(frozen=True)
class GoodnessReport:
    alpha: float
    per_interval: list  # (count, outlier_count, fraction)
    is_good: bool
    empty_intervals: list

    @property
    def worst_fraction(self) -> float:
        """Largest outlier fraction over nonempty intervals."""
        return max((f for c, _, f in self.per_interval if c), default=0.0)

    @property
    def failing_intervals(self) -> int:
        """Intervals that are empty or hold at least an alpha fraction of outliers."""
        return sum(1 for c, o, _ in self.per_interval if not c or o >= self.alpha * c)


def goodness(part: Partition, s: SampleSet, alpha: float) -> GoodnessReport:
    """Every interval nonempty and its outlier fraction strictly below alpha."""
    if s.outlier is None:
        raise ValueError("goodness needs ground-truth outlier flags")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    j = bucket_ids(part, s)
    counts = np.bincount(j, minlength=part.m + 1)[1:]
    bad = np.bincount(j, weights=s.outlier.astype(float), minlength=part.m + 1)[1:].astype(int)
    per = []
    for c, o in zip(counts.tolist(), bad.tolist()):
        per.append((c, o, o / c if c else float("nan")))
    empty = [i + 1 for i, c in enumerate(counts) if c == 0]
    ok = not empty and bool(np.all(bad < alpha * counts))
    return GoodnessReport(alpha, per, ok, empty)


def kept_count(n: int, alpha: float) -> int:
    """ceil((1 - alpha) n), guarded against 0.6 * 5 = 3.0000000000000004."""
    return max(1, math.ceil((1.0 - alpha) * n - 1e-9))


def e_vector(part: Partition, s: SampleSet, p: ChebPoly, alpha: float):
    """Per-interval trimmed residual maxima and their |I_j|-weighted sum.

    e_j is the ceil((1 - alpha)|S_j|)-th smallest |p(x_i) - y_i| in I_j:
    the smallest possible max over any subset keeping that many samples.
    """
    j = bucket_ids(part, s)
    counts = np.bincount(j, minlength=part.m + 1)[1:]
    require_nonempty(part, counts)
    resid = np.abs(clenshaw(p.coeffs, s.x) - s.y)
    order = np.lexsort((resid, j))
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    k = np.array([kept_count(int(c), alpha) for c in counts])
    e = resid[order[starts + k - 1]]
    return e, float(part.lengths @ e)


class PiecewiseConstant:
    """r(x) = value of the interval containing x."""

    def __init__(self, part: Partition, values: Sequence[float]):
        self.part = part
        self.values = np.asarray(values, dtype=float)

    def __call__(self, x):
        return self.values[np.asarray(locate(self.part, x)) - 1]


def piecewise_project(p: ChebPoly, part: Partition, anchors=None) -> PiecewiseConstant:
    """Piecewise-constant r with r = p(anchor_j) on I_j (anchors default to midpoints)."""
    if anchors is None:
        anchors = part.midpoints
    anchors = np.asarray(anchors, dtype=float)
    if anchors.shape != (part.m,):
        raise ValueError("need exactly one anchor per interval")
    lo = part.boundaries[1:]
    hi = part.boundaries[:-1]
    bad = np.flatnonzero((anchors < lo - 1e-15) | (anchors > hi + 1e-15))
    if bad.size:
        raise ValueError(f"anchor for I_{bad[0] + 1} lies outside its interval")
    return PiecewiseConstant(part, clenshaw(p.coeffs, anchors))


def weighted_average_abs(part: Partition, s: SampleSet, p: ChebPoly) -> float:
    """sum_j |I_j| / |S_j| * sum_{i in S_j} |p(x_i)|: the sample stand-in for ||p||_1."""
    j = bucket_ids(part, s)
    counts = np.bincount(j, minlength=part.m + 1)[1:]
    require_nonempty(part, counts)
    w = part.lengths[j - 1] / counts[j - 1]
    return float(w @ np.abs(clenshaw(p.coeffs, s.x)))


def sample_weights(part: Partition, s: SampleSet) -> np.ndarray:
    j = bucket_ids(part, s)
    counts = np.bincount(j, minlength=part.m + 1)[1:]
    require_nonempty(part, counts)
    return part.lengths[j - 1] / counts[j - 1]
