import numpy as np
import pytest

from robustpoly.cheb import ChebPoly
from robustpoly.partition import SampleSet, build_partition


def layered_instance(truth: ChebPoly, m: int, per: int, n_bad: int, sigma: float,
                     noise: str = "offset", seed: int = 0) -> SampleSet:
    """Exactly ``per`` points in every interval of the size-m partition,
    ``n_bad`` of them outliers, so the set is alpha-good for any alpha > n_bad / per.

    noise: "offset" puts every inlier at +sigma, "flip" alternates the sign
    across intervals, "uniform" draws from [-sigma, sigma].
    """
    rng = np.random.default_rng(seed)
    part = build_partition(m)
    xs, ys, flags = [], [], []
    for j in range(1, m + 1):
        lo, hi = part.interval(j)
        x = rng.uniform(lo, hi, per)
        if noise == "offset":
            w = np.full(per, sigma)
        elif noise == "flip":
            w = np.full(per, sigma if j % 2 else -sigma)
        else:
            w = rng.uniform(-sigma, sigma, per)
        y = truth(x) + w
        f = np.zeros(per, bool)
        f[:n_bad] = True
        y[f] = truth(x[f]) + 50.0 * (1 + rng.uniform(size=n_bad))
        xs.append(x)
        ys.append(y)
        flags.append(f)
    return SampleSet(np.concatenate(xs), np.concatenate(ys), np.concatenate(flags))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
