"""How many samples per interval does alpha-goodness need?

For d = 10, eps = 0.25 (m = 352), rho = 0.4, alpha = 0.45 this prints the
fraction of seeded trials whose sample set is alpha-good, for several n,
next to the binomial prediction (1 - P[Bin(k, rho) >= alpha k])^m.
"""

import argparse
import math

from scipy import stats

from robustpoly.cheb import ChebPoly
from robustpoly.partition import build_partition, goodness
from robustpoly.regression import FitConfig
from robustpoly.simulator import NoiseModel, make_instance


def predicted_rate(per: float, m: int, rho: float, alpha: float) -> float:
    k = max(1, round(per))
    bad = stats.binom.sf(math.ceil(alpha * k) - 1, k, rho)
    return (1 - bad) ** m


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=10)
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--rho", type=float, default=0.4)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--measure", default="chebyshev")
    args = ap.parse_args()

    alpha = (args.rho + 0.5) / 2
    cfg = FitConfig(args.degree, args.epsilon, alpha)
    part = build_partition(cfg.m)
    base_n = math.ceil(3 * cfg.m * math.log(10 * cfg.m))
    print(f"m={cfg.m} alpha={alpha} base n={base_n}")
    print("n,points_per_interval,good_rate,predicted,mean_worst_fraction")
    for mult in (1, 4, 16, 64, 128):
        n = base_n * mult
        good, worst = 0, 0.0
        for seed in range(args.trials):
            inst = make_instance(ChebPoly.zero(), n, args.measure, NoiseModel(0.1, args.rho), seed)
            rep = goodness(part, inst.samples, alpha)
            good += rep.is_good
            worst += rep.worst_fraction
        per = n / cfg.m
        print(f"{n},{per:.1f},{good / args.trials:.2f},"
              f"{predicted_rate(per, cfg.m, args.rho, alpha):.3g},{worst / args.trials:.3f}")


if __name__ == "__main__":
    main()
