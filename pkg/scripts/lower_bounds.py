"""Run every lower-bound gadget check and print one summary line each."""

import argparse
import json

from robustpoly.lowerbounds import (
    FamilySpec,
    check_fs_sandwich,
    check_indicator,
    check_oscillation,
    check_projection_gap,
    check_quad_triple,
    check_uniform_gap,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="dump full reports")
    args = ap.parse_args()

    reports = {"quad-triple": check_quad_triple(4096)}
    for alpha in (0.1, 0.25, 0.4):
        reports[f"projection-gap alpha={alpha}"] = check_projection_gap(alpha, 1.0)
    for d in (2, 4, 8):
        reports[f"oscillation d={d}"] = check_oscillation(d)
    for d in (10, 20, 40):
        reports[f"indicator d={d}"] = check_indicator(d, 0.0)
    for d in (20, 40, 80):
        spec = FamilySpec(d, 1 / 3, frozenset(range(1, 1 + FamilySpec(d, 1 / 3).m, 2)))
        reports[f"fs-sandwich d={d}"] = check_fs_sandwich(spec)
    reports["uniform-gap d=4 C=1.5"] = check_uniform_gap(4, 1.5)

    for name, rep in reports.items():
        key = {"quad-triple": "radius", "oscillation": "max_pairwise_distance",
               "projection-gap": "distance_to_p", "indicator": "max_decay_ratio",
               "fs-sandwich": "max_excess", "uniform-gap": "f_at_1"}[name.split()[0]]
        print(f"{name:28s} holds={rep['holds']!s:5s} {key}={rep[key]:.10g}")
    if args.json:
        print(json.dumps(reports, indent=2))


if __name__ == "__main__":
    main()
