"""Command-line front end: fit, simulate, experiment, lowerbound.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import lowerbounds as lb
from .cheb import ChebPoly, random_poly
from .partition import SampleSet, build_partition, goodness
from .regression import FitConfig, approx
from .simulator import ADVERSARIES, MEASURES, NoiseModel, derive_seed, make_instance

GADGETS = ("quad-triple", "indicator", "fs-sandwich", "oscillation", "uniform-gap", "projection-gap")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- experiment config

@dataclass
class ExperimentConfig:
    degrees: list
    rhos: list
    sigmas: list
    measures: list = field(default_factory=lambda: ["chebyshev"])
    adversaries: list = field(default_factory=lambda: ["constant_offset"])
    n_schedule: dict = field(default_factory=lambda: {"kind": "mlogm", "factor": 3.0})
    trials: int = 10
    base_seed: int = 0
    epsilon: float = 0.25
    alpha: float | None = None  # default (rho + 1/2) / 2 per cell

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if any(not 0 <= r < 1 for r in self.rhos):
            raise ValueError("every rho must lie in [0, 1)")
        if any(d < 0 for d in self.degrees):
            raise ValueError("degrees must be nonnegative")
        for m in self.measures:
            if m not in MEASURES:
                raise ValueError(f"unknown measure {m!r}")
        for a in self.adversaries:
            if a not in ADVERSARIES or a == "custom_values":
                raise ValueError(f"adversary {a!r} not usable in sweeps")
        kind = self.n_schedule.get("kind")
        if kind not in ("fixed", "mlogm", "m2"):
            raise ValueError("n_schedule kind must be fixed, mlogm or m2")
        if kind == "fixed" and int(self.n_schedule.get("n", 0)) < 1:
            raise ValueError("fixed n_schedule needs n >= 1")

    @classmethod
    def from_json(cls, path) -> ExperimentConfig:
        data = json.loads(Path(path).read_text())
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def alpha_for(self, rho: float) -> float:
        return self.alpha if self.alpha is not None else (rho + 0.5) / 2

    def n_for(self, m: int) -> int:
        kind = self.n_schedule["kind"]
        if kind == "fixed":
            return int(self.n_schedule["n"])
        factor = float(self.n_schedule.get("factor", 1.0))
        if kind == "mlogm":
            return math.ceil(factor * m * math.log(10 * m))
        return math.ceil(factor * m * m)

    def cells(self):
        for d in self.degrees:
            for rho in self.rhos:
                for sigma in self.sigmas:
                    for measure in self.measures:
                        for adv in self.adversaries:
                            yield d, rho, sigma, measure, adv


TRIAL_COLUMNS = [
    "degree", "rho", "sigma", "measure", "adversary", "alpha", "epsilon", "trial", "seed",
    "n", "m", "rounds", "alpha_good", "worst_fraction", "empty_intervals",
    "l1_err_linf", "l1_err_l1", "final_err_linf", "final_err_l1", "non_contraction",
    "round_linf",
]


def run_trial(job) -> dict:
    d, rho, sigma, measure, adv, alpha, eps, trial, seed, n = job
    cfg = FitConfig(d, eps, alpha)
    truth = random_poly(d, np.random.default_rng(seed))
    inst = make_instance(truth, n, measure, NoiseModel(sigma, rho, adv), seed)
    part = build_partition(cfg.m)
    good = goodness(part, inst.samples, alpha)
    row = {
        "degree": d, "rho": rho, "sigma": sigma, "measure": measure, "adversary": adv,
        "alpha": alpha, "epsilon": eps, "trial": trial, "seed": seed, "n": n, "m": cfg.m,
        "rounds": cfg.rounds, "alpha_good": int(good.is_good),
        "worst_fraction": good.worst_fraction, "empty_intervals": len(good.empty_intervals),
    }
    if good.empty_intervals:
        # the estimator needs a median per interval
        row.update(l1_err_linf="", l1_err_l1="", final_err_linf="", final_err_l1="",
                   non_contraction="", round_linf="")
        return row
    rep = approx(inst.samples, cfg, truth=truth)
    first = rep.rounds[0] if rep.rounds else None
    row.update(
        l1_err_linf=first.error_linf if first else rep.final_error_linf,
        l1_err_l1=first.error_l1 if first else rep.final_error_l1,
        final_err_linf=rep.final_error_linf,
        final_err_l1=rep.final_error_l1,
        non_contraction=int(rep.non_contraction),
        round_linf=";".join(repr(r.residual_linf_estimate) for r in rep.rounds),
    )
    return row


def experiment_jobs(cfg: ExperimentConfig) -> list:
    jobs = []
    index = 0
    for d, rho, sigma, measure, adv in cfg.cells():
        alpha = cfg.alpha_for(rho)
        m = FitConfig(d, cfg.epsilon, alpha).m
        n = cfg.n_for(m)
        for t in range(cfg.trials):
            jobs.append((d, rho, sigma, measure, adv, alpha, cfg.epsilon, t,
                         derive_seed(cfg.base_seed, index), n))
            index += 1
    return jobs


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    work = experiment_jobs(cfg)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_trial, work))  # map keeps submission order
    return [run_trial(j) for j in work]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TRIAL_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


# ---------------------------------------------------------------- helpers

def _emit(text: str, output) -> None:
    if output is None or str(output) == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _dry(m, rounds, n, **extra) -> int:
    print(_dump({"m": m, "rounds": rounds, "n": n, **extra}))
    return 0


def _fit_config(args) -> FitConfig:
    try:
        return FitConfig(args.degree, args.epsilon, args.alpha, args.m, args.max_rounds)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


# ---------------------------------------------------------------- subcommands

def cmd_fit(args) -> int:
    cfg = _fit_config(args)
    if args.dry_run:
        n = None
        if args.input and Path(args.input).exists():
            n = len(SampleSet.from_csv(args.input))
        return _dry(cfg.m, cfg.rounds, n)
    if args.input is None:
        raise UsageError("fit: --input is required")
    samples = SampleSet.from_csv(args.input)
    truth = ChebPoly.from_json(Path(args.truth).read_text()) if args.truth else None
    rep = approx(samples, cfg, truth=truth)
    out = rep.to_dict()
    out["n"] = len(samples)
    _emit(_dump(out), args.output)
    return 0


def cmd_simulate(args) -> int:
    if args.degree < 0 or args.n < 0:
        raise UsageError("simulate: degree and n must be nonnegative")
    try:
        model = NoiseModel(args.sigma, args.rho, args.adversary, dict(args.param or []))
    except ValueError as e:
        raise UsageError(str(e)) from e
    if args.dry_run:
        cfg = FitConfig(args.degree, args.epsilon)
        return _dry(cfg.m, cfg.rounds, args.n)
    if args.output_prefix is None:
        raise UsageError("simulate: --output-prefix is required")
    if args.truth:
        truth = ChebPoly.from_json(Path(args.truth).read_text())
    else:
        truth = random_poly(args.degree, np.random.default_rng(args.seed))
    inst = make_instance(truth, args.n, args.measure, model, args.seed)
    csv_path, json_path = inst.save(args.output_prefix)
    print(_dump({"samples": str(csv_path), "sidecar": str(json_path),
                 "outliers": int(inst.samples.outlier.sum())}))
    return 0


def cmd_experiment(args) -> int:
    try:
        cfg = ExperimentConfig.from_json(args.config)
    except (ValueError, TypeError) as e:
        raise UsageError(f"experiment: bad config: {e}") from e
    if args.jobs < 1:
        raise UsageError("experiment: --jobs must be positive")
    if args.dry_run:
        cells = []
        for d, rho, sigma, measure, adv in cfg.cells():
            fc = FitConfig(d, cfg.epsilon, cfg.alpha_for(rho))
            cells.append({"degree": d, "rho": rho, "sigma": sigma, "measure": measure,
                          "adversary": adv, "m": fc.m, "rounds": fc.rounds, "n": cfg.n_for(fc.m)})
        first = cells[0] if cells else {"m": None, "rounds": None, "n": None}
        return _dry(first["m"], first["rounds"], first["n"], cells=cells,
                    trials=cfg.trials * len(cells))
    rows = run_experiment(cfg, args.jobs)
    _emit(rows_to_csv(rows), args.output)
    return 0


def cmd_lowerbound(args) -> int:
    g = args.gadget
    if g == "quad-triple":
        if args.dry_run:
            return _dry(None, None, None, grid=args.grid)
        rep = lb.check_quad_triple(args.grid)
    elif g == "indicator":
        if args.d < 1 or not -1 <= args.b <= 1:
            raise UsageError("indicator: need d >= 1 and b in [-1, 1]")
        if args.dry_run:
            return _dry(None, None, None, d=args.d, b=args.b)
        rep = lb.check_indicator(args.d, args.b)
    elif g == "fs-sandwich":
        spec = lb.FamilySpec(args.d, args.alpha)
        if spec.m < 1:
            raise UsageError("fs-sandwich: d and alpha leave no centres")
        if args.dry_run:
            return _dry(spec.m, None, None, d=args.d, alpha=args.alpha, subsets=args.subsets)
        rng = np.random.default_rng(args.seed)
        checks = []
        for _ in range(args.subsets):
            S = frozenset(int(j) + 1 for j in np.flatnonzero(rng.uniform(size=spec.m) < 0.5))
            checks.append(lb.check_fs_sandwich(spec.with_subset(S)))
        rep = {"d": args.d, "alpha": args.alpha, "m": spec.m, "checks": checks,
               "holds": all(c["holds"] for c in checks)}
    elif g == "oscillation":
        if args.d < 2:
            raise UsageError("oscillation: need d >= 2")
        if args.dry_run:
            return _dry(None, None, None, d=args.d, grid=args.grid)
        rep = lb.check_oscillation(args.d, args.grid)
    elif g == "uniform-gap":
        if args.d < 4 or args.C <= 1:
            raise UsageError("uniform-gap: need d >= 4 and C > 1")
        if args.dry_run:
            return _dry(None, None, None, d=args.d, C=args.C)
        rep = lb.check_uniform_gap(args.d, args.C)
    else:
        if not 0 < args.alpha < 0.5 or args.sigma <= 0:
            raise UsageError("projection-gap: need alpha in (0, 1/2) and sigma > 0")
        if args.dry_run:
            return _dry(None, None, None, alpha=args.alpha, sigma=args.sigma, grid=args.grid)
        rep = lb.check_projection_gap(args.alpha, args.sigma, args.grid)
    rep = {"gadget": g, **rep}
    _emit(_dump(rep), args.output)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="robustpoly", description="Robust Chebyshev-basis polynomial regression.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit a polynomial to x,y samples")
    f.add_argument("--input", type=Path)
    f.add_argument("--degree", type=int, required=True)
    f.add_argument("--epsilon", type=float, default=0.25)
    f.add_argument("--alpha", type=float, default=0.25)
    f.add_argument("--m", type=int, default=None)
    f.add_argument("--max-rounds", type=int, default=None)
    f.add_argument("--truth", type=Path, help="JSON polynomial; adds true errors to the report")
    f.add_argument("--output", type=Path)
    f.add_argument("--dry-run", action="store_true")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("simulate", help="write a seeded instance as CSV + JSON sidecar")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--measure", choices=MEASURES, default="chebyshev")
    s.add_argument("--rho", type=float, default=0.0)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--adversary", choices=ADVERSARIES, default="constant_offset")
    s.add_argument("--param", type=_param, action="append", help="adversary parameter key=value")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--truth", type=Path)
    s.add_argument("--epsilon", type=float, default=0.25, help="only used by --dry-run")
    s.add_argument("--output-prefix", type=Path)
    s.add_argument("--dry-run", action="store_true")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("experiment", help="run a sweep described by a JSON config")
    e.add_argument("--config", type=Path, required=True)
    e.add_argument("--output", type=Path)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--dry-run", action="store_true")
    e.set_defaults(func=cmd_experiment)

    lbp = sub.add_parser("lowerbound", help="build and check a lower-bound gadget")
    lbp.add_argument("gadget", choices=GADGETS)
    lbp.add_argument("--grid", type=int, default=None)
    lbp.add_argument("--d", type=int, default=None)
    lbp.add_argument("--b", type=float, default=0.0)
    lbp.add_argument("--alpha", type=float, default=None)
    lbp.add_argument("--sigma", type=float, default=1.0)
    lbp.add_argument("--C", type=float, default=1.5)
    lbp.add_argument("--subsets", type=int, default=10)
    lbp.add_argument("--seed", type=int, default=0)
    lbp.add_argument("--output", type=Path)
    lbp.add_argument("--dry-run", action="store_true")
    lbp.set_defaults(func=cmd_lowerbound)
    return p


_LB_DEFAULTS = {
    "quad-triple": {"grid": 4096},
    "indicator": {"d": 10},
    "fs-sandwich": {"d": 40, "alpha": 1 / 3},
    "oscillation": {"d": 4, "grid": 8192},
    "uniform-gap": {"d": 4},
    "projection-gap": {"alpha": 0.25, "grid": 65536},
}


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "lowerbound":
            for k, v in _LB_DEFAULTS[args.gadget].items():
                if getattr(args, k) is None:
                    setattr(args, k, v)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - anything past parsing is a runtime failure
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
