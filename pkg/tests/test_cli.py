import json

import numpy as np
import pytest

from robustpoly.cheb import ChebPoly
from robustpoly.cli import ExperimentConfig, experiment_jobs, run_cli
from robustpoly.partition import SampleSet


@pytest.fixture
def instance(tmp_path):
    prefix = tmp_path / "inst"
    code = run_cli(["simulate", "--degree", "3", "--n", "2000", "--measure", "chebyshev",
                    "--rho", "0.1", "--sigma", "0.05", "--adversary", "sign_flip",
                    "--seed", "11", "--output-prefix", str(prefix)])
    assert code == 0
    return prefix


def test_simulate_writes_csv_and_sidecar(instance):
    s = SampleSet.from_csv(instance.with_suffix(".csv"))
    side = json.loads(instance.with_suffix(".json").read_text())
    assert len(s) == 2000 and s.outlier is not None
    assert side["seed"] == 11 and side["model"]["adversary"] == "sign_flip"


def test_fit_happy_path(instance, tmp_path):
    out = tmp_path / "fit.json"
    code = run_cli(["fit", "--input", str(instance.with_suffix(".csv")), "--degree", "3",
                    "--epsilon", "0.25", "--m", "48", "--output", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["degree"] == 3
    assert len(rep["final"]["coeffs"]) == 4
    assert len(rep["rounds"]) == rep["config"]["rounds"]


def test_fit_with_truth_reports_errors(instance, tmp_path):
    truth = tmp_path / "truth.json"
    side = json.loads(instance.with_suffix(".json").read_text())
    truth.write_text(json.dumps(side["truth"]))
    out = tmp_path / "fit.json"
    assert run_cli(["fit", "--input", str(instance.with_suffix(".csv")), "--degree", "3",
                    "--m", "48", "--truth", str(truth), "--output", str(out)]) == 0
    assert json.loads(out.read_text())["final_error_linf"] < 0.2


@pytest.mark.parametrize("argv", [
    ["fit", "--degree", "-1", "--input", "x.csv"],
    ["fit", "--degree", "3", "--epsilon", "0.7", "--input", "x.csv"],
    ["fit", "--input", "x.csv"],
    ["simulate", "--degree", "3", "--n", "10", "--rho", "1.5", "--output-prefix", "p"],
    ["lowerbound", "sideways"],
    ["lowerbound", "oscillation", "--d", "1"],
    ["bogus"],
    [],
])
def test_usage_errors_exit_one(argv, capsys):
    assert run_cli(argv) == 1
    assert capsys.readouterr().err


def test_runtime_error_exits_two(tmp_path, capsys):
    assert run_cli(["fit", "--input", str(tmp_path / "missing.csv"), "--degree", "2"]) == 2
    bad = tmp_path / "few.csv"
    SampleSet([0.9, 0.8, 0.7], [0, 0, 0]).to_csv(bad)
    assert run_cli(["fit", "--input", str(bad), "--degree", "2"]) == 2
    assert "EmptyIntervalError" in capsys.readouterr().err


def test_quad_triple_radius(tmp_path):
    out = tmp_path / "qt.json"
    assert run_cli(["lowerbound", "quad-triple", "--grid", "4096", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["radius"] > 1.09


@pytest.mark.parametrize("argv", [
    ["indicator", "--d", "10", "--b", "0.3"],
    ["fs-sandwich", "--d", "20", "--alpha", "0.3333333333", "--subsets", "3"],
    ["oscillation", "--d", "2", "--grid", "4096"],
    ["uniform-gap", "--d", "4", "--C", "1.5"],
    ["projection-gap", "--alpha", "0.25", "--grid", "8192"],
])
def test_lowerbound_gadgets(argv, tmp_path):
    out = tmp_path / "g.json"
    assert run_cli(["lowerbound", *argv, "--output", str(out)]) == 0
    assert json.loads(out.read_text())["holds"] is True


def _config(tmp_path, **kw):
    cfg = {"degrees": [3], "rhos": [0.1], "sigmas": [0.05], "measures": ["chebyshev"],
           "adversaries": ["constant_offset"], "n_schedule": {"kind": "fixed", "n": 1500},
           "trials": 3, "base_seed": 17, "epsilon": 0.25}
    cfg.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_experiment_sweep(tmp_path):
    cfg = _config(tmp_path)
    out = tmp_path / "sweep.csv"
    assert run_cli(["experiment", "--config", str(cfg), "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("degree,rho,sigma")
    assert len(lines) == 4


def test_experiment_parallel_matches_serial(tmp_path):
    cfg = _config(tmp_path, rhos=[0.0, 0.1], trials=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(["experiment", "--config", str(cfg), "--output", str(a)]) == 0
    assert run_cli(["experiment", "--config", str(cfg), "--output", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_experiment_seeds_derive_from_base_seed():
    cfg = ExperimentConfig([2], [0.1, 0.2], [0.1], trials=3, base_seed=5)
    seeds = [j[8] for j in experiment_jobs(cfg)]
    assert len(set(seeds)) == 6
    assert seeds == [j[8] for j in experiment_jobs(ExperimentConfig([2], [0.1, 0.2], [0.1],
                                                                     trials=3, base_seed=5))]


def test_experiment_bad_config(tmp_path):
    assert run_cli(["experiment", "--config", str(_config(tmp_path, trials=0))]) == 1
    assert run_cli(["experiment", "--config", str(_config(tmp_path, rhos=[1.0]))]) == 1
    assert run_cli(["experiment", "--config", str(_config(tmp_path, colour="red"))]) == 1


@pytest.mark.parametrize("argv", [
    ["fit", "--degree", "10", "--epsilon", "0.25"],
    ["simulate", "--degree", "10", "--n", "8624"],
    ["lowerbound", "quad-triple"],
])
def test_dry_run_prints_derived_sizes(argv, capsys, tmp_path):
    assert run_cli([*argv, "--dry-run"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert {"m", "rounds", "n"} <= set(data)
    if argv[0] != "lowerbound":
        assert data["m"] == 352 and data["rounds"] == 7


def test_experiment_dry_run(tmp_path, capsys):
    cfg = _config(tmp_path, n_schedule={"kind": "mlogm", "factor": 3})
    assert run_cli(["experiment", "--config", str(cfg), "--dry-run"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["m"] == 128 and data["n"] == int(np.ceil(3 * 128 * np.log(1280)))
    assert not (tmp_path / "sweep.csv").exists()


def test_outputs_are_bit_identical(tmp_path):
    outs = []
    for k in range(2):
        prefix = tmp_path / f"run{k}"
        run_cli(["simulate", "--degree", "4", "--n", "1200", "--rho", "0.2", "--sigma", "0.1",
                 "--adversary", "two_poly_mixture", "--seed", "99", "--output-prefix", str(prefix)])
        fit = tmp_path / f"fit{k}.json"
        run_cli(["fit", "--input", str(prefix) + ".csv", "--degree", "4", "--m", "40",
                 "--output", str(fit)])
        outs.append((prefix.with_suffix(".csv").read_bytes(), prefix.with_suffix(".json").read_bytes(),
                     fit.read_bytes()))
    assert outs[0] == outs[1]


def test_simulate_with_params_and_truth(tmp_path):
    truth = tmp_path / "t.json"
    truth.write_text(ChebPoly([0.0, 1.0]).to_json())
    prefix = tmp_path / "c"
    assert run_cli(["simulate", "--degree", "1", "--n", "50", "--sigma", "0.1",
                    "--adversary", "sign_flip", "--param", "m=4", "--truth", str(truth),
                    "--output-prefix", str(prefix)]) == 0
    side = json.loads(prefix.with_suffix(".json").read_text())
    assert side["model"]["params"] == {"m": 4}
    assert side["truth"]["coeffs"] == [0.0, 1.0]
