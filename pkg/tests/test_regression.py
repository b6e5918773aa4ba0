import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import layered_instance
from robustpoly.cheb import ChebPoly, norm_1_grid, norm_inf_grid, random_poly, vander
from robustpoly.partition import EmptyIntervalError, SampleSet, build_partition, goodness
from robustpoly.regression import (
    DegenerateNodesError,
    FitConfig,
    approx,
    interval_medians,
    l1_fit,
    l1_objective,
    linf_point_fit,
    refine,
)
from robustpoly.simulator import NoiseModel, make_instance


def test_fit_config_defaults():
    cfg = FitConfig(degree=10, epsilon=0.25)
    assert cfg.m == 352
    assert cfg.scheduled_rounds == math.ceil(math.log(4 * 121) / math.log(4)) + 2 == 7
    assert FitConfig(degree=0, epsilon=0.49).m >= 1
    assert FitConfig(degree=3, m_override=4).m == 4
    with pytest.raises(ValueError):
        FitConfig(degree=3, m_override=3)
    with pytest.raises(ValueError):
        FitConfig(degree=3, epsilon=0.5)


# ---------------------------------------------------------------- l1_fit

def test_l1_fit_recovers_noiseless_poly():
    truth = ChebPoly([-1.0, 0.0, 3.0])
    part = build_partition(12)
    s = layered_instance(truth, 12, 3, 0, 0.0)
    p = l1_fit(s, part, 2)
    np.testing.assert_allclose(p.coeffs, truth.coeffs, atol=1e-7)


def test_l1_fit_lemma_bound_on_good_instance():
    d, eps, alpha, sigma = 8, 0.25, 0.25, 0.1
    truth = random_poly(d, np.random.default_rng(8))
    m = FitConfig(d, eps, alpha).m
    s = layered_instance(truth, m, 5, 1, sigma, noise="offset", seed=1)
    part = build_partition(m)
    assert goodness(part, s, alpha).is_good
    p = l1_fit(s, part, d)
    assert norm_1_grid(p - truth) <= 2 * (2 * sigma) / (1 - 2 * alpha)


def test_l1_fit_figure_one_instance():
    # inlier noise shaped as a shifted Chebyshev oscillation fools the L1 fit
    d = 6
    cfg = FitConfig(d, 0.25)
    n = math.ceil(3 * cfg.m * math.log(10 * cfg.m))
    model = NoiseModel(sigma=1.0, rho=0.0, adversary="cheb_confuser", params={"k": d})
    inst = make_instance(ChebPoly.zero(), n, "chebyshev", model, 7)
    p = l1_fit(inst.samples, build_partition(cfg.m), d)
    assert norm_inf_grid(p) > 2.0


def _brute_l1(s, part, d):
    """Some optimal LAD solution interpolates d+1 samples: try them all."""
    best = np.inf
    for idx in itertools.combinations(range(len(s)), d + 1):
        idx = list(idx)
        V = vander(s.x[idx], d)
        if abs(np.linalg.det(V)) < 1e-12:
            continue
        q = ChebPoly(np.linalg.solve(V, s.y[idx]))
        best = min(best, l1_objective(s, part, q))
    return best


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 3))
def test_l1_fit_matches_interpolation_enumeration(seed, d):
    rng = np.random.default_rng(seed)
    part = build_partition(3)
    s = layered_instance(random_poly(d, rng), 3, 3, 1, 0.3, noise="uniform", seed=seed)
    p = l1_fit(s, part, d)
    assert l1_objective(s, part, p) == pytest.approx(_brute_l1(s, part, d), abs=1e-9, rel=1e-9)


def test_l1_fit_is_locally_optimal():
    rng = np.random.default_rng(21)
    truth = random_poly(5, rng)
    part = build_partition(48)
    s = layered_instance(truth, 48, 4, 1, 0.2, noise="uniform", seed=21)
    p = l1_fit(s, part, 5)
    base = l1_objective(s, part, p)
    for k in range(6):
        for sgn in (1, -1):
            c = p.coeffs.copy()
            c[k] += sgn * 1e-3
            assert l1_objective(s, part, ChebPoly(c)) >= base - 1e-9


def test_l1_fit_empty_interval():
    part = build_partition(4)
    with pytest.raises(EmptyIntervalError):
        l1_fit(SampleSet([0.9, 0.8, -0.9], [0, 0, 0]), part, 1)


# ---------------------------------------------------------------- medians

def test_interval_medians_examples():
    part = build_partition(1)
    _, med = interval_medians(SampleSet([0.1, 0.2, 0.3], [0.1, 5.0, 0.2]), part, ChebPoly.zero())
    assert med[0] == pytest.approx(0.2)
    _, med = interval_medians(SampleSet([0.4], [-3.5]), part, ChebPoly.zero())
    assert med[0] == -3.5
    _, med = interval_medians(SampleSet([0.1, 0.2, 0.3, 0.4], [4, 1, 3, 2]), part, ChebPoly.zero())
    assert med[0] == 2  # lower median


def test_interval_medians_midpoints():
    part = build_partition(4)
    s = layered_instance(ChebPoly.zero(), 4, 1, 0, 0.0)
    xt, _ = interval_medians(s, part, ChebPoly.zero())
    np.testing.assert_allclose(xt, part.midpoints)


def test_median_within_sigma_of_some_interval_value():
    truth = ChebPoly([0.2, -0.7, 0.4, 0.1])
    m, sigma = 30, 0.05
    s = layered_instance(truth, m, 7, 3, sigma, noise="uniform", seed=4)
    part = build_partition(m)
    _, med = interval_medians(s, part, ChebPoly.zero())
    for j in range(1, m + 1):
        lo, hi = part.interval(j)
        vals = truth(np.linspace(lo, hi, 1001))
        assert vals.min() - sigma - 1e-12 <= med[j - 1] <= vals.max() + sigma + 1e-12


# ---------------------------------------------------------------- linf_point_fit

def test_linf_point_fit_symmetric_example():
    q, obj = linf_point_fit([-1, 0, 1], [0, 1, 0], 1)
    np.testing.assert_allclose(q.coeffs, [0.5, 0.0], atol=1e-12)
    assert obj == pytest.approx(0.5)


def test_linf_point_fit_interpolates():
    truth = ChebPoly([0.3, -1.2, 0.8, 0.05])
    xs = np.array([-0.9, -0.2, 0.4, 0.85])
    q, obj = linf_point_fit(xs, truth(xs), 3)
    np.testing.assert_allclose(q.coeffs, truth.coeffs, atol=1e-9)
    assert obj == pytest.approx(0.0, abs=1e-12)


def test_linf_point_fit_degenerate_nodes():
    with pytest.raises(DegenerateNodesError):
        linf_point_fit([0.1, 0.1, 0.1], [0, 1, 2], 1)


def test_linf_point_fit_no_descent_direction():
    rng = np.random.default_rng(40)
    xs = np.sort(rng.uniform(-1, 1, 40))
    ys = rng.standard_normal(40)
    q, obj = linf_point_fit(xs, ys, 5)
    V = vander(xs, 5)
    for _ in range(2000):
        step = rng.standard_normal(6)
        step *= 1e-3 / np.linalg.norm(step)
        assert np.max(np.abs(V @ (q.coeffs + step) - ys)) >= obj - 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 4))
def test_linf_point_fit_equioscillates(seed, d):
    rng = np.random.default_rng(seed)
    xs = np.sort(rng.uniform(-1, 1, 15))
    ys = rng.standard_normal(15)
    q, obj = linf_point_fit(xs, ys, d)
    hits = np.abs(np.abs(q(xs) - ys) - obj) <= 1e-6
    assert hits.sum() >= d + 2


def test_linf_point_fit_against_highs():
    from scipy.optimize import linprog

    rng = np.random.default_rng(77)
    xs = rng.uniform(-1, 1, 60)
    ys = np.cos(4 * xs) + 0.05 * rng.standard_normal(60)
    d = 6
    V = vander(xs, d)
    one = np.ones((60, 1))
    A = np.vstack([np.hstack([V, -one]), np.hstack([-V, -one])])
    c = np.zeros(d + 2)
    c[-1] = 1
    ref = linprog(c, A_ub=A, b_ub=np.concatenate([ys, -ys]), bounds=[(None, None)] * (d + 2))
    _, obj = linf_point_fit(xs, ys, d)
    assert obj == pytest.approx(ref.fun, abs=1e-9)


# ---------------------------------------------------------------- refine

def test_refine_fixed_point():
    truth = random_poly(4, np.random.default_rng(2))
    m = 40
    s = layered_instance(truth, m, 3, 0, 0.0)
    new = refine(s, build_partition(m), truth, 4)
    np.testing.assert_allclose(new.coeffs, truth.coeffs, atol=1e-9)


@pytest.mark.parametrize("noise", ["offset", "flip", "uniform"])
def test_refine_from_zero_with_bounded_noise(noise):
    d, eps, sigma = 4, 0.25, 0.1
    m = FitConfig(d, eps).m
    s = layered_instance(ChebPoly.zero(), m, 5, 1, sigma, noise=noise, seed=3)
    new = refine(s, build_partition(m), ChebPoly.zero(), d)
    assert norm_inf_grid(new) <= (2 + eps) * sigma


def test_refine_removes_constant_offset():
    d, eps = 5, 0.25
    truth = random_poly(d, np.random.default_rng(9))
    m = FitConfig(d, eps).m
    s = layered_instance(truth, m, 3, 0, 0.0)
    new = refine(s, build_partition(m), truth + 1.0, d)
    assert norm_inf_grid(new - truth) <= eps


# ---------------------------------------------------------------- approx

def test_approx_noiseless_recovery():
    truth = random_poly(6, np.random.default_rng(6))
    cfg = FitConfig(6, 0.25)
    s = layered_instance(truth, cfg.m, 2, 0, 0.0)
    rep = approx(s, cfg)
    np.testing.assert_allclose(rep.l1_init_poly.coeffs, truth.coeffs, atol=1e-7)
    np.testing.assert_allclose(rep.final_poly.coeffs, truth.coeffs, atol=1e-7)


def test_approx_zero_rounds_is_l1_fit():
    truth = random_poly(3, np.random.default_rng(1))
    cfg = FitConfig(3, 0.25, max_rounds=0)
    s = layered_instance(truth, cfg.m, 3, 1, 0.1, noise="uniform", seed=5)
    rep = approx(s, cfg)
    assert rep.rounds == []
    np.testing.assert_array_equal(rep.final_poly.coeffs, rep.l1_init_poly.coeffs)


def test_approx_sign_flip_small_n_good_trials():
    # n = 2000 spread over 352 intervals: alpha-good trials are (nearly) absent,
    # so the bound is checked only where its premise holds
    d, eps, rho, sigma = 10, 0.25, 0.4, 0.1
    alpha = (rho + 0.5) / 2
    cfg = FitConfig(d, eps, alpha)
    part = build_partition(cfg.m)
    truth = random_poly(d, np.random.default_rng(100))
    model = NoiseModel(sigma, rho, "sign_flip")
    good = 0
    for seed in range(20):
        inst = make_instance(truth, 2000, "chebyshev", model, seed)
        if not goodness(part, inst.samples, alpha).is_good:
            continue
        good += 1
        rep = approx(inst.samples, cfg, truth=truth)
        assert rep.final_error_linf <= (2 + eps) * sigma


@pytest.mark.parametrize("noise", ["offset", "flip", "uniform"])
def test_approx_good_instance_meets_bound(noise):
    d, eps, alpha, sigma = 6, 0.25, 0.3, 0.1
    truth = random_poly(d, np.random.default_rng(60))
    cfg = FitConfig(d, eps, alpha)
    s = layered_instance(truth, cfg.m, 7, 2, sigma, noise=noise, seed=60)
    assert goodness(build_partition(cfg.m), s, alpha).is_good
    rep = approx(s, cfg, truth=truth)
    assert rep.final_error_linf <= (2 + eps) * sigma
    assert not rep.non_contraction


@pytest.mark.parametrize("seed", range(5))
def test_refine_contraction_on_good_instances(seed):
    d, eps, alpha, sigma = 5, 0.25, 0.3, 0.1
    truth = random_poly(d, np.random.default_rng(seed))
    cfg = FitConfig(d, eps, alpha)
    s = layered_instance(truth, cfg.m, 7, 2, sigma, noise="flip", seed=seed)
    rep = approx(s, cfg, truth=truth)
    est = [r.residual_linf_estimate for r in rep.rounds]
    for t in range(1, len(est) - 1):
        assert est[t + 1] <= (2 + eps) * sigma + (eps + 0.05) * est[t]
        assert est[t + 1] <= est[t] + 1e-9


def test_approx_is_deterministic():
    truth = random_poly(4, np.random.default_rng(4))
    cfg = FitConfig(4, 0.25, 0.3)
    s = layered_instance(truth, cfg.m, 5, 1, 0.1, noise="uniform", seed=4)
    a = approx(s, cfg).final_poly.coeffs
    b = approx(SampleSet(s.x.copy(), s.y.copy()), cfg).final_poly.coeffs
    assert a.tobytes() == b.tobytes()


def test_report_json_round_trip():
    import json

    truth = random_poly(2, np.random.default_rng(2))
    cfg = FitConfig(2, 0.25)
    s = layered_instance(truth, cfg.m, 3, 0, 0.05, noise="uniform", seed=2)
    data = json.loads(approx(s, cfg, truth=truth).to_json())
    assert data["config"]["m"] == cfg.m
    assert len(data["rounds"]) == cfg.rounds
    assert data["final"]["basis"] == "chebyshev"
    assert {"t", "residual_linf_estimate", "residual_l1_estimate"} <= set(data["rounds"][0])


@pytest.mark.parametrize("adversary", ["constant_offset", "sign_flip"])
@pytest.mark.parametrize("seed", [0, 1])
def test_main_bound_when_samples_are_alpha_good(adversary, seed):
    # enough points per interval that goodness actually holds (n = 100 m)
    d, eps, rho, sigma, alpha = 4, 0.25, 0.1, 0.1, 0.3
    cfg = FitConfig(d, eps, alpha)
    truth = random_poly(d, np.random.default_rng(seed))
    truth = truth * (1 / norm_inf_grid(truth))
    model = NoiseModel(sigma, rho, adversary)
    inst = make_instance(truth, 100 * cfg.m, "chebyshev", model, seed)
    assert goodness(build_partition(cfg.m), inst.samples, alpha).is_good
    rep = approx(inst.samples, cfg, truth=truth)
    assert rep.final_error_linf <= (2 + eps) * sigma + 1e-6
    assert norm_1_grid(rep.l1_init_poly - truth) <= 2 * (2 * sigma) / (1 - 2 * alpha)
