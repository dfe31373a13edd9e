"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from done_opt import rls, theory, validation
from done_opt.benchmarks import CAMELBACK_BOX, camelback, camelback_distance, get_benchmark
from done_opt.engine import DoneConfig, per_iteration_cost_probe, run
from done_opt.experiment import BENCHMARK_DEFAULTS, ExperimentConfig, initial_point
from done_opt.hyperparam import camelback_magnitude, compute_Ma, estimate_Lambda, fit_gaussian_sigma
from done_opt.lbfgsb import Box
from done_opt.rfe import Dataset, GaussianFreq, as_model, fit_batch, rmse, sample_rfe
from done_opt.rng import substream

RESULTS: dict = {}


def record(num, title, passed, detail, elapsed, budget):
    ok = bool(passed) and elapsed < budget
    RESULTS[num] = f"criterion {num} {'PASS' if ok else 'FAIL'}: {title}: {detail} [{elapsed:.1f} s, budget {budget:.0f} s]"
    print(RESULTS[num])
    assert passed, RESULTS[num]
    assert elapsed < budget, RESULTS[num]


def test_criterion_1_camelback_optimization():
    t0 = time.perf_counter()
    dists = []
    for seed in range(10):
        cfg = DoneConfig(d=2, D=500, lam=1e-10, box=CAMELBACK_BOX, N=100, sigma_perturb=0.01,
                         sigma_explore=0.01, freq_dist=GaussianFreq(10.0), seed=seed)
        x1 = CAMELBACK_BOX.project(substream(seed, "init").uniform(CAMELBACK_BOX.lower, CAMELBACK_BOX.upper))
        dists.append(camelback_distance(run(camelback, x1, cfg).final_xhat))
    med = float(np.median(dists))
    record(1, "camelback median final distance", med < 1e-3,
           f"median {med:.3e} < 1e-3 (max {max(dists):.3e})", time.perf_counter() - t0, 30)


def test_criterion_2_camelback_fit():
    t0 = time.perf_counter()
    out = {}
    for sigma in (10.0, 0.1):
        errs = []
        for seed in range(5):
            data = theory.camelback_dataset(1000, seed)
            errs.append(rmse(fit_batch(sample_rfe(2, 500, GaussianFreq(sigma), seed), data, 1e-10), data))
        out[sigma] = float(np.median(errs))
    record(2, "camelback batch fit RMSE", out[10.0] < 1e-3 and out[0.1] > 0.1,
           f"sigma=10: {out[10.0]:.3e} < 1e-3, sigma=0.1: {out[0.1]:.4f} > 0.1", time.perf_counter() - t0, 20)


def test_criterion_3_real_vs_complex_trend():
    t0 = time.perf_counter()
    Ds = (10, 20, 40, 80, 160, 320, 640, 1280)
    study = theory.real_vs_complex_rmse(Ds=Ds, seeds=20)
    real, cplx = study.real_median, study.complex_median
    decreasing = bool(np.all(np.diff(real) < 0))
    ratio = float(np.max(np.maximum(real / cplx, cplx / real)))
    record(3, "real RFE RMSE trend", decreasing and ratio <= 3.0,
           f"strictly decreasing={decreasing}, max real/complex ratio {ratio:.3f} <= 3", time.perf_counter() - t0, 300)


def test_criterion_4_rls_equals_batch():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        D, N = int(rng.integers(1, 21)), int(rng.integers(1, 51))
        lam = float(rng.choice([1e-3, 1.0, 10.0]))
        A, y = rng.normal(size=(N, D)), rng.normal(size=N)
        s = rls.init(D, lam)
        for a, v in zip(A, y):
            s = rls.update(s, a, v)
        worst = max(worst, float(np.max(np.abs(s.weights - np.linalg.solve(A.T @ A + lam * np.eye(D), A.T @ y)))))
    record(4, "RLS vs closed form", worst <= 1e-8, f"max abs difference {worst:.2e} <= 1e-8", time.perf_counter() - t0, 5)


def test_criterion_5_constant_cost():
    t0 = time.perf_counter()
    D = 200
    cfg = DoneConfig(d=2, D=D, lam=1.0, box=Box(-1.0, 1.0, 2), N=1)
    (n1, t1), (n2, t2) = per_iteration_cost_probe(cfg, [1, 10 * D], window=1000, metric="update")
    ratio = t2 / t1
    record(5, "per-iteration update cost flat in n", 0.5 <= ratio <= 2.0,
           f"n={n1}: {t1 * 1e3:.3f} ms, n={n2}: {t2 * 1e3:.3f} ms, ratio {ratio:.3f} within 2x", time.perf_counter() - t0, 60)


def test_criterion_6_theory_suite():
    t0 = time.perf_counter()
    checks = validation.unbiasedness() + validation.complex_variance() + validation.ordering() + validation.norm_identity()
    failed = [c.name for c in checks if not c.passed]
    record(6, "theory suite", not failed, f"{len(checks) - len(failed)}/{len(checks)} checks"
           + (f", failed: {failed}" if failed else ""), time.perf_counter() - t0, 120)


def test_criterion_7_lambda_pipeline():
    t0 = time.perf_counter()
    model = as_model([[0.0]], [0.3], [0.0])
    X = np.linspace(-1, 1, 9)[:, None]
    y = np.linspace(2, 5, 9)
    a = np.cos(0.3) * np.ones(9)
    M = 0.5 * abs(a @ y) / (a @ a)
    exact = (abs(a @ y) / M - a @ a) / 9
    est = estimate_Lambda(model, Dataset(X, y), M)
    rel = abs(est.Lambda - exact) / exact
    base = compute_Ma(5.0, 2, 16)
    scaling = (compute_Ma(5.0, 2, 64) == base / 2 and compute_Ma(10.0, 2, 16) == 2 * base
               and compute_Ma(5.0, 1, 16) == base * 2 * np.pi)
    sigma = fit_gaussian_sigma(camelback_magnitude())
    record(7, "Lambda pipeline", rel <= 1e-6 and scaling and 10 / 1.5 <= sigma <= 15,
           f"Lambda rel err {rel:.1e}, M_a scaling exact={scaling}, camelback sigma {sigma:.3f}", time.perf_counter() - t0, 30)


def test_criterion_8_robot_arm():
    t0 = time.perf_counter()
    bench = get_benchmark("robot_arm")
    cfg = ExperimentConfig.from_dict({"benchmark": "robot_arm", **BENCHMARK_DEFAULTS["robot_arm"]})
    assert cfg.D == 500 and cfg.N == 2000
    init, final = [], []
    for seed in range(5):
        x1 = initial_point(cfg, seed)
        init.append(bench.objective(x1))
        final.append(bench.objective(run(bench.objective, x1, cfg.done_config(seed)).final_xhat))
    mi, mf = float(np.median(init)), float(np.median(final))
    record(8, "robot arm distance reduction", mf <= 0.1 * mi,
           f"median final {mf:.3f} <= 0.1 * median initial {mi:.3f} (finals {np.round(final, 3).tolist()})",
           time.perf_counter() - t0, 600)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
