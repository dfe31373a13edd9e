import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize as scipy_minimize

from done_opt.benchmarks import CAMELBACK_BOX, CAMELBACK_MIN, CAMELBACK_MINIMIZERS
from done_opt.lbfgsb import Box, NonFiniteError, SolverOptions, minimize, projected_gradient


def rosen(x):
    f = 100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2
    g = np.array([-400 * x[0] * (x[1] - x[0] ** 2) - 2 * (1 - x[0]), 200 * (x[1] - x[0] ** 2)])
    return f, g


def camel(x):
    x1, x2 = x
    f = (4 - 2.1 * x1**2 + x1**4 / 3) * x1**2 + x1 * x2 + (-4 + 4 * x2**2) * x2**2
    g = np.array([8 * x1 - 8.4 * x1**3 + 2 * x1**5 + x2, x1 - 8 * x2 + 16 * x2**3])
    return f, g


def test_rosenbrock_interior_minimum():
    r = minimize(rosen, [-1.2, 1.0], Box(-2.0, 2.0, 2), SolverOptions(max_iter=500))
    assert r.converged
    assert np.allclose(r.minimizer, [1.0, 1.0], atol=1e-5)


def test_camelback_from_nearby_start():
    r = minimize(camel, [0.1, -0.6], CAMELBACK_BOX)
    assert r.converged
    assert np.allclose(r.minimizer, CAMELBACK_MINIMIZERS[0], atol=1e-7)
    assert r.value == pytest.approx(CAMELBACK_MIN, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), d=st.integers(1, 8))
def test_separable_quadratic_hits_projection_of_target(seed, d):
    rng = np.random.default_rng(seed)
    t = rng.uniform(-3, 3, d)
    box = Box(-1.0, 1.0, d)
    r = minimize(lambda x: (0.5 * np.sum((x - t) ** 2), x - t), np.zeros(d), box)
    assert r.converged
    assert np.allclose(r.minimizer, np.clip(t, -1, 1), atol=1e-7)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_convex_quadratic_agrees_with_scipy(seed):
    rng = np.random.default_rng(seed)
    d = 6
    M = rng.normal(size=(d, d))
    H = M @ M.T + 0.5 * np.eye(d)
    b = rng.normal(size=d) * 3
    lo, hi = -rng.uniform(0.2, 1, d), rng.uniform(0.2, 1, d)
    fun = lambda x: (0.5 * x @ H @ x - b @ x, H @ x - b)  # noqa: E731
    box = Box(lo, hi, d)
    ours = minimize(fun, np.zeros(d), box, SolverOptions(max_iter=500, grad_tol=1e-10))
    ref = scipy_minimize(fun, np.zeros(d), jac=True, method="L-BFGS-B", bounds=list(zip(lo, hi)),
                         options={"ftol": 1e-15, "gtol": 1e-12})
    assert ours.value <= ref.fun + 1e-9
    assert np.allclose(ours.minimizer, ref.x, atol=1e-5)


def test_converged_flag_matches_gradient_norm():
    r = minimize(rosen, [-1.2, 1.0], Box(-2.0, 2.0, 2), SolverOptions(max_iter=3))
    assert not r.converged and r.iterations == 3
    assert r.grad_inf_norm > 1e-6


def test_result_stays_in_box_when_minimum_is_outside():
    box = Box([0.0, 0.0], [1.0, 2.0], 2)
    r = minimize(lambda x: (x[0] + x[1], np.ones(2)), [0.5, 0.5], box)
    assert np.array_equal(r.minimizer, [0.0, 0.0])
    assert np.max(np.abs(projected_gradient(r.minimizer, np.ones(2), box))) == 0.0


def test_start_outside_box_is_rejected():
    with pytest.raises(ValueError):
        minimize(rosen, [3.0, 0.0], Box(-2.0, 2.0, 2))


def test_nonfinite_objective_raises():
    with pytest.raises(NonFiniteError):
        minimize(lambda x: (np.nan, np.zeros(1)), [0.0], Box(-1.0, 1.0, 1))


def test_box_validation_and_helpers():
    with pytest.raises(ValueError):
        Box(1.0, 1.0, 2)
    with pytest.raises(ValueError):
        Box(0.0, 1.0, 0)
    b = Box([-2.0, -1.0], [2.0, 1.0], 2)
    assert np.array_equal(b.project([3.0, -3.0]), [2.0, -1.0])
    assert b.contains([0.0, 1.0]) and not b.contains([0.0, 1.5])
    assert np.array_equal(b.width(), [4.0, 2.0])
