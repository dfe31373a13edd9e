import numpy as np
import pytest
from scipy import integrate, stats

from done_opt import theory
from done_opt.rfe import GaussianFreq, TabulatedFreq
from done_opt.rng import substream


@pytest.fixture(scope="module", params=["gaussian", "gaussian_cosine"])
def sf(request):
    return theory.INSTANCES[request.param]()


def tabulated_cdf(pdf, bw):
    from scipy.integrate import cumulative_trapezoid

    grid = np.linspace(-bw, bw, 200_001)
    c = cumulative_trapezoid(pdf(grid), grid, initial=0.0)
    return lambda t: np.interp(t, grid, c)


def numeric_fourier(f, w):
    re = integrate.quad(lambda x: f(x) * np.cos(w * x), -40, 40, limit=400)[0]
    im = integrate.quad(lambda x: -f(x) * np.sin(w * x), -40, 40, limit=400)[0]
    return re + 1j * im


@pytest.mark.parametrize("w", [-3.1, -0.4, 0.0, 1.7, 2.5])
def test_closed_form_transform_matches_quadrature(sf, w):
    assert sf.fhat(np.array([w]))[0] == pytest.approx(numeric_fourier(lambda x: float(sf.f(x)), w), abs=1e-9)


def test_integral_of_magnitude(sf):
    ref = integrate.quad(lambda w: float(sf.fhat_mag(np.array([w]))[0]), -np.inf, np.inf, limit=400)[0]
    assert sf.integral_abs == pytest.approx(ref, rel=1e-8)


def test_tilde_sampler_follows_normalized_magnitude(sf):
    s = sf.sample_tilde(substream(0, "theory"), 20_000)
    cdf = tabulated_cdf(sf.tilde_pdf, sf.bandwidth)
    assert stats.kstest(s, cdf).pvalue > 1e-3


@pytest.mark.parametrize("x", [0.0, 0.6])
def test_real_estimator_unbiased_and_variance(sf, x):
    fx = float(sf.f(x))
    g = theory.real_estimator_draws(sf, 3, x, 40_000, seed=1)
    assert theory.unbiasedness_z(g, fx) <= 4.0
    var = theory.real_variance(sf, 3, x, sf.tilde_pdf)
    assert g.var() == pytest.approx(var, rel=0.05)


def test_real_estimator_with_gaussian_law_is_unbiased():
    sf = theory.gaussian_instance()
    g = theory.real_estimator_draws(sf, 5, 0.4, 40_000, seed=2, dist=GaussianFreq(1.5))
    assert theory.unbiasedness_z(g, float(sf.f(0.4))) <= 4.0
    single = theory.ideal_real_estimator(sf, GaussianFreq(1.5), 5, 0.4, seed=2)
    one = theory.real_estimator_draws(sf, 5, 0.4, 1, seed=2, dist=GaussianFreq(1.5))
    assert single == one[0]


@pytest.mark.parametrize("x", [0.3, 1.1])
def test_complex_estimator_unbiased_and_variance(sf, x):
    fx = float(sf.f(x))
    g = theory.complex_estimator_draws(sf, 4, x, 40_000, seed=3)
    assert theory.unbiasedness_z(g.real, fx) <= 4.0
    assert abs(g.imag.mean()) <= 4 * g.imag.std() / np.sqrt(g.size)
    mc = np.mean(np.abs(g - fx) ** 2)
    assert mc == pytest.approx(theory.complex_variance(sf, 4, x), rel=0.05)


def test_complex_estimator_is_exact_for_real_positive_transform_at_origin():
    # f^ > 0 and x = 0: every term equals f(0) / D
    g = theory.complex_estimator_draws(theory.gaussian_instance(), 4, 0.0, 100, seed=0)
    assert np.allclose(g, 1.0, atol=1e-13)
    assert theory.complex_variance(theory.gaussian_instance(), 4, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_zero_function_estimators_vanish():
    z = theory.zero_instance()
    assert not theory.real_estimator_draws(z, 5, 0.3, 10, 0).any()
    assert not theory.complex_estimator_draws(z, 5, 0.3, 10, 0).any()
    assert theory.second_moment_ordering_check(z, 0.0, 5, 2000, 0).holds
    with pytest.raises(ValueError):
        theory.optimal_real_pdf(z, 0.0)


def test_optimal_pdf_normalized_and_sampled(sf):
    p = theory.optimal_real_pdf(sf, 0.5)
    bw = sf.bandwidth
    assert integrate.quad(lambda w: float(p(np.array([w]))[0]), -bw, bw, limit=400)[0] == pytest.approx(1.0, rel=1e-8)
    s = p.sample(substream(1, "theory"), 20_000)
    cdf = tabulated_cdf(p, bw)
    assert stats.kstest(s, cdf).pvalue > 1e-3


def test_optimal_pdf_minimizes_real_second_moment(sf):
    x = 0.7
    p = theory.optimal_real_pdf(sf, x)
    best = theory.real_second_moment(sf, 2, x, p)
    assert best <= theory.real_second_moment(sf, 2, x, sf.tilde_pdf) + 1e-12
    wider = lambda w: np.exp(-0.5 * (w / 3) ** 2) / (3 * np.sqrt(2 * np.pi))  # noqa: E731
    assert best <= theory.real_second_moment(sf, 2, x, wider)


def test_ordering_check_flags_too_few_draws(sf):
    r = theory.second_moment_ordering_check(sf, 0.5, 2, 10, 0)
    assert not r.sufficient and r.notes


def test_ordering_holds_with_enough_draws(sf):
    r = theory.second_moment_ordering_check(sf, 0.5, 2, 20_000, 7)
    assert r.sufficient and r.holds


def test_norm_identity(sf):
    lhs = theory.ideal_weight_norm_sq(sf)
    assert lhs == pytest.approx(2.0 * theory.function_norm_sq(sf), rel=1e-8)


def test_density_without_support_is_rejected():
    sf = theory.gaussian_instance()
    grid = np.linspace(-0.5, 0.5, 11)
    narrow = TabulatedFreq.from_values(grid, np.ones(11))
    with pytest.raises(ValueError):
        theory.real_estimator_draws(sf, 2, 0.0, 5, 0, dist=narrow)


def test_complex_fit_solves_hermitian_ridge():
    from done_opt.rfe import sample_rfe

    data = theory.camelback_dataset(60, 0)
    model = sample_rfe(2, 20, GaussianFreq(3.0), 0)
    c = theory.fit_complex_batch(model, data, 1e-3)
    Z = np.exp(1j * (data.inputs @ model.freqs.T + model.phases))
    aug = np.vstack([Z, np.sqrt(1e-3) * np.eye(20)])
    ref = np.linalg.lstsq(aug, np.concatenate([data.outputs, np.zeros(20)]).astype(complex), rcond=None)[0]
    assert np.allclose(c, ref, atol=1e-8)


def test_small_rmse_study_trend():
    st = theory.real_vs_complex_rmse(Ds=(10, 40, 160), seeds=3)
    assert st.real.shape == (3, 3)
    assert np.all(np.diff(st.real_median) < 0)


def test_variance_scales_inversely_with_D():
    sf = theory.gaussian_instance()
    v1 = theory.real_estimator_draws(sf, 1, 0.5, 100_000, 4).var()
    v100 = theory.real_estimator_draws(sf, 100, 0.5, 1_000, 5).var()
    assert v1 / v100 == pytest.approx(100, rel=0.2)


def test_optimal_density_equals_tilde_for_zero_phase_at_origin():
    sf = theory.gaussian_instance()
    p = theory.optimal_real_pdf(sf, 0.0)
    w = np.linspace(-5, 5, 101)
    assert np.allclose(p(w), sf.tilde_pdf(w), rtol=1e-8)


@pytest.mark.parametrize("x", [0.7, 1.5])
def test_optimal_density_has_lowest_monte_carlo_error(sf, x):
    p = theory.optimal_real_pdf(sf, x)
    fx = float(sf.f(x))

    def mse(g):
        s = (g - fx) ** 2
        return s.mean(), s.std() / np.sqrt(s.size)

    best, se_best = mse(theory.real_estimator_draws(sf, 1, x, 100_000, 1, sampler=p.sample, pdf=p))
    for other in (
        theory.real_estimator_draws(sf, 1, x, 100_000, 2),
        theory.real_estimator_draws(sf, 1, x, 100_000, 3, dist=GaussianFreq(3.0)),
    ):
        m, se = mse(other)
        assert m - best > 2 * np.hypot(se, se_best)
