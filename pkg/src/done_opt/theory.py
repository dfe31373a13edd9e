"""Monte-Carlo oracles for RFE approximation theory (1-D instances).

Conventions: ``f^(w) = int f(x) exp(-i w x) dx`` and
``f(x) = (1/2pi) int f^(w) exp(i w x) dw``.

* Real estimator: ``G(x) = sum_k C_k cos(W_k x + B_k)`` with
  ``C_k = 2 |f^(W_k)| cos(arg f^(W_k) - B_k) / (D (2pi)^d p(W_k))``.
* Complex estimator: ``G~(x) = sum_k C~_k exp(i (W_k x + B_k))`` with
  ``C~_k = f^(W_k) exp(-i B_k) / (D (2pi)^d p~(W_k))`` and
  ``p~ = |f^| / int |f^|``.

Both are unbiased for ``f(x)``.  Variances here are for the ``D``-term
sums, ``Var[G] = D Var[term]``, so each closed form carries a ``1/D`` on
the ``f(x)^2`` term as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .rfe import Dataset, FreqDistribution, RfeModel, features, fit_batch, rmse, sample_rfe, GaussianFreq
from .rng import substream

TWO_PI = 2.0 * np.pi
MIN_DRAWS = 1000


@dataclass(frozen=True)
class SpectralFunction:
    """A 1-D function with closed-form Fourier transform.

    ``sample_tilde(rng, n)`` draws from ``|f^| / int |f^|``.
    """

    name: str
    f: Callable
    fhat: Callable
    integral_abs: float
    sample_tilde: Optional[Callable] = None
    #: half-width of the band that holds essentially all of ``|f^|``
    bandwidth: float = 10.0
    d: int = 1

    def fhat_mag(self, w):
        return np.abs(self.fhat(w))

    def fhat_phase(self, w):
        return np.angle(self.fhat(w))

    def tilde_pdf(self, w):
        if self.integral_abs == 0:
            return np.zeros_like(np.asarray(w, dtype=float))
        return self.fhat_mag(w) / self.integral_abs

    @property
    def is_zero(self) -> bool:
        return self.integral_abs == 0


def gaussian_instance(scale: float = 1.0) -> SpectralFunction:
    """``f(x) = exp(-x^2 / (2 s^2))``, ``f^(w) = s sqrt(2pi) exp(-s^2 w^2 / 2)``."""
    s = scale

    def f(x):
        return np.exp(-0.5 * (np.asarray(x, dtype=float) / s) ** 2)

    def fhat(w):
        return (s * np.sqrt(TWO_PI) * np.exp(-0.5 * (s * np.asarray(w, dtype=float)) ** 2)).astype(complex)

    def sample(rng, n):
        return rng.normal(0.0, 1.0 / s, n)

    return SpectralFunction("gaussian", f, fhat, TWO_PI, sample, bandwidth=12.0 / s)


def gaussian_cosine_instance(scale: float = 1.0, shift: float = 2.0, phase: float = 0.7) -> SpectralFunction:
    """``f(x) = exp(-x^2/(2 s^2)) cos(w0 x + phi)``: two shifted Gaussian lobes with phases +-phi."""
    s, w0, phi = scale, shift, phase
    amp = s * np.sqrt(TWO_PI) / 2.0

    def lobes(w):
        w = np.asarray(w, dtype=float)
        return np.exp(-0.5 * (s * (w - w0)) ** 2), np.exp(-0.5 * (s * (w + w0)) ** 2)

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x / s) ** 2) * np.cos(w0 * x + phi)

    def fhat(w):
        gm, gp = lobes(w)
        return amp * (np.exp(1j * phi) * gm + np.exp(-1j * phi) * gp)

    total = integrate.quad(lambda w: float(np.abs(fhat(w))), -np.inf, np.inf, limit=200, epsabs=1e-12)[0]

    def sample(rng, n):
        # rejection from the equal mixture of the two lobes; |f^| <= amp (gm + gp)
        out = np.empty(0)
        while out.size < n:
            m = 2 * (n - out.size) + 16
            w = rng.normal(0.0, 1.0 / s, m) + np.where(rng.random(m) < 0.5, w0, -w0)
            gm, gp = lobes(w)
            ratio = np.abs(fhat(w)) / (amp * (gm + gp))
            out = np.concatenate([out, w[rng.random(m) < ratio]])
        return out[:n]

    return SpectralFunction("gaussian_cosine", f, fhat, total, sample, bandwidth=abs(w0) + 12.0 / s)


def zero_instance() -> SpectralFunction:
    return SpectralFunction(
        "zero",
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lambda w: np.zeros_like(np.asarray(w, dtype=float), dtype=complex),
        0.0,
        lambda rng, n: rng.normal(0.0, 1.0, n),
    )


INSTANCES = {
    "gaussian": gaussian_instance,
    "gaussian_cosine": gaussian_cosine_instance,
}


def _check_support(sf: SpectralFunction, pdf: Callable):
    w = np.linspace(-sf.bandwidth, sf.bandwidth, 4001)
    mag = sf.fhat_mag(w)
    p = pdf(w)
    bad = (mag > 1e-12 * max(mag.max(), 1e-300)) & (p <= 0)
    if np.any(bad):
        raise ValueError(f"sampling density vanishes where |f^| > 0 (e.g. w={w[bad][0]:.4g})")


def _dist_pdf(dist: FreqDistribution) -> Callable:
    return lambda w: dist.pdf(np.asarray(w, dtype=float).reshape(-1, 1))


def real_estimator_draws(
    sf: SpectralFunction,
    D: int,
    x: float,
    draws: int,
    seed: int,
    dist: Optional[FreqDistribution] = None,
    sampler: Optional[Callable] = None,
    pdf: Optional[Callable] = None,
) -> np.ndarray:
    """``draws`` independent realizations of the real estimator at ``x``.

    The frequency law is ``dist``, or an explicit ``sampler(rng, n)`` with
    density ``pdf``; without either it is ``p~``.
    """
    if sf.is_zero:
        return np.zeros(draws)
    if dist is not None:
        pdf = _dist_pdf(dist)
        sampler = lambda rng, n: dist.sample(rng, n, 1)[:, 0]  # noqa: E731
    elif sampler is None:
        sampler, pdf = sf.sample_tilde, sf.tilde_pdf
    _check_support(sf, pdf)
    rng = substream(seed, "theory")
    W = sampler(rng, draws * D).reshape(draws, D)
    B = rng.uniform(0.0, TWO_PI, (draws, D))
    F = sf.fhat(W)
    C = 2.0 / (D * TWO_PI**sf.d) * np.abs(F) / pdf(W.reshape(-1)).reshape(W.shape) * np.cos(np.angle(F) - B)
    return np.sum(C * np.cos(W * x + B), axis=1)


def ideal_real_estimator(sf: SpectralFunction, dist: FreqDistribution, D: int, x: float, seed: int) -> float:
    """One draw of the real estimator with frequency law ``dist``."""
    return float(real_estimator_draws(sf, D, x, 1, seed, dist=dist)[0])


def complex_estimator_draws(sf: SpectralFunction, D: int, x: float, draws: int, seed: int) -> np.ndarray:
    """Complex realizations of ``G~(x)`` with the magnitude-proportional law."""
    if sf.is_zero:
        return np.zeros(draws, dtype=complex)
    rng = substream(seed, "theory")
    W = sf.sample_tilde(rng, draws * D).reshape(draws, D)
    B = rng.uniform(0.0, TWO_PI, (draws, D))
    C = sf.fhat(W) * np.exp(-1j * B) / (D * TWO_PI**sf.d * sf.tilde_pdf(W))
    return np.sum(C * np.exp(1j * (W * x + B)), axis=1)


def complex_estimator(sf: SpectralFunction, D: int, x: float, seed: int) -> float:
    """Real part of one draw of ``G~(x)``."""
    return float(complex_estimator_draws(sf, D, x, 1, seed)[0].real)


def complex_variance(sf: SpectralFunction, D: int, x: float) -> float:
    """``E|G~(x) - f(x)|^2 = ((int|f^| / (2pi)^d)^2 - f(x)^2) / D``."""
    return float(((sf.integral_abs / TWO_PI**sf.d) ** 2 - float(sf.f(x)) ** 2) / D)


def _quad(fun, lo, hi):
    return integrate.quad(fun, lo, hi, limit=400, epsabs=1e-10, epsrel=1e-10)[0]


def real_second_moment(sf: SpectralFunction, D: int, x: float, pdf: Callable) -> float:
    """``E[G(x)^2]`` under frequency density ``pdf`` (by quadrature)."""
    if sf.is_zero:
        return 0.0
    bw = sf.bandwidth

    def integrand(w):
        F = sf.fhat(np.array([w]))[0]
        return abs(F) ** 2 * (np.cos(2 * np.angle(F) + 2 * w * x) + 2) / float(np.asarray(pdf(np.array([w]))).reshape(-1)[0])

    diag = _quad(integrand, -bw, bw) / (2 * TWO_PI ** (2 * sf.d))
    fx = float(sf.f(x))
    return float(diag / D + (D - 1) / D * fx**2)


def real_variance(sf: SpectralFunction, D: int, x: float, pdf: Callable) -> float:
    return real_second_moment(sf, D, x, pdf) - float(sf.f(x)) ** 2


@dataclass(frozen=True)
class OptimalRealPdf:
    """The variance-optimal frequency density for the real estimator at ``x``.

    ``p*(w) = |f^(w)| sqrt(cos(2 arg f^(w) + 2 w x) + 2) / Z``.
    """

    sf: SpectralFunction
    x: float
    norm: float

    def shape(self, w):
        F = self.sf.fhat(np.asarray(w, dtype=float))
        return np.abs(F) * np.sqrt(np.cos(2 * np.angle(F) + 2 * np.asarray(w) * self.x) + 2)

    def __call__(self, w):
        return self.shape(w) / self.norm

    def sample(self, rng, n):
        # p* <= sqrt(3) |f^| / Z: rejection from p~
        out = np.empty(0)
        while out.size < n:
            m = 2 * (n - out.size) + 16
            w = self.sf.sample_tilde(rng, m)
            F = self.sf.fhat(w)
            keep = rng.random(m) * np.sqrt(3.0) < np.sqrt(np.cos(2 * np.angle(F) + 2 * w * self.x) + 2)
            out = np.concatenate([out, w[keep]])
        return out[:n]


def optimal_real_pdf(sf: SpectralFunction, x) -> OptimalRealPdf:
    if sf.d != 1 or np.ndim(x) > 0 and np.size(x) != 1:
        raise ValueError("the optimal density is only available for d = 1")
    x = float(np.asarray(x).reshape(-1)[0])
    if sf.is_zero:
        raise ValueError("zero function has no optimal density")
    bw = sf.bandwidth
    tmp = OptimalRealPdf(sf, x, 1.0)
    Z = _quad(lambda w: float(tmp.shape(np.array([w]))[0]), -bw, bw)
    return OptimalRealPdf(sf, x, Z)


def _moment(samples):
    """Mean of ``samples`` and its standard error."""
    samples = np.asarray(samples, dtype=float)
    return float(samples.mean()), float(samples.std(ddof=1) / np.sqrt(samples.size))


@dataclass
class OrderingReport:
    """Second moments of the real and complex estimators and the two sandwich checks."""

    second_moment_real_opt: float
    second_moment_real_tilde: float
    second_moment_complex_tilde: float
    se_real_opt: float
    se_real_tilde: float
    se_complex_tilde: float
    draws: int
    sufficient: bool
    sandwich_opt_vs_tilde: bool
    sandwich_complex_vs_real: bool
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.sandwich_opt_vs_tilde and self.sandwich_complex_vs_real


def _leq(a, sa, b, sb, k):
    """``a <= b`` up to ``k`` combined standard errors."""
    return a - b <= k * np.hypot(sa, sb)


def second_moment_ordering_check(
    sf: SpectralFunction, x: float, D: int, draws: int, seed: int, slack: float = 3.0
) -> OrderingReport:
    """Monte-Carlo check of

    ``E_p*[G^2]/sqrt3 <= E_p~[G^2] <= sqrt3 E_p*[G^2]`` and
    ``E_p~|G~|^2 / 2 <= E_p~[G^2] <= 3/2 E_p~|G~|^2``.
    """
    notes = []
    sufficient = draws >= MIN_DRAWS
    if not sufficient:
        notes.append(f"only {draws} draws; at least {MIN_DRAWS} needed for a meaningful check")
    if sf.is_zero:
        return OrderingReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, draws, sufficient, True, True, notes + ["zero function"])
    popt = optimal_real_pdf(sf, x)
    g_opt = real_estimator_draws(sf, D, x, draws, seed, sampler=popt.sample, pdf=popt)
    g_tilde = real_estimator_draws(sf, D, x, draws, seed + 1)
    g_cplx = complex_estimator_draws(sf, D, x, draws, seed + 2)
    m_opt, s_opt = _moment(g_opt**2)
    m_til, s_til = _moment(g_tilde**2)
    m_cpx, s_cpx = _moment(np.abs(g_cplx) ** 2)
    r3 = np.sqrt(3.0)
    first = _leq(m_opt / r3, s_opt / r3, m_til, s_til, slack) and _leq(m_til, s_til, r3 * m_opt, r3 * s_opt, slack)
    second = _leq(m_cpx / 2, s_cpx / 2, m_til, s_til, slack) and _leq(m_til, s_til, 1.5 * m_cpx, 1.5 * s_cpx, slack)
    return OrderingReport(m_opt, m_til, m_cpx, s_opt, s_til, s_cpx, draws, sufficient, bool(first), bool(second), notes)


def ideal_weight_norm_sq(sf: SpectralFunction) -> float:
    """``int int c*(w, b)^2 db dw`` with ``c* = |f^| cos(arg f^ - b) / pi``."""
    bw = sf.bandwidth

    def inner(w):
        F = sf.fhat(np.array([w]))[0]
        mag, ph = abs(F), np.angle(F)
        return _quad(lambda b: (mag * np.cos(ph - b) / np.pi) ** 2, 0.0, TWO_PI)

    return _quad(inner, -bw, bw)


def function_norm_sq(sf: SpectralFunction, half_width: float = 40.0) -> float:
    return _quad(lambda x: float(sf.f(x)) ** 2, -half_width, half_width)


def unbiasedness_z(samples, target: float) -> float:
    """``|mean - target|`` in units of the standard error of the mean."""
    mean, se = _moment(samples)
    if se == 0:
        return 0.0 if mean == target else np.inf
    return abs(mean - target) / se


# --- real versus complex least-squares fits on the camelback function ---


def fit_complex_batch(model: RfeModel, data: Dataset, lam: float) -> np.ndarray:
    """Complex weights minimizing ``||y - Z c||^2 + lam ||c||^2``, ``Z = exp(i(W x + b))``."""
    Z = np.exp(1j * (data.inputs @ model.freqs.T + model.phases))
    G = Z.conj().T @ Z
    G[np.diag_indices_from(G)] += lam
    rhs = Z.conj().T @ data.outputs
    try:
        L = np.linalg.cholesky(G)
        return np.linalg.solve(L.conj().T, np.linalg.solve(L, rhs))
    except np.linalg.LinAlgError:
        D = model.num_features
        aug = np.vstack([Z, np.sqrt(lam) * np.eye(D)])
        return np.linalg.lstsq(aug, np.concatenate([data.outputs, np.zeros(D)]).astype(complex), rcond=None)[0]


def complex_rmse(model: RfeModel, weights: np.ndarray, data: Dataset) -> float:
    Z = np.exp(1j * (data.inputs @ model.freqs.T + model.phases))
    r = data.outputs - (Z @ weights).real
    return float(np.sqrt(np.mean(r**2)))


def camelback_dataset(N: int, seed: int) -> Dataset:
    from .benchmarks import CAMELBACK_BOX, camelback_grid

    rng = substream(seed, "data")
    X = rng.uniform(CAMELBACK_BOX.lower, CAMELBACK_BOX.upper, (N, 2))
    return Dataset(X, camelback_grid(X[:, 0], X[:, 1]))


@dataclass
class RmseStudy:
    Ds: list
    real: np.ndarray  # (len(Ds), seeds)
    complex: np.ndarray

    @property
    def real_median(self):
        return np.median(self.real, axis=1)

    @property
    def complex_median(self):
        return np.median(self.complex, axis=1)


def real_vs_complex_rmse(
    Ds=(10, 20, 40, 80, 160, 320, 640, 1280),
    seeds: int = 20,
    N: int = 1000,
    sigma: float = 10.0,
    lam: float = 1e-10,
) -> RmseStudy:
    """Training RMSE of real and complex RFE least-squares fits to the camelback function."""
    real = np.empty((len(Ds), seeds))
    cplx = np.empty((len(Ds), seeds))
    for s in range(seeds):
        data = camelback_dataset(N, s)
        for i, D in enumerate(Ds):
            model = sample_rfe(2, D, GaussianFreq(sigma), s)
            real[i, s] = rmse(fit_batch(model, data, lam), data)
            cplx[i, s] = complex_rmse(model, fit_complex_batch(model, data, lam), data)
    return RmseStudy(list(Ds), real, cplx)
