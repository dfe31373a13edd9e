"""Choosing the frequency distribution and estimating the regularization bound.

Both rules of thumb start from the magnitude of the Fourier transform of the
objective, ``|f^(w)|`` with ``f^(w) = int f(x) exp(-i w.x) dx``.
:class:`FourierMagnitude` stores it as per-coordinate marginals
``m_i(w_i) = int |f^(w)| dw_{-i}`` on 1-D grids together with the total
mass ``int |f^(w)| dw``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .lbfgsb import Box
from .rfe import Dataset, FreqDistribution, GaussianFreq, RfeModel, TabulatedFreq, features

SIGMA_RANGE = (1e-3, 1e3)


@dataclass(frozen=True)
class FourierMagnitude:
    """Fourier magnitude as per-coordinate marginals.

    Attributes
    ----------
    grids, marginals : tuple of 1-D arrays
        ``marginals[i]`` sampled on ``grids[i]``.
    integral_abs : float
        ``int |f^(w)| dw`` over R^d.
    exact : bool
        Whether the magnitude is known exactly (as opposed to measured or
        estimated); decides between the tabulated and the Gaussian rule.
    """

    grids: tuple
    marginals: tuple
    integral_abs: float
    exact: bool = False

    def __post_init__(self):
        grids = tuple(np.asarray(g, dtype=float) for g in self.grids)
        margs = tuple(np.asarray(m, dtype=float) for m in self.marginals)
        if len(grids) == 0 or len(grids) != len(margs):
            raise ValueError("need one marginal per grid")
        for g, m in zip(grids, margs):
            if g.shape != m.shape or g.ndim != 1:
                raise ValueError("grid and marginal shapes differ")
            if np.any(m < 0) or not np.all(np.isfinite(m)):
                raise ValueError("magnitude must be finite and nonnegative")
        if not np.isfinite(self.integral_abs) or not self.integral_abs > 0:
            raise ValueError("Fourier magnitude is identically zero or not integrable")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "marginals", margs)

    @property
    def d(self) -> int:
        return len(self.grids)

    @classmethod
    def from_callable(
        cls,
        mag: Callable[[np.ndarray], np.ndarray],
        bound: float,
        num: int = 4001,
        integral_abs: Optional[float] = None,
        exact: bool = True,
    ) -> "FourierMagnitude":
        """Tabulate a closed-form 1-D magnitude on ``[-bound, bound]``.

        ``integral_abs`` defaults to adaptive quadrature over the real line.
        """
        grid = np.linspace(-bound, bound, num)
        values = np.asarray(mag(grid), dtype=float)
        if integral_abs is None:
            integral_abs = integrate.quad(lambda w: float(mag(np.array([w]))[0]), -np.inf, np.inf, limit=200)[0]
        return cls((grid,), (values,), float(integral_abs), exact)

    @classmethod
    def from_grid_samples(
        cls,
        values: np.ndarray,
        box: Box,
        pad: int = 4,
        exact: bool = False,
    ) -> "FourierMagnitude":
        """Estimate ``|f^|`` by a zero-padded DFT of samples on a uniform grid.

        ``values[i1, ..., id]`` is ``f`` at the left-aligned grid points of
        ``box`` (spacing ``width / shape``).  The DFT is scaled by the cell
        volume so it approximates the continuous transform of ``f``
        restricted to the box; zero padding by ``pad`` refines the
        frequency grid.
        """
        values = np.asarray(values, dtype=float)
        if values.ndim != box.d:
            raise ValueError(f"sample array has {values.ndim} axes, box has {box.d}")
        steps = box.width() / np.array(values.shape)
        shape = tuple(pad * n for n in values.shape)
        F = np.abs(np.fft.fftshift(np.fft.fftn(values, s=shape, axes=tuple(range(box.d))))) * np.prod(steps)
        grids = [np.fft.fftshift(np.fft.fftfreq(n, h)) * 2 * np.pi for n, h in zip(shape, steps)]
        margs = []
        for i in range(box.d):
            m = F
            for j in reversed(range(box.d)):
                if j != i:
                    m = np.trapezoid(m, grids[j], axis=j)
            margs.append(m)
        total = np.trapezoid(margs[0], grids[0])
        return cls(tuple(grids), tuple(margs), float(total), exact)


def _gaussian_pdf(w, sigma):
    return np.exp(-0.5 * (w / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))


def density_l2_distance(mag: FourierMagnitude, sigma: float) -> float:
    """Sum over coordinates of the L2 distance between N(0, sigma^2) and the normalized marginal."""
    total = 0.0
    for g, m in zip(mag.grids, mag.marginals):
        p = m / np.trapezoid(m, g)
        total += np.trapezoid((_gaussian_pdf(g, sigma) - p) ** 2, g)
    return float(total)


def _golden(f, a, b, rtol):
    # golden-section search on [a, b] in log space
    invphi = (np.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > np.log1p(rtol):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def fit_gaussian_sigma(mag: FourierMagnitude, num: int = 121, rtol: float = 1e-3) -> float:
    """Std-dev of the isotropic normal closest in L2 to the normalized magnitude.

    Scans a log grid over [1e-3, 1e3] and refines the best cell by
    golden-section search to ``rtol`` relative precision.
    """
    logs = np.linspace(np.log(SIGMA_RANGE[0]), np.log(SIGMA_RANGE[1]), num)
    obj = lambda t: density_l2_distance(mag, np.exp(t))  # noqa: E731
    vals = np.array([obj(t) for t in logs])
    i = int(np.argmin(vals))
    lo, hi = logs[max(i - 1, 0)], logs[min(i + 1, num - 1)]
    return float(np.exp(_golden(obj, lo, hi, rtol)))


def choose_freq_dist(mag: FourierMagnitude, d: int) -> FreqDistribution:
    """Pick the frequency law from the Fourier magnitude.

    An exactly known magnitude becomes a tabulated density proportional to
    it; an estimated one is replaced by the isotropic normal of closest
    shape.
    """
    if mag.d not in (1, d):
        raise ValueError(f"magnitude has {mag.d} coordinates, need 1 or {d}")
    if mag.exact:
        dens = tuple(m / np.trapezoid(m, g) for g, m in zip(mag.grids, mag.marginals))
        return TabulatedFreq(mag.grids, dens)
    return GaussianFreq(fit_gaussian_sigma(mag))


def compute_Ma(integral_abs: float, d: int, D: int) -> float:
    """``sqrt(2) * int|f^| / ((2 pi)^d sqrt(D))``."""
    if D < 1:
        raise ValueError(f"need D >= 1, got {D}")
    if not integral_abs > 0:
        raise ValueError("integral of |f^| must be positive")
    return float(np.sqrt(2.0) * integral_abs / ((2 * np.pi) ** d * np.sqrt(D)))


@dataclass(frozen=True)
class LambdaEstimate:
    Lambda: float
    M_a: float
    #: LHS(Lambda) - M_a^2
    residual: float
    #: "ok", "below_range" (target above LHS at the lower end) or "above_range"
    status: str = "ok"

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / self.M_a**2


class RegularizedNorm:
    """``lam -> ||(A^T A + N lam I)^{-1} A^T y||^2`` via one SVD of ``A``."""

    def __init__(self, A, y):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        self.N = A.shape[0]
        U, s, _ = np.linalg.svd(A, full_matrices=False)
        self.s = s
        self.z = U.T @ np.asarray(y, dtype=float)

    def __call__(self, lam: float) -> float:
        return float(np.sum((self.s * self.z / (self.s**2 + self.N * lam)) ** 2))


def lhs_direct(A, y, lam: float) -> float:
    """Same quantity as :class:`RegularizedNorm` by a direct solve."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    N, D = A.shape
    c = np.linalg.solve(A.T @ A + N * lam * np.eye(D), A.T @ y)
    return float(c @ c)


def estimate_Lambda(
    model: RfeModel,
    data: Dataset,
    M_a: float,
    log10_range: Sequence[float] = (-12.0, 6.0),
    max_iter: int = 200,
    xtol: float = 1e-12,
) -> LambdaEstimate:
    """Solve ``LHS(Lambda) = M_a^2`` by bisection on ``log10 Lambda``.

    The left-hand side is strictly decreasing in ``Lambda``.  Targets outside
    the bracket return the nearer end with a status flag.
    """
    if not M_a > 0:
        raise ValueError(f"M_a must be positive, got {M_a}")
    lhs = RegularizedNorm(features(model, data.inputs), data.outputs)
    target = M_a**2
    lo, hi = log10_range
    f_lo, f_hi = lhs(10.0**lo), lhs(10.0**hi)
    if target > f_lo:
        return LambdaEstimate(10.0**lo, M_a, f_lo - target, "below_range")
    if target < f_hi:
        return LambdaEstimate(10.0**hi, M_a, f_hi - target, "above_range")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if lhs(10.0**mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < xtol:
            break
    lam = 10.0 ** (0.5 * (lo + hi))
    return LambdaEstimate(lam, M_a, lhs(lam) - target, "ok")


def camelback_magnitude(shape=(512, 256), pad: int = 4) -> FourierMagnitude:
    """Fourier magnitude of the camelback function on its box by grid DFT."""
    from .benchmarks import CAMELBACK_BOX, camelback_grid

    box = CAMELBACK_BOX
    axes = [lo + np.arange(n) * (hi - lo) / n for lo, hi, n in zip(box.lower, box.upper, shape)]
    X1, X2 = np.meshgrid(*axes, indexing="ij")
    return FourierMagnitude.from_grid_samples(camelback_grid(X1, X2), box, pad=pad)
