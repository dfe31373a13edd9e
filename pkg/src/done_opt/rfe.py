"""Random Fourier expansions.

A random Fourier expansion (RFE) is the surrogate

    g(x) = sum_k c_k cos(w_k . x + b_k)

with frequencies ``w_k`` drawn i.i.d. from a frequency distribution, phases
``b_k`` uniform on [0, 2*pi) and weights ``c_k`` obtained by (recursive)
regularized least squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.linalg

from .rng import substream

TWO_PI = 2.0 * np.pi
_NORM_TOL = 1e-6


class FreqDistribution:
    """Sampling law for the RFE frequencies (base class)."""

    def sample(self, rng: np.random.Generator, n: int, d: int) -> np.ndarray:
        raise NotImplementedError

    def pdf(self, omega: np.ndarray) -> np.ndarray:
        """Joint density at the rows of ``omega`` (shape ``(n, d)``)."""
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianFreq(FreqDistribution):
    """Isotropic zero-mean normal law, ``sigma`` per coordinate."""

    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise ValueError(f"Gaussian frequency std-dev must be positive, got {self.sigma}")

    def sample(self, rng, n, d):
        return rng.normal(0.0, self.sigma, size=(n, d))

    def pdf(self, omega):
        omega = np.atleast_2d(omega)
        d = omega.shape[1]
        s2 = self.sigma**2
        return np.exp(-0.5 * np.sum(omega**2, axis=1) / s2) / (TWO_PI * s2) ** (d / 2)


@dataclass(frozen=True)
class TabulatedFreq(FreqDistribution):
    """Separable density tabulated on a grid per coordinate.

    ``grids[i]`` / ``densities[i]`` describe the marginal of coordinate ``i``;
    a single pair is shared by every coordinate.  Each marginal must
    integrate to one (trapezoid rule) within 1e-6.  Sampling uses the
    inverse of the piecewise-linear CDF.
    """

    grids: tuple
    densities: tuple
    _cdfs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        grids = tuple(np.asarray(g, dtype=float) for g in self.grids)
        dens = tuple(np.asarray(p, dtype=float) for p in self.densities)
        if len(grids) == 0 or len(grids) != len(dens):
            raise ValueError("need one density per grid")
        cdfs = []
        for g, p in zip(grids, dens):
            if g.ndim != 1 or g.shape != p.shape or g.size < 2:
                raise ValueError("each grid/density pair must be 1-D arrays of equal length >= 2")
            if np.any(np.diff(g) <= 0):
                raise ValueError("tabulation grid must be strictly increasing")
            if np.any(p < 0) or not np.all(np.isfinite(p)):
                raise ValueError("tabulated density must be finite and nonnegative")
            cdf = np.concatenate([[0.0], np.cumsum(0.5 * (p[1:] + p[:-1]) * np.diff(g))])
            if abs(cdf[-1] - 1.0) > _NORM_TOL:
                raise ValueError(f"tabulated density integrates to {cdf[-1]:.8g}, expected 1")
            cdfs.append(cdf / cdf[-1])
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "densities", dens)
        object.__setattr__(self, "_cdfs", tuple(cdfs))

    @classmethod
    def from_values(cls, grid, values) -> "TabulatedFreq":
        """Normalize nonnegative ``values`` on ``grid`` into a 1-D shared table."""
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        total = np.trapezoid(values, grid)
        if not total > 0:
            raise ValueError("tabulated magnitude has zero mass")
        return cls((grid,), (values / total,))

    def _coord(self, i: int) -> int:
        return 0 if len(self.grids) == 1 else i

    def sample(self, rng, n, d):
        if len(self.grids) not in (1, d):
            raise ValueError(f"table has {len(self.grids)} coordinates, model wants {d}")
        u = rng.random((n, d))
        out = np.empty((n, d))
        for i in range(d):
            j = self._coord(i)
            out[:, i] = np.interp(u[:, i], self._cdfs[j], self.grids[j])
        return out

    def pdf(self, omega):
        omega = np.atleast_2d(omega)
        out = np.ones(omega.shape[0])
        for i in range(omega.shape[1]):
            j = self._coord(i)
            out *= np.interp(omega[:, i], self.grids[j], self.densities[j], left=0.0, right=0.0)
        return out


@dataclass(frozen=True)
class RfeModel:
    """Frequencies ``(D, d)``, phases ``(D,)`` and weights ``(D,)`` of an RFE."""

    freqs: np.ndarray
    phases: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        if freqs.ndim == 1:
            freqs = freqs[:, None]
        phases = np.asarray(self.phases, dtype=float).reshape(-1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        D = freqs.shape[0]
        if phases.shape != (D,) or weights.shape != (D,):
            raise ValueError(f"expected {D} phases and weights, got {phases.size} and {weights.size}")
        if np.any(phases < 0) or np.any(phases >= TWO_PI):
            raise ValueError("phases must lie in [0, 2*pi)")
        for name, arr in (("freqs", freqs), ("phases", phases), ("weights", weights)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.freqs.shape[1]

    @property
    def num_features(self) -> int:
        return self.freqs.shape[0]

    def with_weights(self, weights) -> "RfeModel":
        return replace(self, weights=np.array(weights, dtype=float))


@dataclass(frozen=True)
class Dataset:
    """Measurement points ``inputs`` (N, d) and values ``outputs`` (N,)."""

    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.inputs, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.outputs, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} inputs but {y.shape[0]} outputs")
        if y.shape[0] < 1:
            raise ValueError("dataset is empty")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "outputs", y)

    def __len__(self):
        return self.outputs.shape[0]


def sample_rfe(d: int, D: int, dist: FreqDistribution, seed: int) -> RfeModel:
    """Draw frequencies and phases for a zero-weight RFE.

    Frequencies and phases come from separate sub-streams of ``seed``.
    """
    if d < 1 or D < 1:
        raise ValueError(f"need d >= 1 and D >= 1, got d={d}, D={D}")
    freqs = dist.sample(substream(seed, "freqs"), D, d)
    # Generator.uniform can round up to the upper end; fold it back.
    phases = np.mod(substream(seed, "phases").uniform(0.0, TWO_PI, size=D), TWO_PI)
    return RfeModel(freqs, phases, np.zeros(D))


def _check_point(model: RfeModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != model.dim:
        raise ValueError(f"point has length {x.shape[0]}, model dimension is {model.dim}")
    return x


def regressor_row(model: RfeModel, x) -> np.ndarray:
    """Feature vector ``[cos(w_k . x + b_k)]_k``."""
    x = _check_point(model, x)
    return np.cos(model.freqs @ x + model.phases)


def features(model: RfeModel, X) -> np.ndarray:
    """Regressor matrix for the rows of ``X`` (shape ``(N, D)``)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if model.dim == 1 else X[None, :]
    if X.shape[1] != model.dim:
        raise ValueError(f"inputs have {X.shape[1]} columns, model dimension is {model.dim}")
    return np.cos(X @ model.freqs.T + model.phases)


def evaluate(model: RfeModel, x) -> float:
    return float(model.weights @ regressor_row(model, x))


def gradient(model: RfeModel, x) -> np.ndarray:
    x = _check_point(model, x)
    s = np.sin(model.freqs @ x + model.phases)
    return -(model.weights * s) @ model.freqs


def value_and_grad(model: RfeModel, x) -> tuple[float, np.ndarray]:
    """Surrogate value and gradient sharing one pass over the features."""
    x = _check_point(model, x)
    z = model.freqs @ x + model.phases
    c = model.weights
    return float(c @ np.cos(z)), -(c * np.sin(z)) @ model.freqs


def fit_batch(model: RfeModel, data: Dataset, lam: float) -> RfeModel:
    """Regularized least-squares weights ``(A^T A + lam I)^{-1} A^T y``.

    The normal equations are solved by Cholesky.  If rounding makes the
    regularized Gram matrix numerically indefinite (possible for tiny
    ``lam``), the equivalent augmented problem ``[A; sqrt(lam) I]`` is
    solved by orthogonal least squares instead.
    """
    if not lam > 0:
        raise ValueError(f"regularization must be positive, got {lam}")
    A = features(model, data.inputs)
    y = data.outputs
    G = A.T @ A
    G[np.diag_indices_from(G)] += lam
    try:
        factor = scipy.linalg.cho_factor(G, lower=True, check_finite=False)
        c = scipy.linalg.cho_solve(factor, A.T @ y, check_finite=False)
    except np.linalg.LinAlgError:
        D = model.num_features
        aug = np.vstack([A, np.sqrt(lam) * np.eye(D)])
        c = np.linalg.lstsq(aug, np.concatenate([y, np.zeros(D)]), rcond=None)[0]
    return model.with_weights(c)


def ridge_objective(model: RfeModel, data: Dataset, lam: float, weights=None) -> float:
    """``||y - A c||^2 + lam ||c||^2`` for ``weights`` (default: the model's)."""
    c = model.weights if weights is None else np.asarray(weights, dtype=float)
    r = data.outputs - features(model, data.inputs) @ c
    return float(r @ r + lam * c @ c)


def rmse(model: RfeModel, data: Dataset) -> float:
    r = data.outputs - features(model, data.inputs) @ model.weights
    return float(np.sqrt(np.mean(r**2)))


def as_model(freqs: Sequence, phases: Sequence, weights: Sequence) -> RfeModel:
    """Build a model from plain sequences; phases are wrapped into [0, 2*pi).

    ``freqs`` is ``(D, d)``; a flat sequence is read as ``d = 1``.
    """
    return RfeModel(np.asarray(freqs, dtype=float), np.mod(np.asarray(phases, dtype=float), TWO_PI), weights)
