"""Square-root (inverse QR) recursive least squares.

The state carries the weight vector ``c`` and a lower-triangular factor
``L`` with ``L L^T = P = (A^T A + lam I)^{-1}``.  A measurement ``(a, y)``
rotates the pre-array::

    [ 1   a L ]          [ gamma^{-1/2}          0   ]
    [ 0    L  ] Theta =  [ g gamma^{-1/2}   L_new  ]

with Givens rotations that fold each entry of ``a L`` (last column first)
into the top-left corner.  Processing columns right to left keeps ``L_new``
lower triangular, and every rotation has a positive cosine, so the
post-array diagonal stays positive.

The rotation angles telescope: after folding columns ``j..D-1`` the corner
holds ``x_j = sqrt(1 + sum_{k>=j} u_k^2)`` (``u = a L``), so ``cos_j =
x_{j+1}/x_j`` and ``sin_j = u_j/x_j``, and the running first column is
``W[:, j+1] / x_{j+1}`` with ``W[:, j] = sum_{k>=j} u_k L[:, k]``.
:func:`update` evaluates the whole rotation sequence this way with
vectorized O(D^2) array operations; :func:`update_givens` applies the same
rotations one at a time and serves as the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

DIAG_FLOOR = 1e-150


@dataclass(frozen=True)
class RlsState:
    weights: np.ndarray
    sqrt_cov: np.ndarray
    lam: float
    n: int = 0
    gamma: float = 1.0
    #: set once a diagonal entry of ``sqrt_cov`` had to be clamped at DIAG_FLOOR
    floored: bool = False

    @property
    def num_features(self) -> int:
        return self.weights.shape[0]

    @property
    def cov(self) -> np.ndarray:
        return self.sqrt_cov @ self.sqrt_cov.T


def init(D: int, lam: float) -> RlsState:
    """Zero weights and ``sqrt_cov = lam^{-1/2} I``."""
    if D < 1:
        raise ValueError(f"need D >= 1, got {D}")
    if not lam > 0 or not np.isfinite(lam):
        raise ValueError(f"regularization must be positive and finite, got {lam}")
    return RlsState(np.zeros(D), np.eye(D) / np.sqrt(lam), float(lam))


def _check_row(state: RlsState, a) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape[0] != state.num_features:
        raise ValueError(f"regressor has length {a.shape[0]}, state has {state.num_features} features")
    return a


def predict_residual(state: RlsState, a, y: float) -> float:
    """Innovation ``y - a . c``."""
    a = _check_row(state, a)
    return float(y - a @ state.weights)


def _finish(state: RlsState, a, y, L_new, g, gamma) -> RlsState:
    floored = state.floored
    diag = np.diagonal(L_new)
    if np.any(diag < DIAG_FLOOR):
        idx = np.flatnonzero(diag < DIAG_FLOOR)
        L_new[idx, idx] = DIAG_FLOOR
        floored = True
    c = state.weights + g * (y - a @ state.weights)
    return replace(state, weights=c, sqrt_cov=L_new, n=state.n + 1, gamma=gamma, floored=floored)


def update(state: RlsState, a, y: float) -> RlsState:
    """Fold one measurement into the state; O(D^2)."""
    a = _check_row(state, a)
    L = state.sqrt_cov
    u = a @ L
    # x[j] = sqrt(1 + sum_{k>=j} u_k^2), x[D] = 1
    x = np.sqrt(1.0 + np.concatenate([np.cumsum((u * u)[::-1])[::-1], [0.0]]))
    # W[:, j] = sum_{k>=j} u_k L[:, k], padded with a zero column at D
    W = np.zeros((L.shape[0], L.shape[1] + 1))
    np.cumsum((L * u)[:, ::-1], axis=1, out=W[:, -2::-1])
    cos = x[1:] / x[:-1]
    sin_over_next = u / (x[:-1] * x[1:])
    L_new = L * cos - W[:, 1:] * sin_over_next
    # entries above the diagonal are sums of exact zeros; keep them exactly zero
    L_new = np.tril(L_new)
    gamma = 1.0 / (x[0] * x[0])
    g = W[:, 0] * gamma
    return _finish(state, a, y, L_new, g, gamma)


def update_givens(state: RlsState, a, y: float) -> RlsState:
    """Reference update applying the Givens rotations one by one."""
    a = _check_row(state, a)
    L = state.sqrt_cov.copy()
    D = L.shape[0]
    top = 1.0
    first = np.zeros(D)
    u = a @ L
    for j in range(D - 1, -1, -1):
        r = np.hypot(top, u[j])
        c, s = top / r, u[j] / r
        col = L[:, j].copy()
        L[:, j] = c * col - s * first
        first = c * first + s * col
        top = r
    gamma = 1.0 / (top * top)
    g = first / top
    return _finish(state, a, y, L, g, gamma)


def batch_weights(A, y, lam: float) -> np.ndarray:
    """Closed-form ``(A^T A + lam I)^{-1} A^T y`` (Cholesky), for cross-checks."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    G = A.T @ A + lam * np.eye(A.shape[1])
    Lc = np.linalg.cholesky(G)
    z = np.linalg.solve(Lc, A.T @ np.asarray(y, dtype=float))
    return np.linalg.solve(Lc.T, z)
