"""Projected-gradient L-BFGS on a box ``[lb, ub]^d``.

Trial points are projected onto the box, the quasi-Newton direction is
computed on the free variables only (those not held at a bound by the
gradient), and the curvature memory is dropped whenever that set changes.
Step lengths come from a backtracking Armijo search along the projected
path.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

ARMIJO_C1 = 1e-4
BACKTRACK = 0.5
MAX_BACKTRACKS = 30


class NonFiniteError(FloatingPointError):
    """Objective or gradient returned NaN/inf."""


@dataclass(frozen=True, eq=False)
class Box:
    """Bounds ``lb <= x <= ub`` in ``d`` dimensions.

    ``lb`` and ``ub`` are scalars (the cube ``[lb, ub]^d``) or per-coordinate
    sequences of length ``d``.
    """

    lb: object
    ub: object
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"box dimension must be positive, got {self.d}")
        lo = np.broadcast_to(np.asarray(self.lb, dtype=float), (self.d,)).copy()
        hi = np.broadcast_to(np.asarray(self.ub, dtype=float), (self.d,)).copy()
        if not np.all(lo < hi):
            raise ValueError(f"box needs lb < ub, got [{self.lb}, {self.ub}]")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def project(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def width(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True)
class SolverOptions:
    memory: int = 10
    max_iter: int = 100
    grad_tol: float = 1e-6


@dataclass
class SolverReport:
    minimizer: np.ndarray
    value: float
    iterations: int
    converged: bool
    grad_inf_norm: float
    evaluations: int = 0
    message: str = ""


def projected_gradient(x, g, box: Box) -> np.ndarray:
    return x - box.project(x - g)


def _two_loop(g, S, Y, free):
    q = g.copy()
    alphas = []
    for s, y in zip(reversed(S), reversed(Y)):
        s, y = s * free, y * free
        rho = 1.0 / (y @ s)
        alpha = rho * (s @ q)
        q -= alpha * y
        alphas.append((rho, alpha, s, y))
    s, y = S[-1] * free, Y[-1] * free
    q *= (s @ y) / (y @ y)
    for rho, alpha, s, y in reversed(alphas):
        q += (alpha - rho * (y @ q)) * s
    return q


def minimize(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x_init,
    box: Box,
    opts: SolverOptions = SolverOptions(),
) -> SolverReport:
    """Minimize ``fun`` (returning value and gradient) over ``box``.

    Parameters
    ----------
    fun : callable
        ``fun(x) -> (f, grad)``.
    x_init : array_like
        Starting point; must already lie in the box.
    box : Box
    opts : SolverOptions
        ``memory`` curvature pairs, ``max_iter`` outer iterations and the
        ``grad_tol`` threshold on the projected-gradient infinity norm.

    Returns
    -------
    SolverReport
        ``converged`` is true exactly when the projected-gradient infinity
        norm at the returned point is at most ``grad_tol``.

    Raises
    ------
    NonFiniteError
        If the objective or gradient is not finite at an evaluated point.
    """
    x = np.array(x_init, dtype=float).reshape(-1)
    if x.shape[0] != box.d:
        raise ValueError(f"start point has length {x.shape[0]}, box dimension is {box.d}")
    if not box.contains(x):
        raise ValueError("start point lies outside the box")

    nfev = 0

    def evaluate(z):
        nonlocal nfev
        nfev += 1
        f, g = fun(z)
        f = float(f)
        g = np.asarray(g, dtype=float)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite objective or gradient at x={z!r} (f={f})")
        return f, g

    f, g = evaluate(x)
    S: deque = deque(maxlen=opts.memory)
    Y: deque = deque(maxlen=opts.memory)
    prev_binding = None
    message = "max_iter reached"
    it = 0
    while it < opts.max_iter:
        pg = projected_gradient(x, g, box)
        if np.max(np.abs(pg)) <= opts.grad_tol:
            message = "projected gradient below tolerance"
            break
        it += 1
        binding = ((x <= box.lower) & (g > 0)) | ((x >= box.upper) & (g < 0))
        if prev_binding is not None and np.any(binding != prev_binding):
            S.clear()
            Y.clear()
        prev_binding = binding
        free = (~binding).astype(float)
        gf = g * free

        if S:
            d = -_two_loop(gf, S, Y, free) * free
            if d @ gf >= 0:
                S.clear()
                Y.clear()
        if not S:
            d = -gf
            step = min(1.0, 1.0 / np.linalg.norm(gf))
        else:
            step = 1.0

        accepted = False
        for _ in range(MAX_BACKTRACKS):
            xt = box.project(x + step * d)
            dx = xt - x
            if not np.any(dx):
                break
            ft, gt = evaluate(xt)
            if ft <= f + ARMIJO_C1 * (g @ dx):
                accepted = True
                break
            step *= BACKTRACK

        if not accepted:
            if S:
                S.clear()
                Y.clear()
                continue
            message = "line search failed"
            break

        yv = gt - g
        sy = dx @ yv
        if sy > 1e-10 * np.linalg.norm(dx) * np.linalg.norm(yv):
            S.append(dx)
            Y.append(yv)
        x, f, g = xt, ft, gt

    gnorm = float(np.max(np.abs(projected_gradient(x, g, box))))
    return SolverReport(
        minimizer=x,
        value=f,
        iterations=it,
        converged=gnorm <= opts.grad_tol,
        grad_inf_norm=gnorm,
        evaluations=nfev,
        message=message,
    )
