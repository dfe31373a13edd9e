"""Benchmark objectives: six-hump camelback and a three-link planar robot arm."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .lbfgsb import Box
from .rng import substream

# global minimizers of the camelback function and the minimum value
CAMELBACK_MINIMIZERS = np.array([[0.0898420131, -0.7126564030], [-0.0898420131, 0.7126564030]])
CAMELBACK_MIN = -1.0316284535
CAMELBACK_BOX = Box([-2.0, -1.0], [2.0, 1.0], 2)

ROBOT_LINKS = np.array([8.625, 8.625, 6.125])
ROBOT_TARGET = np.array([6.96, 12.66])
ROBOT_STEPS = 50
GRAVITY_TERM = 9.8 * 0.05
DEG = np.pi / 180.0


def camelback(x) -> float:
    x1, x2 = np.asarray(x, dtype=float)
    return float((4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2 + x1 * x2 + (-4.0 + 4.0 * x2**2) * x2**2)


def camelback_grid(X1, X2):
    """Vectorized camelback on coordinate arrays."""
    return (4.0 - 2.1 * X1**2 + X1**4 / 3.0) * X1**2 + X1 * X2 + (-4.0 + 4.0 * X2**2) * X2**2


def camelback_distance(x) -> float:
    """Distance to the nearest global minimizer."""
    return float(np.min(np.linalg.norm(CAMELBACK_MINIMIZERS - np.asarray(x, dtype=float), axis=1)))


def robot_arm_trajectory(u) -> tuple[np.ndarray, np.ndarray]:
    """Simulate the arm; returns angles ``(51, 3)`` in degrees and tip ``(51, 2)``.

    ``u`` holds 150 controls ordered link-major: ``u[0:50]`` drives link 1
    over steps 1..50, ``u[50:100]`` link 2, ``u[100:150]`` link 3.  Controls
    are clipped to [-1, 1].
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != 3 * ROBOT_STEPS:
        raise ValueError(f"robot arm expects {3 * ROBOT_STEPS} controls, got {u.shape[0]}")
    u = np.clip(u, -1.0, 1.0).reshape(3, ROBOT_STEPS)
    alpha = np.zeros((ROBOT_STEPS + 1, 3))
    v = np.zeros(3)
    for k in range(1, ROBOT_STEPS + 1):
        acc = u[:, k - 1] + np.sin(DEG * np.cumsum(alpha[k - 1])) * GRAVITY_TERM
        v = v + acc
        alpha[k] = alpha[k - 1] + v
    cum = np.pi / 2 + DEG * np.cumsum(alpha, axis=1)
    tip = np.column_stack([np.cos(cum) @ ROBOT_LINKS, np.sin(cum) @ ROBOT_LINKS])
    return alpha, tip


def robot_arm_rollout(u) -> float:
    """Distance from the tip to the target after 50 steps."""
    _, tip = robot_arm_trajectory(u)
    return float(np.linalg.norm(tip[-1] - ROBOT_TARGET))


def with_noise(objective: Callable, sigma: float, seed: int) -> Callable:
    """Wrap ``objective`` with additive i.i.d. N(0, sigma^2) noise."""
    if sigma < 0:
        raise ValueError(f"noise std-dev must be nonnegative, got {sigma}")
    if sigma == 0:
        return objective
    rng = substream(seed, "noise")

    def noisy(x):
        return objective(x) + sigma * rng.standard_normal()

    return noisy


@dataclass(frozen=True)
class Benchmark:
    name: str
    d: int
    box: Box
    objective: Callable
    known_optima: Optional[list] = None
    distance: Optional[Callable] = None
    #: draws the starting point from a generator
    initial_point: Callable = field(default=None)


def _uniform_start(box: Box):
    return lambda rng: rng.uniform(box.lower, box.upper)


BENCHMARKS = {
    "camelback": Benchmark(
        name="camelback",
        d=2,
        box=CAMELBACK_BOX,
        objective=camelback,
        known_optima=[(m, CAMELBACK_MIN) for m in CAMELBACK_MINIMIZERS],
        distance=camelback_distance,
        initial_point=_uniform_start(CAMELBACK_BOX),
    ),
    "robot_arm": Benchmark(
        name="robot_arm",
        d=3 * ROBOT_STEPS,
        box=Box(-1.0, 1.0, 3 * ROBOT_STEPS),
        objective=robot_arm_rollout,
        known_optima=None,
        distance=None,
        initial_point=_uniform_start(Box(-1.0, 1.0, 3 * ROBOT_STEPS)),
    ),
}


def get_benchmark(name: str) -> Benchmark:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; valid names: {', '.join(sorted(BENCHMARKS))}") from None
