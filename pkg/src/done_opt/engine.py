"""The DONE loop: measure, update the RFE by RLS, minimize it, perturb."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import rls
from .lbfgsb import Box, SolverOptions, minimize
from .rfe import FreqDistribution, GaussianFreq, RfeModel, sample_rfe, value_and_grad
from .rng import substream

Objective = Callable[[np.ndarray], float]


class NonFiniteMeasurement(FloatingPointError):
    def __init__(self, n: int, x: np.ndarray, y: float):
        super().__init__(f"measurement {n} at x={np.array2string(x, precision=17)} returned {y}")
        self.n = n
        self.x = x
        self.y = y


@dataclass(frozen=True)
class DoneConfig:
    """Hyper-parameters of one DONE run.

    ``sigma_perturb`` perturbs the inner-solver start point, ``sigma_explore``
    the next measurement point.
    """

    d: int
    D: int
    lam: float
    box: Box
    N: int
    sigma_perturb: float = 0.01
    sigma_explore: float = 0.01
    freq_dist: FreqDistribution = field(default_factory=lambda: GaussianFreq(1.0))
    seed: int = 0
    solver_opts: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.d < 1 or self.D < 1:
            raise ValueError("d and D must be positive")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.sigma_perturb < 0 or self.sigma_explore < 0:
            raise ValueError("perturbation std-devs must be nonnegative")
        if self.N < 1:
            raise ValueError(f"iteration budget must be >= 1, got {self.N}")
        if self.box.d != self.d:
            raise ValueError(f"box dimension {self.box.d} != d={self.d}")


@dataclass(frozen=True)
class IterationRecord:
    n: int
    x: np.ndarray
    y: float
    xhat: np.ndarray
    ghat: float
    t_update: float
    t_solve: float


@dataclass
class RunTrace:
    records: list = field(default_factory=list)
    model: Optional[RfeModel] = None

    def __len__(self):
        return len(self.records)

    @property
    def final_xhat(self) -> np.ndarray:
        return self.records[-1].xhat

    @property
    def best_index(self) -> int:
        """Index of the record with the lowest surrogate minimum."""
        return int(np.argmin([r.ghat for r in self.records]))

    @property
    def best_xhat(self) -> np.ndarray:
        return self.records[self.best_index].xhat


class Done:
    """Stepwise DONE optimizer.

    ``step(objective)`` runs one full iteration at the pending measurement
    point and returns its record.  :func:`run` drives it for ``cfg.N``
    iterations; using the class directly lets callers inspect the
    surrogate between iterations.
    """

    def __init__(self, cfg: DoneConfig, x1):
        self.cfg = cfg
        x1 = np.array(x1, dtype=float).reshape(-1)
        if x1.shape[0] != cfg.d:
            raise ValueError(f"x1 has length {x1.shape[0]}, expected {cfg.d}")
        if not cfg.box.contains(x1):
            raise ValueError("x1 lies outside the box")
        base = sample_rfe(cfg.d, cfg.D, cfg.freq_dist, cfg.seed)
        self._freqs = base.freqs
        self._phases = base.phases
        self.state = rls.init(cfg.D, cfg.lam)
        self.x_next = x1
        self.n = 0
        self._zeta_rng = substream(cfg.seed, "zeta")
        self._xi_rng = substream(cfg.seed, "xi")

    @property
    def model(self) -> RfeModel:
        return RfeModel(self._freqs, self._phases, self.state.weights)

    def step(self, objective: Objective) -> IterationRecord:
        cfg, box = self.cfg, self.cfg.box
        self.n += 1
        x = self.x_next
        y = float(objective(x.copy()))
        if not np.isfinite(y):
            raise NonFiniteMeasurement(self.n, x, y)

        t0 = time.perf_counter()
        a = np.cos(self._freqs @ x + self._phases)
        self.state = rls.update(self.state, a, y)
        t1 = time.perf_counter()

        zeta = self._zeta_rng.normal(0.0, 1.0, cfg.d) * cfg.sigma_perturb
        x_init = box.project(x + zeta)
        model = self.model
        report = minimize(lambda z: value_and_grad(model, z), x_init, box, cfg.solver_opts)
        t2 = time.perf_counter()

        xi = self._xi_rng.normal(0.0, 1.0, cfg.d) * cfg.sigma_explore
        self.x_next = box.project(report.minimizer + xi)
        return IterationRecord(self.n, x, y, report.minimizer, report.value, t1 - t0, t2 - t1)


def run(
    objective: Objective,
    x1,
    cfg: DoneConfig,
    observer: Optional[Callable[[IterationRecord], None]] = None,
) -> RunTrace:
    """Run ``cfg.N`` DONE iterations starting with a measurement at ``x1``."""
    opt = Done(cfg, x1)
    trace = RunTrace()
    for _ in range(cfg.N):
        rec = opt.step(objective)
        trace.records.append(rec)
        if observer is not None:
            observer(rec)
    trace.model = opt.model
    return trace


def _sum_of_squares(x):
    return float(x @ x)


def per_iteration_cost_probe(
    cfg: DoneConfig,
    checkpoints: Sequence[int],
    window: int = 1000,
    metric: str = "update",
    objective: Objective = _sum_of_squares,
) -> list[tuple[int, float]]:
    """Mean wall time per iteration over ``window`` iterations from each checkpoint.

    ``metric`` selects the RLS update time (``"update"``), the inner solve
    (``"solve"``) or both (``"iteration"``).  The run length is extended
    past ``cfg.N`` as needed to cover every window.
    """
    if not checkpoints:
        raise ValueError("need at least one checkpoint")
    if any(c < 1 for c in checkpoints):
        raise ValueError("checkpoints are 1-based iteration numbers")
    if metric not in ("update", "solve", "iteration"):
        raise ValueError(f"unknown metric {metric!r}")
    last = max(checkpoints) + window - 1
    opt = Done(cfg, cfg.box.project(np.zeros(cfg.d)))
    times = np.empty(last)
    for i in range(last):
        rec = opt.step(objective)
        times[i] = {
            "update": rec.t_update,
            "solve": rec.t_solve,
            "iteration": rec.t_update + rec.t_solve,
        }[metric]
    return [(int(c), float(np.mean(times[c - 1 : c - 1 + window]))) for c in checkpoints]
