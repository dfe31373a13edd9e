"""Online derivative-free optimization with random Fourier expansion surrogates."""

from .benchmarks import BENCHMARKS, camelback, get_benchmark, robot_arm_rollout, with_noise
from .engine import Done, DoneConfig, IterationRecord, NonFiniteMeasurement, RunTrace, per_iteration_cost_probe, run
from .lbfgsb import Box, NonFiniteError, SolverOptions, SolverReport, minimize
from .rfe import Dataset, GaussianFreq, RfeModel, TabulatedFreq, evaluate, fit_batch, gradient, sample_rfe

__all__ = [
    "BENCHMARKS",
    "Box",
    "Dataset",
    "Done",
    "DoneConfig",
    "GaussianFreq",
    "IterationRecord",
    "NonFiniteError",
    "NonFiniteMeasurement",
    "RfeModel",
    "RunTrace",
    "SolverOptions",
    "SolverReport",
    "TabulatedFreq",
    "camelback",
    "evaluate",
    "fit_batch",
    "get_benchmark",
    "gradient",
    "minimize",
    "per_iteration_cost_probe",
    "robot_arm_rollout",
    "run",
    "sample_rfe",
    "with_noise",
]
