"""Seeded DONE experiments on the shipped benchmarks, written as CSV traces and a JSON summary.

Config schema (JSON object, every key optional except ``benchmark``)::

    benchmark      "camelback" | "robot_arm"
    D, N           positive ints
    lam            positive float
    freq_sigma     std-dev of the Gaussian frequency law
    sigma_perturb  inner-start perturbation
    sigma_explore  next-point perturbation
    noise          std-dev of additive measurement noise (default 0)
    seed           base seed; repetition r uses seed + r
    reps           number of repetitions
    out            output directory
    workers        parallel processes for repetitions (default 1)
    solver         {"memory": int, "max_iter": int, "grad_tol": float}

Missing keys take per-benchmark defaults from :data:`BENCHMARK_DEFAULTS`.
"""

from __future__ import annotations

import csv
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .benchmarks import BENCHMARKS, get_benchmark, with_noise
from .engine import DoneConfig, IterationRecord, RunTrace, run
from .lbfgsb import SolverOptions
from .rfe import GaussianFreq
from .rng import substream


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# robot_arm: low-frequency, heavily regularized surrogate for D=500.  The
# isotropic unit-variance law with lam=1e-3 needs several thousand features
# in 150 dimensions; see configs/robot_arm_full.json.
BENCHMARK_DEFAULTS = {
    "camelback": dict(D=500, N=100, lam=1e-10, freq_sigma=10.0, sigma_perturb=0.01, sigma_explore=0.01),
    "robot_arm": dict(D=500, N=2000, lam=10.0, freq_sigma=0.03, sigma_perturb=0.1, sigma_explore=0.1),
}


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: str
    D: int
    N: int
    lam: float
    freq_sigma: float
    sigma_perturb: float
    sigma_explore: float
    noise: float = 0.0
    seed: int = 0
    reps: int = 1
    out: str = "runs"
    workers: int = 1
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(f"unknown benchmark {self.benchmark!r}; valid names: {', '.join(sorted(BENCHMARKS))}")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if self.noise < 0:
            raise ConfigError(f"noise must be nonnegative, got {self.noise}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.freq_sigma > 0:
            raise ConfigError(f"freq_sigma must be positive, got {self.freq_sigma}")
        unknown = set(self.solver) - {f.name for f in fields(SolverOptions)}
        if unknown:
            raise ConfigError(f"unknown solver options: {', '.join(sorted(unknown))}")
        try:
            self.done_config(self.seed)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "benchmark" not in raw:
            raise ConfigError("config needs a 'benchmark' key")
        name = raw["benchmark"]
        if name not in BENCHMARK_DEFAULTS:
            raise ConfigError(f"unknown benchmark {name!r}; valid names: {', '.join(sorted(BENCHMARKS))}")
        merged = {**BENCHMARK_DEFAULTS[name], **raw}
        for key in ("D", "N", "seed", "reps", "workers"):
            if key in merged and (isinstance(merged[key], bool) or not isinstance(merged[key], int)):
                raise ConfigError(f"{key} must be an integer, got {merged[key]!r}")
        for key in ("lam", "freq_sigma", "sigma_perturb", "sigma_explore", "noise"):
            if key in merged and (isinstance(merged[key], bool) or not isinstance(merged[key], (int, float))):
                raise ConfigError(f"{key} must be a number, got {merged[key]!r}")
        return cls(**merged)

    @classmethod
    def load(cls, path, overrides: Optional[dict] = None) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(raw)

    def done_config(self, seed: int) -> DoneConfig:
        bench = get_benchmark(self.benchmark)
        return DoneConfig(
            d=bench.d,
            D=self.D,
            lam=self.lam,
            box=bench.box,
            N=self.N,
            sigma_perturb=self.sigma_perturb,
            sigma_explore=self.sigma_explore,
            freq_dist=GaussianFreq(self.freq_sigma),
            seed=seed,
            solver_opts=SolverOptions(**self.solver),
        )


def _fmt(v) -> str:
    return format(float(v), ".17g")


def trace_header(d: int) -> list[str]:
    return (
        ["n"]
        + [f"x{i}" for i in range(1, d + 1)]
        + ["y"]
        + [f"xhat{i}" for i in range(1, d + 1)]
        + ["ghat", "t_update_s", "t_solve_s"]
    )


def trace_row(rec: IterationRecord) -> list[str]:
    return [str(rec.n), *map(_fmt, rec.x), _fmt(rec.y), *map(_fmt, rec.xhat), _fmt(rec.ghat), _fmt(rec.t_update), _fmt(rec.t_solve)]


def write_trace(path: Path, trace: RunTrace, d: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(d))
        for rec in trace.records:
            w.writerow(trace_row(rec))


def read_trace(path) -> dict[str, np.ndarray]:
    """Columns of a trace CSV as float arrays keyed by header name."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
    return {name: body[:, i] for i, name in enumerate(header)}


def initial_point(cfg: ExperimentConfig, seed: int) -> np.ndarray:
    return get_benchmark(cfg.benchmark).initial_point(substream(seed, "init"))


def run_one(cfg: ExperimentConfig, rep: int, observer: Optional[Callable] = None) -> dict:
    """One repetition: run, write its CSV, return its summary entry."""
    seed = cfg.seed + rep
    bench = get_benchmark(cfg.benchmark)
    x1 = initial_point(cfg, seed)
    objective = with_noise(bench.objective, cfg.noise, seed)
    trace = run(objective, x1, cfg.done_config(seed), observer)
    path = Path(cfg.out) / f"{cfg.benchmark}_seed{seed}.csv"
    write_trace(path, trace, bench.d)

    final = trace.final_xhat
    t_up = [r.t_update for r in trace.records]
    t_so = [r.t_solve for r in trace.records]
    entry = {
        "seed": seed,
        "csv": path.name,
        "final_xhat": final.tolist(),
        "final_value": bench.objective(final),
        "initial_value": bench.objective(x1),
        "best_ghat_index": trace.best_index + 1,
        "best_xhat": trace.best_xhat.tolist(),
        "t_update_mean_s": float(np.mean(t_up)),
        "t_solve_mean_s": float(np.mean(t_so)),
        "t_total_s": float(np.sum(t_up) + np.sum(t_so)),
    }
    if bench.distance is not None:
        entry["final_distance"] = bench.distance(final)
        entry["initial_distance"] = bench.distance(x1)
    return entry


def _median(entries, key):
    vals = [e[key] for e in entries if key in e]
    return statistics.median(vals) if vals else None


def run_experiment(cfg: ExperimentConfig, observer: Optional[Callable] = None) -> dict:
    """Run every repetition and write ``summary.json`` next to the traces.

    ``observer(rep, record)`` is called after each iteration (serial runs only).
    """
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.workers > 1 and cfg.reps > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(run_one, [cfg] * cfg.reps, range(cfg.reps)))
    else:
        runs = []
        for rep in range(cfg.reps):
            obs = None if observer is None else (lambda rec, rep=rep: observer(rep, rec))
            runs.append(run_one(cfg, rep, obs))
    summary = {
        "config": asdict(cfg),
        "runs": runs,
        "median_final_value": _median(runs, "final_value"),
        "median_initial_value": _median(runs, "initial_value"),
        "median_final_distance": _median(runs, "final_distance"),
        "timing": {
            "median_t_update_mean_s": _median(runs, "t_update_mean_s"),
            "median_t_solve_mean_s": _median(runs, "t_solve_mean_s"),
            "median_t_total_s": _median(runs, "t_total_s"),
        },
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
