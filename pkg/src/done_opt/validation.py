"""Named theory-validation suites shared by the CLI and the acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import theory

DRAWS = 100_000
# the origin plus four fixed points drawn once from U[-2, 2]
POINTS = (0.0, -1.3371, 0.4218, 0.8, 1.7092)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _instances():
    return [theory.gaussian_instance(), theory.gaussian_cosine_instance()]


def unbiasedness(draws: int = DRAWS, D: int = 10, seed: int = 0) -> list[Check]:
    """Real (frequency law p~) and complex estimators average to f(x) within 3 standard errors."""
    out = []
    for sf in _instances():
        for j, x in enumerate(POINTS):
            fx = float(sf.f(x))
            zr = theory.unbiasedness_z(theory.real_estimator_draws(sf, D, x, draws, seed + 10 * j), fx)
            zc = theory.unbiasedness_z(theory.complex_estimator_draws(sf, D, x, draws, seed + 10 * j + 1).real, fx)
            out.append(Check(f"unbiased real {sf.name} x={x}", zr <= 3.0, f"z={zr:.3f}"))
            out.append(Check(f"unbiased complex {sf.name} x={x}", zc <= 3.0, f"z={zc:.3f}"))
    return out


def complex_variance(draws: int = DRAWS, D: int = 4, seed: int = 100) -> list[Check]:
    """Monte-Carlo variance of the complex estimator against its closed form, 5% relative.

    Skips points where the closed form vanishes (the estimator is then
    deterministic and a relative comparison is meaningless).
    """
    out = []
    for sf in _instances():
        for j, x in enumerate(POINTS):
            exact = theory.complex_variance(sf, D, x)
            g = theory.complex_estimator_draws(sf, D, x, draws, seed + j)
            mc = float(np.mean(np.abs(g - float(sf.f(x))) ** 2))
            if exact <= 1e-12:
                out.append(Check(f"complex variance {sf.name} x={x}", mc <= 1e-12, f"degenerate: mc={mc:.3g}"))
                continue
            rel = abs(mc - exact) / exact
            out.append(Check(f"complex variance {sf.name} x={x}", rel <= 0.05, f"mc={mc:.6g} exact={exact:.6g} rel={rel:.4f}"))
    return out


def ordering(draws: int = DRAWS, D: int = 10, seed: int = 200) -> list[Check]:
    out = []
    for sf in _instances():
        for j, x in enumerate(POINTS):
            r = theory.second_moment_ordering_check(sf, x, D, draws, seed + 10 * j)
            detail = (
                f"E*[G^2]={r.second_moment_real_opt:.5g} E~[G^2]={r.second_moment_real_tilde:.5g} "
                f"E~|G~|^2={r.second_moment_complex_tilde:.5g}"
            )
            out.append(Check(f"sandwich optimal/tilde {sf.name} x={x}", r.sandwich_opt_vs_tilde and r.sufficient, detail))
            out.append(Check(f"sandwich complex/real {sf.name} x={x}", r.sandwich_complex_vs_real and r.sufficient, detail))
    return out


def norm_identity(rtol: float = 1e-4) -> list[Check]:
    """``int int c*^2 db dw = ((2pi)^d / pi) int f^2``."""
    out = []
    for sf in _instances():
        lhs = theory.ideal_weight_norm_sq(sf)
        rhs = (2 * np.pi) ** sf.d / np.pi * theory.function_norm_sq(sf)
        rel = abs(lhs - rhs) / abs(rhs)
        out.append(Check(f"norm identity {sf.name}", rel <= rtol, f"lhs={lhs:.12g} rhs={rhs:.12g} rel={rel:.2e}"))
    return out


def rmse_trend(seeds: int = 20) -> list[Check]:
    study = theory.real_vs_complex_rmse(seeds=seeds)
    real, cplx = study.real_median, study.complex_median
    decreasing = bool(np.all(np.diff(real) < 0))
    ratio = np.maximum(real / cplx, cplx / real)
    table = " ".join(f"D={D}:{r:.3g}/{c:.3g}" for D, r, c in zip(study.Ds, real, cplx))
    return [
        Check("real RFE RMSE decreasing in D", decreasing, table),
        Check("real vs complex RMSE within factor 3", bool(np.all(ratio <= 3.0)), f"max ratio {ratio.max():.3f}"),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "unbiasedness": unbiasedness,
    "variance": complex_variance,
    "ordering": ordering,
    "norm": norm_identity,
    "rmse": rmse_trend,
}


def run_suite(name: str, report: Callable[[Check], None] = lambda c: None) -> list[Check]:
    """Run one suite (or ``"all"``), calling ``report`` on each result as it arrives."""
    if name != "all" and name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; valid names: all, {', '.join(SUITES)}")
    names = list(SUITES) if name == "all" else [name]
    results = []
    for n in names:
        t0 = time.perf_counter()
        for c in SUITES[n]():
            report(c)
            results.append(c)
        report(Check(f"[{n}] finished", True, f"{time.perf_counter() - t0:.1f} s"))
    return results
