"""RMSE-versus-n convergence study over randomized samplers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrands import integrand_library
from .rqmc import SAMPLER_PRESETS, baker_transform, make_sampler

__all__ = ["StudyConfig", "rmse_curve", "fit_slope", "run_study"]


@dataclass
class StudyConfig:
    integrands: tuple[str, ...] = ("simple-d1", "simple-d2")
    samplers: tuple[str, ...] = ("iid", "lattice", "dnet-lms", "dnet-ho")
    m_min: int = 4
    m_max: int = 12
    randomizations: int = 100
    seed: int = 7
    threads: int = 1


def rmse_curve(integrand: str, sampler: str, ms, randomizations: int = 100, seed: int = 7,
               threads: int = 1) -> np.ndarray:
    """RMSE of the equal-weight estimate at ``n = 2**m`` for each ``m``.

    Points come in radical-inverse order, so every ``n`` reuses a prefix of
    one run of ``2**max(ms)`` points.
    """
    f = integrand_library(integrand)
    if f.mean is None:
        raise ValueError(f"{integrand} has no exact mean")
    spec = SAMPLER_PRESETS[sampler]
    gen = make_sampler(spec, f.d, randomizations, seed, threads)
    x = gen.points(0, 2 ** max(ms))
    if spec.baker:
        x = baker_transform(x)
    csum = np.cumsum(f(x), axis=1)
    out = []
    for m in ms:
        est = csum[:, 2**m - 1] / 2**m
        out.append(np.sqrt(np.mean((est - f.mean) ** 2)))
    return np.array(out)


def fit_slope(ns, rmse) -> float:
    """Least-squares slope of ``log rmse`` against ``log n``."""
    return float(np.polyfit(np.log(ns), np.log(rmse), 1)[0])


def run_study(cfg: StudyConfig) -> tuple[list[dict], dict]:
    """Rows ``(integrand, sampler, n, rmse)`` and a slope per (integrand, sampler)."""
    ms = list(range(cfg.m_min, cfg.m_max + 1))
    ns = [2**m for m in ms]
    rows, slopes = [], {}
    for name in cfg.integrands:
        for sampler in cfg.samplers:
            curve = rmse_curve(name, sampler, ms, cfg.randomizations, cfg.seed, cfg.threads)
            rows += [{"integrand": name, "sampler": sampler, "n": n, "rmse": float(v)} for n, v in zip(ns, curve)]
            slopes[(name, sampler)] = fit_slope(ns, curve)
    return rows, slopes
