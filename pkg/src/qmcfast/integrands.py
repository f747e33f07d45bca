"""Test integrands on ``[0, 1]^d`` with exact means."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import e, factorial, sin
from typing import Callable

import numpy as np

__all__ = ["Integrand", "CATALOG", "integrand_library", "corner_peak_mean", "oscillatory_mean", "g_function_mean"]


@dataclass(frozen=True)
class Integrand:
    """Vectorized integrand ``f: (..., d) -> (...)`` with an optional exact mean."""

    name: str
    d: int
    f: Callable[[np.ndarray], np.ndarray]
    mean: float | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.d:
            raise ValueError(f"{self.name} has d={self.d}, points have d={x.shape[-1]}")
        return self.f(x)


def g_function_coefficients(d: int) -> np.ndarray:
    return (np.arange(1, d + 1) - 2) / 2


def g_function_mean(a: np.ndarray) -> float:
    return float(np.prod((1 - a) / (1 + a)))


def oscillatory_coefficients(d: int) -> np.ndarray:
    ct = np.exp(np.arange(1, d + 1) * np.log(1e-8) / d)
    return 4.5 * ct / ct.sum()


def oscillatory_mean(c: np.ndarray) -> float:
    # integral of exp(i c.x) factorizes; f is its real part
    return float(np.real(np.prod((np.exp(1j * c) - 1) / (1j * c))))


def corner_peak_coefficients(d: int) -> np.ndarray:
    ct = 1.0 / np.arange(1, d + 1) ** 2
    return 0.25 * ct / ct.sum()


def corner_peak_mean(c: np.ndarray) -> float:
    """Exact mean of ``(1 + c.x)**-(d+1)`` by inclusion-exclusion over cube vertices."""
    d = len(c)
    total = sum((-1) ** sum(v) / (1 + np.dot(v, c)) for v in product((0, 1), repeat=d))
    return float(total / (factorial(d) * np.prod(c)))


def _simple_d1(x):
    return x[..., 0] * np.exp(x[..., 0]) - 1


def _simple_d2(x):
    return x[..., 1] * np.exp(x[..., 0] * x[..., 1]) / (e - 2) - 1


def _oakley(x):
    t = (x - 0.5) / 50
    return 5 + t[..., 0] + t[..., 1] + 2 * np.cos(t[..., 0]) + 2 * np.cos(t[..., 1])


CATALOG = ("simple-d1", "simple-d2", "oakley", "g-function", "oscillatory", "corner-peak")
_FIXED_D = {"simple-d1": 1, "simple-d2": 2, "oakley": 2}
_DEFAULT_D = {"g-function": 3, "oscillatory": 3, "corner-peak": 3}


def integrand_library(name: str, d: int | None = None) -> Integrand:
    """Catalog integrand by name.

    ``simple-d1``, ``simple-d2`` and ``oakley`` have fixed dimension; the
    G-function and the two Genz families accept any ``d`` (default 3) and
    build their coefficients from it.
    """
    if name not in CATALOG:
        raise ValueError(f"unknown integrand {name!r}; choose from {CATALOG}")
    if name in _FIXED_D:
        if d is not None and d != _FIXED_D[name]:
            raise ValueError(f"{name} is defined for d={_FIXED_D[name]} only")
        d = _FIXED_D[name]
    d = _DEFAULT_D[name] if d is None else d
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if name == "simple-d1":
        return Integrand(name, 1, _simple_d1, 0.0)
    if name == "simple-d2":
        return Integrand(name, 2, _simple_d2, 0.0)
    if name == "oakley":
        return Integrand(name, 2, _oakley, 5 + 400 * sin(0.01))
    if name == "g-function":
        a = g_function_coefficients(d)
        return Integrand(name, d, lambda x: np.prod((np.abs(4 * x - 2) - a) / (1 + a), axis=-1),
                         g_function_mean(a), {"a": a})
    if name == "oscillatory":
        c = oscillatory_coefficients(d)
        return Integrand(name, d, lambda x: np.cos(-(x @ c)), oscillatory_mean(c), {"c": c})
    c = corner_peak_coefficients(d)
    return Integrand(name, d, lambda x: (1 + x @ c) ** (-(d + 1)), corner_peak_mean(c), {"c": c})
