"""Shift-invariant Bernoulli kernels and digitally-shift-invariant Walsh kernels.

One-dimensional pieces are mean-zero; the ``d``-dimensional kernel is

    K(x, x') = gamma * prod_j (1 + eta_j K_{alpha_j}(x_j, x'_j))

or, with subset weights, ``gamma * sum_u eta_u prod_{j in u} K_{alpha_j}``.

Walsh kernels act on binary digits, so their inputs are handled as packed
``t_max``-bit words (:class:`DyadicPoint`).  Digit ``k`` after the binary
point (1-based) is bit ``t_max - k`` of the word, and the digital difference
of two points is the XOR of their words.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi

import numpy as np

from .digits import bit_length_array
from .dnet import PrecisionError

__all__ = [
    "KernelSpec",
    "DyadicPoint",
    "SubsetSizeError",
    "bernoulli_even",
    "si_kernel_1d",
    "walsh",
    "mu_alpha",
    "mu_alpha_array",
    "dsi_kernel_1d",
    "dsi_kernel_series",
    "dsi_kernel_order1",
    "kernel_eval",
    "kernel_column",
    "SERIES_K_MAX",
]

SERIES_K_MAX = 2**20
SUBSET_D_MAX = 10
_SI_ORDERS = (1, 2, 3)
_DSI_ORDERS = (1, 2, 3, 4)


class SubsetSizeError(ValueError):
    """Subset weights requested for more dimensions than can be enumerated."""


@dataclass(frozen=True)
class KernelSpec:
    """Weighted product (or subset-weighted) kernel on ``[0, 1)^d``.

    Parameters
    ----------
    family : {"si-bernoulli", "dsi-walsh"}
    alphas : tuple of int
        Smoothness per dimension; its length fixes ``d``.
    gamma : float
        Global scale.
    etas : tuple of float, optional
        Product weights, default all ones.
    subset_weights : tuple of float, optional
        ``2**d`` weights indexed by bitmask (bit ``j`` set means ``j`` is in
        the subset).  Replaces the product form when given.
    """

    family: str
    alphas: tuple[int, ...]
    gamma: float = 1.0
    etas: tuple[float, ...] | None = None
    subset_weights: tuple[float, ...] | None = None

    def __post_init__(self):
        alphas = tuple(int(a) for a in np.atleast_1d(self.alphas))
        object.__setattr__(self, "alphas", alphas)
        allowed = {"si-bernoulli": _SI_ORDERS, "dsi-walsh": _DSI_ORDERS}.get(self.family)
        if allowed is None:
            raise ValueError(f"unknown kernel family {self.family!r}")
        bad = [a for a in alphas if a not in allowed]
        if bad:
            raise ValueError(f"{self.family} supports smoothness {allowed}, got {bad}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        etas = (1.0,) * len(alphas) if self.etas is None else tuple(float(e) for e in np.atleast_1d(self.etas))
        if len(etas) != len(alphas):
            raise ValueError(f"{len(etas)} product weights for d={len(alphas)}")
        if any(e < 0 for e in etas):
            raise ValueError("product weights must be >= 0")
        object.__setattr__(self, "etas", etas)
        if self.subset_weights is not None:
            if self.d > SUBSET_D_MAX:
                raise SubsetSizeError(f"subset weights need d <= {SUBSET_D_MAX}, got d={self.d}")
            sw = tuple(float(w) for w in self.subset_weights)
            if len(sw) != 2**self.d:
                raise ValueError(f"expected {2**self.d} subset weights, got {len(sw)}")
            if any(w < 0 for w in sw):
                raise ValueError("subset weights must be >= 0")
            object.__setattr__(self, "subset_weights", sw)

    @property
    def d(self) -> int:
        return len(self.alphas)

    @classmethod
    def uniform(cls, family: str, d: int, alpha: int, gamma: float = 1.0, eta: float = 1.0) -> "KernelSpec":
        return cls(family, (alpha,) * d, gamma, (eta,) * d)

    @classmethod
    def product_subsets(cls, family: str, alphas, gamma: float = 1.0, etas=None) -> "KernelSpec":
        """Subset-weight form whose weights are products of ``etas``."""
        d = len(alphas)
        etas = np.ones(d) if etas is None else np.asarray(etas, dtype=float)
        sw = [float(np.prod(etas[[j for j in range(d) if u >> j & 1]])) for u in range(2**d)]
        return cls(family, tuple(alphas), gamma, tuple(etas), tuple(sw))

    @property
    def constant_weight(self) -> float:
        """Weight of the empty subset, so the kernel's mean is ``gamma * constant_weight``."""
        return 1.0 if self.subset_weights is None else self.subset_weights[0]

    def to_dict(self) -> dict:
        out = {"family": self.family, "alphas": list(self.alphas), "gamma": self.gamma, "etas": list(self.etas)}
        if self.subset_weights is not None:
            out["subset_weights"] = list(self.subset_weights)
        return out

    @classmethod
    def from_dict(cls, cfg: dict) -> "KernelSpec":
        sw = cfg.get("subset_weights")
        return cls(cfg["family"], tuple(cfg["alphas"]), float(cfg.get("gamma", 1.0)),
                   tuple(cfg["etas"]) if cfg.get("etas") is not None else None,
                   tuple(sw) if sw is not None else None)


@dataclass(frozen=True)
class DyadicPoint:
    """Points with exact ``t_max``-bit binary expansions, stored as uint64 words."""

    words: np.ndarray
    t_max: int = 64

    def __post_init__(self):
        if not 1 <= self.t_max <= 64:
            raise PrecisionError(f"t_max must be in 1..64, got {self.t_max}")
        object.__setattr__(self, "words", np.asarray(self.words, dtype=np.uint64))

    @classmethod
    def from_float(cls, x, t_max: int = 64) -> "DyadicPoint":
        """Exact conversion; raises :class:`PrecisionError` if ``x * 2**t_max`` is not an integer."""
        x = np.asarray(x, dtype=np.float64)
        if np.any((x < 0) | (x >= 1)):
            raise PrecisionError("dyadic points must lie in [0, 1)")
        scaled = np.ldexp(x, t_max)
        if np.any(scaled != np.floor(scaled)):
            raise PrecisionError(f"input has binary digits beyond position {t_max}")
        return cls(scaled.astype(np.uint64), t_max)

    @property
    def value(self) -> np.ndarray:
        # exact whenever the word has at most 53 significant bits
        return np.ldexp(self.words.astype(np.float64), -self.t_max)

    def __xor__(self, other: "DyadicPoint") -> "DyadicPoint":
        if other.t_max != self.t_max:
            raise PrecisionError(f"digit budgets differ: {self.t_max} vs {other.t_max}")
        return DyadicPoint(self.words ^ other.words, self.t_max)


def _as_dyadic(x, t_max: int = 64) -> DyadicPoint:
    return x if isinstance(x, DyadicPoint) else DyadicPoint.from_float(x, t_max)


_BERNOULLI = {
    2: (1 / 6, -1.0, 1.0),
    4: (-1 / 30, 0.0, 1.0, -2.0, 1.0),
    6: (1 / 42, 0.0, -0.5, 0.0, 2.5, -3.0, 1.0),
}


def bernoulli_even(degree: int, x) -> np.ndarray:
    """Bernoulli polynomial ``B_degree(x)`` for ``degree`` in {2, 4, 6}."""
    if degree not in _BERNOULLI:
        raise ValueError(f"Bernoulli degree must be 2, 4 or 6, got {degree}")
    return np.polynomial.polynomial.polyval(np.asarray(x, dtype=np.float64), _BERNOULLI[degree])


def _si_scale(alpha: int) -> float:
    return (2 * pi) ** (2 * alpha) / ((-1) ** (alpha + 1) * factorial(2 * alpha))


def _si_from_diff(alpha: int, diff) -> np.ndarray:
    # B_{2a} is symmetric about 1/2, so folding keeps K(x, x') == K(x', x) bit for bit
    delta = np.mod(np.abs(diff), 1.0)
    delta = np.minimum(delta, 1.0 - delta)
    return _si_scale(alpha) * bernoulli_even(2 * alpha, delta)


def si_kernel_1d(alpha: int, x, xp) -> np.ndarray:
    """Shift-invariant kernel ``K_alpha(x, x')``, a scaled ``B_{2 alpha}((x - x') mod 1)``."""
    if alpha not in _SI_ORDERS:
        raise ValueError(f"SI smoothness must be in {_SI_ORDERS}, got {alpha}")
    return _si_from_diff(alpha, np.asarray(x, dtype=np.float64) - np.asarray(xp, dtype=np.float64))


def _reverse_digits(words: np.ndarray, t: int) -> np.ndarray:
    """Word whose bit ``a`` is digit ``a + 1`` of ``x`` (bit-reverse within ``t`` bits)."""
    w = np.asarray(words, dtype=np.uint64)
    out = np.zeros_like(w)
    for a in range(t):
        out |= ((w >> np.uint64(t - 1 - a)) & np.uint64(1)) << np.uint64(a)
    return out


def walsh(k, x, base: int = 2):
    """Walsh function ``wal_k(x)``.

    Base 2 takes the parity of ``k`` against the binary digits of ``x``
    (a float or :class:`DyadicPoint`) and returns ``+-1`` as float.  Other
    bases read the digits of the float ``x`` and return complex roots of unity.
    """
    k = np.asarray(k, dtype=np.int64)
    if base == 2:
        # digits past t_max are zero, so any k is well defined
        dp = _as_dyadic(x)
        rev = _reverse_digits(dp.words, dp.t_max)
        par = np.bitwise_count(k.astype(np.uint64) & rev) & np.uint8(1)
        return 1.0 - 2.0 * par.astype(np.float64)
    x = np.asarray(x.value if isinstance(x, DyadicPoint) else x, dtype=np.float64)
    k, x = np.broadcast_arrays(k, x)
    phase = np.zeros(k.shape, dtype=np.int64)
    kk, frac = k.copy(), x.copy()
    while np.any(kk):
        frac = frac * base
        digit = np.floor(frac).astype(np.int64)
        frac -= digit
        phase += (kk % base) * digit
        kk //= base
    return np.exp(2j * pi * (phase % base) / base)


def mu_alpha(k: int, alpha: int) -> int:
    """Sum of ``a + 1`` over the ``alpha`` highest set bit positions ``a`` of ``k``."""
    k, total = int(k), 0
    for _ in range(alpha):
        if k == 0:
            break
        a = k.bit_length() - 1
        total += a + 1
        k ^= 1 << a
    return total


def mu_alpha_array(k, alpha: int) -> np.ndarray:
    k = np.asarray(k, dtype=np.uint64).copy()
    total = np.zeros(k.shape, dtype=np.int64)
    for _ in range(alpha):
        bl = bit_length_array(k)
        total += bl
        nz = bl > 0
        k[nz] ^= np.uint64(1) << (bl[nz] - 1).astype(np.uint64)
    return total


def dsi_kernel_1d(alpha: int, x, t_max: int = 64) -> np.ndarray:
    """Closed-form Walsh kernel of order ``alpha`` in {2, 3, 4} at the digital difference ``x``.

    ``x`` is a :class:`DyadicPoint` or a float convertible to one.  With
    ``beta`` the 1-based position of the first nonzero digit and
    ``t_nu = 2**(-nu*beta)`` (both 0 at ``x = 0``)::

        K2 = -1 - beta x + 5/2 (1 - t1)
        K3 = -1 + beta x^2 - 5 (1 - t1) x + 43/18 (1 - t2)
        K4 = -1 - 2/3 beta x^3 + 5 (1 - t1) x^2 - 43/9 (1 - t2) x
             + 701/294 (1 - t3) + beta (S / 48 - 1/42)

    where ``S = sum_a wal_{2^a}(x) 2^(-3a)``, summed exactly over the stored
    digits plus the closed-form tail for the zero digits beyond them.
    """
    if alpha not in (2, 3, 4):
        raise ValueError(f"closed-form Walsh kernels exist for alpha in (2, 3, 4), got {alpha}")
    dp = _as_dyadic(x, t_max)
    t = dp.t_max
    w = dp.words
    bl = bit_length_array(w)
    beta = np.where(w > 0, t - bl + 1, 0).astype(np.float64)
    xv = dp.value
    t1 = np.where(w > 0, np.exp2(-beta), 0.0)
    t2, t3 = t1 * t1, t1 * t1 * t1
    if alpha == 2:
        return -1.0 - beta * xv + 2.5 * (1 - t1)
    if alpha == 3:
        return -1.0 + beta * xv**2 - 5 * (1 - t1) * xv + (43 / 18) * (1 - t2)
    s = np.full(w.shape, 2.0 ** (-3 * t) * 8 / 7)
    for a in range(t - 1, -1, -1):
        bit = (w >> np.uint64(t - 1 - a)) & np.uint64(1)
        s += (1.0 - 2.0 * bit.astype(np.float64)) * 2.0 ** (-3 * a)
    return (-1.0 - (2 / 3) * beta * xv**3 + 5 * (1 - t1) * xv**2 - (43 / 9) * (1 - t2) * xv
            + (701 / 294) * (1 - t3) + beta * (s / 48 - 1 / 42))


def dsi_kernel_series(alpha: int, x, k_max: int = SERIES_K_MAX, t_max: int = 64) -> np.ndarray:
    """Truncated Walsh series ``sum_{1 <= k <= k_max} wal_k(x) / 2**mu_alpha(k)``.

    For ``alpha >= 2`` the omitted tail is at most of order
    ``log2(k_max)**(alpha-1) / k_max``.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    dp = _as_dyadic(x, t_max)
    k = np.arange(1, k_max + 1, dtype=np.uint64)
    coef = np.exp2(-mu_alpha_array(k, alpha).astype(np.float64))
    rev = np.atleast_1d(_reverse_digits(dp.words, dp.t_max))
    out = np.empty(rev.shape)
    for idx, r in enumerate(rev):
        par = (np.bitwise_count(k & r) & np.uint8(1)).astype(np.float64)
        out[idx] = coef @ (1.0 - 2.0 * par)
    return out.reshape(np.shape(dp.words))


def dsi_kernel_order1(x, k_max: int = SERIES_K_MAX, t_max: int = 64) -> np.ndarray:
    """Order-1 Walsh kernel as a truncated series (no closed form is provided).

    The series diverges at ``x = 0``: the partial sum up to ``k_max = 2**M - 1``
    equals ``M / 2`` there.
    """
    return dsi_kernel_series(1, x, k_max, t_max)


def _factor_values(spec: KernelSpec, x, xp) -> np.ndarray:
    """Per-dimension kernel values, shape ``broadcast(x, xp)``, last axis ``d``."""
    if spec.family == "si-bernoulli":
        diff = np.asarray(x, dtype=np.float64) - np.asarray(xp, dtype=np.float64)
        if diff.shape[-1] != spec.d:
            raise ValueError(f"points have d={diff.shape[-1]}, kernel has d={spec.d}")
        return np.stack([_si_from_diff(a, diff[..., j]) for j, a in enumerate(spec.alphas)], axis=-1)
    if 1 in spec.alphas:
        raise ValueError("order-1 Walsh kernel has no closed form; use dsi_kernel_order1")
    dx, dxp = _as_dyadic(x), _as_dyadic(xp)
    diff = dx ^ dxp
    if diff.words.shape[-1] != spec.d:
        raise ValueError(f"points have d={diff.words.shape[-1]}, kernel has d={spec.d}")
    return np.stack([dsi_kernel_1d(a, DyadicPoint(diff.words[..., j], diff.t_max))
                     for j, a in enumerate(spec.alphas)], axis=-1)


def combine(spec: KernelSpec, factors: np.ndarray) -> np.ndarray:
    """Assemble ``d``-dimensional kernel values from per-dimension values."""
    if spec.subset_weights is None:
        return spec.gamma * np.prod(1.0 + np.asarray(spec.etas) * factors, axis=-1)
    total = np.zeros(factors.shape[:-1])
    for u, wu in enumerate(spec.subset_weights):
        if wu == 0.0:
            continue
        term = np.full(factors.shape[:-1], wu)
        for j in range(spec.d):
            if u >> j & 1:
                term = term * factors[..., j]
        total += term
    return spec.gamma * total


def kernel_eval(spec: KernelSpec, x, xp) -> np.ndarray:
    """``K(x, x')`` for broadcastable point arrays with trailing axis ``d``.

    Walsh kernels need exactly representable dyadic inputs; any other float
    raises :class:`~qmcfast.dnet.PrecisionError`.
    """
    return combine(spec, _factor_values(spec, x, xp))


def kernel_column(spec: KernelSpec, points, x0) -> np.ndarray:
    """``K(points_i, x0)`` for an ``(n, d)`` array of points."""
    return kernel_eval(spec, np.asarray(points), np.asarray(x0)[None, :])
