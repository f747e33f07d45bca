"""Halton sequences with digit-level randomizations in per-dimension prime bases.

Dimension ``j`` uses the ``j``-th prime ``b_j`` and identity generating
matrices, so the unrandomized coordinate is the radical inverse of ``i``.
Each dimension keeps ``t_j`` digits, the largest ``t`` with ``b_j**t <= 2**53``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .batch import ExhaustedError, PointBatch, map_replications
from .digits import digits_array, first_primes
from .rng import as_generator, default_seed, hash_uniform, random_digit_permutations, replication_rngs

__all__ = [
    "InterlacingError",
    "HaltonConfig",
    "HALTON_RANDOMIZATIONS",
    "QRNG_MULTIPLIERS",
    "halton_digits_budget",
    "random_digit_permutations",
    "general_lms",
    "nus_digits",
    "digits_to_float",
    "Halton",
    "halton_points",
]

HALTON_RANDOMIZATIONS = ("none", "shift", "perm", "lms", "lms-shift", "lms-perm", "nus", "qrng")

# Deterministic linear digit permutations k -> f*k mod b used by the "qrng"
# mode for the first four bases (2, 3, 5, 7).  Chosen for this package; they
# do not reproduce the tables of the R package qrng.
QRNG_MULTIPLIERS = (1, 2, 3, 5)


class InterlacingError(ValueError):
    """Digital interlacing requested for Halton points (bases differ by dimension)."""


def halton_digits_budget(base: int) -> int:
    t, p = 0, 1
    while p * base <= 2**53:
        p *= base
        t += 1
    return t


@dataclass
class HaltonConfig:
    d: int
    randomize: str = "none"
    R: int = 1
    seed: int | None = None
    lms_family: str = "matousek"
    alpha: int = 1
    bases: list[int] = field(init=False)
    t_max: list[int] = field(init=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.d > 1000:
            raise ValueError("Halton supports d <= 1000")
        if self.alpha != 1:
            raise InterlacingError("digital interlacing is not available for Halton points")
        if self.randomize not in HALTON_RANDOMIZATIONS:
            raise ValueError(f"unknown randomization {self.randomize!r}; choose from {HALTON_RANDOMIZATIONS}")
        if self.randomize == "qrng" and self.d > len(QRNG_MULTIPLIERS):
            raise ValueError(f"qrng permutations are tabulated for d <= {len(QRNG_MULTIPLIERS)}")
        if self.seed is None:
            self.seed = default_seed()
        self.bases = first_primes(self.d)
        self.t_max = [halton_digits_budget(b) for b in self.bases]


def general_lms(base: int, t: int, family: str = "matousek", rng=None) -> np.ndarray:
    """Random ``t x t`` lower-triangular scrambling matrix in base ``base``.

    Diagonal entries are uniform on ``1..b-1``; free entries below the
    diagonal are uniform on ``0..b-1`` (``matousek``), constant along each
    subdiagonal (``tezuka``) or equal to the column's diagonal value
    (``owen-striped``).
    """
    rng = as_generator(rng)
    r_idx, c_idx = np.indices((t, t))
    lower = r_idx > c_idx
    S = np.zeros((t, t), dtype=np.int64)
    if family == "matousek":
        S[np.diag_indices(t)] = rng.integers(1, base, size=t)
        S[lower] = rng.integers(0, base, size=int(lower.sum()))
    elif family == "tezuka":
        h = rng.integers(1, base)
        g = rng.integers(0, base, size=t)
        S[np.diag_indices(t)] = h
        S[lower] = g[(r_idx - c_idx)[lower]]
    elif family == "owen-striped":
        h = rng.integers(1, base, size=t)
        S[r_idx >= c_idx] = h[c_idx[r_idx >= c_idx]]
    else:
        raise ValueError(f"unknown LMS family {family!r}")
    return S


def _hashed_permutations(seed: int, dim: int, depth: int, nodes: np.ndarray, base: int) -> np.ndarray:
    """Fisher-Yates shuffles keyed by ``(seed, dim, depth, node)``, one row per node."""
    perms = np.tile(np.arange(base, dtype=np.int64), (len(nodes), 1))
    rows = np.arange(len(nodes))
    keys = (np.uint64(seed), np.uint64(dim), np.uint64(depth), nodes.astype(np.uint64))
    for s in range(base - 1, 0, -1):
        r = np.floor(hash_uniform(*keys, np.uint64(s)) * (s + 1)).astype(np.int64)
        tmp = perms[rows, s].copy()
        perms[rows, s] = perms[rows, r]
        perms[rows, r] = tmp
    return perms


def nus_digits(digits: np.ndarray, base: int, seed: int, dim: int, node_perm=None) -> np.ndarray:
    """Nested uniform scramble of an ``(n, t)`` digit array (leading digit first).

    ``node_perm(depth, prefixes) -> (len(prefixes), base)`` may override the
    hashed node permutations.
    """
    n, t = digits.shape
    out = np.empty_like(digits)
    prefix = np.zeros(n, dtype=np.int64)
    chunk = max(1, 2**22 // base)
    for depth in range(t):
        nodes, inv = np.unique(prefix, return_inverse=True)
        if node_perm is not None:
            perms = np.asarray(node_perm(depth, nodes))
            out[:, depth] = perms[inv, digits[:, depth]]
        else:
            for lo in range(0, len(nodes), chunk):
                perms = _hashed_permutations(seed, dim, depth, nodes[lo:lo + chunk], base)
                sel = (inv >= lo) & (inv < lo + chunk)
                out[sel, depth] = perms[inv[sel] - lo, digits[sel, depth]]
        # prefixes stay distinct per depth and fit: base**depth <= 2**53
        prefix = prefix * base + digits[:, depth]
    return out


def digits_to_float(digits: np.ndarray, base: int) -> np.ndarray:
    """Value of leading-digit-first base-``base`` digit rows, in ``[0, 1)``."""
    v = np.zeros(digits.shape[:-1])
    for k in range(digits.shape[-1] - 1, -1, -1):
        v = (v + digits[..., k]) / base
    return np.minimum(v, np.nextafter(1.0, 0.0))


class Halton:
    """Randomized Halton sequence; randomization state is drawn at construction."""

    kind = "halton"

    def __init__(self, d: int, R: int = 1, seed: int | None = None, randomize: str = "none",
                 lms_family: str = "matousek", alpha: int = 1, threads: int = 1):
        self.cfg = HaltonConfig(d, randomize, R, seed, lms_family, alpha)
        self.d, self.R, self.seed, self.randomize = d, R, self.cfg.seed, randomize
        self.threads = threads
        self._reps = [self._draw(rng) for rng in replication_rngs(self.seed, R)]

    def _draw(self, rng: np.random.Generator) -> list[dict]:
        reps = []
        for j, (b, t) in enumerate(zip(self.cfg.bases, self.cfg.t_max)):
            rep: dict = {}
            if self.randomize.startswith("lms"):
                rep["S"] = general_lms(b, t, self.cfg.lms_family, rng)
            if self.randomize.endswith("shift") or self.randomize == "qrng":
                rep["shift"] = rng.integers(0, b, size=t)
            if self.randomize.endswith("perm"):
                rep["perms"] = random_digit_permutations(b, t, rng)
            if self.randomize == "qrng":
                f = QRNG_MULTIPLIERS[j]
                rep["perms"] = np.tile((f * np.arange(b)) % b, (t, 1))
            if self.randomize == "nus":
                rep["nus_seed"] = int(rng.integers(0, 2**63))
            reps.append(rep)
        return reps

    def _dim_digits(self, j: int, i: np.ndarray, stop: int) -> np.ndarray:
        b, t = self.cfg.bases[j], self.cfg.t_max[j]
        if stop > b**t:
            raise ExhaustedError(f"base {b} supports at most {b}**{t} points")
        m = 0
        while b**m < stop:
            m += 1
        out = np.zeros((len(i), t), dtype=np.int64)
        out[:, :m] = digits_array(i, b, m)
        return out

    def replication_points(self, r: int, start: int, stop: int) -> np.ndarray:
        i = np.arange(start, stop, dtype=np.int64)
        x = np.empty((len(i), self.d))
        for j, b in enumerate(self.cfg.bases):
            rep = self._reps[r][j]
            dg = self._dim_digits(j, i, stop)
            if "S" in rep:
                m = int(np.max(np.nonzero(dg.any(axis=0))[0], initial=-1)) + 1
                dg = (dg[:, :m] @ rep["S"][:, :m].T) % b
            if "perms" in rep:
                dg = np.take_along_axis(rep["perms"].T, dg, axis=0) if len(dg) else dg
            if "shift" in rep:
                dg = (dg + rep["shift"][None, :]) % b
            if "nus_seed" in rep:
                dg = nus_digits(dg, b, rep["nus_seed"], j)
            x[:, j] = digits_to_float(dg, b)
        return x

    def points(self, start: int, stop: int) -> np.ndarray:
        return map_replications(lambda r: self.replication_points(r, start, stop), self.R, self.threads)

    def gen(self, n: int, start: int = 0) -> PointBatch:
        return PointBatch(self.points(start, start + n), "halton", "radical-inverse", self.randomize,
                          self.seed, start, {"bases": self.cfg.bases})


def halton_points(cfg: HaltonConfig, n: int, start: int = 0) -> PointBatch:
    return Halton(cfg.d, cfg.R, cfg.seed, cfg.randomize, cfg.lms_family, cfg.alpha).gen(n, start)
