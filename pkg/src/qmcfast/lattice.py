"""Rank-1 lattices in linear or radical-inverse order, with random shifts mod 1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import data
from .batch import ExhaustedError, PointBatch, ShapeError, map_replications
from .digits import check_base, digits_array
from .rng import default_seed, replication_rngs

__all__ = [
    "LatticeGeneratingVector",
    "OrderError",
    "lattice_points",
    "random_shifts",
    "Lattice",
]


class OrderError(ValueError):
    """Linear order requested for a size that is not a power of the base."""


@dataclass(frozen=True)
class LatticeGeneratingVector:
    g: tuple[int, ...]
    m_max: int = 32
    source: str = ""

    def __post_init__(self):
        g = tuple(int(v) for v in self.g)
        if not g:
            raise ShapeError("generating vector must have d >= 1 entries")
        if any(v < 1 for v in g):
            raise ValueError(f"generating vector entries must be >= 1, got {g}")
        object.__setattr__(self, "g", g)

    @property
    def d(self) -> int:
        return len(self.g)

    @classmethod
    def default(cls, d: int) -> "LatticeGeneratingVector":
        if d > len(data.LATTICE_G):
            raise ShapeError(
                f"built-in lattice vector has d <= {len(data.LATTICE_G)}; "
                "load a larger one with qmcfast.lddata_io.read_lattice_vector"
            )
        return cls(data.LATTICE_G[:d], data.LATTICE_M_MAX, "Cools-Kuo-Nuyens 2006 (leading entries)")


def _as_vector(g) -> LatticeGeneratingVector:
    return g if isinstance(g, LatticeGeneratingVector) else LatticeGeneratingVector(tuple(g))


def _n_digits(stop: int, base: int) -> int:
    m, p = 0, 1
    while p < stop:
        p *= base
        m += 1
    return m


def _unshifted(g: LatticeGeneratingVector, start: int, stop: int, order: str, base: int) -> np.ndarray:
    """Unshifted lattice points ``z_i`` for ``start <= i < stop`` as ``(n, d)``."""
    gv = np.asarray(g.g, dtype=np.int64)
    i = np.arange(start, stop, dtype=np.int64)
    if order == "linear":
        n = stop - start
        m = _n_digits(n, base)
        if base**m != n or start != 0:
            raise OrderError(f"linear order needs n = {base}**m points starting at 0, got n={n}, start={start}")
        if n > 2**31:
            raise ExhaustedError("linear order supports n <= 2**31")
        return ((i[:, None] * (gv[None, :] % n)) % n) / n
    if order != "radical-inverse":
        raise OrderError(f"unknown lattice order {order!r}")
    m = _n_digits(stop, base)
    if base ** (2 * m) > 2**63:
        raise ExhaustedError(f"radical-inverse lattice limited to {base}**31 points in base {base}")
    # v(i) = rev(i) / b^m exactly, so z_i = (rev(i) g mod b^m) / b^m in integers
    mod = base**m
    dg = digits_array(i, base, m)
    rev = np.zeros(len(i), dtype=np.int64)
    for t in range(m):
        rev = rev * base + dg[:, t]
    return ((rev[:, None] * (gv[None, :] % mod)) % mod) / mod


def _shift_mod1(z: np.ndarray, delta: np.ndarray) -> np.ndarray:
    x = np.mod(z + delta, 1.0)
    x[x >= 1.0] = 0.0
    return x


def random_shifts(d: int, R: int, seed: int | None = None) -> np.ndarray:
    """``R`` independent uniform shift vectors in ``[0, 1)^d``, shape ``(R, d)``."""
    if R == 0:
        return np.empty((0, d))
    return np.stack([rng.random(d) for rng in replication_rngs(seed, R)])


def lattice_points(g, n: int, order: str = "radical-inverse", shifts=None, base: int = 2, start: int = 0) -> np.ndarray:
    """Lattice points ``start .. start+n-1`` as an ``(R, n, d)`` array.

    Without ``shifts`` a single unshifted replication is returned.  With
    ``shifts`` of shape ``(R, d)`` each replication is ``(z_i + shift_r) mod 1``.
    """
    g = _as_vector(g)
    base = check_base(base)
    z = _unshifted(g, start, start + n, order, base)
    if shifts is None:
        return z[None]
    shifts = np.atleast_2d(np.asarray(shifts, dtype=np.float64))
    if shifts.shape[1] != g.d:
        raise ShapeError(f"shifts have d={shifts.shape[1]} but generating vector has d={g.d}")
    if np.any((shifts < 0) | (shifts >= 1)):
        raise ValueError("shift coordinates must lie in [0, 1)")
    return _shift_mod1(z[None, :, :], shifts[:, None, :])


class Lattice:
    """Randomly shifted rank-1 lattice sequence.

    The shifts are drawn once at construction so successive calls to
    :meth:`points` extend the same ``R`` randomized sequences.
    """

    kind = "lattice"

    def __init__(self, d: int, R: int = 1, seed: int | None = None, g=None,
                 randomize: str = "shift", order: str = "radical-inverse", base: int = 2,
                 threads: int = 1):
        self.g = LatticeGeneratingVector.default(d) if g is None else _as_vector(g)
        if self.g.d != d:
            raise ShapeError(f"generating vector has d={self.g.d}, expected {d}")
        if randomize not in ("shift", "none"):
            raise ValueError(f"lattice randomization must be 'shift' or 'none', got {randomize!r}")
        self.d, self.R, self.order, self.base = d, R, order, base
        self.seed = default_seed() if seed is None else seed
        self.randomize, self.threads = randomize, threads
        self.shifts = random_shifts(d, R, self.seed) if randomize == "shift" else None

    def points(self, start: int, stop: int) -> np.ndarray:
        z = _unshifted(self.g, start, stop, self.order, self.base)
        if self.shifts is None:
            return np.broadcast_to(z, (self.R,) + z.shape).copy()
        return map_replications(lambda r: _shift_mod1(z, self.shifts[r]), self.R, self.threads)

    def gen(self, n: int, start: int = 0) -> PointBatch:
        return PointBatch(self.points(start, start + n), "lattice", self.order, self.randomize,
                          self.seed, start, {"g": list(self.g.g), "base": self.base})
