"""Base-2 digital nets with LMS, digital shifts, permutations, NUS and interlacing.

Representation
--------------
A generating matrix ``C_j`` with ``t_max`` rows and ``m`` columns is stored as
``m`` unsigned 64-bit words, one per column, with matrix row 0 in the most
significant of the ``t_max`` used bits.  A point coordinate is stored the same
way: the ``t_max``-bit word ``w`` stands for ``w / 2**t_max``.  Digital
addition in base 2 is XOR on these words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .batch import ExhaustedError, PointBatch, ShapeError, map_replications
from .data import sobol_matrices
from .rng import as_generator, default_seed, hash_uniform_bits, random_digit_permutations, replication_rngs

__all__ = [
    "PrecisionError",
    "StructureError",
    "GeneratingMatrixSet",
    "LmsSpec",
    "NusTree",
    "RANDOMIZATIONS",
    "make_lms",
    "lms_scramble",
    "digital_shift",
    "random_digital_shift",
    "permutation_mask",
    "nus_scramble",
    "interlace_words",
    "interlace_matrices",
    "interlace_digits",
    "net_words",
    "words_to_float",
    "DigitalNet",
    "dnet_points",
]

_U0 = np.uint64(0)
_U1 = np.uint64(1)

RANDOMIZATIONS = ("none", "shift", "perm", "lms", "lms-shift", "lms-perm", "nus")


class PrecisionError(ValueError):
    """Digit precision of an operand is too small or too large."""


class StructureError(ValueError):
    """Operation not supported for this combination of net and randomization."""


def _u(v) -> np.uint64:
    return np.uint64(v)


def _mask(t: int) -> np.uint64:
    return np.uint64(0xFFFFFFFFFFFFFFFF) if t == 64 else _u((1 << t) - 1)


@dataclass(frozen=True)
class GeneratingMatrixSet:
    """``d`` base-2 generating matrices packed as column words, shape ``(d, m)``."""

    columns: np.ndarray
    t_max: int
    source: str = ""

    def __post_init__(self):
        cols = np.atleast_2d(np.asarray(self.columns, dtype=np.uint64))
        if not 1 <= self.t_max <= 64:
            raise PrecisionError(f"t_max must be in [1, 64], got {self.t_max}")
        if self.t_max < 64 and np.any(cols >> _u(self.t_max)):
            raise PrecisionError(f"column values must be < 2**{self.t_max}")
        object.__setattr__(self, "columns", cols)

    @property
    def d(self) -> int:
        return self.columns.shape[0]

    @property
    def m(self) -> int:
        return self.columns.shape[1]

    def with_precision(self, t: int) -> "GeneratingMatrixSet":
        """Zero-pad (``t > t_max``) or truncate (``t < t_max``) the rows."""
        if t == self.t_max:
            return self
        if t > self.t_max:
            return GeneratingMatrixSet(self.columns << _u(t - self.t_max), t, self.source)
        return GeneratingMatrixSet(self.columns >> _u(self.t_max - t), t, self.source)

    def select(self, dims) -> "GeneratingMatrixSet":
        return GeneratingMatrixSet(self.columns[list(dims)], self.t_max, self.source)

    def dense(self) -> np.ndarray:
        """Bit matrices as a ``(d, t_max, m)`` uint8 array (row 0 = leading digit)."""
        shifts = np.arange(self.t_max - 1, -1, -1, dtype=np.uint64)
        return ((self.columns[:, None, :] >> shifts[None, :, None]) & _U1).astype(np.uint8)

    @classmethod
    def from_dense(cls, mats, source: str = "") -> "GeneratingMatrixSet":
        mats = np.asarray(mats, dtype=np.uint64)
        t = mats.shape[1]
        weights = np.uint64(1) << np.arange(t - 1, -1, -1, dtype=np.uint64)
        return cls((mats * weights[None, :, None]).sum(axis=1, dtype=np.uint64), t, source)

    @classmethod
    def sobol(cls, d: int, m: int = 32) -> "GeneratingMatrixSet":
        return cls(sobol_matrices(d, m, m), m, "Joe-Kuo new-joe-kuo-6.21201")

    @classmethod
    def identity(cls, d: int, m: int) -> "GeneratingMatrixSet":
        col = np.array([1 << (m - 1 - k) for k in range(m)], dtype=np.uint64)
        return cls(np.tile(col, (d, 1)), m, "identity")


# ---------------------------------------------------------------------------
# linear matrix scrambling


@dataclass(frozen=True)
class LmsSpec:
    """Lower-triangular scrambling matrices, rows packed as ``t``-bit words.

    ``rows[j, r]`` holds row ``r`` of ``S_j`` with column 0 in the leading bit.
    """

    family: str
    rows: np.ndarray
    t: int
    seed: int | None = None

    def dense(self) -> np.ndarray:
        shifts = np.arange(self.t - 1, -1, -1, dtype=np.uint64)
        return ((self.rows[:, :, None] >> shifts[None, None, :]) & _U1).astype(np.uint8)


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    t = bits.shape[-1]
    weights = np.uint64(1) << np.arange(t - 1, -1, -1, dtype=np.uint64)
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def make_lms(d: int, t: int, family: str = "matousek", rng=None) -> LmsSpec:
    """Draw ``d`` random ``t x t`` scrambling matrices of the given family.

    In base 2 the diagonal is forced to 1.  ``matousek`` fills the strict lower
    triangle with independent bits, ``tezuka`` draws one bit per subdiagonal,
    and ``owen-striped`` repeats the diagonal value down each column, which in
    base 2 leaves a fixed all-ones lower triangle.
    """
    if not 1 <= t <= 64:
        raise PrecisionError(f"LMS precision must be in [1, 64], got {t}")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = as_generator(rng)
    r_idx, c_idx = np.indices((t, t))
    lower = r_idx > c_idx
    bits = np.zeros((d, t, t), dtype=np.uint8)
    bits[:, r_idx == c_idx] = 1
    if family == "matousek":
        bits[:, lower] = rng.integers(0, 2, size=(d, int(lower.sum())), dtype=np.uint8)
    elif family == "tezuka":
        g = rng.integers(0, 2, size=(d, t), dtype=np.uint8)
        bits[:, lower] = g[:, (r_idx - c_idx)[lower]]
    elif family == "owen-striped":
        bits[:, lower] = 1
    else:
        raise ValueError(f"unknown LMS family {family!r}")
    return LmsSpec(family, _pack_rows(bits), t, seed)


def _bitmat_vec(rows: np.ndarray, vecs: np.ndarray, t: int) -> np.ndarray:
    """``S v mod 2`` for packed rows ``(t,)`` and packed vectors ``(...,)``."""
    prod = np.bitwise_count(rows[:, None] & vecs.reshape(-1)[None, :]) & 1
    shifts = np.arange(t - 1, -1, -1, dtype=np.uint64)
    out = (prod.astype(np.uint64) << shifts[:, None]).sum(axis=0, dtype=np.uint64)
    return out.reshape(vecs.shape)


def lms_scramble(C: GeneratingMatrixSet, spec: LmsSpec) -> GeneratingMatrixSet:
    """Left-multiply each generating matrix by its scrambling matrix mod 2.

    ``C`` is zero-padded (or truncated) to ``spec.t`` rows first.
    """
    if spec.rows.shape[0] != C.d or spec.rows.shape[1] != spec.t:
        raise ShapeError(f"LMS spec shape {spec.rows.shape} does not match d={C.d}, t={spec.t}")
    Cp = C.with_precision(spec.t)
    out = np.stack([_bitmat_vec(spec.rows[j], Cp.columns[j], spec.t) for j in range(C.d)])
    return GeneratingMatrixSet(out, spec.t, C.source)


# ---------------------------------------------------------------------------
# digital shift and digital permutation


def digital_shift(words: np.ndarray, shift: np.ndarray, t_points: int, t_shift: int) -> np.ndarray:
    """XOR ``t_shift``-bit shift words onto ``t_points``-bit point words.

    Points are left-aligned to ``t_shift`` bits first; the result has
    ``t_shift`` bits.  ``shift`` broadcasts over the trailing (dimension) axis.
    """
    if t_points > t_shift:
        raise PrecisionError(f"point precision {t_points} exceeds shift precision {t_shift}")
    words = np.asarray(words, dtype=np.uint64)
    return (words << _u(t_shift - t_points)) ^ np.asarray(shift, dtype=np.uint64)


def random_digital_shift(d: int, t: int, rng=None) -> np.ndarray:
    rng = as_generator(rng)
    return rng.integers(0, 2**64, size=d, dtype=np.uint64, endpoint=False) & _mask(t)


def permutation_mask(perms: np.ndarray) -> np.ndarray:
    """Collapse base-2 per-digit permutations to an XOR word per dimension.

    ``perms`` has shape ``(d, t, 2)``; digit position 0 is the leading bit.
    Every permutation of ``{0, 1}`` is either the identity or the flip, so a
    digital permutation in base 2 is exactly a digital shift.
    """
    flips = (np.asarray(perms)[..., 0] == 1).astype(np.uint8)
    return _pack_rows(flips)


def _apply_permutations(words: np.ndarray, perms: np.ndarray, t: int) -> np.ndarray:
    """Digit-by-digit application of base-2 permutations (reference path)."""
    out = np.zeros_like(words)
    for pos in range(t):
        sh = _u(t - 1 - pos)
        bit = ((words >> sh) & _U1).astype(np.int64)
        new = np.take_along_axis(perms[:, pos, :][None, :, :].repeat(len(words), 0), bit[..., None], axis=2)[..., 0]
        out |= new.astype(np.uint64) << sh
    return out


# ---------------------------------------------------------------------------
# nested uniform scrambling


@dataclass
class NusTree:
    """Owen's nested uniform scramble in base 2, grown lazily.

    The permutation at node ``(dim, depth, prefix)`` is a pure function of
    ``seed`` and the node key, so nodes exist implicitly and are evaluated on
    demand.  ``node_bits`` may be replaced (e.g. in tests) by any callable
    ``(dim, depth, prefix) -> flip bits``.
    """

    seed: int
    t_max: int
    node_bits: Callable | None = None

    def flip(self, dim, depth: int, prefix) -> np.ndarray:
        dim = np.asarray(dim, dtype=np.uint64)
        prefix = np.asarray(prefix, dtype=np.uint64)
        if self.node_bits is not None:
            return np.asarray(self.node_bits(dim, depth, prefix), dtype=np.uint64) & _U1
        return hash_uniform_bits(np.uint64(self.seed), dim, np.uint64(depth), prefix)

    def permutation(self, dim: int, depth: int, prefix: int) -> tuple[int, int]:
        return (1, 0) if int(self.flip(dim, depth, prefix)) else (0, 1)


def nus_scramble(words: np.ndarray, tree: NusTree, t_points: int, dim_offset: int = 0) -> np.ndarray:
    """Apply a nested uniform scramble to ``(n, d)`` packed point words.

    Output digit ``k`` is input digit ``k`` passed through the node permutation
    selected by input digits ``0..k-1``.  Result has ``tree.t_max`` bits.
    """
    t = tree.t_max
    if t_points > t:
        raise PrecisionError(f"point precision {t_points} exceeds NUS depth {t}")
    words = np.asarray(words, dtype=np.uint64) << _u(t - t_points)
    d = words.shape[-1]
    dims = np.arange(dim_offset, dim_offset + d, dtype=np.uint64)
    out = np.zeros_like(words)
    for depth in range(t):
        sh = _u(t - 1 - depth)
        prefix = words >> _u(t - depth) if depth else np.zeros_like(words)
        bit = (words >> sh) & _U1
        out |= (bit ^ tree.flip(dims, depth, prefix)) << sh
    return out


# ---------------------------------------------------------------------------
# interlacing


def interlace_words(words: np.ndarray, alpha: int, t: int) -> np.ndarray:
    """Interlace groups of ``alpha`` consecutive components along the last axis.

    Row ``r`` (from the top) of output component ``j`` is row ``r // alpha``
    of input component ``alpha*j + r % alpha``.  Inputs have ``t`` bits,
    outputs ``alpha*t`` bits.
    """
    words = np.asarray(words, dtype=np.uint64)
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if words.shape[-1] % alpha:
        raise ShapeError(f"{words.shape[-1]} components is not a multiple of alpha={alpha}")
    if alpha == 1:
        return words.copy()
    T = alpha * t
    if T > 64:
        raise PrecisionError(f"interlaced precision alpha*t = {T} exceeds 64 bits")
    d = words.shape[-1] // alpha
    grouped = words.reshape(words.shape[:-1] + (d, alpha))
    out = np.zeros(words.shape[:-1] + (d,), dtype=np.uint64)
    for r in range(T):
        src = grouped[..., r % alpha]
        bit = (src >> _u(t - 1 - r // alpha)) & _U1
        out |= bit << _u(T - 1 - r)
    return out


def interlace_matrices(C: GeneratingMatrixSet, alpha: int) -> GeneratingMatrixSet:
    """Interlace ``alpha*d`` generating matrices into ``d`` with ``alpha*t_max`` rows."""
    cols = interlace_words(C.columns.T, alpha, C.t_max).T
    return GeneratingMatrixSet(cols, alpha * C.t_max, C.source)


def interlace_digits(words: np.ndarray, alpha: int, t: int) -> np.ndarray:
    """Interlace per-point digit words of an ``alpha*d``-dimensional net."""
    return interlace_words(words, alpha, t)


# ---------------------------------------------------------------------------
# generation


def _ctz(i: np.ndarray) -> np.ndarray:
    low = i & (~i + _U1)
    return np.log2(low.astype(np.float64)).astype(np.int64)


def net_words(C: GeneratingMatrixSet, start: int, stop: int, order: str = "radical-inverse") -> np.ndarray:
    """Unrandomized point words for indices ``start <= i < stop``, shape ``(n, d)``.

    In ``gray`` order the ``i``-th point is the net point with index
    ``i XOR (i >> 1)``; each point is the previous one XOR one column.
    """
    if stop > 2**C.m:
        raise ExhaustedError(f"requested {stop} points but the matrices have m={C.m} columns")
    if start < 0 or stop < start:
        raise ValueError(f"invalid index range [{start}, {stop})")
    cols = C.columns
    if order == "radical-inverse":
        i = np.arange(start, stop, dtype=np.uint64)
        out = np.zeros((stop - start, C.d), dtype=np.uint64)
        for k in range(max(stop - 1, 0).bit_length()):
            bit = (i >> _u(k)) & _U1
            out ^= bit[:, None] * cols[:, k][None, :]
        return out
    if order == "gray":
        if stop == start:
            return np.zeros((0, C.d), dtype=np.uint64)
        g0 = start ^ (start >> 1)
        first = np.zeros(C.d, dtype=np.uint64)
        for k in range(g0.bit_length()):
            if (g0 >> k) & 1:
                first ^= cols[:, k]
        steps = np.empty((stop - start, C.d), dtype=np.uint64)
        steps[0] = first
        if stop - start > 1:
            steps[1:] = cols[:, _ctz(np.arange(start + 1, stop, dtype=np.uint64))].T
        return np.bitwise_xor.accumulate(steps, axis=0)
    raise ValueError(f"unknown digital net order {order!r}")


def words_to_float(words: np.ndarray, t: int) -> np.ndarray:
    """Map ``t``-bit words to floats in ``[0, 1)`` (truncating to 53 bits)."""
    words = np.asarray(words, dtype=np.uint64)
    if t > 53:
        return (words >> _u(t - 53)).astype(np.float64) * 2.0**-53
    return words.astype(np.float64) * 2.0**-t


class DigitalNet:
    """Randomized (higher-order) base-2 digital sequence.

    Parameters
    ----------
    d : int
        Output dimension.
    R : int
        Number of independent randomizations.
    randomize : str
        One of ``none``, ``shift``, ``perm``, ``lms``, ``lms-shift``,
        ``lms-perm``, ``nus``.
    alpha : int
        Interlacing order; ``alpha * d`` component matrices are consumed.
    C : GeneratingMatrixSet, optional
        Component matrices (at least ``alpha * d`` of them).  Defaults to the
        built-in Sobol' matrices.
    t_max : int, optional
        Digits per component after randomization.  Defaults to
        ``max(C.t_max, 53)`` capped at ``64 // alpha``.

    Randomization state is drawn at construction, so repeated calls to
    :meth:`points` extend the same randomized sequences.
    """

    kind = "dnet"

    def __init__(self, d: int, R: int = 1, seed: int | None = None, randomize: str = "lms-shift",
                 alpha: int = 1, C: GeneratingMatrixSet | None = None, order: str = "radical-inverse",
                 lms_family: str = "matousek", t_max: int | None = None, threads: int = 1):
        if randomize not in RANDOMIZATIONS:
            raise ValueError(f"unknown randomization {randomize!r}; choose from {RANDOMIZATIONS}")
        if alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {alpha}")
        C = GeneratingMatrixSet.sobol(alpha * d) if C is None else C
        if C.d < alpha * d:
            raise ShapeError(f"need {alpha * d} component matrices, got {C.d}")
        self.C = C.select(range(alpha * d))
        self.d, self.R, self.alpha, self.order = d, R, alpha, order
        self.randomize, self.lms_family, self.threads = randomize, lms_family, threads
        self.seed = default_seed() if seed is None else seed
        if t_max is None:
            t_max = 64 // alpha if randomize == "none" else min(max(C.t_max, 53), 64 // alpha)
        if alpha * t_max > 64:
            raise PrecisionError(f"alpha * t_max = {alpha * t_max} exceeds 64 bits")
        if randomize != "none" and t_max < min(C.t_max, 64 // alpha):
            raise PrecisionError(f"randomization precision {t_max} is below the matrices' t_max={C.t_max}")
        self.t = t_max
        self.T = alpha * t_max
        self._reps = [self._draw(rng, r) for r, rng in enumerate(replication_rngs(self.seed, R))]

    def _draw(self, rng: np.random.Generator, r: int) -> dict:
        ad, t = self.alpha * self.d, self.t
        base = self.C.with_precision(t)
        rep: dict = {"shift": np.zeros(self.d, dtype=np.uint64)}
        if self.randomize.startswith("lms"):
            rep["lms"] = make_lms(ad, t, self.lms_family, rng)
            base = lms_scramble(self.C, rep["lms"])
        if self.randomize == "nus":
            rep["nus"] = NusTree(int(rng.integers(0, 2**63)), t)
        rep["matrices"] = interlace_matrices(base, self.alpha)
        if self.randomize.endswith("shift"):
            rep["shift"] = random_digital_shift(self.d, self.T, rng)
        elif self.randomize.endswith("perm"):
            perms = random_digit_permutations(2, self.d * self.T, rng).reshape(self.d, self.T, 2)
            rep["perms"] = perms
            rep["shift"] = permutation_mask(perms)
        return rep

    def replication_words(self, r: int, start: int, stop: int) -> np.ndarray:
        """Randomized ``T``-bit words of replication ``r``, shape ``(n, d)``."""
        rep = self._reps[r]
        if self.randomize == "nus":
            comp = net_words(self.C.with_precision(self.t), start, stop, self.order)
            comp = nus_scramble(comp, rep["nus"], self.t)
            return interlace_digits(comp, self.alpha, self.t)
        return net_words(rep["matrices"], start, stop, self.order) ^ rep["shift"][None, :]

    def words(self, start: int, stop: int) -> np.ndarray:
        return map_replications(lambda r: self.replication_words(r, start, stop), self.R, self.threads)

    def points(self, start: int, stop: int) -> np.ndarray:
        return words_to_float(self.words(start, stop), self.T)

    def gen(self, n: int, start: int = 0) -> PointBatch:
        meta = {"alpha": self.alpha, "t_max": self.T, "lms_family": self.lms_family, "source": self.C.source}
        return PointBatch(self.points(start, start + n), "dnet", self.order, self.randomize, self.seed, start, meta)


def dnet_points(C: GeneratingMatrixSet | None, n: int, order: str = "radical-inverse", rand: str = "none",
                R: int = 1, seed: int | None = None, alpha: int = 1, **kw) -> PointBatch:
    d = (C.d if C is not None else 1) // alpha
    return DigitalNet(d, R, seed, rand, alpha, C, order, **kw).gen(n)
