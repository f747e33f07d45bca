"""Orthonormal radix-2 transforms: FFT in bit-reversed order, its inverse, and FWHT.

All transforms act on the last axis, so a stack of ``R`` sequences of length
``2**m`` is transformed in one pass.  Each butterfly stage scales by
``1/sqrt(2)``, which makes every transform unitary.

Stage schedule for :func:`fftbr` (decimation in time, input already in
bit-reversed order): at the stage with half-width ``h`` (``h = 1, 2, 4, ...``)
element ``j`` of every block of ``2h`` is paired with ``j + h`` and the
butterfly ``(a + w b, a - w b) / sqrt(2)`` uses ``w = exp(-2 pi i (j mod h) / (2h))``.
:func:`ifftbr` runs the same network backwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "TransformError",
    "SpectralVector",
    "fwht",
    "fftbr",
    "ifftbr",
    "omega_vector",
    "forward",
    "inverse",
    "transform_update_double",
]

_SQRT1_2 = np.sqrt(0.5)
# elements per cache block for the low butterfly stages
_CHUNK = 2**13
KINDS = ("fftbr", "fwht")


class TransformError(ValueError):
    """Bad length or mismatched transform kind."""


def _log2_len(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise TransformError(f"transform length must be a power of 2, got {n}")
    return n.bit_length() - 1


@lru_cache(maxsize=64)
def _twiddles(h: int) -> np.ndarray:
    w = np.exp(-1j * np.pi * np.arange(h) / h)
    w.setflags(write=False)
    return w


def _butterfly(v: np.ndarray, w, inverse: bool) -> None:
    """One unscaled stage on pairs ``v[..., 0, ...]`` / ``v[..., 1, ...]``, in place.

    ``w`` is ``None`` for the Walsh-Hadamard network.
    """
    a = v[:, :, 0]
    b = v[:, :, 1]
    if w is None:
        tmp = a - b
        np.add(a, b, out=a)
        b[...] = tmp
    elif inverse:
        tmp = a - b
        np.add(a, b, out=a)
        np.multiply(tmp, np.conj(w), out=b)
    else:
        tmp = b * w
        np.subtract(a, tmp, out=b)
        np.add(a, tmp, out=a)


def _view(x: np.ndarray, shape: tuple) -> np.ndarray:
    return np.reshape(x, shape, copy=False)


def _stages(y: np.ndarray, twiddles: bool, inverse: bool) -> np.ndarray:
    """Run the butterfly network on the last axis of ``y`` in place.

    Stages whose blocks are narrower than a cache-sized width run block by
    block so the block stays in cache across those stages; the wider stages
    stream over the whole array.  The ``n**-0.5`` normalization is applied
    once at the end.
    """
    n = y.shape[-1]
    m = _log2_len(n)
    flat = _view(y, (-1, n))
    rows = flat.shape[0]
    per_row = max(1, _CHUNK // rows)
    width = min(n, 1 << (per_row.bit_length() - 1))
    low = [1 << s for s in range(width.bit_length() - 1)]
    high = [1 << s for s in range(len(low), m)]

    def run(x, hs, size):
        for h in reversed(hs) if inverse else hs:
            # the h = 1 twiddle is exactly 1
            w = _twiddles(h) if twiddles and h > 1 else None
            _butterfly(_view(x, (rows, size // (2 * h), 2, h)), w, inverse)

    if inverse:
        run(flat, high, n)
    for c in range(0, n, width):
        run(flat[:, c:c + width], low, width)
    if not inverse:
        run(flat, high, n)
    if m:
        flat *= 2.0 ** (-m / 2)
    return y


def fwht(y, inplace: bool = False) -> np.ndarray:
    """Orthonormal fast Walsh-Hadamard transform along the last axis.

    Symmetric and its own inverse.  With ``inplace=True`` and a float64
    array the input buffer is overwritten and returned.
    """
    y = np.asarray(y)
    if not (inplace and y.dtype.kind in "fc"):
        y = np.array(y, dtype=np.result_type(y.dtype, np.float64))
    return _stages(y, twiddles=False, inverse=False)


def fftbr(y, inplace: bool = False) -> np.ndarray:
    """Orthonormal FFT of a sequence supplied in bit-reversed order.

    ``fftbr(y)[k] = n**-0.5 * sum_j y[j] exp(-2 pi i k R(j) / n)`` with ``R`` the
    ``m``-bit reversal, i.e. the conjugate of the permuted Fourier matrix applied
    to ``y``.
    """
    y = np.asarray(y)
    if not (inplace and y.dtype == np.complex128):
        y = np.array(y, dtype=np.complex128)
    return _stages(y, twiddles=True, inverse=False)


def ifftbr(yt, inplace: bool = False) -> np.ndarray:
    """Exact inverse of :func:`fftbr`: natural-order spectrum to bit-reversed samples."""
    yt = np.asarray(yt)
    if not (inplace and yt.dtype == np.complex128):
        yt = np.array(yt, dtype=np.complex128)
    return _stages(yt, twiddles=True, inverse=True)


def forward(y, kind: str) -> np.ndarray:
    """Conjugate-transform ``conj(V) y`` for the eigenvector basis of ``kind``."""
    if kind == "fftbr":
        return fftbr(y)
    if kind == "fwht":
        return fwht(y)
    raise TransformError(f"unknown transform kind {kind!r}")


def inverse(yt, kind: str) -> np.ndarray:
    """``V yt``; undoes :func:`forward`."""
    if kind == "fftbr":
        return ifftbr(yt)
    if kind == "fwht":
        return fwht(yt)
    raise TransformError(f"unknown transform kind {kind!r}")


def omega_vector(m: int, kind: str = "fftbr") -> np.ndarray:
    """Twiddles ``exp(-pi i k / 2**m)``, ``k < 2**m`` (all ones for FWHT)."""
    if m < 0:
        raise TransformError(f"level must be >= 0, got {m}")
    if kind == "fwht":
        return np.ones(2**m)
    if kind != "fftbr":
        raise TransformError(f"unknown transform kind {kind!r}")
    return np.exp(-1j * np.pi * np.arange(2**m) / 2**m)


@dataclass(frozen=True)
class SpectralVector:
    """Transformed values ``conj(V_m) y`` together with the transform kind."""

    values: np.ndarray
    kind: str

    @property
    def m(self) -> int:
        return _log2_len(self.values.shape[-1])


def transform_update_double(yt, y_new, kind: str | None = None):
    """Extend ``conj(V_m) y`` to ``conj(V_{m+1}) (y ++ y_new)``.

    Only ``y_new`` is transformed; the old half enters through a single
    butterfly pass.  Accepts a :class:`SpectralVector` (returned as one) or a
    raw array together with ``kind``.
    """
    wrapped = isinstance(yt, SpectralVector)
    if wrapped:
        if kind is not None and kind != yt.kind:
            raise TransformError(f"spectral vector is {yt.kind!r} but {kind!r} was requested")
        kind, values = yt.kind, yt.values
    else:
        if kind is None:
            raise TransformError("kind is required for raw arrays")
        values = np.asarray(yt)
    y_new = np.asarray(y_new)
    if y_new.shape != values.shape:
        raise TransformError(f"new samples have shape {y_new.shape}, expected {values.shape}")
    m = _log2_len(values.shape[-1])
    t_new = forward(y_new, kind) * omega_vector(m, kind)
    out = np.concatenate([values + t_new, values - t_new], axis=-1) * _SQRT1_2
    return SpectralVector(out, kind) if wrapped else out
