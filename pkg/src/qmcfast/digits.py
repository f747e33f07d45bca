"""Base-b digit manipulation shared by the generators and transforms.

Scalar helpers work on Python ints; the ``*_array`` variants are vectorized
over ``numpy.uint64`` arrays and are what the generators actually use.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DigitError",
    "check_base",
    "max_digits",
    "digit_vector",
    "from_digits",
    "radical_inverse",
    "gray_code",
    "bit_reverse",
    "bit_reverse_array",
    "bit_length_array",
    "digits_array",
    "radical_inverse_array",
    "first_primes",
]


class DigitError(ValueError):
    """Raised for out-of-range indices or invalid bases."""


def _is_prime(b: int) -> bool:
    if b < 2:
        return False
    k = 2
    while k * k <= b:
        if b % k == 0:
            return False
        k += 1
    return True


def check_base(base: int) -> int:
    base = int(base)
    if base < 2 or not _is_prime(base):
        raise DigitError(f"invalid base {base}: must be a prime >= 2")
    return base


def max_digits(base: int, bits: int = 64) -> int:
    """Largest m with base**m <= 2**bits."""
    check_base(base)
    m, p = 0, 1
    while p * base <= 2**bits:
        p *= base
        m += 1
    return m


def _check_index(i: int, base: int, m: int) -> None:
    if m < 0:
        raise DigitError(f"digit count must be non-negative, got {m}")
    if m > max_digits(base):
        raise DigitError(f"{base}**{m} does not fit a 64-bit word")
    if i < 0 or i >= base**m:
        raise DigitError(f"index {i} out of range [0, {base}**{m})")


def digit_vector(i: int, base: int, m: int) -> tuple[int, ...]:
    """Least-significant-first base-``base`` digits of ``i``, length ``m``."""
    base = check_base(base)
    _check_index(i, base, m)
    out = []
    for _ in range(m):
        i, r = divmod(i, base)
        out.append(r)
    return tuple(out)


def from_digits(digits, base: int) -> int:
    base = check_base(base)
    value = 0
    for dgt in reversed(tuple(digits)):
        if not 0 <= dgt < base:
            raise DigitError(f"digit {dgt} not in [0, {base})")
        value = value * base + dgt
    return value


def radical_inverse(i: int, base: int, m: int) -> float:
    """Mirror the first ``m`` digits of ``i`` across the radix point."""
    dgts = digit_vector(i, base, m)
    v = 0.0
    for dgt in reversed(dgts):
        v = (v + dgt) / base
    return v


def gray_code(i: int, base: int = 2) -> int:
    """Base-``base`` reflected Gray code of ``i``.

    Consecutive codes differ in exactly one digit, by +-1 mod ``base``.
    """
    base = check_base(base)
    if i < 0:
        raise DigitError(f"index must be non-negative, got {i}")
    if base == 2:
        return i ^ (i >> 1)
    dgts = []
    while i:
        i, r = divmod(i, base)
        dgts.append(r)
    # reflected code: a digit runs backwards when the digits above it sum to odd
    out, p, above = 0, 1, sum(dgts)
    for dgt in dgts:
        above -= dgt
        out += (base - 1 - dgt if above % 2 else dgt) * p
        p *= base
    return out


def bit_reverse(i: int, m: int) -> int:
    if m < 0 or m > 64:
        raise DigitError(f"bit width must be in [0, 64], got {m}")
    if i < 0 or i >= 1 << m:
        raise DigitError(f"index {i} out of range [0, 2**{m})")
    out = 0
    for _ in range(m):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


_U1 = np.uint64(1)


def bit_reverse_array(i, m: int) -> np.ndarray:
    """Vectorized :func:`bit_reverse` on a uint64 array."""
    i = np.asarray(i, dtype=np.uint64)
    if m == 0:
        return np.zeros_like(i)
    if m < 64 and np.any(i >> np.uint64(m)):
        raise DigitError(f"indices out of range [0, 2**{m})")
    out = np.zeros_like(i)
    for t in range(m):
        out |= ((i >> np.uint64(t)) & _U1) << np.uint64(m - 1 - t)
    return out


def bit_length_array(w) -> np.ndarray:
    """Exact bit length of each entry of a uint64 array (0 for 0)."""
    w = np.asarray(w, dtype=np.uint64).copy()
    out = np.zeros(w.shape, dtype=np.int64)
    for s in (32, 16, 8, 4, 2, 1):
        big = w >= (np.uint64(1) << np.uint64(s))
        out[big] += s
        w[big] >>= np.uint64(s)
    out[w > 0] += 1
    return out


def digits_array(i, base: int, m: int) -> np.ndarray:
    """Digits of each index as an ``(len(i), m)`` uint8/int array, LSB first."""
    i = np.asarray(i, dtype=np.int64).copy()
    out = np.empty(i.shape + (m,), dtype=np.int64)
    for t in range(m):
        out[..., t] = i % base
        i //= base
    if np.any(i):
        raise DigitError(f"indices out of range [0, {base}**{m})")
    return out


def radical_inverse_array(i, base: int, m: int) -> np.ndarray:
    dgts = digits_array(i, base, m)
    v = np.zeros(dgts.shape[:-1])
    for t in range(m - 1, -1, -1):
        v = (v + dgts[..., t]) / base
    return v


def first_primes(d: int) -> list[int]:
    out: list[int] = []
    k = 2
    while len(out) < d:
        if _is_prime(k):
            out.append(k)
        k += 1
    return out
