"""Seeded, counter-based randomness.

Everything random in the package flows through two primitives:

* :func:`replication_rngs` hands out one ``numpy`` Philox generator per
  replication, derived from a single integer seed with ``SeedSequence.spawn``.
  Replication ``r`` sees the same stream no matter how many replications are
  requested after it or which thread builds it.
* :func:`hash_uniform_bits` is a stateless keyed mixer (SplitMix64 finalizer
  applied to a combined key).  It backs nested uniform scrambling, where the
  random permutation of a tree node must be a pure function of
  ``(seed, dimension, depth, prefix)`` so nodes can be created lazily in any
  order without locking.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "default_seed",
    "replication_rngs",
    "as_generator",
    "random_digit_permutations",
    "hash64",
    "hash_uniform_bits",
    "hash_uniform",
]

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def default_seed() -> int:
    """Seed from ``QMC_SEED`` when set, else 7."""
    return int(os.environ.get("QMC_SEED", "7"))


def replication_rngs(seed: int | None, R: int) -> list[np.random.Generator]:
    ss = np.random.SeedSequence(default_seed() if seed is None else seed)
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(R)]


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return replication_rngs(rng, 1)[0]


def random_digit_permutations(base: int, count: int, rng=None) -> np.ndarray:
    """``count`` independent uniform permutations of ``range(base)``.

    Returns an int array of shape ``(count, base)``; row ``c`` maps digit
    ``k`` to ``row[k]``.  ``rng`` is a Generator or an integer seed.
    """
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    rng = as_generator(rng)
    perms = np.tile(np.arange(base, dtype=np.int64), (count, 1))
    return rng.permuted(perms, axis=1)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash64(*keys) -> np.ndarray:
    """Mix any number of broadcastable uint64 keys into one uint64 hash."""
    with np.errstate(over="ignore"):
        h = np.uint64(0x243F6A8885A308D3)
        for k in keys:
            k = np.asarray(k).astype(np.uint64)
            h = _mix((h ^ k) + _GOLDEN)
        return np.asarray(h, dtype=np.uint64)


def hash_uniform_bits(*keys) -> np.ndarray:
    """One pseudo-random bit (0/1, uint64) per broadcast key tuple."""
    return hash64(*keys) >> np.uint64(63)


def hash_uniform(*keys) -> np.ndarray:
    """Pseudo-random float in [0, 1) per broadcast key tuple (53 bits)."""
    return (hash64(*keys) >> np.uint64(11)).astype(np.float64) * 2.0**-53
