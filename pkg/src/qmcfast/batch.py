from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["PointBatch", "ShapeError", "ExhaustedError", "map_replications"]


class ShapeError(ValueError):
    """Array shapes that do not agree (dimension, replication count, length)."""


class ExhaustedError(ValueError):
    """More points requested than the sequence can supply at this precision."""


@dataclass
class PointBatch:
    """``R`` replications of ``n`` points in ``[0, 1)^d``.

    ``x`` has shape ``(R, n, d)``.  ``start`` is the sequence index of the
    first point, so a batch of points ``[n, 2n)`` can be appended to one of
    points ``[0, n)`` when doubling.
    """

    x: np.ndarray
    kind: str
    order: str = "radical-inverse"
    randomization: str = "none"
    seed: int | None = None
    start: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        if self.x.ndim != 3:
            raise ShapeError(f"point batch must be (R, n, d), got shape {self.x.shape}")

    @property
    def R(self) -> int:
        return self.x.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def d(self) -> int:
        return self.x.shape[2]

    def config(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "randomization": self.randomization,
            "seed": self.seed,
            "start": self.start,
            "R": self.R,
            "n": self.n,
            "d": self.d,
            **self.meta,
        }


def map_replications(fn: Callable[[int], np.ndarray], R: int, threads: int = 1) -> np.ndarray:
    """Evaluate ``fn(r)`` for each replication and stack results in order.

    Each replication owns its randomness, so the stacked result does not
    depend on ``threads``.
    """
    if threads <= 1 or R <= 1:
        parts = [fn(r) for r in range(R)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(fn, range(R)))
    return np.stack(parts) if parts else np.empty((0,))
