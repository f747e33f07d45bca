"""Fast Gram-matrix algebra for lattice and digital-net point sets.

For ``n = 2**m`` points in radical-inverse order the Gram matrix factors as
``K = V diag(lam) conj(V)`` with ``conj(V)`` one of the unitary transforms in
:mod:`qmcfast.transforms`:

* ``si-lattice``: shifted rank-1 lattice with a shift-invariant kernel,
  ``conj(V) = fftbr``.  Eigenvalues are complex in general.
* ``dsi-dnet``: digitally shifted or LMS-scrambled base-2 net with a Walsh
  kernel, ``conj(V) = V = fwht``.  Eigenvalues are real.

The first column of ``V`` is constant, so ``lam = sqrt(n) * conj(V) k1``
needs only the first Gram column ``k1[i] = K(x_i, x_0)``.  Eigenvalue order
follows the transform output; entry 0 belongs to the constant eigenvector.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .batch import PointBatch
from .dnet import StructureError
from .kernels import KernelSpec, combine, kernel_column, kernel_eval, si_kernel_1d
from .transforms import forward, inverse, transform_update_double

__all__ = [
    "SpectralGram",
    "SingularGramError",
    "GRAM_KINDS",
    "gram_build",
    "gram_matvec",
    "gram_solve",
    "gram_update_double",
    "gram_extend",
    "discrepancy",
    "optimal_weights",
    "kernel_integrals",
    "kernel_integrals_quadrature",
    "dense_gram",
]

GRAM_KINDS = {"si-lattice": ("si-bernoulli", "lattice", "fftbr"), "dsi-dnet": ("dsi-walsh", "dnet", "fwht")}
SINGULAR_RTOL = 1e-12


class SingularGramError(ArithmeticError):
    """An eigenvalue is too small relative to the largest one."""

    def __init__(self, index: int, value: complex, scale: float):
        super().__init__(f"Gram matrix is singular: |lambda[{index}]| = {abs(value):.3e} "
                         f"<= {SINGULAR_RTOL:g} * {scale:.3e}")
        self.index = index


@dataclass(frozen=True)
class SpectralGram:
    """Eigen-decomposed Gram matrix stored as ``O(n)`` data."""

    kind: str
    m: int
    eigenvalues: np.ndarray
    k1: np.ndarray
    kernel: KernelSpec
    x0: np.ndarray
    fingerprint: str

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def transform(self) -> str:
        return GRAM_KINDS[self.kind][2]


def _fingerprint(points: np.ndarray) -> str:
    return hashlib.blake2b(np.ascontiguousarray(points).tobytes(), digest_size=12).hexdigest()


def _log2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"number of points must be a power of 2, got {n}")
    return n.bit_length() - 1


def _finish(kind: str, m: int, k1: np.ndarray, kernel: KernelSpec, x0: np.ndarray, fp: str,
            lam: np.ndarray | None = None) -> SpectralGram:
    if lam is None:
        lam = np.sqrt(1 << m) * forward(k1, GRAM_KINDS[kind][2])
    if kind == "dsi-dnet":
        lam = np.real(lam)
    return SpectralGram(kind, m, lam, k1, kernel, x0, fp)


def gram_build(kernel: KernelSpec, points, kind: str | None = None) -> SpectralGram:
    """Spectral Gram matrix from the first replication of a point set.

    Parameters
    ----------
    kernel : KernelSpec
    points : PointBatch or array of shape (n, d)
        A :class:`PointBatch` is checked for sequence kind, order and
        randomization.  A bare array is trusted to be in radical-inverse
        order and ``kind`` must then be given.
    kind : {"si-lattice", "dsi-dnet"}, optional
        Inferred from the kernel family when omitted.
    """
    if kind is None:
        kind = {"si-bernoulli": "si-lattice", "dsi-walsh": "dsi-dnet"}[kernel.family]
    if kind not in GRAM_KINDS:
        raise ValueError(f"unknown Gram kind {kind!r}")
    family, seq, _ = GRAM_KINDS[kind]
    if kernel.family != family:
        raise ValueError(f"{kind} needs a {family} kernel, got {kernel.family}")
    if isinstance(points, PointBatch):
        if points.kind != seq:
            raise ValueError(f"{kind} needs {seq} points, got {points.kind}")
        if points.order != "radical-inverse":
            raise StructureError(f"fast Gram algebra needs radical-inverse order, got {points.order}")
        if points.randomization == "nus":
            raise StructureError("nested uniform scrambling destroys the block structure of the Gram matrix")
        if points.start != 0:
            raise StructureError("point set must start at index 0")
        x = points.x[0]
    else:
        x = np.asarray(points, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
    m = _log2(x.shape[0])
    if x.shape[1] != kernel.d:
        raise ValueError(f"points have d={x.shape[1]}, kernel has d={kernel.d}")
    k1 = kernel_column(kernel, x, x[0])
    return _finish(kind, m, k1, kernel, x[0].copy(), _fingerprint(x))


def _check_len(G: SpectralGram, y: np.ndarray) -> None:
    if y.shape[-1] != G.n:
        raise ValueError(f"vector length {y.shape[-1]} does not match n={G.n}")


def _real_if(G: SpectralGram, y_in: np.ndarray, out: np.ndarray) -> np.ndarray:
    return np.real(out) if not np.iscomplexobj(y_in) else out


def gram_matvec(G: SpectralGram, y) -> np.ndarray:
    """``K y`` in ``O(n log n)``; acts on the last axis."""
    y = np.asarray(y)
    _check_len(G, y)
    return _real_if(G, y, inverse(forward(y, G.transform) * G.eigenvalues, G.transform))


def _check_singular(G: SpectralGram) -> None:
    mag = np.abs(G.eigenvalues)
    scale = mag.max()
    small = np.flatnonzero(mag <= SINGULAR_RTOL * scale)
    if small.size:
        i = int(small[0])
        raise SingularGramError(i, G.eigenvalues[i], scale)


def gram_solve(G: SpectralGram, y) -> np.ndarray:
    """``K^{-1} y`` in ``O(n log n)``; raises :class:`SingularGramError` on tiny eigenvalues."""
    y = np.asarray(y)
    _check_len(G, y)
    _check_singular(G)
    return _real_if(G, y, inverse(forward(y, G.transform) / G.eigenvalues, G.transform))


def gram_update_double(G: SpectralGram, new_k, new_points=None) -> SpectralGram:
    """Gram eigenvalues for ``2n`` points from those for ``n`` points.

    ``new_k[i] = K(x_{n+i}, x_0)`` for the next ``n`` sequence members.  Only
    the new half is transformed.
    """
    new_k = np.asarray(new_k, dtype=np.float64)
    if new_k.shape != (G.n,):
        raise ValueError(f"expected {G.n} new Gram column entries, got shape {new_k.shape}")
    n = G.n
    lam = np.sqrt(2 * n) * transform_update_double(G.eigenvalues / np.sqrt(n), new_k, G.transform)
    fp = G.fingerprint if new_points is None else _fingerprint(np.asarray(new_points)) + "+" + G.fingerprint
    return _finish(G.kind, G.m + 1, np.concatenate([G.k1, new_k]), G.kernel, G.x0, fp, lam)


def gram_extend(G: SpectralGram, new_points) -> SpectralGram:
    """Convenience wrapper: evaluate the new Gram entries, then double."""
    new_points = np.asarray(new_points, dtype=np.float64)
    if new_points.ndim == 1:
        new_points = new_points[:, None]
    return gram_update_double(G, kernel_column(G.kernel, new_points, G.x0), new_points)


def kernel_integrals(kernel: KernelSpec, n: int) -> tuple[float, np.ndarray]:
    """``(I2, kappa)`` for the built-in mean-zero kernels: both equal ``gamma`` times the constant weight."""
    c = kernel.gamma * kernel.constant_weight
    return c, np.full(n, c)


def _panel_rule(split: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on ``[0, split]`` and ``[split, 1]``: exact for piecewise polynomials kinked at ``split``."""
    z, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for lo, hi in ((0.0, split), (split, 1.0)):
        if hi > lo:
            nodes.append(lo + (hi - lo) * (z + 1) / 2)
            weights.append((hi - lo) * w / 2)
    return np.concatenate(nodes), np.concatenate(weights)


def kernel_integrals_quadrature(kernel: KernelSpec, points, order: int = 6) -> tuple[float, np.ndarray]:
    """Tensor Gauss-Legendre check of :func:`kernel_integrals` (SI kernels, ``d <= 3``).

    Each coordinate is split at the point's own coordinate, where the
    Bernoulli kernel has its only kink, so a rule of ``order >= 4`` is exact
    up to rounding.
    """
    if kernel.family != "si-bernoulli" or kernel.d > 3:
        raise ValueError("quadrature fallback covers shift-invariant kernels with d <= 3")
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))

    def integral(p: np.ndarray) -> float:
        rules = [_panel_rule(float(c), order) for c in p]
        grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        wts = np.ones(())
        for r in rules:
            wts = np.multiply.outer(wts, r[1])
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        factors = np.stack([si_kernel_1d(a, nodes[:, j], p[j]) for j, a in enumerate(kernel.alphas)], axis=-1)
        return float(wts.ravel() @ combine(kernel, factors))

    kappa = np.array([integral(p) for p in points])
    return integral(np.zeros(kernel.d)), kappa


def discrepancy(G: SpectralGram, weights, integrals=None) -> float:
    """Squared discrepancy ``I2 - 2 w.kappa + w.K w`` of a cubature rule with weights ``w``."""
    w = np.asarray(weights, dtype=np.float64)
    _check_len(G, w)
    I2, kappa = kernel_integrals(G.kernel, G.n) if integrals is None else integrals
    kappa = np.asarray(kappa, dtype=np.float64)
    _check_len(G, kappa)
    return float(I2 - 2 * w @ kappa + w @ gram_matvec(G, w))


def optimal_weights(G: SpectralGram, kappa=None) -> np.ndarray:
    """Discrepancy-minimizing weights ``K^{-1} kappa``."""
    if kappa is None:
        kappa = kernel_integrals(G.kernel, G.n)[1]
    return gram_solve(G, np.asarray(kappa, dtype=np.float64))


def dense_gram(kernel: KernelSpec, points) -> np.ndarray:
    """Dense ``n x n`` Gram matrix; reference for testing at small ``n``."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return kernel_eval(kernel, x[:, None, :], x[None, :, :])
