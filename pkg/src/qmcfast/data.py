"""Small built-in generating vectors and matrices so everything works offline.

Lattice vector
    ``LATTICE_G`` holds eight components of an embedded rank-1 lattice
    sequence for up to 2**20 points, extensible in radical-inverse order.
    The values follow the Cools, Kuo and Nuyens (2006) construction but have
    not been checked against a published file; the tests only check lattice
    structure and convergence.  Load a vetted vector through
    :mod:`qmcfast.lddata_io` when provenance matters.

Sobol' matrices
    ``SOBOL_DIRECTIONS`` are the Joe & Kuo (2008) "new-joe-kuo-6.21201"
    direction numbers for dimensions 2..8 (dimension 1 is the identity).  The
    test suite checks the resulting points against ``scipy.stats.qmc.Sobol``
    with ``scramble=False``.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LATTICE_G", "LATTICE_M_MAX", "SOBOL_DIRECTIONS", "sobol_matrices"]

LATTICE_G = (1, 182667, 469891, 498753, 110745, 446247, 250185, 118627)
LATTICE_M_MAX = 20

# (degree s, polynomial coefficient bits a, initial m_1..m_s)
SOBOL_DIRECTIONS = (
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
)


def _direction_integers(s: int, a: int, m_init, m: int) -> list[int]:
    mk = list(m_init)
    for k in range(s, m):
        new = mk[k - s] ^ (mk[k - s] << s)
        for q in range(1, s):
            if (a >> (s - 1 - q)) & 1:
                new ^= mk[k - q] << q
        mk.append(new)
    return mk[:m]


def sobol_matrices(d: int, m: int = 32, t_max: int = 32) -> np.ndarray:
    """Packed Sobol' generating matrices, shape ``(d, m)``, MSB-first words.

    Column ``k`` of dimension ``j`` is the ``t_max``-bit word whose leading
    bit is row 0 of the matrix.
    """
    if d > len(SOBOL_DIRECTIONS) + 1:
        raise ValueError(
            f"built-in Sobol' matrices cover d <= {len(SOBOL_DIRECTIONS) + 1}; "
            "load a larger set with qmcfast.lddata_io.read_dnet_matrices"
        )
    if m > t_max:
        raise ValueError("need m <= t_max")
    out = np.zeros((d, m), dtype=np.uint64)
    out[0] = [1 << (t_max - 1 - k) for k in range(m)]
    for j in range(1, d):
        s, a, m_init = SOBOL_DIRECTIONS[j - 1]
        mk = _direction_integers(s, a, m_init, m)
        out[j] = [mk[k] << (t_max - 1 - k) for k in range(m)]
    return out
