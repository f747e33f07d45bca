"""Randomized low-discrepancy sequences with fast kernel and Gram-matrix algebra.

Subpackages are plain modules:

``digits``, ``lattice``, ``dnet``, ``halton``
    Point generators and digit utilities.
``transforms``, ``kernels``, ``fastgram``
    Bit-reversed FFT and Walsh-Hadamard transforms, SI and DSI kernels, and
    ``O(n log n)`` Gram-matrix operations built on them.
``rqmc``, ``integrands``, ``study``
    Randomized QMC estimation, the test integrand catalog, convergence studies.
``lddata_io``, ``expr``, ``cli``
    File formats, the integrand expression language, and the command line.
"""

__version__ = "0.1.0"

from .batch import PointBatch
from .dnet import DigitalNet, GeneratingMatrixSet
from .fastgram import SpectralGram, gram_build, gram_matvec, gram_solve, gram_update_double
from .halton import Halton
from .integrands import integrand_library
from .kernels import KernelSpec, kernel_eval
from .lattice import Lattice, LatticeGeneratingVector
from .rqmc import rqmc_adaptive, rqmc_fixed
from .transforms import fftbr, fwht, ifftbr

__all__ = [
    "__version__",
    "PointBatch",
    "Lattice",
    "LatticeGeneratingVector",
    "DigitalNet",
    "GeneratingMatrixSet",
    "Halton",
    "fftbr",
    "ifftbr",
    "fwht",
    "KernelSpec",
    "kernel_eval",
    "SpectralGram",
    "gram_build",
    "gram_matvec",
    "gram_solve",
    "gram_update_double",
    "integrand_library",
    "rqmc_fixed",
    "rqmc_adaptive",
]
