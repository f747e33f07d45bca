"""Wall-clock scaling of the fast transforms and spectral Gram matvecs.

Prints the best-of-repeats time for each size and the ratio to the previous size.
Usage: python scripts/timing.py [--m 12 14 16 18 20] [--reps 9]
"""

import argparse
import time

import numpy as np

from qmcfast.dnet import DigitalNet
from qmcfast.fastgram import gram_build, gram_matvec
from qmcfast.kernels import KernelSpec
from qmcfast.lattice import Lattice
from qmcfast.transforms import fftbr, fwht


def best_time(fn, reps: int) -> float:
    best = np.inf
    for _ in range(reps):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, nargs="+", default=[12, 14, 16, 18, 20])
    p.add_argument("--reps", type=int, default=9)
    a = p.parse_args()
    rng = np.random.default_rng(0)
    cases = {
        "fftbr": lambda n: (lambda y=rng.standard_normal(n) + 1j * rng.standard_normal(n): fftbr(y)),
        "fwht": lambda n: (lambda y=rng.standard_normal(n): fwht(y)),
    }
    for label, spec, gen in (("matvec dsi-dnet", KernelSpec.uniform("dsi-walsh", 2, 2), DigitalNet),
                             ("matvec si-lattice", KernelSpec.uniform("si-bernoulli", 2, 2), Lattice)):
        def make(n, spec=spec, gen=gen):
            G, y = gram_build(spec, gen(2, 1, 1).gen(n)), rng.standard_normal(n)
            return lambda: gram_matvec(G, y)
        cases[label] = make
    for label, make in cases.items():
        prev = None
        for m in a.m:
            t = best_time(make(2**m), a.reps)
            ratio = "" if prev is None else f"  x{t / prev:.2f}"
            print(f"{label:18s} n=2^{m:<2d} {t * 1e3:9.3f} ms{ratio}")
            prev = t


if __name__ == "__main__":
    main()
