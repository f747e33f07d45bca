"""Randomized QMC estimates with Student's-t confidence intervals.

``R`` independent randomizations of one low-discrepancy sequence give ``R``
unbiased estimates; their spread yields the interval

    mu_hat +- t_{R-1, 1-tau/2} * sigma_hat / sqrt(R).

The adaptive driver doubles ``n`` and keeps only per-replication running
sums, so earlier function values are reused without being stored.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import betaincinv

from .batch import map_replications
from .dnet import DigitalNet
from .halton import Halton
from .integrands import Integrand
from .lattice import Lattice
from .rng import default_seed, replication_rngs

__all__ = [
    "SamplerSpec",
    "SAMPLER_PRESETS",
    "IIDSampler",
    "make_sampler",
    "RqmcResult",
    "DofError",
    "baker_transform",
    "student_t_quantile",
    "rqmc_fixed",
    "rqmc_adaptive",
]


class DofError(ValueError):
    """Fewer than two replications, so no variance estimate exists."""


def baker_transform(x) -> np.ndarray:
    """Tent map ``1 - 2 |x - 1/2|`` applied componentwise; maps ``[0, 1)`` onto ``[0, 1]``."""
    return 1.0 - 2.0 * np.abs(np.asarray(x, dtype=np.float64) - 0.5)


def student_t_quantile(nu: float, p: float) -> float:
    """Quantile of Student's t with ``nu`` degrees of freedom.

    Uses ``P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2)`` and inverts the
    regularized incomplete beta function.
    """
    if not nu >= 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {nu}")
    if not 0 < p < 1:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    tail = 2 * min(p, 1 - p)
    x = betaincinv(nu / 2, 0.5, tail)
    t = np.sqrt(nu * (1 - x) / x)
    return float(t if p > 0.5 else -t)


@dataclass(frozen=True)
class SamplerSpec:
    """Which randomized sequence to draw points from.

    ``kind`` is ``iid``, ``lattice``, ``dnet`` or ``halton``; ``baker``
    periodizes the integrand with :func:`baker_transform`.
    """

    kind: str = "dnet"
    randomize: str = "lms-shift"
    alpha: int = 1
    order: str = "radical-inverse"
    lms_family: str = "matousek"
    baker: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


SAMPLER_PRESETS = {
    "iid": SamplerSpec("iid", "none"),
    "lattice": SamplerSpec("lattice", "shift", baker=True),
    "lattice-nobaker": SamplerSpec("lattice", "shift"),
    "dnet-lms": SamplerSpec("dnet", "lms-shift"),
    "dnet-ho": SamplerSpec("dnet", "lms-shift", alpha=2),
    "dnet-nus": SamplerSpec("dnet", "nus"),
    "halton": SamplerSpec("halton", "lms-perm"),
    "halton-qrng": SamplerSpec("halton", "qrng"),
}


class IIDSampler:
    """Plain Monte Carlo points from one Philox stream per replication."""

    kind = "iid"

    def __init__(self, d: int, R: int = 1, seed: int | None = None, threads: int = 1):
        self.d, self.R, self.threads = d, R, threads
        self.seed = default_seed() if seed is None else seed
        self._rngs = replication_rngs(self.seed, R)
        self._pos = [0] * R

    def _replication(self, r: int, start: int, stop: int) -> np.ndarray:
        if start != self._pos[r]:
            self._rngs[r] = replication_rngs(self.seed, self.R)[r]
            self._rngs[r].random(start * self.d)
        self._pos[r] = stop
        return self._rngs[r].random((stop - start, self.d))

    def points(self, start: int, stop: int) -> np.ndarray:
        return map_replications(lambda r: self._replication(r, start, stop), self.R, self.threads)


def make_sampler(spec: SamplerSpec | str, d: int, R: int, seed: int | None = None, threads: int = 1):
    """Instantiate the sequence described by ``spec`` (or a preset name)."""
    if isinstance(spec, str):
        if spec not in SAMPLER_PRESETS:
            raise ValueError(f"unknown sampler preset {spec!r}; choose from {sorted(SAMPLER_PRESETS)}")
        spec = SAMPLER_PRESETS[spec]
    if spec.kind == "iid":
        return IIDSampler(d, R, seed, threads)
    if spec.kind == "lattice":
        return Lattice(d, R, seed, randomize=spec.randomize, order=spec.order, threads=threads)
    if spec.kind == "dnet":
        return DigitalNet(d, R, seed, randomize=spec.randomize, alpha=spec.alpha, order=spec.order,
                          lms_family=spec.lms_family, threads=threads)
    if spec.kind == "halton":
        return Halton(d, R, seed, randomize=spec.randomize, lms_family=spec.lms_family,
                      alpha=spec.alpha, threads=threads)
    raise ValueError(f"unknown sampler kind {spec.kind!r}")


def _spec_of(spec: SamplerSpec | str) -> SamplerSpec:
    return SAMPLER_PRESETS[spec] if isinstance(spec, str) else spec


@dataclass
class RqmcResult:
    mu_hat: float
    mu_r: np.ndarray
    sigma_hat: float
    ci: tuple[float, float]
    confidence: float
    n: int
    R: int
    tol_met: bool = True

    @property
    def half_width(self) -> float:
        return (self.ci[1] - self.ci[0]) / 2

    def to_dict(self) -> dict:
        return {"mu_hat": self.mu_hat, "ci_lo": self.ci[0], "ci_hi": self.ci[1], "sigma_hat": self.sigma_hat,
                "confidence": self.confidence, "n": self.n, "R": self.R, "tol_met": self.tol_met}


def _summarize(mu_r: np.ndarray, n: int, tau: float, tol_met: bool = True) -> RqmcResult:
    R = len(mu_r)
    mu = float(np.mean(mu_r))
    sigma = float(np.std(mu_r, ddof=1))
    half = student_t_quantile(R - 1, 1 - tau / 2) * sigma / np.sqrt(R)
    return RqmcResult(mu, mu_r, sigma, (float(mu - half), float(mu + half)), 1 - tau, n, R, tol_met)


def _replication_sums(f: Integrand, sampler, spec: SamplerSpec, start: int, stop: int) -> np.ndarray:
    x = sampler.points(start, stop)
    if spec.baker:
        x = baker_transform(x)
    return np.array([np.sum(f(x[r])) for r in range(x.shape[0])])


def _check(f: Integrand, R: int, tau: float) -> None:
    if R < 2:
        raise DofError(f"need R >= 2 replications for a confidence interval, got {R}")
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")


def rqmc_fixed(f: Integrand, sampler: SamplerSpec | str, n: int, R: int = 15, tau: float = 0.05,
               seed: int | None = None, threads: int = 1) -> RqmcResult:
    """Estimate ``E f`` from ``R`` randomized ``n``-point rules."""
    _check(f, R, tau)
    spec = _spec_of(sampler)
    gen = make_sampler(spec, f.d, R, seed, threads)
    return _summarize(_replication_sums(f, gen, spec, 0, n) / n, n, tau)


def rqmc_adaptive(f: Integrand, sampler: SamplerSpec | str, tau: float = 0.05, abs_tol: float = 1e-3,
                  n0: int = 2**8, n_max: int = 2**20, R: int = 15, seed: int | None = None,
                  threads: int = 1) -> RqmcResult:
    """Double ``n`` from ``n0`` until the interval half-width is at most ``abs_tol``.

    When ``n_max`` is reached first the last result is returned with
    ``tol_met = False``.
    """
    _check(f, R, tau)
    if n0 < 1 or n0 & (n0 - 1):
        raise ValueError(f"n0 must be a power of 2, got {n0}")
    spec = _spec_of(sampler)
    gen = make_sampler(spec, f.d, R, seed, threads)
    sums = _replication_sums(f, gen, spec, 0, n0)
    n = n0
    while True:
        res = _summarize(sums / n, n, tau)
        if res.half_width <= abs_tol:
            return res
        if 2 * n > n_max:
            res.tol_met = False
            return res
        sums = sums + _replication_sums(f, gen, spec, n, 2 * n)
        n *= 2
