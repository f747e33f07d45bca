from math import e, pi, sin, tan

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from qmcfast.expr import expression_integrand
from qmcfast.integrands import CATALOG, Integrand, integrand_library
from qmcfast.rqmc import (
    SAMPLER_PRESETS,
    DofError,
    IIDSampler,
    baker_transform,
    make_sampler,
    rqmc_adaptive,
    rqmc_fixed,
    student_t_quantile,
)


def const(c, d=2):
    return Integrand("const", d, lambda x: np.full(x.shape[:-1], c), c)


def test_baker_examples():
    assert np.array_equal(baker_transform([0.25, 0.0, 0.5]), [0.5, 0.0, 1.0])


@given(st.floats(0, 1, exclude_max=True))
def test_baker_range(x):
    assert 0 <= baker_transform(x) <= 1


def test_student_t_examples():
    assert student_t_quantile(1, 0.975) == pytest.approx(tan(pi * 0.475), abs=1e-8)
    p = 0.975
    assert student_t_quantile(2, p) == pytest.approx((2 * p - 1) * np.sqrt(2 / (4 * p * (1 - p))), abs=1e-8)
    assert student_t_quantile(7, 0.5) == 0
    with pytest.raises(ValueError):
        student_t_quantile(0, 0.9)
    with pytest.raises(ValueError):
        student_t_quantile(3, 1.0)


@given(nu=st.integers(1, 200), p=st.floats(0.001, 0.999))
def test_student_t_matches_scipy(nu, p):
    assert student_t_quantile(nu, p) == pytest.approx(stats.t.ppf(p, nu), abs=1e-8, rel=1e-10)


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_means_by_quadrature(name):
    f = integrand_library(name)
    if f.d == 1:
        ref, _ = integrate.quad(lambda x: f(np.array([x]))[()], 0, 1, epsabs=1e-12)
    else:
        ref, _ = integrate.nquad(lambda *x: float(f(np.array(x))), [[0, 1]] * f.d,
                                 opts={"epsabs": 1e-10, "points": [0.5]})
    assert f.mean == pytest.approx(ref, abs=1e-7)


def test_catalog_exact_values():
    assert integrand_library("oakley").mean == 5 + 400 * sin(0.01)
    assert integrand_library("g-function").mean == pytest.approx(1.0, abs=1e-15)
    assert integrand_library("simple-d2").mean == 0.0
    assert integrand_library("simple-d1")(np.array([1 - 1e-12])) == pytest.approx(e - 1)
    with pytest.raises(ValueError):
        integrand_library("nope")
    with pytest.raises(ValueError):
        integrand_library("oakley", 3)


def test_integrand_dimension_check():
    with pytest.raises(ValueError):
        integrand_library("simple-d2")(np.zeros((4, 3)))


@pytest.mark.parametrize("sampler", sorted(SAMPLER_PRESETS))
def test_constant_integrand(sampler):
    res = rqmc_fixed(const(3.5), sampler, 64, R=4, seed=1)
    assert res.mu_hat == pytest.approx(3.5)
    assert res.sigma_hat == pytest.approx(0, abs=1e-14)
    assert res.ci[0] == pytest.approx(res.ci[1])


@given(seed=st.integers(0, 2**32), sampler=st.sampled_from(sorted(SAMPLER_PRESETS)))
def test_result_invariants(seed, sampler):
    res = rqmc_fixed(integrand_library("simple-d2"), sampler, 32, R=5, seed=seed)
    assert res.mu_hat == pytest.approx(np.mean(res.mu_r))
    assert res.ci[0] <= res.mu_hat <= res.ci[1]
    assert res.sigma_hat >= 0
    assert res.to_dict()["R"] == 5


def test_dof_error():
    with pytest.raises(DofError):
        rqmc_fixed(const(1.0), "iid", 8, R=1)


def test_simple_d1_within_three_half_widths():
    f = integrand_library("simple-d1")
    runs = [rqmc_fixed(f, "dnet-lms", 2**10, R=15, seed=s) for s in range(200)]
    hits = sum(abs(r.mu_hat) <= 3 * r.half_width for r in runs)
    assert hits >= 190


def test_g_function_converges():
    f = integrand_library("g-function", 3)
    errs = [abs(rqmc_fixed(f, "dnet-lms", 2**m, R=15, seed=2).mu_hat - 1) for m in (6, 10, 14)]
    assert errs[-1] < errs[0]
    assert errs[-1] < 1e-3


def test_adaptive_examples():
    f = integrand_library("corner-peak", 3)
    res = rqmc_adaptive(f, "dnet-lms", abs_tol=1e-4, seed=3)
    assert res.tol_met
    assert abs(res.mu_hat - f.mean) <= 1e-4
    res = rqmc_adaptive(f, "lattice", abs_tol=np.inf, n0=32)
    assert res.n == 32 and res.tol_met
    res = rqmc_adaptive(const(2.0), "halton", abs_tol=0.0, n0=16, n_max=16)
    assert res.n == 16 and res.half_width == 0
    res = rqmc_adaptive(integrand_library("simple-d1"), "iid", abs_tol=1e-9, n0=16, n_max=64)
    assert res.n == 64 and not res.tol_met
    with pytest.raises(ValueError):
        rqmc_adaptive(f, "iid", n0=12)


def test_adaptive_reuses_prefix():
    # the adaptive estimate at n equals the fixed-n estimate on the same randomized sequence
    f = integrand_library("oakley")
    res = rqmc_adaptive(f, "dnet-lms", abs_tol=0.0, n0=16, n_max=256, seed=5)
    ref = rqmc_fixed(f, "dnet-lms", 256, seed=5)
    assert np.allclose(res.mu_r, ref.mu_r, rtol=1e-14)


def test_iid_sampler_extends():
    s = IIDSampler(2, R=3, seed=4)
    a = s.points(0, 10)
    b = s.points(10, 30)
    assert np.array_equal(np.concatenate([a, b], axis=1), IIDSampler(2, R=3, seed=4).points(0, 30))
    assert np.array_equal(IIDSampler(2, R=3, seed=4).points(10, 30), b)


def test_make_sampler_unknown():
    with pytest.raises(ValueError):
        make_sampler("bogus", 2, 2)


def test_lattice_unbiased_under_shifts():
    for name in ("simple-d1", "simple-d2", "oakley", "g-function", "oscillatory", "corner-peak"):
        f = integrand_library(name)
        res = rqmc_fixed(f, "lattice-nobaker", 16, R=1000, seed=9)
        se = res.sigma_hat / np.sqrt(1000)
        assert abs(res.mu_hat - f.mean) <= 4 * se + 1e-15


def test_expression_integrand_matches_catalog(rng):
    f = expression_integrand("x1 * exp(x1) - 1")
    x = rng.random((50, 1))
    assert np.allclose(f(x), integrand_library("simple-d1")(x))
