import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmcfast.digits import bit_reverse_array
from qmcfast.transforms import (
    SpectralVector,
    TransformError,
    fftbr,
    forward,
    fwht,
    ifftbr,
    omega_vector,
    transform_update_double,
)

M = st.integers(0, 10)


def hadamard(m):
    H = np.ones((1, 1))
    for _ in range(m):
        H = np.block([[H, H], [H, -H]])
    return H / np.sqrt(2**m)


def dft_bitrev(y):
    """O(n^2) orthonormal DFT applied to ``y`` read in bit-reversed order."""
    n = len(y)
    m = n.bit_length() - 1
    k = np.arange(n)
    F = np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
    return F @ y[bit_reverse_array(k.astype(np.uint64), m).astype(np.int64)]


def random_vec(rng, n, complex_=True):
    y = rng.standard_normal(n)
    return y + 1j * rng.standard_normal(n) if complex_ else y


def test_two_point_butterflies():
    s = 1 / np.sqrt(2)
    assert np.allclose(fwht([3.0, 1.0]), [4 * s, 2 * s])
    assert np.allclose(fftbr([3.0, 1.0]), [4 * s, 2 * s])
    assert np.allclose(ifftbr([3.0, 1.0]), [4 * s, 2 * s])


def test_fwht_first_column_constant():
    e0 = np.zeros(8)
    e0[0] = 1
    assert np.allclose(fwht(e0), np.full(8, 1 / np.sqrt(8)))


@given(m=M, c=st.floats(-10, 10))
def test_fftbr_constant(m, c):
    n = 2**m
    out = fftbr(np.full(n, c))
    expect = np.zeros(n, dtype=complex)
    expect[0] = c * np.sqrt(n)
    assert np.allclose(out, expect, atol=1e-12 * (1 + abs(c)) * n)
    assert np.allclose(ifftbr(expect), np.full(n, c), atol=1e-12 * (1 + abs(c)))


def test_parseval_inverse_involution_1e3(rng):
    for _ in range(1000):
        m = int(rng.integers(0, 11))
        y = random_vec(rng, 2**m)
        yr = y.real.copy()
        for out in (fftbr(y), fwht(yr)):
            assert abs(np.linalg.norm(out) - np.linalg.norm(y if out.dtype == complex else yr)) <= 1e-12 * np.linalg.norm(y)
        assert np.allclose(ifftbr(fftbr(y)), y, rtol=0, atol=1e-12 * np.linalg.norm(y))
        assert np.allclose(fwht(fwht(yr)), yr, rtol=0, atol=1e-12 * np.linalg.norm(yr))


@pytest.mark.parametrize("m", range(11))
def test_fwht_matches_dense_hadamard(m, rng):
    y = rng.standard_normal(2**m)
    assert np.max(np.abs(fwht(y) - hadamard(m) @ y)) <= 1e-10


@pytest.mark.parametrize("m", range(11))
def test_fftbr_matches_dft_oracle(m, rng):
    y = random_vec(rng, 2**m)
    ref = dft_bitrev(y)
    assert np.linalg.norm(fftbr(y) - ref) <= 1e-10 * np.linalg.norm(ref)


@given(m=st.integers(0, 8), R=st.integers(1, 4), seed=st.integers(0, 2**32))
def test_stacked_matches_rows(m, R, seed):
    y = random_vec(np.random.default_rng(seed), (R, 3, 2**m))
    out = fftbr(y)
    for r in range(R):
        for c in range(3):
            assert np.array_equal(out[r, c], fftbr(y[r, c]))


def test_inplace(rng):
    y = random_vec(rng, 64)
    ref = fftbr(y)
    buf = y.copy()
    assert fftbr(buf, inplace=True) is buf
    assert np.allclose(buf, ref)
    z = rng.standard_normal(64)
    ref = fwht(z)
    assert fwht(z, inplace=True) is z
    assert np.allclose(z, ref)


def test_bad_length():
    for fn in (fwht, fftbr, ifftbr):
        with pytest.raises(TransformError):
            fn(np.ones(6))


def test_omega_examples():
    assert np.allclose(omega_vector(0), [1])
    assert np.allclose(omega_vector(1), [1, -1j])
    assert np.array_equal(omega_vector(3, "fwht"), np.ones(8))


@pytest.mark.parametrize("m", range(11))
def test_omega_interlacing_recursion(m):
    w = omega_vector(m)
    W = np.exp(-1j * np.pi / 2 ** (m + 1))
    inter = np.empty(2 ** (m + 1), dtype=complex)
    inter[0::2], inter[1::2] = w, W * w
    assert np.allclose(inter, omega_vector(m + 1), atol=1e-14)


def test_update_duplicated_halves_fwht(rng):
    y = rng.standard_normal(32)
    yt = fwht(y)
    out = transform_update_double(yt, y, "fwht")
    assert np.allclose(out[:32], np.sqrt(2) * yt)
    assert np.allclose(out[32:], 0)


@pytest.mark.parametrize("kind", ["fftbr", "fwht"])
@pytest.mark.parametrize("m", range(11))
def test_update_matches_from_scratch(kind, m, rng):
    y, y_new = rng.standard_normal(2**m), rng.standard_normal(2**m)
    got = transform_update_double(forward(y, kind), y_new, kind)
    ref = forward(np.concatenate([y, y_new]), kind)
    assert np.linalg.norm(got - ref) <= 1e-10 * np.linalg.norm(ref)


def test_update_m0_is_butterfly():
    out = transform_update_double(np.array([3.0 + 0j]), np.array([1.0]), "fftbr")
    assert np.allclose(out, fftbr([3.0, 1.0]))


def test_update_kind_mismatch():
    sv = SpectralVector(fwht(np.ones(4)), "fwht")
    with pytest.raises(TransformError):
        transform_update_double(sv, np.ones(4), "fftbr")
    out = transform_update_double(sv, np.ones(4))
    assert isinstance(out, SpectralVector) and out.m == 3
