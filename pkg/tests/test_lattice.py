import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from qmcfast.batch import ShapeError
from qmcfast.lattice import Lattice, LatticeGeneratingVector, OrderError, lattice_points, random_shifts


def test_linear_order_example():
    z = lattice_points((1, 3), 4, order="linear")[0]
    assert np.array_equal(z, [[0, 0], [0.25, 0.75], [0.5, 0.5], [0.75, 0.25]])


def test_origin_and_radical_inverse_point():
    z = lattice_points((1, 3), 4)[0]
    assert np.array_equal(z[0], [0, 0])
    assert np.array_equal(z[1], [0.5, 0.5])


def test_linear_order_requires_power_of_base():
    with pytest.raises(OrderError):
        lattice_points((1, 3), 6, order="linear")


def test_shift_dimension_mismatch():
    with pytest.raises(ShapeError):
        lattice_points((1, 3), 4, shifts=np.zeros((1, 3)))


def test_random_shifts_examples():
    assert random_shifts(3, 0, 1).shape == (0, 3)
    assert np.array_equal(random_shifts(2, 5, 11), random_shifts(2, 5, 11))
    s = random_shifts(2, 10**4, 5)
    assert np.all(np.abs(s.mean(axis=0) - 0.5) < 0.02)
    assert np.all((s >= 0) & (s < 1))


@given(m=st.integers(0, 10), d=st.integers(1, 4), base=st.sampled_from([2, 3]))
def test_orders_give_same_set(m, d, base):
    g = LatticeGeneratingVector.default(d)
    n = base**m
    a = lattice_points(g, n, "linear", base=base)[0]
    b = lattice_points(g, n, "radical-inverse", base=base)[0]
    key = lambda z: z[np.lexsort(z.T[::-1])]
    assert np.allclose(key(a), key(b), atol=2.0**-52)


@given(seed=st.integers(0, 2**32), m=st.integers(1, 8))
def test_shift_invariance_of_differences(seed, m):
    g = LatticeGeneratingVector.default(3)
    z = lattice_points(g, 2**m)[0]
    x = lattice_points(g, 2**m, shifts=random_shifts(3, 1, seed))[0]
    dz = np.mod(z[:, None, :] - z[None, :, :], 1.0)
    dx = np.mod(x[:, None, :] - x[None, :, :], 1.0)
    # compare on the circle to absorb wrap-around rounding
    gap = np.abs(dz - dx)
    assert np.all(np.minimum(gap, 1 - gap) < 1e-12)


def test_shifted_marginals_uniform():
    lat = Lattice(2, R=10**4, seed=3)
    x = lat.points(0, 4)
    for j in range(2):
        for i in range(4):
            counts = np.bincount((x[:, i, j] * 32).astype(int), minlength=32)
            assert chisquare(counts).pvalue > 0.001


def test_points_half_open():
    x = Lattice(4, R=64, seed=1).points(0, 256)
    assert np.all((x >= 0) & (x < 1))


def test_extension_matches_single_call():
    lat = Lattice(3, R=4, seed=9)
    full = lat.points(0, 64)
    assert np.array_equal(np.concatenate([lat.points(0, 32), lat.points(32, 64)], axis=1), full)


def test_generating_vector_validation():
    with pytest.raises(ValueError):
        LatticeGeneratingVector((1, 0))
    with pytest.raises(ShapeError):
        LatticeGeneratingVector.default(10**4)
