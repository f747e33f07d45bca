import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import dense_solve, lattice_batch, net_batch, sign_hadamard
from qmcfast.dnet import DigitalNet, StructureError
from qmcfast.fastgram import (
    SingularGramError,
    dense_gram,
    discrepancy,
    gram_build,
    gram_extend,
    gram_matvec,
    gram_solve,
    gram_update_double,
    kernel_integrals,
    kernel_integrals_quadrature,
    optimal_weights,
)
from qmcfast.kernels import KernelSpec, kernel_column

KINDS = st.sampled_from(["si-lattice", "dsi-dnet"])


def setup(kind, d, m, seed, alpha=2):
    if kind == "si-lattice":
        spec = KernelSpec.uniform("si-bernoulli", d, min(alpha, 3), eta=0.7)
        batch = lattice_batch(d, m, seed)
    else:
        spec = KernelSpec.uniform("dsi-walsh", d, max(alpha, 2), eta=0.7)
        batch = net_batch(d, m, seed)
    return spec, batch, dense_gram(spec, batch.x[0])


def test_single_point():
    spec = KernelSpec("dsi-walsh", (2,))
    G = gram_build(spec, np.array([[0.0]]))
    assert np.allclose(G.eigenvalues, [2.5])


def test_two_point_net_example():
    spec = KernelSpec("dsi-walsh", (2,))
    G = gram_build(spec, np.array([[0.0], [0.5]]))
    assert np.allclose(G.k1, [2.5, 0.75])
    assert np.allclose(G.eigenvalues, [3.25, 1.75])
    assert np.allclose(np.linalg.eigvalsh(dense_gram(spec, [[0.0], [0.5]])), [1.75, 3.25])


@given(kind=KINDS, d=st.integers(1, 3), m=st.integers(0, 8), seed=st.integers(0, 2**32))
def test_matvec_solve_match_dense(kind, d, m, seed):
    spec, batch, K = setup(kind, d, m, seed)
    G = gram_build(spec, batch)
    if kind == "dsi-dnet":
        assert G.eigenvalues.dtype.kind == "f"
        assert np.min(G.eigenvalues) >= -1e-8 * np.max(G.eigenvalues)
    y = np.random.default_rng(seed).standard_normal(2**m)
    ref = K @ y
    assert np.linalg.norm(gram_matvec(G, y) - ref) <= 1e-8 * np.linalg.norm(ref)
    ref = dense_solve(K, y)
    assert np.linalg.norm(gram_solve(G, y) - ref) <= 1e-6 * np.linalg.norm(ref)


@given(kind=KINDS, m=st.integers(0, 8), seed=st.integers(0, 2**32))
def test_eigenvalue_identities(kind, m, seed):
    spec, batch, K = setup(kind, 2, m, seed)
    G = gram_build(spec, batch)
    lam = G.eigenvalues
    assert np.sum(lam).real == pytest.approx(2**m * K[0, 0], rel=1e-10)
    assert lam[0].real == pytest.approx(np.sum(G.k1), rel=1e-10)


def test_column_and_zero_and_inverse_of_column(rng):
    for kind in ("si-lattice", "dsi-dnet"):
        spec, batch, _ = setup(kind, 2, 6, 3)
        G = gram_build(spec, batch)
        e0 = np.zeros(64)
        e0[0] = 1
        assert np.allclose(gram_matvec(G, e0), G.k1)
        assert np.array_equal(gram_matvec(G, np.zeros(64)), np.zeros(64))
        assert np.allclose(gram_solve(G, G.k1), e0, atol=1e-10)
        Y = rng.standard_normal((1000, 64))
        assert np.allclose(gram_solve(G, gram_matvec(G, Y)), Y, atol=1e-8)


def test_stacked_matvec(rng):
    spec, batch, K = setup("dsi-dnet", 2, 5, 1)
    G = gram_build(spec, batch)
    Y = rng.standard_normal((3, 32))
    assert np.allclose(gram_matvec(G, Y), Y @ K.T)


def test_singular_gram():
    spec = KernelSpec("dsi-walsh", (2,), etas=(0.0,))
    G = gram_build(spec, np.array([[0.0], [0.5]]))
    with pytest.raises(SingularGramError) as err:
        gram_solve(G, np.ones(2))
    assert err.value.index == 1


@pytest.mark.parametrize("kind", ["si-lattice", "dsi-dnet"])
@pytest.mark.parametrize("m", range(9))
def test_update_double_matches_scratch(kind, m):
    spec, batch, _ = setup(kind, 3, m + 1, 17)
    x = batch.x[0]
    n = 2**m
    G = gram_build(spec, x[:n], kind)
    grown = gram_extend(G, x[n:])
    ref = gram_build(spec, x, kind)
    assert np.linalg.norm(grown.eigenvalues - ref.eigenvalues) <= 1e-10 * np.linalg.norm(ref.eigenvalues)
    assert np.array_equal(grown.k1, ref.k1)


def test_update_duplicated_points():
    spec, batch, _ = setup("dsi-dnet", 1, 4, 2)
    G = gram_build(spec, batch)
    out = gram_update_double(G, G.k1)
    assert np.allclose(out.eigenvalues[:16], 2 * G.eigenvalues)
    assert np.allclose(out.eigenvalues[16:], 0, atol=1e-12)


def test_update_m0_butterfly():
    spec = KernelSpec("dsi-walsh", (2,))
    G = gram_build(spec, np.array([[0.0]]))
    out = gram_update_double(G, [0.75])
    assert np.allclose(out.eigenvalues, [3.25, 1.75])
    with pytest.raises(ValueError):
        gram_update_double(G, [0.75, 0.1])


def test_structure_errors():
    spec = KernelSpec("dsi-walsh", (2, 2))
    with pytest.raises(StructureError):
        gram_build(spec, DigitalNet(2, randomize="nus").gen(8))
    with pytest.raises(StructureError):
        gram_build(spec, DigitalNet(2, order="gray").gen(8))
    with pytest.raises(ValueError):
        gram_build(spec, DigitalNet(2).gen(6))
    with pytest.raises(ValueError):
        gram_build(KernelSpec("si-bernoulli", (1, 1)), DigitalNet(2).gen(8))


def test_discrepancy_examples():
    spec = KernelSpec("dsi-walsh", (2,))
    G = gram_build(spec, np.array([[0.0]]))
    assert discrepancy(G, [1.0]) == pytest.approx(1.5)
    assert optimal_weights(G) == pytest.approx([0.4])
    spec, batch, _ = setup("dsi-dnet", 2, 5, 4)
    G = gram_build(spec, batch)
    assert discrepancy(G, np.zeros(32)) == pytest.approx(spec.gamma)
    e0 = np.zeros(32)
    e0[0] = 1
    assert np.allclose(optimal_weights(G, G.k1), e0, atol=1e-10)


@given(kind=KINDS, m=st.integers(0, 8), seed=st.integers(0, 2**32))
def test_discrepancy_dense_and_optimality(kind, m, seed):
    spec, batch, K = setup(kind, 2, m, seed)
    G = gram_build(spec, batch)
    n = 2**m
    w = np.random.default_rng(seed).random(n)
    I2, kappa = kernel_integrals(spec, n)
    ref = I2 - 2 * w @ kappa + w @ K @ w
    assert discrepancy(G, w) == pytest.approx(ref, rel=1e-8, abs=1e-12)
    if m <= 6:
        w_opt = optimal_weights(G)
        assert discrepancy(G, w_opt) <= discrepancy(G, np.full(n, 1 / n)) + 1e-12


@pytest.mark.parametrize("d", [1, 2, 3])
def test_kernel_integrals_quadrature(d, rng):
    spec = KernelSpec("si-bernoulli", (1, 2, 3)[:d], 1.4, (0.5, 1.0, 2.0)[:d])
    x = rng.random((4, d))
    I2, kappa = kernel_integrals_quadrature(spec, x)
    assert I2 == pytest.approx(1.4, abs=1e-10)
    assert np.allclose(kappa, 1.4, atol=1e-10)


def test_array_input_needs_consistent_dims():
    with pytest.raises(ValueError):
        gram_build(KernelSpec("dsi-walsh", (2, 2)), np.zeros((4, 3)))


def test_batch_and_array_agree():
    spec, batch, _ = setup("si-lattice", 2, 5, 8)
    a = gram_build(spec, batch)
    b = gram_build(spec, batch.x[0], "si-lattice")
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert a.fingerprint == b.fingerprint
    assert np.allclose(kernel_column(spec, batch.x[0], batch.x[0, 0]), a.k1)


def test_gram_structure_small():
    m = 5
    H = sign_hadamard(m)
    spec, batch, K = setup("dsi-dnet", 2, m, 6)
    lam = gram_build(spec, batch).eigenvalues
    assert np.allclose(K, H @ np.diag(lam) @ H / 2**m, rtol=1e-8, atol=0)
    spec, batch, _ = setup("si-lattice", 2, m, 6)
    K = dense_gram(spec, lattice_batch(2, m, 6, "linear").x[0])
    for i in range(2**m):
        assert np.allclose(K[i], np.roll(K[0], i), rtol=0, atol=1e-12)
