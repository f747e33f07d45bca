import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmcfast.batch import PointBatch
from qmcfast.dnet import GeneratingMatrixSet
from qmcfast.lattice import LatticeGeneratingVector
from qmcfast.lddata_io import (
    BINARY_MAGIC,
    ParseError,
    RangeError,
    import_lddata,
    read_dnet_matrices,
    read_lattice_vector,
    read_point_batch,
    write_dnet_matrices,
    write_lattice_vector,
    write_point_batch,
)


def test_read_lattice_vector(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# kind: lattice-vector\n# base: 2\n# d: 2\n# m_max: 20\n1 182667\n")
    g = read_lattice_vector(p)
    assert g.g == (1, 182667) and g.d == 2


@pytest.mark.parametrize("text", [
    "# kind: lattice-vector\n# d: 2\n",
    "# kind: lattice-vector\n# d: 2\n1 x\n",
    "# kind: lattice-vector\n# d: 3\n1 2\n",
    "# kind: lattice-vector\n1 2\n3\n",
])
def test_lattice_vector_errors(tmp_path, text):
    p = tmp_path / "g.txt"
    p.write_text(text)
    with pytest.raises(ParseError):
        read_lattice_vector(p)


def test_parse_error_carries_line(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# kind: lattice-vector\n# d: 2\n1 x\n")
    with pytest.raises(ParseError) as err:
        read_lattice_vector(p)
    assert err.value.line == 3


@given(st.lists(st.integers(1, 2**40), min_size=1, max_size=12))
def test_lattice_vector_roundtrip(tmp_path_factory, g):
    p = tmp_path_factory.mktemp("lv") / "g.txt"
    write_lattice_vector(LatticeGeneratingVector(tuple(g), 20, "test"), p)
    assert read_lattice_vector(p).g == tuple(g)


def test_identity_matrix_encoding(tmp_path):
    p = tmp_path / "c.txt"
    write_dnet_matrices(GeneratingMatrixSet.identity(1, 3), p)
    payload = [ln for ln in p.read_text().splitlines() if not ln.startswith("#")]
    assert payload == ["4 2 1"]
    assert np.array_equal(read_dnet_matrices(p).columns, [[4, 2, 1]])


def test_sobol_roundtrip(tmp_path):
    C = GeneratingMatrixSet.sobol(5, 32)
    p = tmp_path / "c.txt"
    write_dnet_matrices(C, p)
    back = read_dnet_matrices(p)
    assert back.t_max == 32 and np.array_equal(back.columns, C.columns)


def test_matrix_errors(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# kind: dnet-matrices\n# d: 1\n# m: 3\n# t_max: 3\n4 2 8\n")
    with pytest.raises(RangeError):
        read_dnet_matrices(p)
    p.write_text("# kind: dnet-matrices\n# d: 2\n# m: 2\n# t_max: 3\n4 2\n1\n")
    with pytest.raises(ParseError):
        read_dnet_matrices(p)
    p.write_text("# kind: dnet-matrices\n# d: 1\n# m: 1\n# t_max: 0\n0\n")
    with pytest.raises(ParseError):
        read_dnet_matrices(p)
    p.write_text("# kind: dnet-matrices\n# d: 1\n# m: 1\n# t_max: 3\n1\ngarbage\n")
    with pytest.raises(ParseError):
        read_dnet_matrices(p)


def test_csv_examples(tmp_path):
    p = tmp_path / "b.csv"
    write_point_batch(PointBatch(np.full((1, 1, 1), 0.5), "test"), p)
    assert p.read_text() == "0,0.5\n"
    x = np.random.default_rng(0).random((2, 5, 3))
    write_point_batch(x, p)
    assert len(p.read_text().splitlines()) == 10
    assert np.array_equal(read_point_batch(p), x)


@given(R=st.integers(1, 3), n=st.integers(1, 20), d=st.integers(1, 4), seed=st.integers(0, 2**32))
def test_binary_roundtrip_bit_exact(tmp_path_factory, R, n, d, seed):
    x = np.random.default_rng(seed).random((R, n, d))
    p = tmp_path_factory.mktemp("pb") / "b.bin"
    write_point_batch(x, p, "binary")
    raw = p.read_bytes()
    assert raw[:8] == BINARY_MAGIC and len(raw) == 16 + 24 + 8 * x.size
    back = read_point_batch(p)
    assert back.tobytes() == x.tobytes()


def test_binary_trailing_garbage(tmp_path):
    p = tmp_path / "b.bin"
    write_point_batch(np.zeros((1, 2, 2)), p, "binary")
    p.write_bytes(p.read_bytes() + b"x")
    with pytest.raises(ParseError):
        read_point_batch(p)


def test_csv_garbage(tmp_path):
    p = tmp_path / "b.csv"
    p.write_text("0,0.5\n0,0.25\nhello\n")
    with pytest.raises(ParseError):
        read_point_batch(p)


def test_empty_batch_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_point_batch(np.zeros((1, 0, 2)), tmp_path / "b.csv")


def test_write_error_has_path(tmp_path):
    bad = tmp_path / "missing" / "b.bin"
    with pytest.raises(OSError, match="missing"):
        write_point_batch(np.zeros((1, 1, 1)), bad, "binary")


def test_import_lddata_lattice(tmp_path):
    p = tmp_path / "lat.txt"
    p.write_text("# some header\n3 # dims\n1048576\n1\n182667\n469891\n")
    with pytest.warns(UserWarning):
        g = import_lddata(p, "lattice-vector")
    assert g.g == (1, 182667, 469891) and "lossy" in g.source


def test_import_lddata_matrices(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("4 2 1\n4 6 5\n")
    with pytest.warns(UserWarning):
        C = import_lddata(p, "dnet-matrices")
    assert C.d == 2 and C.t_max == 3
