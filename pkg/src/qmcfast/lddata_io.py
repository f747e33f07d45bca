"""Plain-text and binary formats for generating vectors, matrices and point batches.

Lattice vector (text)::

    # kind: lattice-vector
    # base: 2
    # d: 3
    # m_max: 20
    # source: free text
    1 182667 469891

Digital-net matrices (text), one line per dimension with ``m`` integers; the
``k``-th integer is column ``k`` with row 0 in the leading bit of a
``t_max``-bit word::

    # kind: dnet-matrices
    # base: 2
    # d: 1
    # m: 3
    # t_max: 3
    4 2 1

Point batch CSV: one row ``r,x_1,...,x_d`` per point, replications in order,
no header, shortest round-trip float text.

Point batch binary: 16-byte header (8-byte magic ``QMCPTS\\0\\0``, uint32
version, uint32 reserved), three uint64 ``R, n, d``, then ``R*n*d``
little-endian float64 in ``(r, i, j)`` order.  All integers little-endian.
"""

from __future__ import annotations

import re
import struct
import warnings
from pathlib import Path

import numpy as np

from .batch import PointBatch
from .dnet import GeneratingMatrixSet
from .lattice import LatticeGeneratingVector

__all__ = [
    "ParseError",
    "RangeError",
    "read_lattice_vector",
    "write_lattice_vector",
    "read_dnet_matrices",
    "write_dnet_matrices",
    "write_point_batch",
    "read_point_batch",
    "import_lddata",
    "BINARY_MAGIC",
    "BINARY_VERSION",
]

BINARY_MAGIC = b"QMCPTS\0\0"
BINARY_VERSION = 1
_HEADER = struct.Struct("<8sII")
_SHAPE = struct.Struct("<QQQ")
_KEY = re.compile(r"^#\s*([A-Za-z_]+)\s*:\s*(.*?)\s*$")


class ParseError(ValueError):
    """Malformed artifact file; ``line`` is 1-based (0 when not tied to a line)."""

    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}" if line else f"{path}: {msg}")
        self.path, self.line = str(path), line


class RangeError(ParseError):
    """A value does not fit the declared precision."""


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _split(path, lines: list[str], kind: str) -> tuple[dict, list[tuple[int, list[str]]]]:
    """Header dict and payload ``(line number, tokens)`` pairs."""
    header: dict[str, tuple[int, str]] = {}
    payload = []
    for no, line in enumerate(lines, 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if payload:
                raise ParseError(path, no, "header line after payload")
            mt = _KEY.match(s)
            if mt is None:
                raise ParseError(path, no, f"malformed header line {s!r}")
            header[mt.group(1).lower()] = (no, mt.group(2))
        else:
            payload.append((no, s.split()))
    if "kind" not in header:
        raise ParseError(path, 0, "missing '# kind:' header")
    if header["kind"][1] != kind:
        raise ParseError(path, header["kind"][0], f"expected kind {kind!r}, got {header['kind'][1]!r}")
    return header, payload


def _int_field(path, header: dict, key: str, default=None, minimum: int = 1) -> int:
    if key not in header:
        if default is None:
            raise ParseError(path, 0, f"missing '# {key}:' header")
        return default
    no, val = header[key]
    try:
        v = int(val)
    except ValueError:
        raise ParseError(path, no, f"header {key!r} must be an integer, got {val!r}") from None
    if v < minimum:
        raise ParseError(path, no, f"header {key!r} must be >= {minimum}, got {v}")
    return v


def _int_token(path, no: int, tok: str) -> int:
    if not re.fullmatch(r"[+]?\d+", tok):
        raise ParseError(path, no, f"expected a nonnegative integer, got {tok!r}")
    return int(tok)


def read_lattice_vector(path) -> LatticeGeneratingVector:
    header, payload = _split(path, _read_lines(path), "lattice-vector")
    if _int_field(path, header, "base", 2) != 2:
        raise ParseError(path, header["base"][0], "only base 2 lattice vectors are supported")
    d = _int_field(path, header, "d")
    m_max = _int_field(path, header, "m_max", 32)
    tokens = [(no, tok) for no, toks in payload for tok in toks]
    if not tokens:
        raise ParseError(path, 0, "empty payload")
    if len(tokens) != d:
        no = tokens[d][0] if len(tokens) > d else tokens[-1][0]
        raise ParseError(path, no, f"header declares d={d} but payload has {len(tokens)} entries")
    g = []
    for no, tok in tokens:
        v = _int_token(path, no, tok)
        if v < 1:
            raise ParseError(path, no, "generating vector entries must be positive")
        g.append(v)
    source = header.get("source", (0, ""))[1]
    return LatticeGeneratingVector(tuple(g), m_max, source)


def write_lattice_vector(g: LatticeGeneratingVector, path) -> None:
    head = f"# kind: lattice-vector\n# base: 2\n# d: {g.d}\n# m_max: {g.m_max}\n# source: {g.source}\n"
    _write_text(path, head + " ".join(str(v) for v in g.g) + "\n")


def read_dnet_matrices(path) -> GeneratingMatrixSet:
    header, payload = _split(path, _read_lines(path), "dnet-matrices")
    if _int_field(path, header, "base", 2) != 2:
        raise ParseError(path, header["base"][0], "only base 2 matrices are supported")
    t_max = _int_field(path, header, "t_max")
    if t_max > 64:
        raise ParseError(path, header["t_max"][0], f"t_max must be <= 64, got {t_max}")
    d = _int_field(path, header, "d")
    m = _int_field(path, header, "m", len(payload[0][1]) if payload else None)
    if len(payload) != d:
        no = payload[d][0] if len(payload) > d else (payload[-1][0] if payload else 0)
        raise ParseError(path, no, f"header declares d={d} but payload has {len(payload)} lines")
    cols = np.zeros((d, m), dtype=np.uint64)
    for j, (no, toks) in enumerate(payload):
        if len(toks) != m:
            raise ParseError(path, no, f"expected {m} columns, got {len(toks)}")
        for k, tok in enumerate(toks):
            v = _int_token(path, no, tok)
            if v >= 2**t_max:
                raise RangeError(path, no, f"column value {v} does not fit in t_max={t_max} bits")
            cols[j, k] = v
    source = header.get("source", (0, ""))[1]
    return GeneratingMatrixSet(cols, t_max, source)


def write_dnet_matrices(C: GeneratingMatrixSet, path) -> None:
    head = f"# kind: dnet-matrices\n# base: 2\n# d: {C.d}\n# m: {C.m}\n# t_max: {C.t_max}\n# source: {C.source}\n"
    body = "".join(" ".join(str(int(v)) for v in row) + "\n" for row in C.columns)
    _write_text(path, head + body)


def _as_array(batch) -> np.ndarray:
    x = batch.x if isinstance(batch, PointBatch) else np.asarray(batch, dtype=np.float64)
    if x.ndim != 3 or x.size == 0:
        raise ValueError(f"point batch must be a nonempty (R, n, d) array, got shape {x.shape}")
    return x


def batch_csv_text(batch) -> str:
    x = _as_array(batch)
    lines = []
    for r in range(x.shape[0]):
        prefix = f"{r},"
        lines.extend(prefix + ",".join(map(repr, row)) for row in x[r].tolist())
    return "\n".join(lines) + "\n"


def write_point_batch(batch, path, format: str = "csv") -> None:
    """Write a :class:`PointBatch` (or ``(R, n, d)`` array) as CSV or binary."""
    x = _as_array(batch)
    if format == "csv":
        _write_text(path, batch_csv_text(x))
        return
    if format != "binary":
        raise ValueError(f"unknown point batch format {format!r}")
    blob = _HEADER.pack(BINARY_MAGIC, BINARY_VERSION, 0) + _SHAPE.pack(*x.shape)
    blob += np.ascontiguousarray(x, dtype="<f8").tobytes()
    try:
        Path(path).write_bytes(blob)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_point_batch(path, format: str | None = None) -> np.ndarray:
    """Read a point batch written by :func:`write_point_batch` as an ``(R, n, d)`` array."""
    if format is None:
        with open(path, "rb") as fh:
            format = "binary" if fh.read(8) == BINARY_MAGIC else "csv"
    if format == "binary":
        blob = Path(path).read_bytes()
        if len(blob) < _HEADER.size + _SHAPE.size:
            raise ParseError(path, 0, "truncated binary header")
        magic, version, _ = _HEADER.unpack_from(blob)
        if magic != BINARY_MAGIC:
            raise ParseError(path, 0, "bad magic bytes")
        if version != BINARY_VERSION:
            raise ParseError(path, 0, f"unsupported version {version}")
        shape = _SHAPE.unpack_from(blob, _HEADER.size)
        body = blob[_HEADER.size + _SHAPE.size:]
        if len(body) != 8 * int(np.prod(shape)):
            raise ParseError(path, 0, f"payload has {len(body)} bytes, header shape {shape} needs {8 * int(np.prod(shape))}")
        return np.frombuffer(body, dtype="<f8").reshape(shape).astype(np.float64)
    rows: dict[int, list[list[float]]] = {}
    d = None
    last_r = -1
    for no, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            r = int(parts[0])
            vals = [float(p) for p in parts[1:]]
        except ValueError:
            raise ParseError(path, no, f"unparseable row {line!r}") from None
        if d is None:
            d = len(vals)
        if len(vals) != d or d == 0:
            raise ParseError(path, no, f"expected {d} coordinates, got {len(vals)}")
        if r < last_r or r > last_r + 1:
            raise ParseError(path, no, f"replication index {r} out of order")
        last_r = r
        rows.setdefault(r, []).append(vals)
    if not rows:
        raise ParseError(path, 0, "empty point batch")
    sizes = {len(v) for v in rows.values()}
    if len(sizes) != 1:
        raise ParseError(path, 0, f"replications have different sizes {sorted(sizes)}")
    return np.array([rows[r] for r in range(len(rows))], dtype=np.float64)


def import_lddata(path, kind: str):
    """Best-effort conversion of an external LDData-style file.

    Lossy and unverified: comments after ``#`` are dropped and the integer
    tokens are interpreted by a heuristic.  Lattice files are read as either
    ``d n g_1 .. g_d`` or a bare list of generating-vector entries.  Net files
    are read as ``base d m t_max`` followed by ``d*m`` column integers, or as
    one line of columns per dimension.  Always check the result.
    """
    warnings.warn(f"LDData import of {path} is heuristic and unverified", stacklevel=2)
    lines = [(no, ln.split("#", 1)[0].split()) for no, ln in enumerate(_read_lines(path), 1)]
    lines = [(no, toks) for no, toks in lines if toks]
    tokens = [_int_token(path, no, t) for no, toks in lines for t in toks]
    if not tokens:
        raise ParseError(path, 0, "no integer data found")
    src = f"LDData import of {Path(path).name} (lossy, unverified)"
    if kind == "lattice-vector":
        if len(tokens) >= 3 and tokens[0] == len(tokens) - 2:
            return LatticeGeneratingVector(tuple(tokens[2:]), max(1, tokens[1].bit_length() - 1), src)
        return LatticeGeneratingVector(tuple(tokens), 32, src)
    if kind == "dnet-matrices":
        if len(tokens) >= 4 and tokens[0] == 2 and len(tokens) == 4 + tokens[1] * tokens[2]:
            _, d, m, t = tokens[:4]
            cols = np.array(tokens[4:], dtype=np.uint64).reshape(d, m)
            return GeneratingMatrixSet(cols, t, src)
        widths = {len(toks) for _, toks in lines}
        if len(widths) != 1:
            raise ParseError(path, 0, "could not recognize the matrix layout")
        cols = np.array([[int(t) for t in toks] for _, toks in lines], dtype=np.uint64)
        t = max(1, int(max(int(v) for v in cols.ravel())).bit_length())
        return GeneratingMatrixSet(cols, t, src)
    raise ValueError(f"unknown artifact kind {kind!r}")
