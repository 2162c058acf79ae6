"""Exact linear algebra over GF(2).

Matrices are stored bit-packed, one Python ``int`` per row (bit ``c`` of row
``r`` holds entry ``(r, c)``).  Row operations are single XORs, which keeps
elimination on the few-thousand-column matrices used here cheap.  Vectors
(syndromes, errors, corrections) are plain 1-D ``numpy.uint8`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def _row_to_int(bits: np.ndarray) -> int:
    packed = np.packbits(bits.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _int_to_row(value: int, cols: int) -> np.ndarray:
    nbytes = (cols + 7) // 8
    raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:cols]


def _iter_bits(value: int) -> Iterable[int]:
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


class BinaryMatrix:
    """Immutable bit-packed matrix over GF(2)."""

    __slots__ = ("_rows", "_cols")

    def __init__(self, rows: Sequence[int], cols: int):
        rows = tuple(int(r) for r in rows)
        limit = 1 << cols
        for r in rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits outside the column range")
        self._rows = rows
        self._cols = int(cols)

    # construction ---------------------------------------------------------
    @classmethod
    def from_array(cls, array) -> "BinaryMatrix":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        return cls([_row_to_int(row) for row in arr], arr.shape[1])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls([0] * rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls([1 << i for i in range(n)], n)

    # basic accessors ------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._cols

    @property
    def rows(self) -> tuple[int, ...]:
        """Packed rows (bit ``c`` of ``rows[r]`` is entry ``(r, c)``)."""
        return self._rows

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._cols

    def __getitem__(self, index: tuple[int, int]) -> int:
        r, c = index
        if not 0 <= c < self._cols:
            raise IndexError(c)
        return (self._rows[r] >> c) & 1

    def row(self, r: int) -> np.ndarray:
        return _int_to_row(self._rows[r], self._cols)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self._rows):
            if r:
                out[i] = _int_to_row(r, self._cols)
        return out

    def popcount(self) -> int:
        return sum(r.bit_count() for r in self._rows)

    def is_zero(self) -> bool:
        return not any(self._rows)

    @property
    def T(self) -> "BinaryMatrix":
        return BinaryMatrix.from_array(self.to_array().T)

    def vstack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if other.ncols != self._cols:
            raise ValueError("column counts differ")
        return BinaryMatrix(self._rows + other._rows, self._cols)

    def select_rows(self, indices: Iterable[int]) -> "BinaryMatrix":
        return BinaryMatrix([self._rows[i] for i in indices], self._cols)

    def __matmul__(self, other):
        return gf2_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self._cols == other._cols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._rows, self._cols))

    def __repr__(self) -> str:
        m, n = self.shape
        return f"BinaryMatrix({m}x{n}, weight={self.popcount()})"


@dataclass(frozen=True)
class RrefResult:
    """Output of :func:`rref`: ``transform @ input == reduced``."""

    reduced: BinaryMatrix
    transform: BinaryMatrix
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _rref_rows(rows: list[int], cols: int, track: bool = True):
    """In-place style elimination on packed rows.

    Returns ``(rows, transform_rows, pivots)``; pivots are scanned left to right
    and each pivot column is cleared above and below.
    """
    rows = list(rows)
    m = len(rows)
    trans = [1 << i for i in range(m)] if track else None
    pivots: list[int] = []
    prow = 0
    for col in range(cols):
        if prow == m:
            break
        bit = 1 << col
        hit = -1
        for r in range(prow, m):
            if rows[r] & bit:
                hit = r
                break
        if hit < 0:
            continue
        if hit != prow:
            rows[hit], rows[prow] = rows[prow], rows[hit]
            if track:
                trans[hit], trans[prow] = trans[prow], trans[hit]
        prow_val = rows[prow]
        for r in range(m):
            if r != prow and rows[r] & bit:
                rows[r] ^= prow_val
                if track:
                    trans[r] ^= trans[prow]
        pivots.append(col)
        prow += 1
    return rows, trans, pivots


def rref(M: BinaryMatrix) -> RrefResult:
    """Reduced row-echelon form with the row-operation record."""
    if M.nrows == 0 or M.ncols == 0:
        raise ValueError("rref of an empty matrix")
    rows, trans, pivots = _rref_rows(list(M.rows), M.ncols)
    return RrefResult(
        reduced=BinaryMatrix(rows, M.ncols),
        transform=BinaryMatrix(trans, M.nrows),
        pivots=tuple(pivots),
    )


def rank(M: BinaryMatrix) -> int:
    return len(_rref_rows(list(M.rows), M.ncols, track=False)[2])


def gf2_mul(A: BinaryMatrix, B):
    """Product ``A @ B`` mod 2.

    ``B`` may be a :class:`BinaryMatrix` or a 1-D 0/1 vector; a vector comes
    back as a ``uint8`` array.
    """
    if isinstance(B, BinaryMatrix):
        if A.ncols != B.nrows:
            raise ValueError(f"inner dimensions differ: {A.shape} @ {B.shape}")
        brows = B.rows
        out = []
        for a in A.rows:
            acc = 0
            for k in _iter_bits(a):
                acc ^= brows[k]
            out.append(acc)
        return BinaryMatrix(out, B.ncols)
    v = np.asarray(B)
    if v.ndim != 1 or v.shape[0] != A.ncols:
        raise ValueError(f"vector of length {v.shape} does not match {A.shape}")
    x = _row_to_int(v & 1)
    return np.fromiter(((r & x).bit_count() & 1 for r in A.rows), dtype=np.uint8, count=A.nrows)


def kernel_basis(M: BinaryMatrix) -> BinaryMatrix:
    """Basis of ``{v : M v = 0}``, one vector per row."""
    rows, _, pivots = _rref_rows(list(M.rows), M.ncols, track=False)
    pivot_set = set(pivots)
    basis = []
    for f in range(M.ncols):
        if f in pivot_set:
            continue
        vec = 1 << f
        bit = 1 << f
        for i, p in enumerate(pivots):
            if rows[i] & bit:
                vec |= 1 << p
        basis.append(vec)
    return BinaryMatrix(basis, M.ncols)


def inverse(M: BinaryMatrix) -> BinaryMatrix:
    m, n = M.shape
    if m != n:
        raise ValueError("matrix is not square")
    res = rref(M)
    if res.rank != n:
        raise ValueError("matrix is singular over GF(2)")
    return res.transform


def permute_columns(M: BinaryMatrix, perm: Sequence[int]) -> BinaryMatrix:
    """Column rearrangement with ``out[:, j] == M[:, perm[j]]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (M.ncols,):
        raise ValueError(f"permutation of length {perm.shape[0]} for {M.ncols} columns")
    if not np.array_equal(np.sort(perm), np.arange(M.ncols)):
        raise ValueError("not a permutation")
    return BinaryMatrix.from_array(M.to_array()[:, perm]) if M.nrows else BinaryMatrix([], M.ncols)


class RowReducer:
    """Incremental span membership over a growing set of packed vectors."""

    def __init__(self, cols: int):
        self.cols = cols
        self._basis: dict[int, int] = {}  # leading bit -> vector

    def reduce(self, v: int) -> int:
        while v:
            lead = v.bit_length() - 1
            b = self._basis.get(lead)
            if b is None:
                return v
            v ^= b
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; return ``True`` if it enlarged the span."""
        v = self.reduce(v)
        if not v:
            return False
        self._basis[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def dimension(self) -> int:
        return len(self._basis)
