"""Action of a column automorphism on the checks: ``U @ H == permute_columns(H, a)``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import perm as P
from .gf2 import BinaryMatrix, RowReducer, _rref_rows, gf2_mul, inverse, permute_columns, rank


class NotAnAutomorphismError(ValueError):
    pass


@dataclass(frozen=True)
class SyndromeMap:
    u: BinaryMatrix
    a: P.Permutation
    row_perm: tuple[int, ...] | None = None  # (U s)[i] == s[row_perm[i]]

    @property
    def is_row_permutation(self) -> bool:
        return self.row_perm is not None

    @property
    def dense(self) -> np.ndarray:
        return self.u.to_array()


def _pivot_transform(H: BinaryMatrix, HA: BinaryMatrix) -> BinaryMatrix:
    """U from the RREF of full-row-rank ``H``: ``M[i, j] = HA[i, pivot_j]``, ``U = M R``."""
    rows, trans, pivots = _rref_rows(list(H.rows), H.ncols)
    m = H.nrows
    M_rows = []
    for r in HA.rows:
        acc = 0
        for j, p in enumerate(pivots):
            if (r >> p) & 1:
                acc |= 1 << j
        M_rows.append(acc)
    return gf2_mul(BinaryMatrix(M_rows, m), BinaryMatrix(trans, m))


def _independent_rows(H: BinaryMatrix) -> list[int]:
    red = RowReducer(H.ncols)
    return [i for i, r in enumerate(H.rows) if red.add(r)]


def _extended_map(H: BinaryMatrix, HA: BinaryMatrix) -> BinaryMatrix:
    """Invertible U for rank-deficient ``H``.

    With basis rows ``B`` and ``H = D H_B``, solve ``V H_B = H_B A`` on the
    basis, then ``U = [D V | E_N] [D | E_N]^-1`` where ``E_N`` are the unit
    vectors of the non-basis rows.  This gives ``U D = D V`` (so ``U H = HA``)
    with ``U`` invertible.
    """
    m = H.nrows
    basis = _independent_rows(H)
    r = len(basis)
    HB = H.select_rows(basis)
    V = _pivot_transform(HB, HA.select_rows(basis))  # r x r
    # express every row of H over the basis rows
    rows, trans, pivots = _rref_rows(list(HB.rows), HB.ncols)
    d_rows = []
    for row in H.rows:
        coeff = 0
        for j, p in enumerate(pivots):
            if (row >> p) & 1:
                coeff ^= trans[j]
        d_rows.append(coeff)
    D = BinaryMatrix(d_rows, r)  # m x r, H == D @ HB
    DV = gf2_mul(D, V)
    nonbasis = [i for i in range(m) if i not in set(basis)]
    # columns of Q = [D | E_N] and  T = [D V | E_N], built as rows of their transposes
    qt = list(D.T.rows) + [1 << i for i in nonbasis]
    tt = list(DV.T.rows) + [1 << i for i in nonbasis]
    Q = BinaryMatrix(qt, m).T
    T = BinaryMatrix(tt, m).T
    return gf2_mul(T, inverse(Q))


def _row_matching(H: BinaryMatrix, HA: BinaryMatrix) -> tuple[int, ...] | None:
    index: dict[int, list[int]] = {}
    for i, r in enumerate(H.rows):
        index.setdefault(r, []).append(i)
    out = []
    for r in HA.rows:
        bucket = index.get(r)
        if not bucket:
            return None
        out.append(bucket.pop(0))
    return tuple(out)


def compute_stab_map(H: BinaryMatrix, a: Sequence[int]) -> SyndromeMap:
    """Syndrome map for column automorphism ``a`` of rowspace(``H``).

    If the permuted rows are a rearrangement of the original rows, ``U`` is
    that row permutation.  Otherwise the RREF construction is used, extended to
    rank-deficient ``H``.
    """
    a = P.validate(a, H.ncols)
    HA = permute_columns(H, a)
    red = RowReducer(H.ncols)
    for r in H.rows:
        red.add(r)
    for i, r in enumerate(HA.rows):
        if not red.contains(r):
            raise NotAnAutomorphismError(f"row {i} of the permuted matrix leaves the row space")

    row_perm = _row_matching(H, HA)
    if row_perm is not None:
        m = H.nrows
        u = BinaryMatrix([1 << row_perm[i] for i in range(m)], m)
    elif rank(H) == H.nrows:
        u = _pivot_transform(H, HA)
    else:
        u = _extended_map(H, HA)
    if gf2_mul(u, H) != HA:
        raise AssertionError("syndrome map fails U @ H == H A")
    if row_perm is None:
        row_perm = _as_row_permutation(u)
    return SyndromeMap(u=u, a=a, row_perm=row_perm)


def _as_row_permutation(u: BinaryMatrix) -> tuple[int, ...] | None:
    out = []
    for r in u.rows:
        if r.bit_count() != 1:
            return None
        out.append(r.bit_length() - 1)
    return tuple(out) if len(set(out)) == len(out) else None


@lru_cache(maxsize=4096)
def cached_stab_map(H: BinaryMatrix, a: P.Permutation) -> SyndromeMap:
    return compute_stab_map(H, a)


def transform_syndrome(smap: SyndromeMap, s) -> np.ndarray:
    """``U @ s`` for one syndrome (1-D) or a batch (rows of a 2-D array)."""
    s = np.asarray(s, dtype=np.uint8)
    m = smap.u.nrows
    if s.shape[-1] != m:
        raise ValueError(f"syndrome length {s.shape[-1]} != {m}")
    if smap.row_perm is not None:
        return s[..., list(smap.row_perm)]
    return transform_syndrome_dense(smap, s)


def transform_syndrome_dense(smap: SyndromeMap, s) -> np.ndarray:
    s = np.asarray(s, dtype=np.uint8)
    return ((s.astype(np.int64) @ smap.dense.T.astype(np.int64)) & 1).astype(np.uint8)
