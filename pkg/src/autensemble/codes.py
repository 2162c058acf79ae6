"""CSS code constructions: the [[15,1,3]] quantum Reed-Muller code and
bivariate bicycle (BB) codes, with logical operators and constructive
automorphism generators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np

from . import perm as P
from .gf2 import BinaryMatrix, RowReducer, gf2_mul, inverse, kernel_basis, rank


@dataclass(frozen=True)
class CssCode:
    """A CSS code: ``hx`` detects Z errors, ``hz`` detects X errors."""

    name: str
    hx: BinaryMatrix
    hz: BinaryMatrix
    lx: BinaryMatrix
    lz: BinaryMatrix
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.hx.ncols

    @property
    def k(self) -> int:
        return self.lx.nrows

    def check(self) -> None:
        """Raise ``ValueError`` if any structural invariant fails."""
        if not gf2_mul(self.hx, self.hz.T).is_zero():
            raise ValueError("hx @ hz.T != 0")
        k = self.n - rank(self.hx) - rank(self.hz)
        if k != self.k:
            raise ValueError(f"logical count {self.k} != n - rk(hx) - rk(hz) = {k}")
        if not gf2_mul(self.hz, self.lx.T).is_zero() or not gf2_mul(self.hx, self.lz.T).is_zero():
            raise ValueError("logical operator does not commute with checks")
        if self.k and rank(gf2_mul(self.lx, self.lz.T)) != self.k:
            raise ValueError("lx @ lz.T is singular")


def _complement_in_kernel(h_kernel: BinaryMatrix, h_span: BinaryMatrix) -> list[int]:
    """Kernel vectors of ``h_kernel`` extending rowspace(``h_span``), in fixed order."""
    red = RowReducer(h_span.ncols)
    for r in h_span.rows:
        red.add(r)
    return [v for v in kernel_basis(h_kernel).rows if red.add(v)]


def logical_operators(hx: BinaryMatrix, hz: BinaryMatrix) -> tuple[BinaryMatrix, BinaryMatrix]:
    """Deterministic logical representatives with ``lx @ lz.T == I``."""
    if not gf2_mul(hx, hz.T).is_zero():
        raise ValueError("check matrices do not commute")
    n = hx.ncols
    lx = BinaryMatrix(_complement_in_kernel(hz, hx), n)
    lz = BinaryMatrix(_complement_in_kernel(hx, hz), n)
    if lx.nrows != lz.nrows:
        raise ValueError("inconsistent logical counts")
    if lx.nrows == 0:
        return lx, lz
    pairing = gf2_mul(lx, lz.T)
    # rotate lz so the pairing becomes the identity
    lz = gf2_mul(inverse(pairing).T, lz)
    return lx, lz


def make_css(name: str, hx: BinaryMatrix, hz: BinaryMatrix, **meta) -> CssCode:
    lx, lz = logical_operators(hx, hz)
    return CssCode(name=name, hx=hx, hz=hz, lx=lx, lz=lz, meta=meta)


# ---------------------------------------------------------------- QRM-15 ----

QRM15_EXAMPLE_CYCLES = ((2, 9), (3, 8), (4, 15), (5, 14))


def build_qrm15() -> CssCode:
    """[[15,1,3]] quantum Reed-Muller code.

    Column ``j`` (1-indexed) of ``hx`` is the 4-bit binary expansion of ``j``
    (row ``r`` holds bit ``r``); ``hz`` adds the six pairwise products of the
    ``hx`` rows.
    """
    cols = np.arange(1, 16)
    hx = np.array([(cols >> r) & 1 for r in range(4)], dtype=np.uint8)
    prods = [hx[a] & hx[b] for a, b in combinations(range(4), 2)]
    hz = np.vstack([hx, np.array(prods, dtype=np.uint8)])
    return make_css("qrm15", BinaryMatrix.from_array(hx), BinaryMatrix.from_array(hz))


def qrm_code_automorphism(M: BinaryMatrix) -> P.Permutation:
    """Qubit permutation induced by an invertible 4x4 matrix.

    Qubit ``v`` (a nonzero 4-bit vector, 1-indexed as in the code) goes to
    ``M v``; column ``r`` of ``M`` is the image of basis vector ``2**r``.
    """
    if M.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if rank(M) != 4:
        raise ValueError("matrix is singular over GF(2)")
    arr = M.to_array()
    col_vals = [int(sum(int(arr[r, c]) << r for r in range(4))) for c in range(4)]
    img = []
    for v in range(1, 16):
        w = 0
        for c in range(4):
            if (v >> c) & 1:
                w ^= col_vals[c]
        img.append(w - 1)
    return tuple(img)


def gl_matrix_from_images(images: Sequence[int]) -> BinaryMatrix:
    """4x4 matrix whose column ``r`` is the 4-bit vector ``images[r]``."""
    arr = np.array([[(images[c] >> r) & 1 for c in range(4)] for r in range(4)], dtype=np.uint8)
    return BinaryMatrix.from_array(arr)


def gl42_generators() -> list[BinaryMatrix]:
    """Two generators of GL(4,2): a transvection and the basis 4-cycle."""
    transvection = gl_matrix_from_images([1, 3, 4, 8])  # e1 -> e0 + e1
    cycle = gl_matrix_from_images([2, 4, 8, 1])
    return [transvection, cycle]


def qrm15_generators() -> list[P.Permutation]:
    return [qrm_code_automorphism(g) for g in gl42_generators()]


def qrm15_example_automorphism() -> P.Permutation:
    """(2,9)(3,8)(4,15)(5,14): maps qubit 15 onto a weight-one column."""
    return P.from_cycles(QRM15_EXAMPLE_CYCLES, 15)


# -------------------------------------------------------- bivariate bicycle --


def _shift(n: int) -> np.ndarray:
    return np.roll(np.eye(n, dtype=np.uint8), 1, axis=1)


def _monomial_sum(l: int, m: int, exps) -> np.ndarray:
    x = np.kron(_shift(l), np.eye(m, dtype=np.uint8))
    y = np.kron(np.eye(l, dtype=np.uint8), _shift(m))
    out = np.zeros((l * m, l * m), dtype=np.uint8)
    for a, b in exps:
        term = np.linalg.matrix_power(x, a % l) @ np.linalg.matrix_power(y, b % m)
        out ^= (term % 2).astype(np.uint8)
    return out


def build_bb(l: int, m: int, a_exps, b_exps, name: str | None = None) -> CssCode:
    """BB code with ``hx = [A | B]`` and ``hz = [B^T | A^T]``.

    ``A`` and ``B`` are sums of monomials ``x^i y^j`` with ``x = S_l (x) I_m``
    and ``y = I_l (x) S_m``; exponents are reduced mod ``l`` and ``m``.
    """
    if l < 1 or m < 1:
        raise ValueError("l and m must be positive")
    if not a_exps or not b_exps:
        raise ValueError("exponent lists must be nonempty")
    A = _monomial_sum(l, m, a_exps)
    B = _monomial_sum(l, m, b_exps)
    hx = BinaryMatrix.from_array(np.hstack([A, B]))
    hz = BinaryMatrix.from_array(np.hstack([B.T, A.T]))
    label = name or f"bb_{l}x{m}"
    return make_css(label, hx, hz, l=l, m=m, a_exps=[tuple(e) for e in a_exps], b_exps=[tuple(e) for e in b_exps])


def bb_shift_generators(l: int, m: int) -> list[P.Permutation]:
    """x- and y-shift column permutations acting on both ``l*m`` blocks."""
    lm = l * m

    def shift_perm(di: int, dj: int) -> P.Permutation:
        img = [0] * (2 * lm)
        for block in (0, lm):
            for i in range(l):
                for j in range(m):
                    img[block + i * m + j] = block + ((i + di) % l) * m + (j + dj) % m
        return tuple(img)

    return [shift_perm(1, 0), shift_perm(0, 1)]


# ------------------------------------------------------------- manifest ----


def default_manifest_path() -> Path:
    return Path(str(resources.files("autensemble") / "data" / "bb_codes.json"))


def load_manifest(path: str | Path | None = None) -> dict[str, dict]:
    path = Path(path) if path is not None else default_manifest_path()
    entries = json.loads(path.read_text())
    out = {}
    for e in entries:
        missing = {"name", "l", "m", "a_exps", "b_exps", "expect_n", "expect_k"} - set(e)
        if missing:
            raise ValueError(f"manifest entry {e.get('name', '?')} lacks {sorted(missing)}")
        out[e["name"]] = e
    return out


def build_from_manifest(entry: dict) -> CssCode:
    code = build_bb(entry["l"], entry["m"], entry["a_exps"], entry["b_exps"], name=entry["name"])
    if (code.n, code.k) != (entry["expect_n"], entry["expect_k"]):
        raise ValueError(
            f"{entry['name']}: built [[{code.n},{code.k}]], manifest expects "
            f"[[{entry['expect_n']},{entry['expect_k']}]]"
        )
    return code


def available_codes(manifest: str | Path | None = None) -> list[str]:
    return ["qrm15", *load_manifest(manifest)]


def get_code(name: str, manifest: str | Path | None = None) -> CssCode:
    if name == "qrm15":
        return build_qrm15()
    entries = load_manifest(manifest)
    if name not in entries:
        raise KeyError(f"unknown code {name!r}; known: {', '.join(available_codes(manifest))}")
    return build_from_manifest(entries[name])


def code_automorphism_generators(code: CssCode) -> list[P.Permutation]:
    """Constructive automorphism generators valid for both ``hx`` and ``hz``."""
    if code.name == "qrm15":
        return qrm15_generators()
    if "l" in code.meta:
        return bb_shift_generators(code.meta["l"], code.meta["m"])
    raise ValueError(f"no constructive automorphisms known for {code.name!r}")


def preferred_automorphisms(code: CssCode) -> list[P.Permutation]:
    """Automorphisms always placed right after the identity in an ensemble."""
    if code.name == "qrm15":
        return [qrm15_example_automorphism()]
    return []


# ------------------------------------------------------------- distance ----


def _min_logical_weight(h_kernel: BinaryMatrix, h_span: BinaryMatrix, max_dim: int) -> int:
    basis = kernel_basis(h_kernel).rows
    if len(basis) > max_dim:
        raise ValueError(f"kernel dimension {len(basis)} exceeds brute-force limit {max_dim}")
    span = RowReducer(h_span.ncols)
    for r in h_span.rows:
        span.add(r)
    best = None
    v = 0
    # Gray-code walk over all nonzero kernel elements
    for i in range(1, 1 << len(basis)):
        flip = (i & -i).bit_length() - 1
        v ^= basis[flip]
        if span.contains(v):
            continue
        w = v.bit_count()
        if best is None or w < best:
            best = w
    if best is None:
        raise ValueError("no logical operators")
    return best


def css_distance_bruteforce(code: CssCode, max_dim: int = 20) -> tuple[int, int]:
    """Exhaustive (d_z, d_x): lightest Z- and X-type logicals."""
    dz = _min_logical_weight(code.hx, code.hz, max_dim)
    dx = _min_logical_weight(code.hz, code.hx, max_dim)
    return dz, dx
