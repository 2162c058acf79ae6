"""Tanner graphs and their colour-preserving automorphism groups.

Generators come from an individualisation-refinement search: colour
refinement to an equitable partition, individualise a vertex of the first
smallest non-singleton cell, repeat down to a discrete leaf.  For each level
of that first path, every vertex of the target cell not already in the
orbit of the path vertex is probed for an automorphism mapping the path
prefix onto it.  The generators found form a strong generating set for the
pointwise stabiliser chain of the path.
"""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import perm as P
from .gf2 import BinaryMatrix

log = logging.getLogger(__name__)

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True)
class ColoredGraph:
    n_vertices: int
    colors: np.ndarray  # (N,) int
    indptr: np.ndarray  # CSR, sorted neighbor lists
    indices: np.ndarray
    n_variables: int = 0

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def edge_keys(self) -> np.ndarray:
        src = np.repeat(np.arange(self.n_vertices), np.diff(self.indptr))
        return np.sort(src.astype(np.int64) * self.n_vertices + self.indices)

    def is_automorphism(self, gamma: Sequence[int]) -> bool:
        g = np.asarray(gamma, dtype=np.int64)
        if g.shape != (self.n_vertices,) or not np.array_equal(np.sort(g), np.arange(self.n_vertices)):
            return False
        if not np.array_equal(self.colors[g], self.colors):
            return False
        src = np.repeat(np.arange(self.n_vertices), np.diff(self.indptr))
        keys = self.edge_keys()
        mapped = np.sort(g[src] * self.n_vertices + g[self.indices])
        return np.array_equal(mapped, keys)


def graph_from_edges(n: int, edges, colors=None, n_variables: int = 0) -> ColoredGraph:
    edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    edges = edges[edges[:, 0] != edges[:, 1]]
    both = np.vstack([edges, edges[:, ::-1]]) if len(edges) else edges
    both = np.unique(both, axis=0) if len(both) else both.reshape(0, 2)
    order = np.lexsort((both[:, 1], both[:, 0])) if len(both) else np.array([], dtype=np.int64)
    both = both[order]
    counts = np.bincount(both[:, 0], minlength=n) if len(both) else np.zeros(n, dtype=np.int64)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    cols = np.zeros(n, dtype=np.int64) if colors is None else np.asarray(colors, dtype=np.int64)
    return ColoredGraph(n, cols, indptr, both[:, 1].astype(np.int64), n_variables)


def build_tanner(H: BinaryMatrix, extra_variable_colors=None) -> ColoredGraph:
    """Variables ``0..n-1`` (colour 0 or the given colours), checks after (colour 1 above max)."""
    m, n = H.shape
    chk, var = np.nonzero(H.to_array())
    if extra_variable_colors is None:
        vcol = np.zeros(n, dtype=np.int64)
    else:
        vcol = np.asarray(extra_variable_colors, dtype=np.int64)
        if vcol.shape != (n,):
            raise ValueError("one colour per column required")
    ccol = np.full(m, int(vcol.max(initial=0)) + 1, dtype=np.int64)
    edges = np.stack([var, n + chk], axis=1)
    return graph_from_edges(n + m, edges, np.concatenate([vcol, ccol]), n_variables=n)


def build_joint_tanner(hx: BinaryMatrix, hz: BinaryMatrix) -> ColoredGraph:
    """Variables colour 0, ``hx`` checks colour 1, ``hz`` checks colour 2."""
    n = hx.ncols
    if hz.ncols != n:
        raise ValueError("column counts differ")
    cx, vx = np.nonzero(hx.to_array())
    cz, vz = np.nonzero(hz.to_array())
    mx = hx.nrows
    edges = np.concatenate([np.stack([vx, n + cx], 1), np.stack([vz, n + mx + cz], 1)])
    colors = np.concatenate([np.zeros(n), np.ones(mx), np.full(hz.nrows, 2)]).astype(np.int64)
    return graph_from_edges(n + mx + hz.nrows, edges, colors, n_variables=n)


def prior_colors(priors, digits: int = 12) -> np.ndarray:
    """Colour classes of priors rounded to ``digits`` significant digits."""
    keys = [f"{float(p):.{digits - 1}e}" for p in priors]
    uniq = {k: i for i, k in enumerate(sorted(set(keys), key=float))}
    return np.array([uniq[k] for k in keys], dtype=np.int64)


# ------------------------------------------------------------ refinement ----


def _mix(x: np.ndarray) -> np.ndarray:
    z = x.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _rank_pairs(major: np.ndarray, minor: np.ndarray) -> np.ndarray:
    order = np.lexsort((minor, major))
    a, b = major[order], minor[order]
    step = np.ones(len(a), dtype=np.int64)
    step[0] = 0
    step[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
    out = np.empty(len(a), dtype=np.int64)
    out[order] = np.cumsum(step)
    return out


class _Refiner:
    def __init__(self, g: ColoredGraph):
        self.g = g
        self.src_start = g.indptr[:-1]
        self.src_end = g.indptr[1:]

    def refine(self, colors: np.ndarray) -> np.ndarray:
        """Colour refinement to a fixpoint; new cells ordered canonically."""
        with np.errstate(over="ignore"):
            ncells = int(colors.max(initial=-1)) + 1
            while True:
                h = _mix(colors)[self.g.indices]
                cs = np.zeros(len(h) + 1, dtype=np.uint64)
                np.cumsum(h, out=cs[1:])
                sig = cs[self.src_end] - cs[self.src_start]
                new = _rank_pairs(colors, sig)
                count = int(new.max(initial=-1)) + 1
                colors = new
                if count == ncells:
                    return colors
                ncells = count

    @staticmethod
    def individualize(colors: np.ndarray, v: int) -> np.ndarray:
        key = colors * 2
        key[v] -= 1
        return _rank_pairs(key, np.zeros_like(key))


def _target_cell(colors: np.ndarray) -> int:
    counts = np.bincount(colors)
    big = np.nonzero(counts > 1)[0]
    if big.size == 0:
        return -1
    sizes = counts[big]
    return int(big[np.argmin(sizes)])


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union_perm(self, gamma: Sequence[int]) -> None:
        for i, v in enumerate(gamma):
            a, b = self.find(i), self.find(int(v))
            if a != b:
                self.parent[max(a, b)] = min(a, b)


@dataclass
class GeneratorSet:
    generators: list[P.Permutation]
    provenance: str = "graph-search"
    n_variables: int | None = None
    degree: int | None = None
    stats: dict = field(default_factory=dict)

    def variable_permutations(self) -> list[P.Permutation]:
        """Restrict whole-graph generators to the variable (column) vertices."""
        if self.n_variables is None:
            return list(self.generators)
        nv = self.n_variables
        return [tuple(int(x) for x in g[:nv]) for g in self.generators]

    def to_json(self) -> str:
        payload = {
            "provenance": self.provenance,
            "degree": self.degree if self.degree is not None else (len(self.generators[0]) if self.generators else 0),
            "n_variables": self.n_variables,
            "generators": [list(map(int, g)) for g in self.generators],
            "stats": self.stats,
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSet":
        d = json.loads(text)
        gens = [P.validate(g) for g in d["generators"]]
        return cls(gens, d.get("provenance", "graph-search"), d.get("n_variables"), d.get("degree"), d.get("stats", {}))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "GeneratorSet":
        return cls.from_json(Path(path).read_text())


def find_automorphism_generators(g: ColoredGraph) -> GeneratorSet:
    """Generators of the colour-preserving automorphism group of ``g``."""
    ref = _Refiner(g)
    init = _rank_pairs(np.asarray(g.colors, dtype=np.int64), np.zeros(g.n_vertices, dtype=np.int64))
    parts = [ref.refine(init)]
    path: list[int] = []
    while True:
        t = _target_cell(parts[-1])
        if t < 0:
            break
        v = int(np.nonzero(parts[-1] == t)[0][0])
        path.append(v)
        parts.append(ref.refine(ref.individualize(parts[-1], v)))
    leaf0 = parts[-1]
    counts = [np.bincount(p) for p in parts]
    gens: list[P.Permutation] = []
    stats = {"levels": len(path), "leaves": 1, "nodes": len(parts)}
    orbit_sizes = []

    def leaf_map(leaf: np.ndarray) -> np.ndarray:
        inv = np.empty_like(leaf)
        inv[leaf] = np.arange(len(leaf))
        return inv[leaf0]

    def search(colors: np.ndarray, depth: int):
        stats["nodes"] += 1
        if depth >= len(counts) or not np.array_equal(np.bincount(colors, minlength=len(counts[depth])), counts[depth]):
            return None
        t = _target_cell(colors)
        if t < 0:
            stats["leaves"] += 1
            gamma = leaf_map(colors)
            return gamma if g.is_automorphism(gamma) else None
        for x in np.nonzero(colors == t)[0]:
            found = search(ref.refine(ref.individualize(colors, int(x))), depth + 1)
            if found is not None:
                return found
        return None

    for level in reversed(range(len(path))):
        base = parts[level]
        v = path[level]
        cell = np.nonzero(base == _target_cell(base))[0]
        uf = _UnionFind(g.n_vertices)
        for gen in gens:
            uf.union_perm(gen)
        failed_roots: set[int] = set()
        for w in cell:
            w = int(w)
            if w == v or uf.find(w) == uf.find(v) or uf.find(w) in failed_roots:
                continue
            gamma = search(ref.refine(ref.individualize(base, w)), level + 1)
            if gamma is None:
                failed_roots.add(uf.find(w))
                continue
            gens.append(tuple(int(x) for x in gamma))
            uf.union_perm(gamma)
        root = uf.find(v)
        orbit_sizes.append(sum(1 for w in cell if uf.find(int(w)) == root))
    order = 1
    for o in orbit_sizes:
        order *= o
    stats["order_from_chain"] = order
    for gen in gens:
        if not g.is_automorphism(gen):
            raise AssertionError("search produced a non-automorphism")
    return GeneratorSet(gens, "graph-search", g.n_variables or None, g.n_vertices, stats)


# ---------------------------------------------------------- group closure ----


class Overflow(int):
    """Marker returned by :func:`group_order` when the cap is exceeded."""

    def __repr__(self) -> str:
        return f"Overflow(>{int(self)})"


def group_elements(gens: Sequence[Sequence[int]], cap: int, degree: int | None = None) -> list[P.Permutation]:
    """Breadth-first closure, identity first; stops after ``cap + 1`` elements."""
    gens = [tuple(g) for g in gens]
    if degree is None:
        degree = len(gens[0]) if gens else 0
    ident = P.identity(degree)
    seen = {ident}
    out = [ident]
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for gen in gens:
            y = P.compose(x, gen)
            if y not in seen:
                seen.add(y)
                out.append(y)
                if len(out) > cap:
                    return out
                queue.append(y)
    return out


def group_order(gens, cap: int = 100_000) -> int:
    """Exact order of the generated group, or an :class:`Overflow` above ``cap``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if isinstance(gens, GeneratorSet):
        gens = gens.generators
    if not gens:
        return 1
    elems = group_elements(gens, cap)
    if len(elems) > cap:
        return Overflow(cap)
    return len(elems)


def sample_ensemble(gens, k: int, seed: int = 0, include: Sequence[Sequence[int]] = (), degree: int | None = None) -> list[P.Permutation]:
    """``k`` distinct group elements, identity first, then ``include``, then random words.

    If the group has at most ``k`` elements the whole group is returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(gens, GeneratorSet):
        gens = gens.generators
    gens = [tuple(g) for g in gens]
    if degree is None:
        degree = len(gens[0]) if gens else (len(include[0]) if include else 0)
    ident = P.identity(degree)
    chosen = [ident]
    seen = {ident}
    for a in include:
        a = tuple(a)
        if a not in seen and len(chosen) < k:
            seen.add(a)
            chosen.append(a)
    if not gens:
        if k > len(chosen):
            log.warning("trivial group: returning %d element(s) for k=%d", len(chosen), k)
        return chosen
    elems = group_elements(gens, cap=k)
    if len(elems) <= k:
        if len(elems) < k:
            log.warning("group order %d < k=%d; returning the full group", len(elems), k)
        return chosen + [e for e in elems if e not in seen]
    rng = np.random.default_rng(seed)
    attempts = 0
    while len(chosen) < k and attempts < 1000 * k:
        attempts += 1
        length = int(rng.integers(1, 9))
        word = ident
        for _ in range(length):
            word = P.compose(word, gens[int(rng.integers(len(gens)))])
        if word not in seen:
            seen.add(word)
            chosen.append(word)
    for e in elems:  # fallback fill, deterministic
        if len(chosen) >= k:
            break
        if e not in seen:
            seen.add(e)
            chosen.append(e)
    return chosen
