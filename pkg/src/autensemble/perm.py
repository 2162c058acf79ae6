"""Permutations as tuples of images.

``p[j]`` is the image of ``j``.  Column permutations follow
``permute_columns(M, p)[:, j] == M[:, p[j]]``, so permuting by ``a`` and then
by ``b`` equals permuting once by ``compose(a, b)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Permutation = tuple[int, ...]


def identity(n: int) -> Permutation:
    return tuple(range(n))


def is_identity(p: Sequence[int]) -> bool:
    return all(i == v for i, v in enumerate(p))


def validate(p: Sequence[int], n: int | None = None) -> Permutation:
    p = tuple(int(v) for v in p)
    if n is not None and len(p) != n:
        raise ValueError(f"permutation has length {len(p)}, expected {n}")
    if sorted(p) != list(range(len(p))):
        raise ValueError("not a bijection on 0..n-1")
    return p


def compose(a: Sequence[int], b: Sequence[int]) -> Permutation:
    """``compose(a, b)[j] == a[b[j]]``."""
    return tuple(a[j] for j in b)


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def from_cycles(cycles: Iterable[Sequence[int]], n: int, one_indexed: bool = True) -> Permutation:
    img = list(range(n))
    off = 1 if one_indexed else 0
    for cyc in cycles:
        cyc = [c - off for c in cyc]
        for i, c in enumerate(cyc):
            img[c] = cyc[(i + 1) % len(cyc)]
    return validate(img)


def to_cycles(p: Sequence[int], one_indexed: bool = True) -> list[tuple[int, ...]]:
    """Non-trivial cycles, each starting at its smallest element."""
    off = 1 if one_indexed else 0
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start] or p[start] == start:
            seen[start] = True
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j + off)
            j = p[j]
        out.append(tuple(cyc))
    return out


def order(p: Sequence[int]) -> int:
    from math import lcm

    result = 1
    for cyc in to_cycles(p, one_indexed=False):
        result = lcm(result, len(cyc))
    return result
