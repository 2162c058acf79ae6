"""Ordered-statistics post-processing of BP soft output."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import ceil

import numpy as np

from .bp import Priors
from .gf2 import BinaryMatrix, _row_to_int, _rref_rows


class SyndromeNotInColumnSpace(ValueError):
    pass


@dataclass(frozen=True)
class OsdConfig:
    order: int = 0
    method: str = "combination-sweep"

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("OSD order must be >= 0")
        if self.method != "combination-sweep":
            raise ValueError("only the combination-sweep method is implemented")


def reliability_order(posterior_llrs) -> np.ndarray:
    """Column order, most likely flipped (smallest signed llr) first, ties by index."""
    llr = np.asarray(posterior_llrs, dtype=np.float64)
    return np.lexsort((np.arange(llr.size), llr))


def sweep_patterns(nonpivot_by_reliability: np.ndarray, order: int) -> list[tuple[int, ...]]:
    """Weight-1 flips over the first ``order`` non-pivot positions in
    reliability order, plus every pair among the first ``ceil(order / 2)``."""
    if order == 0:
        return []
    top = [int(t) for t in nonpivot_by_reliability[:order]]
    pats: list[tuple[int, ...]] = [(t,) for t in top]
    pats += list(combinations(top[: ceil(order / 2)], 2))
    return pats


def prior_metric(c: np.ndarray, priors: Priors) -> float:
    return float(np.dot(c.astype(np.float64), priors.llrs))


def osd_decode(H: BinaryMatrix, posterior_llrs, priors: Priors, s, cfg: OsdConfig | None = None) -> np.ndarray:
    """Return ``c`` with ``H c == s``.

    Pivots are chosen greedily over the reliability order, non-pivot bits are
    set to zero and the pivot bits solved.  Order > 0 sweeps flip patterns
    over the non-pivot positions and keeps the candidate with the smallest
    prior-likelihood metric.
    """
    cfg = cfg or OsdConfig()
    m, n = H.shape
    llr = np.asarray(posterior_llrs, dtype=np.float64)
    s = np.asarray(s, dtype=np.uint8)
    if llr.shape != (n,) or s.shape != (m,) or len(priors) != n:
        raise ValueError("dimension mismatch in OSD inputs")

    order = reliability_order(llr)
    hp = H.to_array()[:, order]
    # syndrome bit rides along as column n
    aug = np.hstack([hp, s[:, None]])
    rows, _, pivots = _rref_rows([_row_to_int(r) for r in aug], n + 1, track=False)
    if pivots and pivots[-1] == n:
        raise SyndromeNotInColumnSpace("syndrome is not in the column space of H")
    rnk = len(pivots)
    red = np.zeros((rnk, n + 1), dtype=np.uint8)
    for i in range(rnk):
        bits = rows[i]
        red[i] = np.unpackbits(
            np.frombuffer(bits.to_bytes((n + 8) // 8, "little"), dtype=np.uint8), bitorder="little"
        )[: n + 1]
    piv = np.array(pivots, dtype=np.int64)
    nonpiv_mask = np.ones(n, dtype=bool)
    nonpiv_mask[piv] = False
    nonpiv = np.nonzero(nonpiv_mask)[0]  # positions in sorted order == reliability order

    x = np.zeros(nonpiv.size, dtype=np.uint8)
    N = red[:, nonpiv]
    rhs = red[:, n]

    def solve(xv: np.ndarray) -> np.ndarray:
        c_sorted = np.zeros(n, dtype=np.uint8)
        c_sorted[nonpiv] = xv
        c_sorted[piv] = (rhs + (N.astype(np.int64) @ xv)) & 1
        c = np.zeros(n, dtype=np.uint8)
        c[order] = c_sorted
        return c

    best = solve(x)
    if cfg.order == 0 or nonpiv.size == 0:
        return best
    best_metric = prior_metric(best, priors)
    for pat in sweep_patterns(np.arange(nonpiv.size), cfg.order):
        xf = x.copy()
        xf[list(pat)] ^= 1
        cand = solve(xf)
        met = prior_metric(cand, priors)
        if met < best_metric:
            best, best_metric = cand, met
    return best
