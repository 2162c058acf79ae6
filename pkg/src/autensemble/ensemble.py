"""Automorphism ensemble decoding.

Offline, every automorphism ``A`` gets a syndrome map ``U`` and an inner
decoder compiled on ``H A``.  Online, member ``i`` decodes ``U_i s`` on
``H A_i``.  Because ``H A = U H`` with ``U`` invertible, a member output
``x`` with ``(H A) x == U s`` already satisfies ``H x == s``, so outputs are
used verbatim as corrections in the original coordinates.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import perm as P
from .bp import BpConfig, BpDecoder, Priors
from .gf2 import BinaryMatrix, permute_columns
from .osd import OsdConfig, osd_decode
from .stab_map import SyndromeMap, cached_stab_map, transform_syndrome

METRICS = ("min-weight", "prior-likelihood")


@dataclass(frozen=True)
class EnsembleMember:
    index: int
    automorphism: P.Permutation
    map: SyndromeMap
    matrix: BinaryMatrix
    decoder: BpDecoder
    osd: OsdConfig | None = None


@dataclass(frozen=True)
class Candidate:
    correction: np.ndarray
    metric: float
    member: int
    converged: bool


@dataclass(frozen=True)
class DecodeOutcome:
    correction: np.ndarray
    success_flag: bool
    winner: int
    candidates_considered: int


@dataclass(frozen=True)
class BatchOutcome:
    corrections: np.ndarray  # (B, n)
    success: np.ndarray  # (B,) bool
    winner: np.ndarray  # (B,) int
    n_candidates: np.ndarray  # (B,) int


def candidate_metric(c: np.ndarray, metric_kind: str, priors: Priors | None = None) -> float:
    if metric_kind == "min-weight":
        return float(np.count_nonzero(c))
    if metric_kind == "prior-likelihood":
        if priors is None:
            raise ValueError("prior-likelihood metric needs priors")
        return float(np.dot(c.astype(np.float64), priors.llrs))
    raise ValueError(f"unknown metric {metric_kind!r}")


def select_best(cands: Sequence[Candidate], metric_kind: str = "min-weight", priors: Priors | None = None) -> Candidate:
    """Smallest metric wins; ties go to the lowest member index."""
    if not cands:
        raise ValueError("no candidates")
    scored = [(candidate_metric(c.correction, metric_kind, priors), c.member, i) for i, c in enumerate(cands)]
    return cands[min(scored)[2]]


def parse_inner_kind(inner_kind: str) -> OsdConfig | None:
    if inner_kind == "bp":
        return None
    if inner_kind == "bp+osd0":
        return OsdConfig(0)
    if inner_kind.startswith("bp+osd-"):
        return OsdConfig(int(inner_kind[len("bp+osd-") :]))
    raise ValueError(f"unknown inner decoder {inner_kind!r}")


class EnsembleDecoder:
    def __init__(
        self,
        H: BinaryMatrix,
        priors: Priors,
        members: list[EnsembleMember],
        metric: str = "min-weight",
        workers: int | None = None,
    ):
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        self.H = H
        self.priors = priors
        self.members = members
        self.metric = metric
        self.workers = workers if workers is not None else min(len(members), os.cpu_count() or 1)
        self._dense_t = H.to_array().T.astype(np.int32)
        self._weights = np.ones(H.ncols) if metric == "min-weight" else priors.llrs

    def __len__(self) -> int:
        return len(self.members)

    def syndrome(self, C: np.ndarray) -> np.ndarray:
        return ((C.astype(np.int32) @ self._dense_t) & 1).astype(np.uint8)

    def _run_member(self, member: EnsembleMember, S: np.ndarray):
        SA = transform_syndrome(member.map, S)
        res = member.decoder.decode_batch(SA)
        hard = res.hard.copy()
        ok = res.converged.copy()
        if member.osd is not None:
            # OSD runs on the shots BP left unsolved
            for b in np.nonzero(~ok)[0]:
                hard[b] = osd_decode(member.matrix, res.posterior_llrs[b], member.decoder.priors, SA[b], member.osd)
                ok[b] = True
        # validate in original coordinates
        ok &= np.all(self.syndrome(hard) == S, axis=1)
        return hard, ok

    def decode_batch(self, S, workers: int | None = None) -> BatchOutcome:
        S = np.atleast_2d(np.asarray(S, dtype=np.uint8))
        if S.shape[1] != self.H.nrows:
            raise ValueError(f"syndrome length {S.shape[1]} != {self.H.nrows}")
        workers = self.workers if workers is None else workers
        if workers > 1 and len(self.members) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outs = list(pool.map(lambda mem: self._run_member(mem, S), self.members))
        else:
            outs = [self._run_member(mem, S) for mem in self.members]
        hards = np.stack([o[0] for o in outs])  # (k, B, n)
        oks = np.stack([o[1] for o in outs])  # (k, B)
        metric = hards.astype(np.float64) @ self._weights  # (k, B)
        metric[~oks] = np.inf
        winner = np.argmin(metric, axis=0)  # first minimum -> lowest member index
        success = oks.any(axis=0)
        winner[~success] = 0
        B = S.shape[0]
        corr = hards[winner, np.arange(B)]
        return BatchOutcome(corr, success, winner, oks.sum(axis=0))

    def decode(self, s) -> DecodeOutcome:
        s = np.asarray(s, dtype=np.uint8)
        if s.ndim != 1:
            raise ValueError("expected a single syndrome")
        out = self.decode_batch(s[None, :])
        return DecodeOutcome(out.corrections[0], bool(out.success[0]), int(out.winner[0]), int(out.n_candidates[0]))

    def candidates(self, s) -> list[Candidate]:
        """Per-member candidates for one syndrome (diagnostics)."""
        s = np.asarray(s, dtype=np.uint8)[None, :]
        cands = []
        for mem in self.members:
            hard, ok = self._run_member(mem, s)
            cands.append(Candidate(hard[0], candidate_metric(hard[0], self.metric, self.priors), mem.index, bool(ok[0])))
        return cands


def build_ensemble(
    H: BinaryMatrix,
    priors: Priors,
    auts: Sequence[Sequence[int]],
    bp_cfg: BpConfig | None = None,
    inner_kind: str = "bp",
    metric: str = "min-weight",
    permute_priors: bool = False,
    workers: int | None = None,
) -> EnsembleDecoder:
    """Compile one member per automorphism; ``auts[0]`` must be the identity.

    With ``permute_priors`` member ``i`` gives variable ``j`` the prior of
    column ``A_i(j)`` instead of ``p_j``.
    """
    if not auts:
        raise ValueError("empty automorphism list")
    if not P.is_identity(auts[0]):
        raise ValueError("the first automorphism must be the identity")
    bp_cfg = bp_cfg or BpConfig()
    osd = parse_inner_kind(inner_kind)
    members = []
    for i, a in enumerate(auts):
        a = P.validate(a, H.ncols)
        smap = cached_stab_map(H, a)
        mat = permute_columns(H, a)
        pri = priors.permuted(a) if permute_priors else priors
        members.append(EnsembleMember(i, a, smap, mat, BpDecoder(mat, pri, bp_cfg), osd))
    return EnsembleDecoder(H, priors, members, metric=metric, workers=workers)


def ensemble_decode(ens: EnsembleDecoder, s) -> DecodeOutcome:
    return ens.decode(s)
