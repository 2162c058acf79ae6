"""Flooding min-sum belief propagation for syndrome decoding.

The kernel is vectorised over a batch of syndromes.  Every operation acts row
by row in a fixed order, so a syndrome decodes bit-identically whether it is
alone or part of a batch.

Messages live on a fixed grid of ``LLR_QUANTUM`` (float64 holding exact
multiples).  With that, min-sum updates are exact: min-sum dynamics around
ties amplify rounding noise by roughly 2x per iteration, so on plain floats
the outcome would depend on the last bits of the prior value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BinaryMatrix

MESSAGE_CLIP = 50.0
LLR_QUANTUM = 2.0**-20


def quantize(x):
    return np.round(np.asarray(x, dtype=np.float64) / LLR_QUANTUM) * LLR_QUANTUM


@dataclass(frozen=True)
class BpConfig:
    max_iters: int = 15
    scaling: float = 1.0
    stop_on_syndrome: bool = True
    schedule: str = "flooding"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.scaling <= 1.0:
            raise ValueError("scaling must lie in (0, 1]")
        if self.schedule != "flooding":
            raise ValueError("only the flooding schedule is implemented")


class Priors:
    """Per-column error probabilities and their log-likelihood ratios."""

    def __init__(self, probabilities):
        p = np.asarray(probabilities, dtype=np.float64)
        if p.ndim != 1:
            raise ValueError("priors must be 1-D")
        if not np.all((p > 0) & (p < 1)):
            raise ValueError("prior probabilities must lie in (0, 1)")
        self.probabilities = p
        self.llrs = np.log((1.0 - p) / p)
        self.llrs.setflags(write=False)
        self.probabilities.setflags(write=False)

    @classmethod
    def uniform(cls, n: int, p: float) -> "Priors":
        return cls(np.full(n, p))

    def __len__(self) -> int:
        return len(self.probabilities)

    def permuted(self, a) -> "Priors":
        return Priors(self.probabilities[np.asarray(a)])


@dataclass(frozen=True)
class BpResult:
    hard: np.ndarray
    converged: bool
    posterior_llrs: np.ndarray
    iterations_used: int


@dataclass(frozen=True)
class BatchBpResult:
    hard: np.ndarray  # (B, n) uint8
    converged: np.ndarray  # (B,) bool
    posterior_llrs: np.ndarray  # (B, n)
    iterations_used: np.ndarray  # (B,) int


class BpDecoder:
    """Compiled adjacency tables for one check matrix and prior vector."""

    def __init__(self, H: BinaryMatrix, priors: Priors, cfg: BpConfig | None = None):
        m, n = H.shape
        if m == 0 or n == 0:
            raise ValueError("empty check matrix")
        if len(priors) != n:
            raise ValueError(f"{len(priors)} priors for {n} columns")
        self.H = H
        self.priors = priors
        self.cfg = cfg or BpConfig()
        self.prior_llrs = quantize(priors.llrs)
        dense = H.to_array()
        self.dense = dense
        self._dense_t = dense.T.astype(np.int32)
        chk, var = np.nonzero(dense)  # check-major edge order
        E = len(chk)
        self.edge_check = chk
        self.edge_var = var
        self.n_edges = E
        # padded tables point at sentinel edge E
        cdeg = np.bincount(chk, minlength=m)
        vdeg = np.bincount(var, minlength=n)
        self.check_edges = self._pad(chk, m, int(cdeg.max(initial=0)), E)
        self.var_edges = self._pad(var, n, int(vdeg.max(initial=0)), E)
        self.check_deg = cdeg
        self.var_deg = vdeg

    @staticmethod
    def _pad(owner: np.ndarray, count: int, width: int, sentinel: int) -> np.ndarray:
        table = np.full((count, max(width, 1)), sentinel, dtype=np.int64)
        order = np.argsort(owner, kind="stable")
        fill = np.zeros(count, dtype=np.int64)
        for e in order:
            o = owner[e]
            table[o, fill[o]] = e
            fill[o] += 1
        return table

    @property
    def shape(self) -> tuple[int, int]:
        return self.H.shape

    def syndrome(self, hard: np.ndarray) -> np.ndarray:
        return ((hard.astype(np.int32) @ self._dense_t) & 1).astype(np.uint8)

    def decode(self, s) -> BpResult:
        s = np.asarray(s, dtype=np.uint8)
        if s.ndim != 1 or s.shape[0] != self.H.nrows:
            raise ValueError(f"syndrome shape {s.shape} != ({self.H.nrows},)")
        res = self.decode_batch(s[None, :])
        return BpResult(
            hard=res.hard[0],
            converged=bool(res.converged[0]),
            posterior_llrs=res.posterior_llrs[0],
            iterations_used=int(res.iterations_used[0]),
        )

    def decode_batch(self, S) -> BatchBpResult:
        S = np.asarray(S, dtype=np.uint8)
        m, n = self.H.shape
        if S.ndim != 2 or S.shape[1] != m:
            raise ValueError(f"syndrome batch shape {S.shape} incompatible with {m} checks")
        B = S.shape[0]
        cfg = self.cfg
        prior = self.prior_llrs
        E = self.n_edges

        hard = np.repeat((prior <= 0).astype(np.uint8)[None, :], B, axis=0)
        post = np.repeat(prior[None, :].astype(np.float64), B, axis=0)
        iters = np.zeros(B, dtype=np.int64)
        conv = np.all(self.syndrome(hard) == S, axis=1)
        active = np.nonzero(~conv if cfg.stop_on_syndrome else np.ones(B, bool))[0]
        if active.size == 0:
            return BatchBpResult(hard, conv, post, iters)

        # syndrome sign per check, +1 / -1
        ssign = 1.0 - 2.0 * S[active].astype(np.float64)
        q = np.empty((active.size, E + 1))
        q[:, :E] = prior[self.edge_var][None, :]
        q[:, E] = np.inf
        r = np.zeros((active.size, E + 1))
        ce = self.check_edges
        ve = self.var_edges
        ev = self.edge_var
        rows_ix = np.arange(ce.shape[1])

        for it in range(1, cfg.max_iters + 1):
            # check update
            qc = q[:, ce]  # (b, m, dc); padding = +inf
            mag = np.abs(qc)
            neg = qc < 0
            parity = (np.count_nonzero(neg, axis=2) & 1).astype(np.float64)
            total_sign = ssign * (1.0 - 2.0 * parity)  # (b, m)
            amin = np.argmin(mag, axis=2)
            min1 = np.take_along_axis(mag, amin[..., None], axis=2)[..., 0]
            mag2 = mag.copy()
            np.put_along_axis(mag2, amin[..., None], np.inf, axis=2)
            min2 = mag2.min(axis=2)
            is_min = rows_ix[None, None, :] == amin[..., None]
            other_min = np.where(is_min, min2[..., None], min1[..., None])
            edge_sign = np.where(neg, -1.0, 1.0)
            msg = total_sign[..., None] * edge_sign * other_min
            if cfg.scaling != 1.0:
                msg = quantize(cfg.scaling * msg)
            np.clip(msg, -MESSAGE_CLIP, MESSAGE_CLIP, out=msg)
            r[:, ce] = msg
            r[:, E] = 0.0
            # variable update, summed slot by slot in fixed order
            post_a = np.repeat(prior[None, :], active.size, axis=0)
            for slot in range(ve.shape[1]):
                post_a = post_a + r[:, ve[:, slot]]
            q[:, :E] = post_a[:, ev] - r[:, :E]
            np.clip(q[:, :E], -MESSAGE_CLIP, MESSAGE_CLIP, out=q[:, :E])
            q[:, E] = np.inf

            h_a = (post_a <= 0).astype(np.uint8)
            ok = np.all(self.syndrome(h_a) == S[active], axis=1)
            hard[active] = h_a
            post[active] = post_a
            iters[active] = it
            conv[active] = ok
            if cfg.stop_on_syndrome:
                keep = ~ok
                if not keep.any():
                    break
                if not keep.all():
                    active = active[keep]
                    q = q[keep]
                    r = r[keep]
                    ssign = ssign[keep]
        return BatchBpResult(hard, conv, post, iters)


def compile_bp(H: BinaryMatrix, priors: Priors, cfg: BpConfig | None = None) -> BpDecoder:
    return BpDecoder(H, priors, cfg)


def bp_decode(dec: BpDecoder, s) -> BpResult:
    return dec.decode(s)
