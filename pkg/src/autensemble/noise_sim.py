"""Monte-Carlo logical error rates for code-capacity and DEM noise."""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from . import perm as P
from .bp import BpConfig, Priors
from .codes import CssCode, code_automorphism_generators, preferred_automorphisms
from .dem_io import DetectorErrorModel
from .ensemble import build_ensemble
from .gf2 import BinaryMatrix
from .tanner_aut import build_tanner, find_automorphism_generators, prior_colors, sample_ensemble

CSV_FIELDS = ("code", "decoder", "ensemble", "p", "shots", "failures", "p_logical", "wilson_lo", "wilson_hi", "max_iters", "seed")

DEFAULT_CHUNK = 512


class SyndromeDecoder(Protocol):
    def decode_batch(self, S: np.ndarray): ...


def wilson_interval(failures: int, shots: int, z: float = 1.96) -> tuple[float, float]:
    if shots <= 0:
        raise ValueError("shots must be >= 1")
    if not 0 <= failures <= shots:
        raise ValueError("failures must lie in [0, shots]")
    phat = failures / shots
    denom = 1 + z * z / shots
    centre = (phat + z * z / (2 * shots)) / denom
    half = z * math.sqrt(phat * (1 - phat) / shots + z * z / (4 * shots * shots)) / denom
    lo = 0.0 if failures == 0 else max(0.0, centre - half)
    hi = 1.0 if failures == shots else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class SimSummary:
    code: str
    decoder: str
    ensemble: int
    p: float | None
    shots: int
    failures: int
    max_iters: int
    seed: int

    @property
    def p_logical(self) -> float:
        return self.failures / self.shots

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.shots)

    @property
    def wilson_lo(self) -> float:
        return self.wilson[0]

    @property
    def wilson_hi(self) -> float:
        return self.wilson[1]

    def row(self) -> dict:
        d = asdict(self)
        d["p"] = "" if self.p is None else f"{self.p:.10g}"
        d["p_logical"] = f"{self.p_logical:.10g}"
        d["wilson_lo"] = f"{self.wilson_lo:.10g}"
        d["wilson_hi"] = f"{self.wilson_hi:.10g}"
        return {k: d[k] for k in CSV_FIELDS}


# --------------------------------------------------------------- decoders ----


@dataclass(frozen=True)
class DecoderSpec:
    label: str
    inner: str  # bp | bp+osd0 | bp+osd-<order>
    ensemble: int


_SPEC_RE = re.compile(r"^(?:(bp)|(bp\+osd0)|bp\+osd-(\d+)|autbp-(\d+)|autbposd0-(\d+))$")


def parse_decoder_spec(spec: str) -> DecoderSpec:
    m = _SPEC_RE.match(spec.strip().lower())
    if not m:
        raise ValueError(f"unknown decoder spec {spec!r}; expected bp | bp+osd0 | bp+osd-L | autbp-K | autbposd0-K")
    bp, osd0, lam, kbp, kosd = m.groups()
    if bp:
        return DecoderSpec(spec, "bp", 1)
    if osd0:
        return DecoderSpec(spec, "bp+osd0", 1)
    if lam is not None:
        return DecoderSpec(spec, f"bp+osd-{int(lam)}", 1)
    k = int(kbp if kbp is not None else kosd)
    if k < 1:
        raise ValueError("ensemble size must be >= 1")
    return DecoderSpec(spec, "bp" if kbp is not None else "bp+osd0", k)


def ensemble_automorphisms(gens: Sequence[Sequence[int]], k: int, seed: int, include: Sequence[Sequence[int]] = (), degree: int | None = None) -> list[P.Permutation]:
    if k == 1:
        return [P.identity(degree if degree is not None else len(gens[0]))]
    return sample_ensemble(gens, k, seed=seed, include=include, degree=degree)


# --------------------------------------------------------------- sampling ----


@dataclass(frozen=True)
class DepolarizingDraw:
    e_x: np.ndarray
    e_z: np.ndarray


def sample_depolarizing(n: int, p: float, rng: np.random.Generator) -> DepolarizingDraw:
    """Each qubit: X, Y or Z with probability p/3 each."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    u = rng.random(n)
    e_x = (u < 2 * p / 3).astype(np.uint8)  # X or Y
    e_z = ((u >= p / 3) & (u < p)).astype(np.uint8)  # Y or Z
    return DepolarizingDraw(e_x, e_z)


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(shot)])


def _chunks(shots: int, chunk: int):
    return [(s, min(s + chunk, shots)) for s in range(0, shots, chunk)]


def _run_chunks(fn: Callable[[int, int], int], shots: int, workers: int, chunk: int) -> int:
    ranges = _chunks(shots, chunk)
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(lambda r: fn(*r), ranges))
    return sum(fn(a, b) for a, b in ranges)


def _residual_flips(L: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Rows of ``R`` anticommuting with any row of ``L``."""
    if L.shape[0] == 0:
        return np.zeros(R.shape[0], dtype=bool)
    return (((R.astype(np.int32) @ L.T.astype(np.int32)) & 1) != 0).any(axis=1)


def _score(dec_out, e: np.ndarray, H: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Failure per shot: invalid correction or a logical flip."""
    C = dec_out.corrections
    valid = np.all(((C.astype(np.int32) @ H.T.astype(np.int32)) & 1) == ((e.astype(np.int32) @ H.T.astype(np.int32)) & 1), axis=1)
    return ~valid | _residual_flips(L, e ^ C)


def make_capacity_decoders(code: CssCode, spec: DecoderSpec, p: float, bp_cfg: BpConfig, ensemble_seed: int = 0, member_workers: int = 1):
    """(Z-error decoder on hx, X-error decoder on hz)."""
    q = max(2 * p / 3, 1e-12)
    q = min(q, 1 - 1e-12)
    n = code.n
    if spec.ensemble > 1:
        auts = ensemble_automorphisms(code_automorphism_generators(code), spec.ensemble, ensemble_seed, preferred_automorphisms(code), n)
    else:
        auts = [P.identity(n)]
    pri = Priors.uniform(n, q)
    dz = build_ensemble(code.hx, pri, auts, bp_cfg, spec.inner, "min-weight", workers=member_workers)
    dx = build_ensemble(code.hz, pri, auts, bp_cfg, spec.inner, "min-weight", workers=member_workers)
    return dz, dx


def run_capacity_experiment(
    code: CssCode,
    decoder_spec: str | Callable,
    p: float,
    shots: int,
    seed: int = 0,
    bp_cfg: BpConfig | None = None,
    workers: int = 1,
    ensemble_seed: int = 0,
    chunk: int = DEFAULT_CHUNK,
) -> SimSummary:
    """Code-capacity depolarizing noise, X and Z parts decoded independently.

    ``decoder_spec`` is a spec string or a factory ``(H, priors) -> decoder``
    whose ``decode_batch`` returns an object with a ``corrections`` array.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    bp_cfg = bp_cfg or BpConfig()
    if callable(decoder_spec):
        q = min(max(2 * p / 3, 1e-12), 1 - 1e-12)
        pri = Priors.uniform(code.n, q)
        dz, dx = decoder_spec(code.hx, pri), decoder_spec(code.hz, pri)
        label, ens = getattr(decoder_spec, "__name__", "custom"), 1
    else:
        spec = parse_decoder_spec(decoder_spec)
        dz, dx = make_capacity_decoders(code, spec, p, bp_cfg, ensemble_seed)
        label, ens = spec.label, spec.ensemble
        ens = len(dz.members)
    hx, hz = code.hx.to_array(), code.hz.to_array()
    lx, lz = code.lx.to_array(), code.lz.to_array()
    n = code.n

    def block(a: int, b: int) -> int:
        ex = np.empty((b - a, n), dtype=np.uint8)
        ez = np.empty((b - a, n), dtype=np.uint8)
        for i, shot in enumerate(range(a, b)):
            draw = sample_depolarizing(n, p, shot_rng(seed, shot))
            ex[i], ez[i] = draw.e_x, draw.e_z
        sz = ((ez.astype(np.int32) @ hx.T.astype(np.int32)) & 1).astype(np.uint8)
        sx = ((ex.astype(np.int32) @ hz.T.astype(np.int32)) & 1).astype(np.uint8)
        fz = _score(dz.decode_batch(sz), ez, hx, lx)
        fx = _score(dx.decode_batch(sx), ex, hz, lz)
        return int(np.count_nonzero(fz | fx))

    failures = _run_chunks(block, shots, workers, chunk)
    return SimSummary(code.name, label, ens, float(p), shots, failures, bp_cfg.max_iters, seed)


def dem_automorphisms(dem: DetectorErrorModel, color_priors: bool = False):
    """Column automorphisms of the DEM check matrix via Tanner-graph search."""
    colors = prior_colors(dem.priors) if color_priors else None
    gs = find_automorphism_generators(build_tanner(dem.h, colors))
    return gs


def make_dem_decoder(dem: DetectorErrorModel, spec: DecoderSpec, bp_cfg: BpConfig, ensemble_seed: int = 0, automorphisms=None, color_priors: bool = False, permute_priors: bool = False):
    nf = dem.num_faults
    pri = Priors(np.clip(dem.priors, 1e-12, 1 - 1e-12))
    if automorphisms is None:
        if spec.ensemble > 1:
            gens = dem_automorphisms(dem, color_priors).variable_permutations()
            automorphisms = ensemble_automorphisms(gens, spec.ensemble, ensemble_seed, degree=nf)
        else:
            automorphisms = [P.identity(nf)]
    return build_ensemble(dem.h, pri, automorphisms, bp_cfg, spec.inner, "prior-likelihood", permute_priors=permute_priors)


def run_dem_experiment(
    dem: DetectorErrorModel,
    decoder_spec: str | Callable,
    shots: int,
    seed: int = 0,
    bp_cfg: BpConfig | None = None,
    workers: int = 1,
    ensemble_seed: int = 0,
    automorphisms=None,
    name: str = "dem",
    p_label: float | None = None,
    chunk: int = DEFAULT_CHUNK,
    color_priors: bool = False,
    permute_priors: bool = False,
) -> SimSummary:
    """Faults fire independently with their priors; failure = observable flip."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    bp_cfg = bp_cfg or BpConfig(max_iters=1000)
    if callable(decoder_spec):
        dec = decoder_spec(dem.h, Priors(np.clip(dem.priors, 1e-12, 1 - 1e-12)))
        label, ens = getattr(decoder_spec, "__name__", "custom"), 1
    else:
        spec = parse_decoder_spec(decoder_spec)
        dec = make_dem_decoder(dem, spec, bp_cfg, ensemble_seed, automorphisms, color_priors, permute_priors)
        label, ens = spec.label, len(dec.members)
    H = dem.h.to_array()
    O = dem.observables.to_array()
    pri = np.asarray(dem.priors)
    nf = dem.num_faults

    def block(a: int, b: int) -> int:
        e = np.empty((b - a, nf), dtype=np.uint8)
        for i, shot in enumerate(range(a, b)):
            e[i] = shot_rng(seed, shot).random(nf) < pri
        S = ((e.astype(np.int32) @ H.T.astype(np.int32)) & 1).astype(np.uint8)
        return int(np.count_nonzero(_score(dec.decode_batch(S), e, H, O)))

    failures = _run_chunks(block, shots, workers, chunk)
    return SimSummary(name, label, ens, p_label, shots, failures, bp_cfg.max_iters, seed)
