"""Text detector-error-model subset: ``error(p) D.. L..`` lines plus declarations.

Accepted per line: ``error(<float>) <target>*`` with targets ``D<uint>`` /
``L<uint>``; ``detector[(coords)] D<uint>``; ``logical_observable L<uint>``;
blank lines and ``#`` comments.  Rejected with a line-numbered
:class:`DemParseError`: unknown instructions, the ``^`` separator, ``repeat``
blocks and malformed probabilities.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gf2 import BinaryMatrix


class DemParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class DetectorErrorModel:
    h: BinaryMatrix  # detectors x faults
    priors: np.ndarray  # (faults,)
    observables: BinaryMatrix  # observables x faults

    @property
    def num_detectors(self) -> int:
        return self.h.nrows

    @property
    def num_faults(self) -> int:
        return self.h.ncols

    @property
    def num_observables(self) -> int:
        return self.observables.nrows

    def __eq__(self, other) -> bool:
        if not isinstance(other, DetectorErrorModel):
            return NotImplemented
        return self.h == other.h and self.observables == other.observables and np.array_equal(self.priors, other.priors)


_ERROR_RE = re.compile(r"^error\(([^()]*)\)(.*)$")
_DECL_RE = re.compile(r"^(detector|logical_observable)(\([^()]*\))?(.*)$")
_INSTR_RE = re.compile(r"^([A-Za-z_]+)")


def _targets(text: str, lineno: int, allowed: str) -> list[tuple[str, int]]:
    out = []
    for tok in text.split():
        if tok == "^":
            raise DemParseError(lineno, "the '^' separator is not supported")
        m = re.fullmatch(r"([DL])(\d+)", tok)
        if not m or m.group(1) not in allowed:
            raise DemParseError(lineno, f"bad target {tok!r}")
        out.append((m.group(1), int(m.group(2))))
    return out


def parse_dem(text: str) -> DetectorErrorModel:
    faults: list[tuple[float, list[int], list[int]]] = []
    max_d = -1
    max_l = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("repeat") or "{" in line or "}" in line:
            raise DemParseError(lineno, "repeat blocks are not supported")
        m = _ERROR_RE.match(line)
        if m:
            try:
                p = float(m.group(1))
            except ValueError:
                raise DemParseError(lineno, f"malformed probability {m.group(1)!r}") from None
            if not np.isfinite(p) or not 0 <= p <= 1:
                raise DemParseError(lineno, f"probability {p} outside [0, 1]")
            tg = _targets(m.group(2), lineno, "DL")
            dets = [i for kind, i in tg if kind == "D"]
            obs = [i for kind, i in tg if kind == "L"]
            if not tg:
                raise DemParseError(lineno, "error instruction without targets")
            max_d = max([max_d, *dets])
            max_l = max([max_l, *obs])
            faults.append((p, dets, obs))
            continue
        m = _DECL_RE.match(line)
        if m:
            kind = "D" if m.group(1) == "detector" else "L"
            for _, i in _targets(m.group(3), lineno, kind):
                if kind == "D":
                    max_d = max(max_d, i)
                else:
                    max_l = max(max_l, i)
            continue
        instr = _INSTR_RE.match(line)
        name = instr.group(1) if instr else line.split()[0]
        if name == "error":
            raise DemParseError(lineno, "malformed error instruction")
        raise DemParseError(lineno, f"unknown instruction {name!r}")

    nd, nl, nf = max_d + 1, max_l + 1, len(faults)
    h = np.zeros((nd, nf), dtype=np.uint8)
    o = np.zeros((nl, nf), dtype=np.uint8)
    for j, (_, dets, obs) in enumerate(faults):
        for d in dets:
            h[d, j] ^= 1  # repeated targets cancel
        for lo in obs:
            o[lo, j] ^= 1
    priors = np.array([f[0] for f in faults], dtype=np.float64)
    return DetectorErrorModel(BinaryMatrix.from_array(h), priors, BinaryMatrix.from_array(o))


def write_dem(dem: DetectorErrorModel) -> str:
    h = dem.h.to_array()
    o = dem.observables.to_array()
    lines = []
    for j in range(dem.num_faults):
        targets = [f"D{d}" for d in np.nonzero(h[:, j])[0]] + [f"L{lo}" for lo in np.nonzero(o[:, j])[0]]
        lines.append(f"error({dem.priors[j]:.12g}) " + " ".join(targets))
    if dem.num_detectors:
        lines.append(f"detector D{dem.num_detectors - 1}")
    if dem.num_observables:
        lines.append(f"logical_observable L{dem.num_observables - 1}")
    return "\n".join(lines) + "\n"


def load_dem(path: str | Path) -> DetectorErrorModel:
    return parse_dem(Path(path).read_text())


def save_dem(dem: DetectorErrorModel, path: str | Path) -> None:
    Path(path).write_text(write_dem(dem))
