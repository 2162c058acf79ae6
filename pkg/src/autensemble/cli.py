"""Command-line entry point: ``code info``, ``aut find``, ``simulate``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .bp import BpConfig
from .codes import css_distance_bruteforce, get_code
from .dem_io import DemParseError, load_dem
from .gf2 import gf2_mul, rank
from .noise_sim import CSV_FIELDS, dem_automorphisms, ensemble_automorphisms, parse_decoder_spec, run_capacity_experiment, run_dem_experiment
from .tanner_aut import GeneratorSet, Overflow, build_joint_tanner, build_tanner, find_automorphism_generators, group_order

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_PARSE = 4

log = logging.getLogger("autensemble")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    code: str | None
    dem: str | None
    decoders: tuple[str, ...]
    ps: tuple[float, ...]
    shots: int
    max_iters: int
    scaling: float
    seed: int
    ensemble_seed: int
    out: str
    workers: int
    generators: str | None = None

    def validate(self) -> None:
        if (self.code is None) == (self.dem is None):
            raise ConfigError("give exactly one of --code or --dem")
        if self.shots < 1:
            raise ConfigError("--shots must be >= 1")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if not self.decoders:
            raise ConfigError("no decoders given")
        for d in self.decoders:
            try:
                parse_decoder_spec(d)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.code is not None and not self.ps:
            raise ConfigError("--p is required with --code")
        for p in self.ps:
            if not 0 <= p <= 1:
                raise ConfigError(f"physical error rate {p} outside [0, 1]")
        try:
            BpConfig(self.max_iters, self.scaling)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="autensemble", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="group", required=True)

    code = sub.add_parser("code", help="code constructions")
    code_sub = code.add_subparsers(dest="action", required=True)
    info = code_sub.add_parser("info", help="print parameters and checks")
    info.add_argument("name")
    info.add_argument("--manifest")

    aut = sub.add_parser("aut", help="automorphism search")
    aut_sub = aut.add_subparsers(dest="action", required=True)
    find = aut_sub.add_parser("find", help="find Tanner-graph automorphism generators")
    src = find.add_mutually_exclusive_group(required=True)
    src.add_argument("--code")
    src.add_argument("--dem")
    find.add_argument("--side", choices=("x", "z", "joint"), default="joint")
    find.add_argument("--color-priors", action="store_true", help="DEM only: keep priors invariant")
    find.add_argument("--cap", type=int, default=100_000)
    find.add_argument("--out")
    find.add_argument("--manifest")

    sim = sub.add_parser("simulate", help="Monte-Carlo logical error rates, CSV out")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--code")
    src.add_argument("--dem")
    sim.add_argument("--decoders", default="bp")
    sim.add_argument("--p", type=_floats, default=())
    sim.add_argument("--shots", type=int, default=1000)
    sim.add_argument("--max-iters", type=int, default=None)
    sim.add_argument("--scaling", type=float, default=1.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--ensemble-seed", type=int, default=0)
    sim.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sim.add_argument("--generators", help="DEM only: generator JSON from 'aut find'")
    sim.add_argument("--out", default="-")
    sim.add_argument("--manifest")
    return ap


def cmd_code_info(name: str, manifest: str | None = None, stream=None) -> dict:
    stream = stream or sys.stdout
    code = get_code(name, manifest)
    code.check()
    report = {
        "name": code.name,
        "n": code.n,
        "k": code.k,
        "hx_shape": list(code.hx.shape),
        "hz_shape": list(code.hz.shape),
        "rank_hx": rank(code.hx),
        "rank_hz": rank(code.hz),
        "commute": gf2_mul(code.hx, code.hz.T).is_zero(),
    }
    if code.n <= 32:
        report["distance_zx"] = list(css_distance_bruteforce(code))
    for key, val in report.items():
        print(f"{key}: {val}", file=stream)
    return report


def cmd_aut_find(args, stream=None) -> GeneratorSet:
    stream = stream or sys.stdout
    t0 = time.perf_counter()
    if args.code:
        code = get_code(args.code, args.manifest)
        if args.side == "x":
            g = build_tanner(code.hx)
        elif args.side == "z":
            g = build_tanner(code.hz)
        else:
            g = build_joint_tanner(code.hx, code.hz)
        gs = find_automorphism_generators(g)
        label = f"{code.name}:{args.side}"
    else:
        dem = load_dem(args.dem)
        gs = dem_automorphisms(dem, args.color_priors)
        label = str(args.dem)
    elapsed = time.perf_counter() - t0
    order = group_order(gs, cap=args.cap)
    gs.stats["source"] = label
    overflow = isinstance(order, Overflow)
    gs.stats["group_order"] = None if overflow else int(order)
    gs.stats["seconds"] = elapsed
    if args.out:
        gs.save(args.out)
    print(f"source: {label}", file=stream)
    print(f"generators: {len(gs.generators)}", file=stream)
    print(f"group order: > {int(order)} (cap)" if overflow else f"group order: {order}", file=stream)
    print(f"search seconds: {elapsed:.4f}", file=stream)
    return gs


def cmd_simulate(cfg: RunConfig, stream=None) -> list[dict]:
    cfg.validate()
    rows = []
    if cfg.code is not None:
        code = get_code(cfg.code)
        bp_cfg = BpConfig(cfg.max_iters, cfg.scaling)
        for p in cfg.ps:
            for d in cfg.decoders:
                s = run_capacity_experiment(code, d, p, cfg.shots, cfg.seed, bp_cfg, cfg.workers, cfg.ensemble_seed)
                rows.append(s.row())
    else:
        dem = load_dem(cfg.dem)
        bp_cfg = BpConfig(cfg.max_iters, cfg.scaling)
        pl = cfg.ps[0] if cfg.ps else None
        gens = None
        if cfg.generators:
            gens = GeneratorSet.load(cfg.generators).variable_permutations()
        name = Path(cfg.dem).stem
        for d in cfg.decoders:
            spec = parse_decoder_spec(d)
            auts = None
            if gens is not None:
                auts = ensemble_automorphisms(gens, spec.ensemble, cfg.ensemble_seed, degree=dem.num_faults)
            s = run_dem_experiment(dem, d, cfg.shots, cfg.seed, bp_cfg, cfg.workers, cfg.ensemble_seed, auts, name=name, p_label=pl)
            rows.append(s.row())
    _write_rows(rows, cfg.out, stream)
    return rows


def _write_rows(rows: list[dict], out: str, stream=None) -> None:
    if out == "-":
        w = csv.DictWriter(stream or sys.stdout, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return
    path = Path(out)
    new = not path.exists() or path.stat().st_size == 0
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    if new:
        w.writeheader()
    w.writerows(rows)
    with path.open("a", newline="") as fh:
        fh.write(buf.getvalue())


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.group == "code":
            cmd_code_info(args.name, args.manifest)
        elif args.group == "aut":
            cmd_aut_find(args)
        else:
            default_iters = 15 if (args.code == "qrm15") else 1000
            cfg = RunConfig(
                code=args.code,
                dem=args.dem,
                decoders=tuple(d.strip() for d in args.decoders.split(",") if d.strip()),
                ps=tuple(args.p),
                shots=args.shots,
                max_iters=args.max_iters if args.max_iters is not None else default_iters,
                scaling=args.scaling,
                seed=args.seed,
                ensemble_seed=args.ensemble_seed,
                out=args.out,
                workers=args.workers,
                generators=args.generators,
            )
            cmd_simulate(cfg)
    except (ConfigError, KeyError) as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DemParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
