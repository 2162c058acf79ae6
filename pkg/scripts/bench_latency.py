"""Per-shot wall time of AutBP-k against plain BP at several worker counts."""

import argparse
import time

import numpy as np

from autensemble.bp import BpConfig, Priors
from autensemble.codes import code_automorphism_generators, get_code, preferred_automorphisms
from autensemble.ensemble import build_ensemble
from autensemble.noise_sim import ensemble_automorphisms


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--code", default="qrm15")
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--p", type=float, default=0.03)
    ap.add_argument("--shots", type=int, default=300)
    ap.add_argument("--max-iters", type=int, default=15)
    ap.add_argument("--workers", default="1,2,4")
    args = ap.parse_args(argv)

    code = get_code(args.code)
    q = 2 * args.p / 3
    auts = ensemble_automorphisms(code_automorphism_generators(code), args.k, 0, preferred_automorphisms(code), code.n)
    pri = Priors.uniform(code.n, q)
    cfg = BpConfig(args.max_iters)
    rng = np.random.default_rng(0)
    E = (rng.random((args.shots, code.n)) < q).astype(np.uint8)
    S = (E @ code.hx.to_array().T) % 2

    def per_shot(ens, workers):
        t = time.perf_counter()
        for s in S:
            ens.decode_batch(s[None, :], workers=workers)
        return (time.perf_counter() - t) / len(S) * 1e6

    base = per_shot(build_ensemble(code.hx, pri, auts[:1], cfg), 1)
    print(f"BP: {base:.0f} us/shot")
    ens = build_ensemble(code.hx, pri, auts, cfg)
    for w in (int(x) for x in args.workers.split(",")):
        t = per_shot(ens, w)
        print(f"AutBP-{len(auts)} workers={w}: {t:.0f} us/shot ({t / base:.2f}x BP)")


if __name__ == "__main__":
    main()
