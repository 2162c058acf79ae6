"""Fraction of shots on which plain BP converges, per physical error rate.

Used to pick an operating point where BP neither always succeeds nor
always fails before comparing ensembles.
"""

import argparse

import numpy as np

from autensemble.bp import BpConfig, BpDecoder, Priors
from autensemble.codes import get_code


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--code", default="bb72")
    ap.add_argument("--p", default="0.02,0.04,0.06,0.08,0.10")
    ap.add_argument("--shots", type=int, default=500)
    ap.add_argument("--max-iters", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args(argv)

    code = get_code(args.code)
    H = code.hx.to_array()
    print("p,converged")
    for p in (float(x) for x in args.p.split(",")):
        q = 2 * p / 3
        rng = np.random.default_rng(args.seed)
        E = (rng.random((args.shots, code.n)) < q).astype(np.uint8)
        dec = BpDecoder(code.hx, Priors.uniform(code.n, q), BpConfig(args.max_iters))
        rate = dec.decode_batch((E @ H.T) % 2).converged.mean()
        print(f"{p},{rate:.4f}", flush=True)


if __name__ == "__main__":
    main()
