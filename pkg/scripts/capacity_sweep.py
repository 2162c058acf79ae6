"""Code-capacity logical error rate sweep, one CSV row per (decoder, p)."""

import argparse
import csv
import sys

from autensemble.bp import BpConfig
from autensemble.codes import get_code
from autensemble.noise_sim import CSV_FIELDS, run_capacity_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--code", default="qrm15")
    ap.add_argument("--decoders", default="bp,autbp-5,bp+osd0")
    ap.add_argument("--p", default="0.005,0.01,0.02,0.03,0.05,0.08")
    ap.add_argument("--shots", type=int, default=10_000)
    ap.add_argument("--max-iters", type=int, default=15)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    code = get_code(args.code)
    cfg = BpConfig(args.max_iters)
    w = csv.DictWriter(sys.stdout, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for p in (float(x) for x in args.p.split(",")):
        for d in args.decoders.split(","):
            s = run_capacity_experiment(code, d, p, args.shots, args.seed, cfg, args.workers)
            w.writerow(s.row())
            sys.stdout.flush()


if __name__ == "__main__":
    main()
