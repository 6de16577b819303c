"""Search for progressions A n + B with coefficients divisible by ell^j.

Hits only mean the congruence held at every available point.
"""
from __future__ import annotations

import argparse

from quasirank import congruences, forms, moments


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--stat", default="eta2", help="p or etaK (K even)")
    ap.add_argument("--ell", type=int, default=11)
    ap.add_argument("--j", type=int, default=1)
    ap.add_argument("--A", type=int, action="append")
    ap.add_argument("--trunc", type=int, default=2000)
    args = ap.parse_args()
    if args.stat == "p":
        series = forms.partition_series(args.trunc)
    elif args.stat.startswith("eta"):
        series = moments.eta_moment_series(int(args.stat[3:]), args.trunc)
    else:
        ap.error("unknown statistic")
    cands = args.A or congruences.default_candidates(args.ell)
    for rep in congruences.scan_congruences(series, args.ell, args.j, cands, name=args.stat):
        print(f"{args.stat}({rep.A}n+{rep.B}) == 0 mod {rep.modulus}  checked n <= {rep.n_max}")


if __name__ == "__main__":
    main()
