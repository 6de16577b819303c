"""Tabulate the root-of-unity identity over all (r, s, d) for a prime t.

By default only rows meeting the hypotheses are shown; ``--all`` also lists
the rest, which is where nonzero values appear.
"""
from __future__ import annotations

import argparse

from quasirank import congruences


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, default=7)
    ap.add_argument("--all", action="store_true")
    args = ap.parse_args()
    rows = congruences.root_identity_table(args.t)
    print("t,r,s,d,hypotheses,zero")
    for r in rows:
        if args.all or r.hypotheses:
            print(r.row())
    hyp = [r for r in rows if r.hypotheses]
    print(f"# {len(hyp)} rows meet the hypotheses, {sum(r.zero for r in hyp)} vanish;"
          f" {sum(1 for r in rows if not r.hypotheses and not r.zero)} other rows are nonzero")


if __name__ == "__main__":
    main()
