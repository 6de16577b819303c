"""Run the mod ell^2 pipeline (H_1, H_2 fits and the eta-quotient step) for the chosen primes."""
from __future__ import annotations

import argparse
import json
import time

from quasirank import congruences


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, action="append", help="prime (repeatable); default 5 and 11")
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--eta-check", type=int, default=0, help="also run the eta-quotient step to this index")
    args = ap.parse_args()
    for ell in args.ell or [5, 11]:
        t0 = time.perf_counter()
        rep = congruences.theorem3_part3(ell, args.n_max)
        out = {"ell": ell, "passed": rep.passed, "notes": rep.notes, "seconds": round(time.perf_counter() - t0, 3)}
        if args.eta_check:
            ok, first = congruences.eta_quotient_check(ell, args.eta_check)
            out["eta_quotient"] = {"passed": ok, "first_failure": first}
        print(json.dumps(out, default=str, sort_keys=True))


if __name__ == "__main__":
    main()
