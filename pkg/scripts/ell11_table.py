"""Print N_2k(11n + 6) mod 11 beside the eta^13 display for k = 1..4."""
from __future__ import annotations

import argparse

from quasirank import congruences, moments


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()
    n_max = args.n_max
    T = 11 * n_max + 6
    print("k,n,N_2k(11n+6),mod 11,display")
    for k in range(1, 5):
        series = moments.rank_moment_series(2 * k, T)
        target = congruences.ell11_display_target(k, n_max)
        for n in range(n_max + 1):
            v = series[11 * n + 6]
            print(f"{k},{n},{v},{v % 11},{target[n]}")
    for k in range(1, 5):
        print(congruences.theorem3_part12(k, n_max).to_json())


if __name__ == "__main__":
    main()
