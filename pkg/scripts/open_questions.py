"""Experiments behind the ambiguous or unsettled statements handled by the library.

Each section prints what was measured; nothing here is asserted.
"""
from __future__ import annotations

import argparse

from quasirank import congruences, moments


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=30)
    args = ap.parse_args()

    print("== D_2(7n + a) under moduli 5 and 7")
    for r in congruences.durfee_congruence_reports():
        if r.statistic == "D_2" and r.A == 7:
            verdict = "holds" if r.passed else "fails at n={}, value {}".format(*r.counterexample)
            print(f"  D_2(7n+{r.B}) mod {r.modulus}: {verdict}")

    print("== c_k at ell = 11")
    for k in (2, 3, 4):
        rep = congruences.solve_ck(11, k, args.n_max)
        print(f"  k={k}: feasible residues {rep.notes['feasible_c']}")
    w = congruences.theorem3_part1_witness(11, args.n_max)
    print(f"  N_2 stream / eta^13 constant mod 11: {w.notes['constant_quotient']} (value {w.notes['leading']})")

    print("== twisted R_2 at zeta = -1")
    print(f"  identically zero through q^20: {moments.twisted_r2(1, 2, 20).is_zero()}")

    print("== rank derivative with and without the extra root factor")
    for a, c in ((1, 3), (2, 5)):
        direct = moments.rank_derivative_at(a, c, 12)
        plain = moments.rank_derivative_from_sums(a, c, 12) == direct
        extra = moments.rank_derivative_from_sums(a, c, 12, paper_factor=True) == direct
        print(f"  (a, c) = ({a}, {c}): without factor {plain}, with factor {extra}")

    print("== sign of the root-of-unity Durfee evaluation")
    lit = moments.rootunity_eval(2, 5, 1, 10, literal=True)
    gen = moments.rootunity_eval(2, 5, 1, 10)
    print(f"  k=2: literal == -general {lit == -gen}")


if __name__ == "__main__":
    main()
