"""Regenerate the golden files under tests/data."""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from quasirank import congruences, partitions


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    reports = congruences.ramanujan_reports(2000) + congruences.explicit_eta_reports()
    reports += congruences.durfee_congruence_reports()
    congruences.write_reports(reports, str(out / "congruences.jsonl"))

    rows = ["t,r,s,d,hypotheses,zero"] + [r.row() for r in congruences.root_identity_table(7)]
    (out / "root_identity_t7.csv").write_text("\n".join(rows) + "\n")

    (out / "nf2_t5.csv").write_text(partitions.nf_table(2, 12, 5).to_csv())

    part3 = {}
    for ell in (5, 11):
        d = congruences.theorem3_part3_data(ell)
        part3[str(ell)] = {"H1": [int(c) for c in d.h1_coeffs], "H2": [int(c) for c in d.h2_coeffs],
                           "difference_over_ell": [int(c) for c in d.difference_over_ell.coeffs]}
    (out / "theorem3_part3.json").write_text(json.dumps(part3, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
