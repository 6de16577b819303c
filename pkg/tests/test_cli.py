from __future__ import annotations

import json

import pytest

from quasirank.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_partitions(capsys):
    code, out, _ = run(capsys, "table", "p", "--n-max", "10")
    assert code == 0
    values = [int(line.split(",")[2]) for line in out.splitlines()[1:]]
    assert values == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_table_eta_anchor(capsys):
    code, out, _ = run(capsys, "table", "eta", "--k", "2", "--n-max", "6", "--checked")
    assert code == 0
    assert "eta_2,4,10" in out.splitlines()


def test_table_nf_grid_sums_to_durfee_counts(capsys, tmp_path):
    code, out, _ = run(capsys, "table", "NF", "--k", "2", "--t", "5", "--n-max", "8", "--format", "json", "--checked")
    assert code == 0
    rows = json.loads(out)["rows"]
    _, dout, _ = run(capsys, "table", "D", "--k", "2", "--n-max", "8")
    d = {int(x.split(",")[1]): int(x.split(",")[2]) for x in dout.splitlines()[1:]}
    for n in range(1, 9):
        assert sum(int(r["count"]) for r in rows if r["n"] == n) == d[n]


def test_table_bivariate_and_modulus(capsys):
    code, out, _ = run(capsys, "table", "N", "--n-max", "5", "--checked")
    assert code == 0 and "N,5,0:" not in out and "N,5,0,1" in out
    code, out, _ = run(capsys, "table", "p", "--n-max", "9", "--modulus", "5")
    assert out.splitlines()[5] == "p,4,0"


def test_enumeration_bound_is_a_config_error(capsys):
    code, _, err = run(capsys, "table", "D", "--k", "2", "--n-max", "500")
    assert code == 2 and "enumeration" in err


@pytest.mark.parametrize("argv", [["verify", "bogus"], ["table", "p"], ["table", "p", "--n-max", "-3"],
                                  ["frobnicate"], ["verify"]])
def test_configuration_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify_suites_pass(capsys):
    code, out, _ = run(capsys, "verify", "pde", "--trunc", "20")
    assert code == 0 and json.loads(out.splitlines()[0])["passed"]
    assert run(capsys, "verify", "rootidentity", "--t", "5")[0] == 0
    assert run(capsys, "verify", "pk")[0] == 0


def test_verify_theorem3_eleven(capsys):
    code, out, _ = run(capsys, "verify", "theorem3", "--ell", "11", "--n-max", "8")
    assert code == 0
    assert all(json.loads(line)["passed"] for line in out.splitlines())


def test_falsification_exit_code(capsys, monkeypatch):
    from quasirank import cli, moments
    from quasirank.qseries import WQSeries

    real = moments.pde_residual

    def broken(T):
        w = real(T)
        return WQSeries(w.ring, [w.rows[0], {0: 1}] + list(w.rows[2:]), w.trunc)

    monkeypatch.setattr(cli.moments, "pde_residual", broken)
    code, _, err = run(capsys, "verify", "pde", "--trunc", "10")
    assert code == 1 and "first failure" in err


def test_scan_examples(capsys):
    code, out, _ = run(capsys, "scan", "--stat", "eta4", "--ell", "11", "--A", "11")
    assert code == 0
    pairs = {(json.loads(x)["A"], json.loads(x)["B"]) for x in out.splitlines()}
    assert (11, 0) in pairs
    code, out, _ = run(capsys, "scan", "--stat", "p", "--ell", "13", "--j", "1", "--A", "13")
    assert code == 0 and out == ""


def test_scan_eta2_includes_cubic_progression(capsys):
    code, out, _ = run(capsys, "scan", "--stat", "eta2", "--ell", "11", "--j", "1")
    assert code == 0
    pairs = {(json.loads(x)["A"], json.loads(x)["B"]) for x in out.splitlines()}
    assert (1331, 479) in pairs


def test_series_export_round_trip(capsys, tmp_path):
    from quasirank.moments import MomentSeries, crank_moment_series

    path = tmp_path / "c2.txt"
    code, _, _ = run(capsys, "series", "C", "--order", "2", "--trunc", "12", "--output", str(path), "--checked")
    assert code == 0
    assert MomentSeries.load(str(path)).series == crank_moment_series(2, 12)


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run settings\nn_max = 6\nformat = json\nmodulus = 7\n")
    code, out, _ = run(capsys, "table", "p", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["values"][-1] == [6, "4"]  # p(6) = 11 == 4 mod 7
    code, out, _ = run(capsys, "table", "p", "--config", str(cfg), "--n-max", "3", "--format", "csv")
    assert code == 0 and out.splitlines()[-1] == "p,3,3"
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(capsys, "table", "p", "--config", str(bad))[0] == 2


def test_output_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run(capsys, "verify", "congruences", "--output", str(a))
    run(capsys, "verify", "congruences", "--output", str(b))
    assert a.read_bytes() == b.read_bytes()
