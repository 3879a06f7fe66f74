"""Command-line surface: dispatch, exit codes, report determinism."""

import json

import jsonschema
import pytest

from convderiv import cli, reports


def run(argv):
    return cli.main(argv)


def run_report(argv, tmp_path, name="report.json"):
    path = tmp_path / name
    code = cli.main(list(argv) + ["--out", str(path)])
    return code, json.loads(path.read_text())


def test_norm_harmonic_is_exactly_one(tmp_path):
    code, report = run_report(
        ["deriv", "norm", "--phi", "1/(n+1)", "--depth", "1000"], tmp_path)
    assert code == 0
    assert report["result"]["lower"] == 1.0
    assert report["result"]["exact"] == 1.0
    assert report["inputs"]["tail"]["certificate"] == "constant"


def test_witness_constant_rule(tmp_path):
    code, report = run_report(
        ["deriv", "witness", "--mu", "1", "--eps", "0.5", "--terms", "4"],
        tmp_path)
    assert code == 0
    assert report["result"]["j"][0] == 1001
    assert report["result"]["l"][0] == 1000
    assert report["result"]["separation"] > 0.125
    assert len(report["result"]["gaps"]) == 6
    assert all(c["passed"] for c in report["certificates"])


def test_classify_three_ways(tmp_path):
    code, report = run_report(
        ["deriv", "classify", "--mu", "1"], tmp_path)
    assert code == 0 and report["result"]["verdict"] == "noncompact"
    code, report = run_report(
        ["deriv", "classify", "--mu", "n*2^(1-n)", "--tail", "decay"],
        tmp_path)
    assert code == 0 and report["result"]["verdict"] == "compact"
    code, report = run_report(
        ["deriv", "classify", "--mu", "1/(n+1)", "--tail", "none"], tmp_path)
    assert code == 0 and report["result"]["verdict"] == "inconclusive"


def test_truncate_geometric(tmp_path):
    code, report = run_report(
        ["deriv", "truncate", "--mu", "2^(1-n)", "--tail", "decay",
         "--terms", "3"], tmp_path)
    assert code == 0
    assert report["result"]["error"] == 0.125


def test_apply_polynomial(tmp_path):
    code, report = run_report(
        ["deriv", "apply", "--phi", "1/(n+1)", "--f", "0,0,1",
         "--depth", "8"], tmp_path)
    assert code == 0
    values = report["result"]["values"]
    assert values[0][0] == pytest.approx(1.0)  # 2/(0+2)
    assert values[2][0] == pytest.approx(0.5)  # 2/(2+2)


def test_conv_subcommand(tmp_path):
    code, report = run_report(["conv", "1,1", "1,1"], tmp_path)
    assert code == 0
    assert report["result"]["coefficients"] == [[1, 0], [2, 0], [1, 0]]
    assert report["result"]["l1_norm"] == 4.0


def test_parse_error_exit_code(capsys):
    assert run(["deriv", "norm", "--phi", "n*"]) == 2
    assert "operand expected at position 3" in capsys.readouterr().err


def test_unbounded_phi_exit_code(capsys):
    assert run(["deriv", "norm", "--phi", "1"]) == 2
    assert "bounded derivation" in capsys.readouterr().err


def test_unknown_tail_truncation_exit_code(capsys):
    assert run(["deriv", "truncate", "--mu", "2^(1-n)", "--terms", "3"]) == 2
    assert "tail" in capsys.readouterr().err


def test_lying_decay_declaration_fails_certificate(capsys):
    code = run(["deriv", "norm", "--mu", "n/(n+1)", "--tail", "decay"])
    assert code == 1
    assert "certificate failure" in capsys.readouterr().err


def test_no_witness_for_compact_rule_exit_code(capsys):
    code = run(["deriv", "witness", "--mu", "2^(1-n)", "--tail", "decay",
                "--eps", "0.5", "--terms", "2"])
    assert code == 1


def test_usage_error_exit_code():
    assert run(["deriv", "norm"]) == 2  # neither --phi nor --mu
    assert run(["nonsense"]) == 2


def test_cheese_verify(tmp_path):
    csv_path = tmp_path / "grid.csv"
    code, report = run_report(
        ["cheese", "verify", "--nmax", "6", "--grid", "501",
         "--csv", str(csv_path)], tmp_path)
    assert code == 0
    assert report["result"]["passed"] is True
    header, *rows = csv_path.read_text().strip().splitlines()
    assert header == "x,sum,certified_lt"
    assert len(rows) == 501


def test_cheese_demo(tmp_path):
    csv_path = tmp_path / "matrix.csv"
    code, report = run_report(
        ["cheese", "demo", "--nmax", "6", "--grid", "501",
         "--csv", str(csv_path)], tmp_path)
    assert code == 0
    assert report["result"]["min_separation"] >= 0.7
    header, *rows = csv_path.read_text().strip().splitlines()
    assert header == "n,m,M_nm"
    assert len(rows) == 36


def test_cheese_build(tmp_path):
    code, report = run_report(["cheese", "build", "--nmax", "5"], tmp_path)
    assert code == 0
    assert report["result"]["n_max"] == 5
    assert len(report["result"]["discs"]) == 5
    assert report["result"]["discs"][0] == {
        "x": 0.125, "y": 0.0625, "r": 0.0625 ** 2}


def test_bimodule_check_and_catalog_file(tmp_path):
    code, report = run_report(["bimodule", "check", "--algebra", "trunc3"],
                              tmp_path)
    assert code == 0
    assert report["result"]["square_span_dim"] == 3
    payload = {"dim": 1, "c": [[[0.0]]]}
    path = tmp_path / "nil.json"
    path.write_text(json.dumps(payload))
    code, report = run_report(
        ["bimodule", "check", "--algebra", f"@{path}"], tmp_path)
    assert code == 0
    assert report["result"]["square_span_dim"] == 0


def test_bimodule_rank1(tmp_path):
    code, report = run_report(["bimodule", "rank1", "--algebra", "zero2"],
                              tmp_path)
    assert code == 0
    names = {c["name"]: c["passed"] for c in report["certificates"]}
    assert names == {"rank-one": True, "derivation-identity": True,
                     "anchor-pairing": True, "not-inner": True}


def test_bimodule_rank1_rejects_unital(capsys):
    assert run(["bimodule", "rank1", "--algebra", "trunc3"]) == 2


def test_bimodule_transfer(tmp_path):
    code, report = run_report(["bimodule", "transfer", "--algebra", "trunc4"],
                              tmp_path)
    assert code == 0
    assert report["result"]["rank"] <= 3
    assert all(c["passed"] for c in report["certificates"])


def test_bimodule_transfer_needs_truncated(capsys):
    assert run(["bimodule", "transfer", "--algebra", "zero2"]) == 2


def test_report_schema_and_determinism(tmp_path):
    path = tmp_path / "report.json"
    argv = ["deriv", "witness", "--mu", "1", "--eps", "0.5", "--terms", "3",
            "--out", str(path)]
    assert cli.main(list(argv)) == 0
    first = path.read_text()
    assert cli.main(list(argv)) == 0
    second = path.read_text()
    jsonschema.validate(json.loads(first), reports.REPORT_SCHEMA)
    assert reports.strip_timestamp(first) == reports.strip_timestamp(second)
    assert json.loads(first)["timestamp"] != ""


def test_reports_revalidate_from_serialized_inputs(tmp_path):
    for argv in (
        ["deriv", "witness", "--mu", "1", "--eps", "0.5", "--terms", "3"],
        ["deriv", "norm", "--phi", "1/(n+1)", "--depth", "200"],
        ["deriv", "classify", "--mu", "n*2^(1-n)", "--tail", "decay"],
        ["cheese", "verify", "--nmax", "5", "--grid", "301"],
        ["bimodule", "transfer", "--algebra", "trunc4"],
    ):
        _, report = run_report(argv, tmp_path)
        assert cli.revalidate_report(report)
