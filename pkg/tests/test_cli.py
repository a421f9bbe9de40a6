import json
import math

import pytest
from conftest import AND2, CSP1, OR2, exp_cdf

from dft.cli import EXIT_FAILED, EXIT_OK, EXIT_PARSE, EXIT_UNMATCHED, build_parser, run_cli
from dft.model import cas_model_text


def test_prob_json(write_model, capsys):
    path = write_model(AND2)
    assert run_cli(["prob", "--model", path, "--time", "0.5,1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "analytic"
    assert [point["t"] for point in payload["points"]] == [0.5, 1.0]
    for point in payload["points"]:
        t = point["t"]
        assert point["analyticValue"] == pytest.approx(exp_cdf(1, t) * exp_cdf(2, t), abs=1e-12)
        assert point["termCount"] == 1
        assert point["mcEstimate"] is None


def test_prob_csv_to_file(write_model, tmp_path, capsys):
    path = write_model(OR2)
    out = tmp_path / "result.csv"
    assert run_cli(["prob", "--model", path, "--time", "1", "--format", "csv", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,analytic,quad_err,mc,mc_halfwidth,mode,terms"
    cells = lines[1].split(",")
    assert float(cells[1]) == pytest.approx(1 - math.exp(-1) * math.exp(-2), abs=1e-12)
    assert cells[3] == "" and cells[6] == "3"


def test_prob_both_methods(write_model, capsys):
    path = write_model(CSP1)
    code = run_cli(["prob", "--model", path, "--time", "1", "--method", "both", "--samples", "40000", "--seed", "3"])
    assert code == EXIT_OK
    point = json.loads(capsys.readouterr().out)["points"][0]
    assert point["analyticValue"] == pytest.approx(1 - 2 / math.e, abs=1e-9)
    assert abs(point["mcEstimate"] - point["analyticValue"]) <= max(3 * point["mcHalfWidth"], 5e-3)


def test_simulate(write_model, capsys):
    path = write_model(AND2)
    assert run_cli(["simulate", "--model", path, "--time", "1", "--samples", "10000"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "mc"
    assert payload["points"][0]["analyticValue"] is None
    assert 0.0 < payload["points"][0]["mcEstimate"] < 1.0


def test_simplify(write_model, capsys):
    assert run_cli(["simplify", "--model", write_model(AND2)]) == EXIT_OK
    assert capsys.readouterr().out == "and(A, B)\n"
    assert run_cli(["simplify", "--model", write_model(CSP1, "csp.dft")]) == EXIT_OK
    assert "before(Y, S)" in capsys.readouterr().out


def test_simplify_with_rule_file(write_model, tmp_path, capsys):
    rules = tmp_path / "extra.rules"
    rules.write_text("// duplicate of and-idem\nand-twice: and(X, X) => X\n", encoding="utf-8")
    code = run_cli(["simplify", "--model", write_model(AND2), "--rules", str(rules)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == "and(A, B)\n"


def test_parse_error_exit_code(write_model, capsys):
    path = write_model("top T;\nT = and(A B);\n")
    assert run_cli(["prob", "--model", path, "--time", "1"]) == EXIT_PARSE
    assert "line 2" in capsys.readouterr().err


def test_undefined_exit_code(write_model):
    path = write_model("top T; T = and(A, Q); A : exp(lambda=1);")
    assert run_cli(["simplify", "--model", path]) == EXIT_PARSE


def test_unmatched_pattern_exit_code(write_model, capsys):
    path = write_model(
        "top T; T = and(before(A, B), before(B, C)); A : exp(lambda=1); B : exp(lambda=1); C : exp(lambda=1);"
    )
    assert run_cli(["prob", "--model", path, "--time", "1"]) == EXIT_UNMATCHED
    assert "--method mc" in capsys.readouterr().err


def test_term_explosion_exit_code(write_model, monkeypatch):
    monkeypatch.setenv("DFT_MAX_PIE_TERMS", "2")
    path = write_model("top T; T = or(A, B, C); A : exp(lambda=1); B : exp(lambda=1); C : exp(lambda=1);")
    assert run_cli(["prob", "--model", path, "--time", "1"]) == EXIT_UNMATCHED


def test_missing_model_file(tmp_path):
    assert run_cli(["prob", "--model", str(tmp_path / "absent.dft"), "--time", "1"]) == EXIT_FAILED


def test_bad_configuration(write_model, monkeypatch):
    monkeypatch.setenv("DFT_INTERSECTION_MODE", "bogus")
    assert run_cli(["prob", "--model", write_model(AND2), "--time", "1"]) == EXIT_FAILED


def test_verify(write_model, capsys):
    assert run_cli(["verify", "--model", write_model(CSP1), "--trials", "200"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out == ["distinct: equivalent over 200 trials", "general: equivalent over 200 trials"]


def test_bench_cas_json(capsys):
    code = run_cli(["bench-cas", "--time", "100", "--samples", "20000", "--format", "json"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    (row,) = payload["rows"]
    assert row["termCount"] == 63
    assert row["paper"] == pytest.approx(row["exact"], abs=1e-3)
    assert row["diff"] == pytest.approx(row["paper"] - row["exact"], abs=1e-15)
    assert abs(row["mc"] - row["exact"]) <= max(3 * row["mcHalfWidth"], 5e-3)


def test_bench_cas_table(capsys):
    assert run_cli(["bench-cas", "--time", "100,500", "--samples", "5000"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["t", "exact", "paper", "diff", "mc", "hw", "terms"]
    assert len(lines) == 3


def test_bench_cas_unknown_rate(capsys):
    assert run_cli(["bench-cas", "--rate", "XX=1", "--samples", "100"]) == EXIT_PARSE
    assert "XX" in capsys.readouterr().err


def test_rejects_negative_times():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["prob", "--model", "m", "--time", "-1"])


def test_prob_paper_mode(write_model, capsys):
    text = """\
top T;
T = or(pand(MS, MA), hsp(MA, MB));
MA : exp(lambda=1);
MS : exp(lambda=2);
MB : exp(lambda=0.5);
"""
    path = write_model(text)
    assert run_cli(["prob", "--model", path, "--time", "1", "--mode", "paper"]) == EXIT_OK
    paper = json.loads(capsys.readouterr().out)["points"][0]
    assert paper["mode"] == "paper"
    assert run_cli(["prob", "--model", path, "--time", "1", "--mode", "exact"]) == EXIT_OK
    exact = json.loads(capsys.readouterr().out)["points"][0]
    assert paper["analyticValue"] > exact["analyticValue"]


def test_prob_mode_choices():
    parser = build_parser()
    assert parser.parse_args(["prob", "--model", "m.dft", "--time", "1", "--mode", "paper"]).mode == "paper"
    with pytest.raises(SystemExit):
        parser.parse_args(["prob", "--model", "m.dft", "--time", "1", "--mode", "product"])


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_output_is_identical_across_worker_counts(fmt, write_model, capsys):
    path = write_model(cas_model_text(), "cas.dft")
    outputs = []
    for workers in ("1", "4", "8"):
        args = ["prob", "--model", path, "--time", "100,500,1000", "--method", "both", "--samples", "20000"]
        assert run_cli(args + ["--seed", "5", "--workers", workers, "--format", fmt]) == EXIT_OK
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1] == outputs[2]
