import csv
import io
import json
import math

import pytest

from advbound import bounds, problems, report
from advbound.cli import main


def sample_reports():
    p = problems.build_search(4)
    adv = bounds.search_adversary(4)
    reps = []
    for eps in (0.0, 0.04, 0.1):
        r = bounds.additive_bound(adv, p, eps)
        r.params.update({"n": 4})
        reps.append(r)
    return reps


def test_csv_has_header_even_when_empty():
    text = report.reports_to_csv([])
    assert text.splitlines() == [",".join(report.CSV_COLUMNS)]


def test_csv_single_row_and_sorting():
    reps = sample_reports()
    text = report.reports_to_csv(reps[:1])
    lines = text.splitlines()
    assert len(lines) == 2
    row = dict(zip(report.CSV_COLUMNS, lines[1].split(",")))
    assert row["method"] == "additive"
    assert float(row["bound"]) == pytest.approx(math.sqrt(3), abs=1e-9)
    grid = report.reports_to_csv(reps)
    eps_col = [float(r.split(",")[5]) for r in grid.splitlines()[1:]]
    assert eps_col == sorted(eps_col)


def test_csv_roundtrips_json_values_to_twelve_digits():
    reps = sample_reports()
    doc = json.loads(report.reports_to_json(reps))
    rows = list(csv.DictReader(io.StringIO(report.reports_to_csv(reps))))
    for row, entry in zip(rows, doc["reports"]):
        for field in ("epsilon", "numerator", "denominator", "bound"):
            parsed = float(row[field])
            exact = entry[field]
            assert parsed == pytest.approx(exact, rel=1e-11)


def test_json_deterministic():
    reps = sample_reports()
    a = report.reports_to_json(reps, {"seed": 1})
    b = report.reports_to_json(sample_reports(), {"seed": 1})
    assert a == b


def test_cli_bound_value(tmp_path, capsys):
    out = tmp_path / "bound.json"
    code = main(
        [
            "bound",
            "--problem",
            "search",
            "--n",
            "4",
            "--method",
            "additive",
            "--epsilon",
            "0",
            "--output",
            str(out),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["reports"][0]["bound"] == pytest.approx(math.sqrt(3), abs=1e-9)


def test_cli_bound_multiplicative(tmp_path):
    out = tmp_path / "m.json"
    code = main(
        [
            "bound",
            "--problem",
            "search",
            "--n",
            "8",
            "--method",
            "multiplicative",
            "--epsilon",
            "0.3",
            "--gamma",
            "2.0",
            "--output",
            str(out),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["reports"][0]["bound"] > 0


def test_cli_case_study_search_writes_csv_and_figure(tmp_path):
    out = tmp_path / "search.csv"
    code = main(
        [
            "case-study",
            "search",
            "--n",
            "4",
            "--epsilons",
            "0,0.1,0.5",
            "--format",
            "csv",
            "--output",
            str(out),
        ]
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert {r["method"] for r in rows} == {"additive", "hybrid", "multiplicative"}
    assert (tmp_path / "search_scan.png").exists()


def test_cli_case_study_erasure(tmp_path):
    out = tmp_path / "erasure.csv"
    code = main(
        [
            "case-study",
            "index-erasure",
            "--N",
            "2",
            "--M",
            "3",
            "--epsilon",
            "0.1",
            "--format",
            "csv",
            "--output",
            str(out),
        ]
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 1
    assert float(rows[0]["eta"]) == pytest.approx(2 / 3, abs=1e-9)
    assert f'{float(rows[0]["eta"]):.6f}' == "0.666667"
    assert (tmp_path / "erasure_census.csv").exists()
    assert (tmp_path / "erasure_census.png").exists()
    assert (tmp_path / "erasure_block_gaps.json").exists()
    gaps = json.loads((tmp_path / "erasure_block_gaps.json").read_text())
    assert all(g["gap"] <= 1e-7 for g in gaps)


def test_cli_decompose(tmp_path):
    out = tmp_path / "decomp.json"
    code = main(
        ["decompose", "--problem", "index-erasure", "--n", "2", "--m", "3", "--output", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert [b["dim"] for b in doc["blocks"]] == [1, 2, 2, 1]
    assert doc["multiplicity_free"] is True


def test_cli_simulate(tmp_path):
    out = tmp_path / "sim.json"
    code = main(
        [
            "simulate",
            "--problem",
            "search",
            "--n",
            "4",
            "--iterations",
            "1",
            "--output",
            str(out),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["success_probability"] == pytest.approx(1.0, abs=1e-9)
    assert doc["checks_passed"] is True
    assert (tmp_path / "sim_progress.png").exists()


def test_cli_sdpt(tmp_path):
    out = tmp_path / "sdpt.json"
    code = main(["sdpt", "--n", "3", "--gamma", "2", "--k", "2", "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    assert doc["factor_norm_gap"] <= 1e-8


def test_cli_verify_deterministic(tmp_path):
    out1 = tmp_path / "v1.json"
    out2 = tmp_path / "v2.json"
    assert main(["verify", "--suite", "linalg", "--seed", "1", "--output", str(out1)]) == 0
    assert main(["verify", "--suite", "linalg", "--seed", "1", "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_config_errors_exit_two(capsys):
    assert main(["bound", "--problem", "search", "--method", "additive"]) == 2
    assert main(["bound", "--problem", "search", "--n", "4", "--method", "additive", "--epsilon", "2"]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_cli_seed_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("ADVBOUND_SEED", "12345")
    out = tmp_path / "d.json"
    code = main(
        ["decompose", "--problem", "search", "--n", "4", "--output", str(out)]
    )
    assert code == 0
