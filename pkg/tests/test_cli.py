import json
import subprocess
import sys

import pytest

from monored.acceptance import check_distance_oracle
from monored.cli import main
from monored.matching import distance_to_monotonicity


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_distance_anti_majority(capsys):
    doc = run_json(capsys, "distance", "--fixture", "anti_majority", "--n", "5")
    assert doc["schema_version"] == 1
    assert doc["summary"]["eps"] == "2/5"


def test_variance_all_functions(capsys):
    doc = run_json(capsys, "variance", "--fixture", "all_functions", "--n", "3", "--d", "2", "--mode", "exact")
    assert doc["summary"]["violations"] == 0
    assert doc["summary"]["functions"] == 512


def test_csv_is_byte_identical_and_prefix_safe(tmp_path):
    args = ["reduce", "--fixture", "anti_majority", "--n", "12", "--k", "2", "3", "--format", "csv"]
    a, b, short = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "short.csv"
    assert main(args + ["--trials", "20", "--out", str(a)]) == 0
    assert main(args + ["--trials", "20", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("#schema=1\nk,trial,eps_restricted,eps_float,seed\n")
    # fewer trials of one k: those rows are a prefix of the longer run
    assert main(["reduce", "--fixture", "anti_majority", "--n", "12", "--k", "2", "--format", "csv",
                 "--trials", "7", "--out", str(short)]) == 0
    assert text.startswith(short.read_text())


def test_test_subcommand_summary(capsys):
    doc = run_json(capsys, "test", "--fixture", "anti_majority", "--n", "50", "--epsilon", "0.2", "--runs", "5")
    assert doc["summary"]["reject_freq"] == 1.0
    assert doc["summary"]["mean_queries"] > 0
    assert len(doc["records"]) == 5 and doc["records"][0]["verdict"] == "reject"


def test_continuous_test_subcommand(capsys):
    doc = run_json(capsys, "test", "--fixture", "centrist_continuous", "--d", "8", "--k", "16",
                   "--epsilon", "0.1", "--runs", "3")
    assert 0 <= doc["summary"]["reject_freq"] <= 1


@pytest.mark.parametrize(
    "argv",
    [
        ["stacks", "--fixture", "figure_one", "--n", "6", "--k", "2"],
        ["linesample", "--fixture", "anti_majority", "--n", "6", "--k", "2", "3", "--exhaustive"],
        ["lowerbound", "--d", "64", "--trials", "200"],
        ["reduce", "--fixture", "random_order_ideal", "--n", "6", "--d", "2", "--k", "3", "--trials", "5"],
    ],
)
def test_other_subcommands(capsys, argv):
    doc = run_json(capsys, *argv)
    assert doc["schema_version"] == 1 and "summary" in doc


def test_lowerbound_and_stacks_content(capsys):
    doc = run_json(capsys, "lowerbound", "--d", "64", "--trials", "500")
    assert doc["summary"]["within_bound"]
    doc = run_json(capsys, "stacks", "--fixture", "anti_majority", "--n", "5", "--no-lex")
    assert doc["summary"]["bound_violations"] == 0


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["distance", "--fixture", "anti_majority", "--n", "-3"])
    assert exc.value.code != 0
    with pytest.raises(SystemExit):
        main(["test", "--fixture", "anti_majority", "--n", "5", "--epsilon", "1.5"])
    with pytest.raises(SystemExit):
        main(["distance", "--fixture", "centrist_discrete", "--d", "3", "--n", "10"])
    with pytest.raises(SystemExit):
        main(["bogus"])


def test_oversize_is_refused(capsys):
    assert main(["distance", "--fixture", "centrist_discrete", "--d", "16", "--n", "64"]) == 3
    assert "dense cap" in capsys.readouterr().err


def test_accept_filter_runs_only_stack_criteria(capsys, tmp_path):
    report = tmp_path / "r.json"
    assert main(["accept", "--filter", "stacks", "--out", str(report)]) == 0
    numbers = [r["number"] for r in json.loads(report.read_text())["results"]]
    assert numbers == [2, 4, 5]
    assert main(["accept", "--filter", "no-such-thing"]) == 2


def test_corrupted_engine_fails_oracle_check():
    def off_by_one(f):
        eps = distance_to_monotonicity(f)
        return eps + 1 if eps else eps

    ok, detail = check_distance_oracle(off_by_one)
    assert not ok and "0 mismatches" not in detail


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "monored", "distance", "--fixture", "anti_majority", "--n", "3"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(out.stdout)["summary"]["eps"] == "1/3"
