import csv
import io
import json

import pytest

from cvdv import acceptance, cli
from cvdv.acceptance import CriterionResult

from .conftest import SQRT_HALF


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return meta, rows


def test_parse_db_range():
    assert cli.parse_db_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(cli.parse_db_range("0:15:0.05")) == 301
    for bad in ("1:0:0.1", "0:1:0", "a:b:c", "0:1"):
        with pytest.raises(cli.UsageError):
            cli.parse_db_range(bad)


def test_rate(capsys):
    code, out, _ = run(capsys, "rate", "--db-range", "0:15:7.66")
    assert code == 0
    meta, rows = table(out)
    assert float(meta["threshold_db"]) == pytest.approx(7.66, abs=0.005)
    assert list(rows[0]) == ["db", "lambda", "p_max", "spdc_rate"]
    assert float(rows[0]["p_max"]) == 0.0 and float(rows[0]["spdc_rate"]) == 0.0
    assert float(rows[1]["p_max"]) == pytest.approx(1.0, abs=1e-3)


def test_rate_weak_squeezing_ratio(capsys):
    _, out, _ = run(capsys, "rate", "--lambda", "0.001")
    row = table(out)[1][0]
    assert float(row["spdc_rate"]) / float(row["p_max"]) == pytest.approx(0.5, abs=1e-4)


def test_povm_count(capsys):
    code, out, _ = run(capsys, "povm-count", "--n-range", "2:10")
    rows = table(out)[1]
    assert code == 0
    assert rows[0] == {"N": "2", "nielsen": "2", "bvn": "2.5", "hardy": "2", "hardy_observed": "2"}
    assert rows[-1] == {"N": "10", "nielsen": "512", "bvn": "42.5", "hardy": "10", "hardy_observed": "10"}
    assert all(r["hardy"] == r["hardy_observed"] for r in rows)


def test_entanglement(capsys):
    _, out, _ = run(capsys, "entanglement", "--lambda", "0", "--lambda", repr(SQRT_HALF), "--lambda", "0.9999")
    rows = table(out)[1]
    assert all(float(rows[0][k]) == 0.0 for k in ("s_tmsv", "s_avg", "p_max_ebits", "gap"))
    assert float(rows[1]["s_tmsv"]) == pytest.approx(2.0, abs=1e-12)
    assert float(rows[2]["gap"]) == pytest.approx(0.832746, abs=1e-4)


def test_efficiency_qubit(capsys):
    _, out, _ = run(capsys, "efficiency", "--lambda", repr(SQRT_HALF), "--lambda", "0.5", "--lambda", "0")
    meta, rows = table(out)
    assert meta["scheme"] == "qubit"
    for key in ("eta_oopr", "eta_near_even", "eta_shannon_bound"):
        assert float(rows[0][key]) == pytest.approx(2.0, abs=1e-9)
    assert rows[1]["eta_oopr"] == rows[1]["eta_near_even"]
    assert rows[2]["eta_oopr"] == "nan"


def test_efficiency_qudit_near_bound(capsys):
    _, out, _ = run(capsys, "efficiency", "--scheme", "qudit", "--db-range", "5.5:5.5:1")
    row = table(out)[1][0]
    assert float(row["eta_near_even"]) == pytest.approx(float(row["eta_shannon_bound"]), rel=0.02)


def test_efficiency_explicit_truncation(capsys):
    _, out, _ = run(capsys, "efficiency", "--lambda", "0.8", "--truncation", "15")
    row = table(out)[1][0]
    assert float(row["eta_oopr_err"]) > 1e-4


def test_outputs_are_reproducible(capsys, tmp_path):
    args = ["efficiency", "--scheme", "qudit", "--db-range", "2:10:2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_tree_files(tmp_path):
    stem = tmp_path / "tree"
    assert cli.main(["tree", "--lambda", "0.8", "--out", str(stem)]) == 0
    data = json.loads((tmp_path / "tree.json").read_text())
    root = data["nodes"][0]
    assert data["nodes"][root["children"][0]]["probability"] == pytest.approx(0.483, abs=1e-3)
    assert (tmp_path / "tree.dot").read_text().startswith("digraph")


def test_tree_single_leaf(capsys):
    _, out, _ = run(capsys, "tree", "--lambda", "0")
    assert "->" not in out and "Fail" in out


def test_simulate_is_deterministic(tmp_path, capsys):
    paths = []
    for tag in ("a", "b"):
        tr = tmp_path / f"{tag}.jsonl"
        summary = tmp_path / f"{tag}.csv"
        args = ["simulate", "--lambda", "0.8", "--runs", "1", "--seed", "42",
                "--transcripts", str(tr), "--out", str(summary)]
        assert cli.main(args) == 0
        paths.append((tr.read_text(), summary.read_text()))
    assert paths[0] == paths[1]
    line = json.loads(paths[0][0])
    assert line["seed"] == 42 and line["rounds"] == len(line["path"])


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["rate", "--db-range", "0:1"],
        ["rate", "--lambda", "0.5", "--db-range", "0:1:0.5"],
        ["tree", "--lambda", "0.5", "--lambda", "0.6"],
        ["efficiency", "--truncation", "many"],
        ["simulate", "--lambda", "0.5", "--workers", "0"],
        ["check", "--only", "99"],
        ["povm-count", "--n-range", "1:5"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == cli.EXIT_USAGE
    capsys.readouterr()


@pytest.mark.parametrize(
    "argv",
    [["rate", "--lambda", "1.5"], ["rate", "--db-range=-3:0:1"], ["simulate", "--lambda", "0.5", "--runs", "0"]],
)
def test_domain_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_DOMAIN
    assert "domain error" in err


def test_check_passes(capsys):
    code, out, _ = run(capsys, "check", "--only", "1", "--only", "6")
    assert code == 0
    assert out.count("[PASS]") == 2


def test_check_failure_exit_3(capsys, monkeypatch):
    monkeypatch.setattr(acceptance, "run_criterion", lambda n: CriterionResult(n, "x", False, "forced", 0.0, 1.0))
    code, out, _ = run(capsys, "check", "--only", "2")
    assert code == cli.EXIT_ACCEPTANCE
    assert "[FAIL]" in out


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "cvdv", "povm-count", "--n-range", "3:3"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[-1] == "3,4,4.0,3,3"
