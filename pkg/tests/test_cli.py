import csv
import io
import subprocess
import sys

import pytest

from fewnomials.cli import main
from fewnomials.io import REPORT_COLUMNS, format_fewnomial, parse_contours, parse_fewnomial


@pytest.fixture
def f1_file(tmp_path, f1):
    path = tmp_path / "f1.txt"
    path.write_text(format_fewnomial(f1, "oval"))
    return path


@pytest.fixture
def one_worker(monkeypatch):
    monkeypatch.setenv("FEWNOMIAL_THREADS", "1")


def test_bound_with_and_without_special_cases(capsys):
    assert main(["bound", "P", "2", "4"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "3"
    assert main(["bound", "--no-special-cases", "P", "2", "4"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "10"
    assert "split" in out and "Li-Rojas-Wang" in out


def test_count_and_contours(f1_file, tmp_path, capsys):
    target = tmp_path / "c.txt"
    assert main(["count", str(f1_file), "--contours", str(target)]) == 0
    assert capsys.readouterr().out.startswith("tot 1 comp 1 non 0 converged True")
    (cid, compact, pts), = parse_contours(target.read_text())
    assert compact and len(pts) > 10


def test_newton_summary(f1_file, capsys):
    assert main(["newton", str(f1_file)]) == 0
    out = capsys.readouterr().out
    assert "newton_dimension 2" in out
    assert "other 3 1" in out
    assert "quadrilateral False" in out


def test_normalize(tmp_path, normal_222, capsys):
    path = tmp_path / "nf.txt"
    path.write_text(format_fewnomial(normal_222))
    assert main(["normalize", str(path)]) == 0
    out = dict(line.split(" ", 1) for line in capsys.readouterr().out.splitlines())
    assert float(out["A"]) == pytest.approx(2)
    assert float(out["c"]) == pytest.approx(2)


def test_restrict(tmp_path, f3, capsys):
    path = tmp_path / "f3.txt"
    path.write_text(format_fewnomial(f3))
    assert main(["restrict", str(path), "--point", "2", "3", "--direction", "0", "1"]) == 0
    g = parse_fewnomial(capsys.readouterr().out)
    assert g.nvars == 1 and g.m == 2


def test_parse_errors_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("fewnomial 2 1\n0 1 1\n")
    assert main(["newton", str(path)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["count", str(tmp_path / "missing.txt")]) == 2


def test_unsupported_dimension_exit_2(capsys):
    assert main(["random-census", "4", "3", "--count", "2"]) == 2


def test_random_census_is_deterministic(tmp_path, one_worker, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["random-census", "1", "5", "--count", "25", "--seed", "3", "--out", str(a)]) == 0
    assert main(["random-census", "1", "5", "--count", "25", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_text() == b.read_text()
    rows = list(csv.DictReader(io.StringIO(a.read_text())))
    assert len(rows) == 25 and tuple(rows[0]) == REPORT_COLUMNS
    assert all(row["violation"] == "False" for row in rows)


def test_random_census_to_stdout(one_worker, capsys):
    assert main(["random-census", "2", "4", "--count", "3", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("instance,n,m") and len(lines) == 4


def test_verify_paper(capsys):
    assert main(["verify-paper"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert all(line.startswith("PASS") for line in out[:-1])
    assert out[-1] == f"{len(out) - 1}/{len(out) - 1} checks passed"


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "fewnomials.cli", "bound", "Kprime", "2", "5"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "5184"


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["bound", "P"])
    assert err.value.code == 2
