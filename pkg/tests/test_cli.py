import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from intheffter.cli import main
from intheffter.core import ihs_from_json
from intheffter.ihs import appendix_ihs


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_appendix_json(capsys):
    code, out, _ = run(capsys, "construct", "ihs", "7", "7", "3", "--format", "json")
    assert code == 0
    arrays, m, n, c = ihs_from_json(out)
    assert (m, n, c) == (7, 7, 3)
    assert [a.tolist() for a in arrays] == [a.tolist() for a in appendix_ihs(3)]


def test_construct_heffter_then_verify(tmp_path, capsys):
    path = tmp_path / "h.json"
    code, _, _ = run(capsys, "construct", "heffter", "28", "36", "9", "7", "--format", "json", "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert (doc["m"], doc["n"]) == (28, 36)
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 0 and "passed" in out


@pytest.mark.parametrize("fmt,suffix", [("text", ".txt"), ("csv", ".csv"), ("json", ".json")])
def test_formats_round_trip(tmp_path, capsys, fmt, suffix):
    path = tmp_path / f"h{suffix}"
    assert run(capsys, "construct", "heffter", "36", "28", "7", "9", "--format", fmt, "--out", str(path))[0] == 0
    assert run(capsys, "verify", str(path), "--format", "json")[0] == 0


def test_ihs_text_round_trip(tmp_path, capsys):
    path = tmp_path / "set.txt"
    assert run(capsys, "construct", "ihs", "9", "7", "4", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 0 and out.startswith("IHS(9,7;4)")


def test_verify_reports_failure(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("1 2 -3\n-1 -2 3\n")
    code, out, _ = run(capsys, "verify", str(path), "--format", "json")
    assert code == 4
    doc = json.loads(out)
    assert not doc["passed"]
    assert {v["axiom"] for v in doc["violations"]} >= {"support-duplicate"}


def test_exit_codes(capsys):
    assert run(capsys, "construct", "ihs", "7", "9", "2")[0] == 2
    code, _, err = run(capsys, "construct", "heffter", "25", "40", "8", "5")
    assert code == 3 and "Open(k=5)" in err
    code, _, err = run(capsys, "construct", "heffter", "28", "16", "4", "7")
    assert code == 3 and "KnownElsewhere(6)" in err
    assert run(capsys, "construct", "ihs", "7", "9", "1")[0] == 3
    assert run(capsys, "appendix", "export", "5")[0] == 2


def test_classify_formats(capsys):
    code, out, _ = run(capsys, "classify", "25", "40", "8", "5", "--format", "json")
    assert code == 0
    assert json.loads(out)["reason"] == "k=5"
    _, out, _ = run(capsys, "classify", "12", "12", "4", "4")
    assert "KnownElsewhere(1)" in out
    _, out, _ = run(capsys, "classify", "12", "12", "4", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["verdict"] == "KnownElsewhere"


def test_sweep_ihs(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "ihs", "--m", "7:15:2", "--n", "7:15:2", "--c", "3:13", "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert rows and all(r["verified"] == "yes" for r in rows)
    assert all((int(r["m"]) * int(r["n"]) * int(r["c"])) % 4 in (0, 3) for r in rows)
    first = path.read_text()
    # a second run appends rows without repeating the header
    run(capsys, "sweep", "ihs", "--m", "7:15:2", "--n", "7:15:2", "--c", "3:13", "--out", str(path))
    text = path.read_text()
    assert text.count("kind,m,n") == 1
    assert len(text.splitlines()) == 2 * len(first.splitlines()) - 1


def test_sweep_heffter_min_c(capsys):
    code, out, _ = run(capsys, "sweep", "heffter", "--s", "7:14", "--k", "7:11:2", "--min-c")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    built = [r for r in rows if r["verified"] == "yes"]
    assert ("28", "36") in {(r["m"], r["n"]) for r in built}
    assert not [r for r in rows if r["verified"] == "FAILED"]


def test_sweep_parallel_matches_serial(capsys):
    args = ["sweep", "ihs", "--m", "7:11:2", "--n", "7:9:2", "--c", "3:8"]
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--jobs", "2")
    strip = lambda text: [line.rsplit(",", 1)[0] for line in text.splitlines()]  # noqa: E731
    assert strip(serial) == strip(parallel)


def test_sweep_empty(capsys):
    code, out, _ = run(capsys, "sweep", "ihs", "--m", "8:8", "--n", "7:7", "--c", "3:3")
    assert code == 0
    assert out.strip() == "kind,m,n,s,k,c,verdict,verified,members,support_max,seconds"


def test_oracle_commands(capsys):
    code, out, _ = run(capsys, "oracle", "heffter", "3", "3", "3", "3")
    assert code == 0 and out.startswith("NotExists")
    code, out, _ = run(capsys, "oracle", "partition", "18:32:2", "G=2", "--format", "json")
    assert json.loads(out)["witness"] == [[18, 20, 22, 24], [26, 28, 30, 32]]
    code, _, _ = run(capsys, "oracle", "heffter", "4", "4", "3", "3", "--budget-nodes", "10")
    assert code == 3
    code, out, _ = run(capsys, "oracle", "lemma", "a_alpha", "--trials", "10")
    assert code == 0 and "0 mismatches" in out


def test_appendix_commands(capsys):
    code, out, _ = run(capsys, "appendix", "list", "--format", "json")
    assert [d["c"] for d in json.loads(out)] == [3, 7, 11, 15, 19, 23, 27]
    code, out, _ = run(capsys, "appendix", "export", "7", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 49 and {r[0] for r in rows} == {str(i) for i in range(7)}


@pytest.mark.skipif(shutil.which("intheffter") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["intheffter", "classify", "28", "36", "9", "7"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "ConstructedHere" in proc.stdout


def test_module_entry():
    proc = subprocess.run([sys.executable, "-m", "intheffter.cli", "appendix", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "IHS(7,7;27)" in proc.stdout
