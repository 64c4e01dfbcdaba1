import json
import subprocess
import sys
from pathlib import Path

import pytest

from condingleton.cli import main, thread_count, UsageError

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_dist(capsys):
    code, out, _ = run(capsys, "verify-dist", DATA / "paper.json")
    assert code == 0
    assert "CI structure: {X⊥Y|, X⊥Z|U, Y⊥U|Z, Z⊥U|XY}" in out
    assert "◻(XY|ZU): sign=-1 value=-0.00757886" in out
    assert out.count("sign=+1") == 5


def test_verify_dist_json(capsys):
    code, out, _ = run(capsys, "--json", "verify-dist", DATA / "paper.json")
    data = json.loads(out)
    assert code == 0 and data["consistent"]
    assert data["ingleton"][0]["scale"] == 693


def test_verify_dist_invalid_table(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"atoms": {"0000": "1/2"}}))
    code, _, err = run(capsys, "verify-dist", bad)
    assert code == 1 and "invalid distribution" in err


def test_missing_file_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "verify-dist", tmp_path / "nope.json")
    assert code == 2


def test_masks(capsys):
    code, out, _ = run(capsys, "masks", "--verify")
    assert code == 0
    assert out.count("[ok]") == 9


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--max-b", 99, "--max-d", 11, "--inflate", 10)
    assert code == 0
    assert "(a,b,c,d)=(2,99,2,11) p0110=10/693 sign=-1" in out


def test_search_without_hits(capsys):
    code, out, _ = run(capsys, "search", "--max-b", 20, "--max-d", 5, "--inflate", 0)
    assert code == 1 and "no counterexample" in out


def test_heatmap(capsys, tmp_path):
    out_file = tmp_path / "h.csv"
    code, out, _ = run(capsys, "--threads", 1, "heatmap", "--res", 8, "--out", out_file)
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "p1111,p1011,status,score" and len(lines) == 65
    code, out, _ = run(capsys, "heatmap", "--res", 8)
    assert out.splitlines() == lines


def test_essential_default_family(capsys):
    code, out, _ = run(capsys, "essential")
    assert code == 0 and "leading order k=1" in out


def test_essential_family_file(capsys):
    code, out, _ = run(capsys, "--json", "essential", "--family", DATA / "family_2_5.json", "--order", 3)
    data = json.loads(out)
    assert code == 0 and data["certificate"]["order"] == 1


def test_essential_inconclusive(capsys, tmp_path):
    fam = tmp_path / "f.json"
    fam.write_text(json.dumps({"A": ["0000", "1111"], "B": ["0101"], "C": ["1010"]}))
    code, out, _ = run(capsys, "essential", "--family", fam, "--assume", "X⊥Y|")
    assert code == 1 and "inconclusive" in out


def test_essential_sampling(capsys):
    code, out, _ = run(capsys, "essential", "--sample", 500, "--seed", 0)
    assert code == 0 and "after 340 families" in out


def test_closure_interval(capsys):
    code, out, _ = run(capsys, "closure", "--db", DATA / "classification.json", "--interval", "L0", "L")
    assert code == 0
    assert out.strip() == "uncovered before=3 after=0"


def test_closure_full_lattice_reports_missing_records(capsys):
    code, out, _ = run(capsys, "--json", "closure")
    data = json.loads(out)
    assert code == 0 and data["missing_records"] == 5 and data["after"] > 0


def test_score(capsys):
    code, out, _ = run(capsys, "score", DATA / "paper.json", "--rho1")
    assert code == 0 and out.startswith("rho1=0.0075788643")


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["bogus"]) == 2
    assert main(["closure", "--interval", "L0", "nonsense"]) == 2
    assert main(["heatmap", "--res", "1"]) == 2


def test_thread_count(monkeypatch):
    monkeypatch.setenv("INGLETON_THREADS", "3")
    assert thread_count(None) == 3
    assert thread_count(2) == 2
    monkeypatch.setenv("INGLETON_THREADS", "many")
    with pytest.raises(UsageError):
        thread_count(None)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "condingleton", "closure", "--interval", "L0", "L"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "uncovered before=3 after=0"


def test_circuits_count(capsys, monkeypatch, all_circuits):
    from condingleton import cli

    monkeypatch.setattr(cli.ingleton, "circuits", lambda m, workers=1: all_circuits)
    code, out, _ = run(capsys, "circuits", "--count")
    assert code == 0 and out.strip() == "total=10481 ingleton=6814 shortest=14"
    code, out, _ = run(capsys, "circuits")
    assert "M.2: orbit size 4" in out


def test_circuits_csv(capsys, monkeypatch, tmp_path, all_circuits):
    from condingleton import cli

    monkeypatch.setattr(cli.ingleton, "circuits", lambda m, workers=1: all_circuits)
    path = tmp_path / "c.csv"
    run(capsys, "circuits", "--count", "--out", path)
    lines = path.read_text().splitlines()
    assert len(lines) == 10481
    assert all(":" in line for line in lines[:10])
