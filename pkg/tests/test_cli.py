import json
import subprocess
import sys
from pathlib import Path

import pytest

from gammachain.chains import parse_complex
from gammachain.cli import run

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def S(name):
    return str(SAMPLES / name)


@pytest.mark.parametrize("argv, code, needle", [
    (["validate", S("trefoil.pres")], 0, "presentation: valid"),
    (["homology", S("trefoil.pres"), "--degree", "1"], 0, "first elementary ideal: (t^2 - t + 1)"),
    (["tower", S("standard_words.txt"), "--level", "1"], 2, "nontrivial, class (0,1)"),
    (["tower", S("commutator_words.txt"), "--level", "1"], 0, "trivial, class (0,0)"),
    (["compare", S("handle_a.rec"), S("handle_a.rec"), "--max-level", "1"], 0, "trivial through level 1"),
    (["compare", S("handle_a.rec"), S("handle_b.rec"), "--max-level", "1"], 2,
     "obstructed at level 1 for the chosen lift"),
    (["move", S("handle_move.rec")], 0, "deformation level 0"),
    (["align", S("scrambled.map")], 0, "replay check: replayed"),
    (["tau", S("trefoil.pres"), S("trefoil.pres")], 0, "tau: trivial"),
    (["stratify", S("torus_pair.pres"), "--reduce"], 0, "d2[0,0] = 1*t^1 + -1"),
])
def test_exit_codes_on_samples(argv, code, needle):
    got, text = run(argv)
    assert got == code, text
    assert needle in text
    assert text.rstrip().splitlines()[-1].startswith("# seed: 0; caps:")


def test_reports_are_deterministic():
    for argv in (["compare", S("handle_a.rec"), S("handle_b.rec")], ["align", "--random", "3", "--seed", "5"],
                 ["fox", S("trefoil.pres"), "--json"]):
        assert run(argv) == run(argv)


def test_fox_output_round_trips(tmp_path):
    code, text = run(["fox", S("trefoil.pres")])
    assert code == 0
    C = parse_complex(text)
    out = tmp_path / "trefoil.cx"
    out.write_text(text)
    code, again = run(["validate", str(out), "--print"])
    assert code == 0
    status, printed = again.split("\n", 1)
    assert status == "complex: valid (ok)"
    assert parse_complex(printed) == C


def test_parse_errors_report_line_and_column(tmp_path):
    bad = tmp_path / "bad.cx"
    bad.write_text("ring: abelian r=1 torsion=[] names=t\ndeg 0: p\ndeg 1: x\nd1[0,0] = t -* 1\n")
    code, text = run(["validate", str(bad)])
    assert code == 1
    assert "line 4, column 11" in text
    words = tmp_path / "w.txt"
    words.write_text("[group]\ngenerators: x, y\n[hom]\ntarget: abelian r=1 torsion=[] names=t\n"
                     "x -> t\ny -> 1\n[words]\nw = x*q\n")
    code, text = run(["tower", str(words)])
    assert code == 1 and "line 8" in text


def test_usage_errors_exit_one():
    assert run(["bogus"])[0] == 1
    assert run(["homology"])[0] == 1
    assert run(["fox", S("trefoil.pres"), "--max-basis", "0"])[0] == 1
    assert run(["fox", "/nonexistent/file.pres"])[0] == 1


def test_json_schema():
    code, text = run(["compare", S("handle_a.rec"), S("handle_b.rec"), "--json"])
    data = json.loads(text)
    assert set(data) == {"command", "inputs", "seed", "caps", "status", "exit_code", "result"}
    assert data["exit_code"] == code == 2
    assert set(data["caps"]) == {"max_level", "max_basis", "max_minors"}
    levels = data["result"]["levels"]
    assert [lv["level"] for lv in levels] == [0, 1]
    assert levels[1]["certificate"]["scope"] == "chosen-lift"
    code, text = run(["fox", "/nonexistent/file.pres", "--json"])
    assert code == 1 and json.loads(text)["status"] == "error"


def test_caps_from_environment_and_flags(monkeypatch):
    argv = ["homology", S("torus_pair.pres")]
    monkeypatch.setenv("GAMMACHAIN_MAX_BASIS", "1")
    code, text = run(argv)
    assert code == 3 and "cap reached" in text and "max_basis=1" in text
    code, text = run(argv + ["--max-basis", "4000"])
    assert code == 0
    monkeypatch.setenv("GAMMACHAIN_MAX_BASIS", "many")
    assert run(argv)[0] == 1


def test_seed_is_recorded():
    _, text = run(["align", "--random", "2", "--seed", "11"])
    assert "# seed: 11;" in text
    _, text = run(["align", "--random", "2", "--seed", "11", "--json"])
    assert json.loads(text)["seed"] == 11


def test_console_entry_point_and_selftest():
    out = subprocess.run([sys.executable, "-m", "gammachain.cli", "selftest"], capture_output=True, text=True)
    assert out.returncode == 0, out.stdout + out.stderr
    out = subprocess.run([sys.executable, "-m", "gammachain.cli", "homology", "/nonexistent"],
                         capture_output=True, text=True)
    assert out.returncode == 1 and out.stderr.startswith("error:") and not out.stdout
