import json

import pytest

from cayleydyn.cli import main
from cayleydyn.tables import CayleyTable, Structure, abelian_from_invariants, cyclic, validate_table


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "cyclic:6")
    assert code == 0 and CayleyTable.from_text(out) == cyclic(6)
    code, out, _ = run(capsys, "gen", "product:cyclic:2xcyclic:4")
    assert CayleyTable.from_text(out).n == 8
    path = tmp_path / "r.tbl"
    assert run(capsys, "gen", "random-abelian:12", "--seed", "7", "-o", path)[0] == 0
    assert validate_table(CayleyTable.load(path)).tag == Structure.ABELIAN_GROUP
    assert run(capsys, "gen", "cyclic:0")[0] == 2
    assert run(capsys, "gen", "nonsense")[0] == 2


def test_validate(capsys, files):
    code, out, _ = run(capsys, "validate", files("z.tbl", cyclic(4).to_text()))
    assert code == 0 and out.startswith("ABELIAN_GROUP n=4")
    assert run(capsys, "validate", files("bad.tbl", "2\n0 1\n"))[0] == 2
    assert run(capsys, "validate", "/nonexistent/file")[0] == 2


def test_run_examples(capsys, files):
    tbl = files("z6.tbl", cyclic(6).to_text())
    code, out, _ = run(capsys, "run", tbl, files("s.txt", "INSERT 2\nSTEP\nQUERY 4\n"), "--engine", "det")
    rep = json.loads(out)
    assert code == 0 and rep["v"] == 1
    assert rep["records"][0]["queries"][0]["answer"] is True
    code, out, _ = run(capsys, "run", tbl, files("e.txt", ""))
    assert code == 0 and json.loads(out)["records"] == []
    code, _, err = run(capsys, "run", tbl, files("a.txt", "STEP\nASSERT 1 IN\n"))
    assert code == 1 and "line 2" in err
    assert run(capsys, "run", tbl, files("x.txt", "INSERT 9\n"))[0] == 2
    assert run(capsys, "run", tbl, files("y.txt", "HOP\n"))[0] == 2
    big = "".join(f"INSERT {i}\n" for i in range(6)) + "STEP\n"
    assert run(capsys, "run", tbl, files("b.txt", big), "--budget", "1")[0] == 2


def test_run_check_and_determinism(capsys, files):
    tbl = files("z16.tbl", cyclic(16).to_text())
    script = files("s.txt", "INSERT 4\nSTEP\nQUERY 8\nQUERY 2\nSTEP\nINSERT 6\nSTEP\nQUERY 2\n")
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "run", tbl, script, "--engine", "rand", "--seed", "3", "--check")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["summary"]["check"]["false_positives"] == 0
    code, out, _ = run(capsys, "run", tbl, script, "--report", "text")
    assert code == 0 and "records:" in out


def test_iso(capsys, files):
    z4 = files("z4.tbl", cyclic(4).to_text())
    v4 = files("c2c2.tbl", abelian_from_invariants([2, 2]).to_text())
    assert run(capsys, "iso", z4, "0,1,2,3", v4, "0,1,2,3")[1] == "NOT-ISOMORPHIC\n"
    assert run(capsys, "iso", z4, "1", z4, "3")[1] == "ISOMORPHIC\n"
    assert run(capsys, "iso", z4, "7", z4, "3")[0] == 2


def test_decode_corrupt(capsys, files, tmp_path):
    clean = files("z32.tbl", cyclic(32).to_text())
    code, out, _ = run(capsys, "decode", clean)
    assert code == 0 and out == cyclic(32).to_text()
    bad = tmp_path / "bad.tbl"
    assert run(capsys, "corrupt", clean, "--seed", "1", "-o", bad)[0] == 0
    assert CayleyTable.load(bad) != cyclic(32)
    code, out, _ = run(capsys, "decode", bad)
    assert code == 0 and out == cyclic(32).to_text()
    assert run(capsys, "decode", files("m.tbl", "2\n0 0\n0 0\n"))[0] == 1


def test_bench(capsys, tmp_path, monkeypatch):
    csv = tmp_path / "w.csv"
    code, out, _ = run(capsys, "bench", "cyclic:128", "--engine", "det", "--steps", "40", "--budget", "2",
                       "--csv", csv, "--report", "json")
    rep = json.loads(out)
    assert code == 0 and rep["within_bound"] and rep["threads"] == 0
    assert csv.read_text().splitlines()[0] == "step,rebuild,change,query,budget,W,ratio"
    monkeypatch.setenv("CAYLEYDYN_THREADS", "x")
    assert run(capsys, "bench", "cyclic:8")[0] == 2
    monkeypatch.setenv("CAYLEYDYN_THREADS", "2")
    assert json.loads(run(capsys, "bench", "cyclic:8", "--steps", "5", "--report", "json")[1])["threads"] == 2
    assert run(capsys, "bench", "s3")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2
