import json
import subprocess
import sys

import pytest

from chtest.cli import main
from chtest.model import deserialize, serialize

from conftest import FIXTURES, fixture_model


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_distill_foobar_poly(capsys, tmp_path):
    out_file = tmp_path / "m.json"
    code, _, err = run(capsys, "distill", FIXTURES / "fig2", "--mode", "poly", "-o", out_file)
    assert code == 0 and "8 changes" in err
    assert out_file.read_text() == serialize(fixture_model("fig2", "poly"))


def test_distill_empty_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "distill", tmp_path)
    assert code == 0 and json.loads(out)["changes"] == []


def test_distill_malformed_source(capsys, tmp_path):
    (tmp_path / "bad.moo").write_text("class A { int f( }")
    code, out, err = run(capsys, "distill", tmp_path)
    assert code == 2 and out == "" and "bad.moo:1:" in err


def test_distill_two_snapshots(capsys, tmp_path):
    model = tmp_path / "m.json"
    code, _, err = run(capsys, "distill", FIXTURES / "fig4_before", FIXTURES / "fig4_after",
                       "--mode", "poly", "-o", model)
    assert code == 0 and "1 modified, 2 removed" in err
    # extending a stored model gives the same result
    base = tmp_path / "base.json"
    run(capsys, "distill", FIXTURES / "fig4_before", "--mode", "poly", "-o", base)
    again = tmp_path / "again.json"
    code, _, _ = run(capsys, "distill", FIXTURES / "fig4_before", FIXTURES / "fig4_after",
                     "--base", base, "-o", again)
    assert code == 0 and again.read_text() == model.read_text()


def _model_file(tmp_path, name, mode):
    path = tmp_path / f"{name}-{mode}.json"
    path.write_text(serialize(fixture_model(name, mode)))
    return path


def _change_of(path, sid):
    m = deserialize(path.read_text())
    return str(m.add_of(sid).changeId)


@pytest.mark.parametrize("mode, expected", [("static", ""), ("poly", "class:FooBarTest\n")])
def test_select_class(capsys, tmp_path, mode, expected):
    code, out, _ = run(capsys, "select", "--model", _model_file(tmp_path, "fig2", mode),
                       "--class", "Bar")
    assert code == 0 and out == expected


@pytest.mark.parametrize("mode, expected", [
    ("static", ""), ("poly", "method:Test.testGetValue/0\n")])
def test_select_change(capsys, tmp_path, mode, expected):
    path = _model_file(tmp_path, "fig4_after", mode)
    code, out, _ = run(capsys, "select", "--model", path, "--change",
                       _change_of(path, "method:Type1.getValue/0"))
    assert code == 0 and out == expected


def test_select_json(capsys, tmp_path):
    path = _model_file(tmp_path, "fig2", "poly")
    cid = _change_of(path, "method:Bar.foo/0")
    code, out, _ = run(capsys, "select", "--model", path, "--change", cid, "--json")
    assert json.loads(out)["changes"] == {cid: ["method:FooBarTest.fooTest/0"]}


def test_select_empty_and_unknown(capsys, tmp_path):
    path = _model_file(tmp_path, "fig2", "poly")
    assert run(capsys, "select", "--model", path, "--change") == (0, "", "")
    code, _, err = run(capsys, "select", "--model", path, "--class", "Nope")
    assert code == 2 and "Nope" in err


def test_select_bad_model(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    code, _, _ = run(capsys, "select", "--model", bad, "--class", "Foo")
    assert code == 2


def test_select_patterns(capsys, tmp_path):
    path = _model_file(tmp_path, "fig2", "poly")
    code, out, _ = run(capsys, "select", "--model", path, "--class", "Bar",
                       "--tests-pattern", "^never")
    assert code == 0 and out == ""


def test_mutate_lists(capsys):
    code, out, _ = run(capsys, "mutate", FIXTURES / "fig2")
    assert code == 0 and len(out.splitlines()) == 2


def test_evaluate_foobar(capsys, tmp_path):
    report = tmp_path / "r.csv"
    code, out, _ = run(capsys, "evaluate", FIXTURES / "fig2", "-o", report)
    assert code == 0 and "killed difference (poly - static): +1" in out
    header, row = report.read_text().splitlines()
    cols = dict(zip(header.split(","), row.split(",")))
    assert cols["class"] == "Bar"
    assert int(cols["killed_staticreduced"]) < int(cols["killed_polyreduced"])


def test_evaluate_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "evaluate", FIXTURES / "dispatch_heavy", "-o", a)
    run(capsys, "evaluate", FIXTURES / "dispatch_heavy", "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_evaluate_without_tests(capsys, tmp_path):
    (tmp_path / "c.moo").write_text("class C { int one() { return 1; } }")
    code, out, err = run(capsys, "evaluate", tmp_path)
    assert code == 0
    assert out.splitlines()[1:] == []
    assert "1 uncovered" in err


def test_evaluate_baseline_failure(capsys, tmp_path):
    (tmp_path / "c.moo").write_text(
        "class C { int one() { return 1; } } "
        "class CTest { void testOne() { C c = new C(); assert c.one() == 2; } }")
    code, _, err = run(capsys, "evaluate", tmp_path)
    assert code == 3 and "testOne" in err


def test_evaluate_honours_step_budget(capsys, tmp_path, monkeypatch):
    (tmp_path / "c.moo").write_text(
        "class C { int spin() { int i = 0; while (i < 1000) { i = i + 1; } return i; } } "
        "class CTest { void testSpin() { C c = new C(); assert c.spin() == 1000; } }")
    monkeypatch.setenv("CHTEST_STEP_BUDGET", "100")
    code, _, err = run(capsys, "evaluate", tmp_path)
    assert code == 3 and "budget" in err


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "chtest.cli", "select", "--model",
                        "/nonexistent.json", "--class", "X"], capture_output=True, text=True)
    assert r.returncode == 2
