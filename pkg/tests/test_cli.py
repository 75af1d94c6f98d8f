import csv
import io
import json

from fractions import Fraction

import pytest

from abconvex.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, decimal12, run


def fn(*slopes, offsets=None):
    offsets = offsets or [0] * len(slopes)
    return {"dim": len(slopes[0]), "pieces": [{"slope": list(s), "offset": b} for s, b in zip(slopes, offsets)]}


@pytest.fixture
def write(tmp_path):
    def _write(name, kind, payload):
        path = tmp_path / name
        path.write_text(json.dumps({"schema_version": "1", "kind": kind, "payload": payload}))
        return str(path)
    return _write


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_sandwich_abs_abs_finds_minus_one(write, tmp_path):
    a = write("abs.json", "function", fn((1,), (-1,)))
    rep = tmp_path / "r.json"
    code, out, _ = call("sandwich", a, a, "--json", str(rep))
    assert code == EXIT_OK
    doc = json.loads(rep.read_text())
    assert doc["result"] == {"found": True, "t": ["-1"]}
    assert "t:" in out


def test_sandwich_violation_exit_two_with_certificate(write, tmp_path):
    s = write("s.json", "sandwich", {"P": fn((0,)), "Q": fn((-1,))})
    rep = tmp_path / "r.json"
    code, _, _ = call("sandwich", s, "--json", str(rep))
    assert code == EXIT_VIOLATION
    cert = json.loads(rep.read_text())["certificate"]
    assert cert["violation"] == ["1"] and cert["P_plus_Q"] == "-1"


def test_conjugate_csv_abs_on_five_points(write, tmp_path):
    f = write("f.json", "function", {"grid": [[-2], [-1], [0], [1], [2]], "values": [2, 1, 0, 1, 2]})
    path = tmp_path / "c.csv"
    assert call("conjugate", f, "--csv", str(path))[0] == EXIT_OK
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 5
    assert [r["x"] for r in rows] == ["-2", "-1", "0", "1", "2"]
    assert all(r["fstar"] == "0" for r in rows if abs(int(r["x"])) <= 1)
    assert rows[0]["fstar_decimal"] == "2.000000000000"


def test_empty_grid_is_header_only(write, tmp_path):
    f = write("f.json", "function", fn((1,), (-1,)))
    path = tmp_path / "c.csv"
    assert call("conjugate", f, "--grid", "", "--csv", str(path))[0] == EXIT_OK
    assert path.read_text() == "x,f,f_decimal,fstar,fstar_decimal\n"


def test_envelope_of_convex_function_is_itself(write, tmp_path):
    f = write("f.json", "function", fn((1,), (-1,)))
    h = write("h.json", "generator_set", {"dim": 1, "members": [{"slope": [1], "offset": 0},
                                                               {"slope": [-1], "offset": 0}]})
    path = tmp_path / "e.csv"
    assert call("envelope", f, h, "--grid", "-2,-1/2,0,3", "--csv", str(path))[0] == EXIT_OK
    rows = list(csv.DictReader(path.open()))
    assert [r["envelope"] for r in rows] == [r["f"] for r in rows] == ["2", "1/2", "0", "3"]


def test_negative_grid_values_are_not_flags(write):
    f = write("f.json", "function", fn((1,), (-1,)))
    assert call("conjugate", f, "--dual-grid", "-1,0,1")[0] == EXIT_OK


def test_decimal_rendering():
    assert decimal12(Fraction(1, 3)) == "0.333333333333"
    assert decimal12(Fraction(-2, 3)) == "-0.666666666667"


def test_input_errors_exit_one(write, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code, _, err = call("polar", str(bad))
    assert code == EXIT_INPUT and "line 1" in err
    assert call("polar", str(tmp_path / "missing.json"))[0] == EXIT_INPUT
    c = write("c.json", "cone", {"dim": 5, "rays": [[1, 0, 0, 0, 0]]})
    code, _, err = call("polar", c)
    assert code == EXIT_INPUT and "dimension" in err.lower()
    f = write("f.json", "function", fn((1,), (-1,)))
    assert call("polar", f)[0] == EXIT_INPUT
    assert call("subdiff", f, "--mode", "float")[0] == EXIT_INPUT
    assert call("conjugate", f, "--tol", "1/10")[0] == EXIT_INPUT
    assert call("polar", c, "--csv", str(tmp_path / "x.csv"))[0] == EXIT_INPUT


def test_compose_decreasing_outer_is_violation(write):
    c = write("c.json", "composition", {"p1": [fn((1,), (-1,))], "p2": fn((-2,))})
    code, out, _ = call("compose", c)
    assert code == EXIT_VIOLATION and "not increasing" in out


def test_compose_agrees(write, tmp_path):
    c = write("c.json", "composition", {"p1": [fn((1,), (-1,))], "p2": fn((2,))})
    rep = tmp_path / "r.json"
    assert call("compose", c, "--json", str(rep))[0] == EXIT_OK
    res = json.loads(rep.read_text())["result"]
    assert res["agree"] and res["vertices"] == [["-2"], ["2"]]


def test_float_conjugate_within_tolerance(write, tmp_path):
    f = write("f.json", "function", {"grid": [[0], [1], [3]], "values": ["1/3", "1/7", 2]})
    rep = tmp_path / "r.json"
    assert call("conjugate", f, "--mode", "float", "--dual-grid", "1/3,2/3", "--json", str(rep))[0] == EXIT_OK
    assert json.loads(rep.read_text())["result"]["float"]["within_tol"] is True


@pytest.mark.parametrize("argv", [
    ("subdiff", "{f}", "--at", "0"),
    ("epsdiff", "{f}", "--at", "1", "--eps", "1", "--member", "1/2"),
    ("dsubdiff", "{f}", "--at", "0"),
    ("genpos", "{f}", "{f}"),
    ("convolve", "{g}", "{g}", "--at", "0,1", "--y-grid", "-1,0,1"),
    ("chainrule", "{g}", "{g}", "--point", "0,0,0"),
])
def test_subcommands_run(write, argv):
    paths = {"f": write("f.json", "function", fn((1,), (-1,))),
             "g": write("g.json", "function", fn((1, -1), (-1, 1)))}
    assert call(*[a.format(**paths) for a in argv])[0] == EXIT_OK


def test_chainrule_inexact_point_is_violation(write):
    g = write("g.json", "function", fn((1, -1), (-1, 1)))
    code, out, _ = call("chainrule", g, g, "--point", "0,5,0")
    assert code == EXIT_VIOLATION and "inexact" in out


def test_check_single_suite_json_is_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert call("check", "--suite", "sandwich", "--seed", "7", "--json", str(a))[0] == EXIT_OK
    assert call("check", "--suite", "sandwich", "--seed", "7", "--json", str(b))[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert call("check", "--suite", "nope")[0] == EXIT_INPUT
