import json

import pytest

from fantappie.cli import main

NILPOTENT_TUPLE = {"n": 1, "d": 2, "matrices": [[[[0, 0], [1.4142135623730951, 0]], [[0, 0], [0, 0]]]]}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_transform_fantappie(tmp_path, capsys):
    f = write(tmp_path, "f.json", {"dim": 2, "max_degree": 1, "coeffs": [{"alpha": [1, 0], "re": 1.0}]})
    code, out, _ = run(capsys, "transform", "--op", "F", "--in", f)
    assert code == 0
    doc = json.loads(out)
    assert doc["coeffs"] == [{"alpha": [1, 0], "re": 1 / 6, "im": 0}]


def test_transform_empty_input(tmp_path, capsys):
    f = write(tmp_path, "z.json", {"dim": 2, "max_degree": 0, "coeffs": []})
    code, out, _ = run(capsys, "transform", "--op", "gamma", "--in", f)
    assert code == 0
    assert json.loads(out)["coeffs"] == []


def test_schema_error_exit_2(tmp_path, capsys):
    f = write(tmp_path, "bad.json", {"dim": 2, "max_degree": 1, "coeffs": [{"alpha": [1]}]})
    code, _, err = run(capsys, "transform", "--op", "F", "--in", f)
    assert code == 2
    assert "/coeffs/0/alpha" in err
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert run(capsys, "transform", "--op", "F", "--in", str(bad))[0] == 2
    assert run(capsys, "transform", "--op", "F", "--in", str(tmp_path / "missing.json"))[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "verify", "no-such-suite")[0] == 2
    assert run(capsys, "verify", "kp", "--trials", "0")[0] == 2
    assert run(capsys, "verify", "kp", "--trials", "3")[0] == 2
    assert run(capsys, "spectra", "--domain", "ball:1.5")[0] == 2
    assert run(capsys)[0] == 2


def test_numrange(tmp_path, capsys):
    t = write(tmp_path, "t.json", NILPOTENT_TUPLE)
    code, out, _ = run(capsys, "numrange", "--in", t)
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["lower_bound"] - 1e-8 <= 2**-0.5 <= rep["upper_bound"] + 1e-8
    assert rep["certified"] is True


def test_funcalc_nilpotent_word_bound(capsys):
    code, out, _ = run(capsys, "funcalc", "--check", "eqi8", "--m", "2")
    assert code == 0
    assert abs(json.loads(out)["report"]["value"] - 2 / 3) < 1e-12


def test_funcalc_bound_needs_inputs(tmp_path, capsys):
    assert run(capsys, "funcalc", "--check", "bound")[0] == 2
    t = write(tmp_path, "t.json", NILPOTENT_TUPLE)
    p = write(tmp_path, "p.json", {"dim": 1, "max_degree": 2, "coeffs": [{"alpha": [2], "re": 1.0}]})
    code, out, _ = run(capsys, "funcalc", "--check", "bound", "--in", t, "--poly", p)
    assert code == 0
    assert json.loads(out)["report"]["passed"] is True


def test_cone_tests(tmp_path, capsys):
    m = write(tmp_path, "m.json", {"dim": 2, "atoms": [{"point": [[1, 0], [0, 0]], "weight": 1.0}]})
    code, out, _ = run(capsys, "cone-test", "--test", "kp", "--in", m)
    assert code == 1
    assert json.loads(out)["report"]["verdict"] == "fail"
    f = write(tmp_path, "f.json", {"dim": 2, "max_degree": 0, "coeffs": [{"alpha": [0, 0], "re": 1.0}]})
    for test in ("schur", "op", "mp"):
        assert run(capsys, "cone-test", "--test", test, "--in", f)[0] == 0


def test_spectra_csv(capsys):
    code, out, _ = run(capsys, "spectra", "--domain", "ball:0.5", "--degree", "2", "--out", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "alpha,lambda,lambda_quadrature,relative_error"
    assert lines[1].startswith('"[0,0]",0.03125,')
    assert len(lines) == 7


def test_verify_exit_and_determinism(tmp_path, capsys):
    code, first, _ = run(capsys, "verify", "eqi8", "--m-max", "8")
    assert code == 0
    doc = json.loads(first)
    assert doc["passed"] is True
    m2 = next(c for c in doc["checks"] if c["name"] == "m=2")
    assert abs(m2["values"]["value"] - 2 / 3) < 1e-12
    assert m2["anchor"]
    _, second, _ = run(capsys, "verify", "eqi8", "--m-max", "8")
    assert first == second


def test_verify_seeded_suite_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "--seed", "7", "verify", "adjoint", "--out", str(a))[0] == 0
    assert run(capsys, "verify", "adjoint", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["parameters"] == {"seed": 7}


def test_check_failure_exit_1(capsys):
    code, out, _ = run(capsys, "verify", "adjoint", "--tol", "1e-30")
    assert code == 1
    assert json.loads(out)["passed"] is False
