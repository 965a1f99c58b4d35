import json
import subprocess
import sys

import pytest

from gnepkit.cli import main
from gnepkit.serialization import bundled_problems


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_example(capsys):
    code, out, _ = run(capsys, "solve", "example_3_1.json")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "converged"
    assert all(abs(v - 1) <= 1e-6 for v in doc["x_hat"])
    assert doc["wall_time_ms"] is None


def test_solve_to_file_with_timing(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "solve", "example_3_1.json", "-o", str(out), "--timing",
                          "--method", "reformulate", "--seed", "3")
    doc = json.loads(out.read_text())
    assert code == 0 and stdout == ""
    assert doc["wall_time_ms"] > 0 and doc["seed"] == 3 and doc["method"] == "reformulate"


def test_solve_not_converged_exits_one(capsys):
    code, out, _ = run(capsys, "solve", "example_3_1.json", "--max-iter", "2")
    assert code == 1 and json.loads(out)["status"] == "max_iter"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "example_3_1.json", "--x", "1,1", "--y", "2,2")
    assert code == 0 and json.loads(out)["passed"] is True
    code, out, _ = run(capsys, "verify", "example_3_1.json", "--x", "1,1", "--y", "2.1,2")
    assert code == 1 and json.loads(out)["passed"] is False


def test_transform_then_solve(tmp_path, capsys):
    hat = tmp_path / "hat.json"
    assert run(capsys, "transform", "example_3_1.json", "-o", str(hat))[0] == 0
    doc = json.loads(hat.read_text())
    assert doc["kind"] == "hat_game" and len(doc["players"]) == 3
    code, out, _ = run(capsys, "solve", str(hat))
    rep = json.loads(out)
    assert code == 0
    assert all(abs(v - 1) <= 1e-4 for v in rep["x_hat"][2:])


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "example_3_1.json", "--grid", "31")
    doc = json.loads(out)
    assert code == 0 and len(doc["clusters"]) == 1
    code, out, _ = run(capsys, "oracle", "example_3_1.json", "--grid", "31", "--box", "0,0", "1,1")
    assert code == 1 and json.loads(out)["n_candidates"] == 0


@pytest.mark.parametrize("argv", [
    [],
    ["solve"],
    ["solve", "no_such_file.json"],
    ["verify", "example_3_1.json", "--x", "1,a", "--y", "2,2"],
    ["verify", "example_3_1.json", "--x", "1", "--y", "2,2"],
    ["oracle", "example_3_1.json", "--grid", "100000"],
    ["solve", "example_3_1.json", "--damping", "2"],
    ["solve", "example_3_1.json", "--tol", "-1"],
])
def test_usage_and_input_errors_exit_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    diag = json.loads(err[err.index("{\n"):])
    assert "error" in diag


@pytest.mark.parametrize("content", [
    "{nope",
    "[]",
    '{"players": []}',
    '{"players": [{"dim": 1, "objective": "x1 + * x2", "base_set": {"type": "box", "lower": [2], "upper": [1]}}]}',
    '{"players": [{"dim": 1, "objective": "x1", "base_set": {"type": "polytope", "A": [[1], [-1]], "b": [0, -1]}}]}',
    '{"players": [{"dim": 1, "objective": "1/(x1-x1)", "base_set": {"type": "box", "lower": [0], "upper": [1]}}]}',
    '{"players": [{"dim": 1, "objective": "x1", "base_set": {"type": "halfspace", "a": [1], "b": 0}}]}',
])
def test_malformed_problems_never_crash(tmp_path, capsys, content):
    p = tmp_path / "p.json"
    p.write_text(content)
    code, _, err = run(capsys, "solve", str(p))
    assert code == 2
    json.loads(err[err.index("{\n"):])


@pytest.mark.parametrize("name", bundled_problems())
def test_bundled_round_trip(tmp_path, capsys, name):
    out = tmp_path / "r.json"
    assert run(capsys, "solve", name, "-o", str(out))[0] == 0
    rep = json.loads(out.read_text())
    xs = ",".join(repr(v) for v in rep["x_hat"])
    ys = ",".join(repr(v) for v in rep["y_hat"])
    assert run(capsys, "verify", name, "--x", xs, "--y", ys)[0] == 0


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "gnepkit.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "gnepkit" in r.stdout


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("GNEPKIT_SEED", "11")
    _, out, _ = run(capsys, "solve", "nep_quadratic.json")
    assert json.loads(out)["seed"] == 11
