import json

import jsonschema
import numpy as np
import pytest

from gnepkit.exceptions import ProblemError
from gnepkit.serialization import (bundled_problems, default_seed, dumps, game_to_dict,
                                   problem_from_dict, problem_schema, read_problem,
                                   read_report, report_schema, write_report)
from gnepkit.sets import Ball, Box, Halfspace, Polytope, ProductSet
from gnepkit.serialization import set_from_dict, set_to_dict
from gnepkit.solvers import reformulate_add_player, solve_projected


def player(**kw):
    p = {"dim": 1, "base_set": {"type": "box", "lower": [0], "upper": [1]}, "objective": "x1"}
    p.update(kw)
    return p


def errors_of(doc):
    with pytest.raises(ProblemError) as info:
        problem_from_dict(doc)
    return info.value.errors


def test_schemas_are_valid():
    jsonschema.Draft202012Validator.check_schema(problem_schema())
    jsonschema.Draft202012Validator.check_schema(report_schema())


def test_bundled_problems_load():
    names = bundled_problems()
    assert "example_3_1.json" in names and len(names) >= 4
    kinds = {n: read_problem(n).game.kind for n in names}
    assert kinds["example_3_1.json"] == "gnep_moving"
    assert kinds["rosen_simplex.json"] == "rosen_derived"
    assert kinds["nep_quadratic.json"] == "nep"
    assert kinds["selfmap_box.json"] == "gnep_selfmap"


def test_lower_above_upper_names_field():
    errs = errors_of({"players": [player(base_set={"type": "box", "lower": [2], "upper": [1]})]})
    assert errs[0][0] == "/players/0/base_set/lower/0"
    assert "exceeds" in errs[0][1]


def test_schema_errors_carry_pointers():
    errs = errors_of({"players": [player(dim=0), {"dim": 1}], "extra": 1})
    pointers = {p for p, _ in errs}
    assert "/players/0/dim" in pointers
    assert "/players/1" in pointers
    assert "" in pointers


def test_expression_errors_carry_pointers_and_offsets():
    errs = errors_of({"players": [player(objective="x1 + * x2"), player(objective="x3")]})
    assert errs[0][0] == "/players/0/objective" and "byte 5" in errs[0][1]
    assert errs[1][0] == "/players/1/objective"


def test_dimension_errors():
    errs = errors_of({"players": [player(dim=2)]})
    assert errs[0][0] == "/players/0/base_set"
    errs = errors_of({"players": [player(constraint_map={
        "type": "parametric_box", "lower": ["0", "0"], "upper": ["1", "1"]})]})
    assert errs[0][0].startswith("/players/0/constraint_map")


def test_rosen_mode_rejects_per_player_sets():
    doc = {"players": [player(), player()],
           "shared_constraints": {"halfspaces": [{"a": [1, 1], "b": 1}]}}
    errs = errors_of(doc)
    assert {p for p, _ in errs} == {"/players/0/base_set", "/players/1/base_set"}


def test_rosen_mode_builds_game():
    doc = {"players": [{"dim": 1, "objective": "(x1 - 1)^2"}, {"dim": 1, "objective": "(x2 - 1)^2"}],
           "shared_constraints": {"halfspaces": [{"a": [1, 1], "b": 1}],
                                  "box": {"lower": [0, 0], "upper": [None, None]}}}
    g = problem_from_dict(doc).game
    assert g.kind == "rosen_derived"
    assert isinstance(g.joint_set, Polytope)


def test_solver_section_and_seed(monkeypatch):
    doc = {"players": [player()], "solver": {"damping": 0.25, "seed": 9, "inner": {"grid_points": 33}}}
    pr = problem_from_dict(doc)
    opts = pr.solve_options()
    assert opts.damping == 0.25 and opts.seed == 9 and opts.inner.grid_points == 33
    assert pr.solve_options(seed=3, damping=None).seed == 3
    monkeypatch.setenv("GNEPKIT_SEED", "17")
    assert default_seed() == 17
    assert problem_from_dict({"players": [player()]}).solve_options().seed == 17
    monkeypatch.setenv("GNEPKIT_SEED", "x")
    with pytest.raises(ProblemError):
        default_seed()


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(ProblemError, match="invalid JSON"):
        read_problem(p)
    with pytest.raises(FileNotFoundError):
        read_problem(tmp_path / "missing.json")


@pytest.mark.parametrize("s", [
    Box([0, -np.inf], [1, 2]),
    Ball([0.5, 1], 2),
    Halfspace([1, -1], 0.25),
    Polytope([[1.0, 1.0]], [1.0], box=Box([0, 0], [1, 1])),
    ProductSet([Box([0], [1]), Ball([0, 0], 1)]),
])
def test_set_round_trip(s):
    doc = json.loads(dumps(set_to_dict(s)))
    assert set_from_dict(doc) == s


def test_game_round_trip(example_game):
    hat = reformulate_add_player(example_game)
    back = problem_from_dict(json.loads(dumps(game_to_dict(hat)))).game
    assert back.kind == "hat_game"
    assert back.base_sets == hat.base_sets
    x = np.array([2.0, 2.5, 0.5, 0.25])
    for a, b in zip(back.constraint_maps, hat.constraint_maps):
        assert a.instantiate(x) == b.instantiate(x)


def test_rosen_hat_game_round_trip():
    g = read_problem("rosen_simplex.json").game
    hat = reformulate_add_player(g)
    back = problem_from_dict(json.loads(dumps(game_to_dict(hat)))).game
    x = np.array([0.2, 0.3, 0.4, 0.5])
    for a, b in zip(back.constraint_maps, hat.constraint_maps):
        assert a.instantiate(x) == b.instantiate(x)


def test_dumps_format():
    text = dumps({"a": 0.1, "b": [1.0, float("nan"), -0.0], "c": {"d": True, "e": None}, "f": "é"})
    assert text.endswith("\n")
    doc = json.loads(text)
    assert doc["a"] == 0.1 and doc["b"] == [1, None, 0]
    assert "0.10000000000000001" in text
    assert "é" in text


def test_report_round_trip(tmp_path, example_game):
    r = solve_projected(example_game)
    path = tmp_path / "r.json"
    write_report(r, path)
    doc = read_report(path)
    assert doc["status"] == "converged"
    assert list(doc) == ["status", "method", "message", "x_hat", "y_hat", "fp_residual",
                         "certificate", "iterations", "seed", "wall_time_ms", "tool_version"]
    assert np.array(doc["x_hat"], dtype=float).tobytes() == r.x_hat.tobytes()
    from gnepkit.verify import check_projected
    assert check_projected(example_game, doc["x_hat"], doc["y_hat"]).passed
