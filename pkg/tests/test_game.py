import pytest

from gnepkit import expr as ex
from gnepkit.blocks import BlockStructure
from gnepkit.exceptions import DimensionError
from gnepkit.game import GameDefinition, GameDefinitionError, classify, make_game
from gnepkit.sets import Box, Fixed, Parametric, ParametricBox

from conftest import example_game_in_code


def test_kind_inference():
    K = Box([0], [1])
    assert make_game([1, 1], [K, K], ["x1", "x2"]).kind == "nep"
    inside = Parametric(ParametricBox(0, [ex.Const(0.0)], [ex.parse("1 - x2")]))
    assert make_game([1, 1], [K, K], ["x1", "x2"], [inside, None]).kind == "gnep_selfmap"
    assert example_game_in_code().kind == "gnep_moving"


def test_example_file_matches_code(example_game):
    g = example_game_in_code()
    assert example_game.kind == g.kind == "gnep_moving"
    assert example_game.objectives == g.objectives
    assert example_game.base_sets == g.base_sets


def test_validation_errors():
    K = Box([0], [1])
    with pytest.raises(DimensionError):
        make_game([1, 1], [K], ["x1"])
    with pytest.raises(DimensionError):
        make_game([2], [K], ["x1"])
    with pytest.raises(DimensionError):
        make_game([1], [K], [ex.parse("x2")])
    with pytest.raises(GameDefinitionError):
        GameDefinition(BlockStructure((1,)), (K,), (ex.Var(0),), (Fixed(Box([0], [2])),), kind="nep")
    with pytest.raises(GameDefinitionError):
        GameDefinition(BlockStructure((1,)), (K,), (ex.Var(0),), (Fixed(K),), kind="weird")
    moving = Parametric(ParametricBox(0, [ex.parse("x1 + 1")], [ex.parse("x1 + 2")]))
    with pytest.raises(GameDefinitionError, match="leaves K"):
        GameDefinition(BlockStructure((1,)), (K,), (ex.Var(0),), (moving,), kind="gnep_selfmap")


def test_search_box_contains_reach():
    g = example_game_in_code()
    assert g.search_box() == Box([1, 1], [3, 3])
    assert g.domain_box() == Box([0, 0], [1, 1])


def test_classify_ignores_objectives():
    K = Box([0], [1])
    assert classify(BlockStructure((1,)), [K], [Fixed(K)]) == "nep"


def test_game_is_immutable():
    g = example_game_in_code()
    with pytest.raises(Exception):
        g.kind = "nep"
