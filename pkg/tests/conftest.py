import numpy as np
import pytest

from gnepkit import expr as ex
from gnepkit.blocks import BlockStructure
from gnepkit.game import GameDefinition, make_game
from gnepkit.serialization import load_problem
from gnepkit.sets import Box, Parametric, ParametricBox


@pytest.fixture
def example_game():
    return load_problem("example_3_1.json")


@pytest.fixture
def nep_game():
    K = Box([0.0], [1.0])
    return make_game([1, 1], [K, K], ["(x1 - x2)^2", "(x2 - 0.75)^2"])


def example_game_in_code():
    """The bundled example game assembled without the file layer."""
    K = Box([0.0], [1.0])
    X1 = Parametric(ParametricBox(0, [ex.parse("x1 + 1")], [ex.parse("x2 + 2")]))
    X2 = Parametric(ParametricBox(1, [ex.parse("x2 + 1")], [ex.parse("x1 + 2")]))
    return GameDefinition(BlockStructure((1, 1)), (K, K),
                          (ex.parse("x1^3 - x2"), ex.parse("x1 + x2^3")), (X1, X2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
