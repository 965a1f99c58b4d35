import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnepkit.blocks import (EUCLIDEAN, BlockStructure, BlockVector, NormSpec,
                            block_get, block_replace, norm_eval)
from gnepkit.exceptions import DimensionError


def bv(dims, values):
    return BlockVector(BlockStructure(tuple(dims)), values)


@pytest.mark.parametrize("dims, values, nu, expected", [
    ([1, 2], [1, 2, 3], 1, [2, 3]),
    ([1, 1], [0, 0], 0, [0]),
    ([2, 1], [5, 6, 7], 0, [5, 6]),
])
def test_block_get(dims, values, nu, expected):
    np.testing.assert_array_equal(block_get(bv(dims, values), nu), expected)


def test_block_get_out_of_range():
    with pytest.raises(IndexError):
        block_get(bv([1, 1], [0, 0]), 2)


@pytest.mark.parametrize("dims, values, nu, z, expected", [
    ([1, 1], [1, 2], 0, [9], [9, 2]),
    ([1, 2], [1, 2, 3], 1, [8, 8], [1, 8, 8]),
])
def test_block_replace(dims, values, nu, z, expected):
    v = bv(dims, values)
    w = block_replace(v, nu, z)
    np.testing.assert_array_equal(w.values, expected)
    np.testing.assert_array_equal(v.values, values)


def test_block_replace_identity_and_mismatch():
    v = bv([1, 2], [1, 2, 3])
    assert block_replace(v, 1, block_get(v, 1)) == v
    with pytest.raises(DimensionError):
        block_replace(v, 1, [1.0])


def test_structure_validation():
    with pytest.raises(ValueError):
        BlockStructure(())
    with pytest.raises(ValueError):
        BlockStructure((1, 0))
    s = BlockStructure((2, 1, 3))
    assert s.total == 6
    assert list(s.offsets) == [0, 2, 3, 6]


def test_vector_validation():
    with pytest.raises(DimensionError):
        bv([1, 1], [1.0])
    with pytest.raises(ValueError):
        bv([1, 1], [1.0, np.nan])


@pytest.mark.parametrize("norm, v, expected", [
    (EUCLIDEAN, [3, 4], 5.0),
    (EUCLIDEAN, [0, 0, 0], 0.0),
    (NormSpec("p_norm", p=1), [1, -2], 3.0),
    (NormSpec("weighted_euclidean", weights=(4.0, 1.0)), [1, 2], np.sqrt(8.0)),
])
def test_norm_eval(norm, v, expected):
    assert norm_eval(norm, v) == pytest.approx(expected, abs=1e-15)


def test_norm_validation():
    with pytest.raises(ValueError):
        NormSpec("p_norm", p=0.5)
    with pytest.raises(ValueError):
        NormSpec("weighted_euclidean", weights=(1.0, 0.0))
    with pytest.raises(ValueError):
        NormSpec("taxicab")


dims_st = st.lists(st.integers(1, 3), min_size=1, max_size=4)
norms = [EUCLIDEAN, NormSpec("p_norm", p=1), NormSpec("p_norm", p=3.5), NormSpec("p_norm", p=np.inf)]


@settings(max_examples=100, deadline=None)
@given(dims_st, st.data())
def test_replace_then_get_and_reassembly(dims, data):
    s = BlockStructure(tuple(dims))
    vals = data.draw(st.lists(st.floats(-1e6, 1e6), min_size=s.total, max_size=s.total))
    v = BlockVector(s, vals)
    nu = data.draw(st.integers(0, s.n_players - 1))
    z = data.draw(st.lists(st.floats(-1e6, 1e6), min_size=dims[nu], max_size=dims[nu]))
    np.testing.assert_array_equal(block_get(block_replace(v, nu, z), nu), z)
    whole = np.concatenate([block_get(v, i) for i in range(s.n_players)])
    assert whole.tobytes() == v.values.tobytes()


@pytest.mark.parametrize("norm", norms, ids=lambda n: f"{n.kind}-{n.p}")
def test_homogeneity_and_triangle(norm):
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a, b = rng.normal(size=5) * 10, rng.normal(size=5) * 10
        lam = rng.normal() * 5
        na = norm_eval(norm, a)
        assert abs(norm_eval(norm, lam * a) - abs(lam) * na) <= 1e-12 * max(1.0, abs(lam) * na)
        assert norm_eval(norm, a + b) <= na + norm_eval(norm, b) + 1e-12 * (na + norm_eval(norm, b))
