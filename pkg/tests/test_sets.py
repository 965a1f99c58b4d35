import numpy as np
import pytest

from gnepkit import expr as ex
from gnepkit.blocks import NormSpec
from gnepkit.exceptions import (ConvergenceError, DimensionError, EmptySetError,
                                InfeasibleInstantiationError, NonEuclideanNormError,
                                UnboundedSetError)
from gnepkit.sets import (Ball, Box, Fixed, Halfspace, Parametric, ParametricBox,
                          Polytope, ProductSet, Slice, bounding_box, contains,
                          instantiate, is_subset, project)

SIMPLEX = Polytope([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], [1.0, 0.0, 0.0])


@pytest.mark.parametrize("s, z, tol, expected", [
    (Box([0, 0], [1, 1]), [0.5, 0.5], 0.0, True),
    (Box([0, 0], [1, 1]), [1.1, 0.5], 1e-9, False),
    (Halfspace([1, 1], 1), [0.5, 0.5], 0.0, True),
    (Ball([0, 0], 1), [0.6, 0.8], 1e-12, True),
    (SIMPLEX, [0.6, 0.6], 1e-9, False),
])
def test_contains(s, z, tol, expected):
    assert contains(s, z, tol) is expected


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionError):
        contains(Box([0], [1]), [0.5, 0.5])


@pytest.mark.parametrize("s, z, expected", [
    (Box([0, 0], [1, 1]), [2, 2], [1, 1]),
    (Ball([0, 0], 1), [3, 4], [0.6, 0.8]),
    (Halfspace([1, 1], 1), [1, 1], [0.5, 0.5]),
    (SIMPLEX, [1, 1], [0.5, 0.5]),
    (SIMPLEX, [2, -1], [1, 0]),
    (Polytope([[1.0, 1.0]], [1.0], box=Box([0, 0], [1, 1])), [1, 1], [0.5, 0.5]),
])
def test_projection_examples(s, z, expected):
    np.testing.assert_allclose(project(s, z), expected, atol=1e-10)


@pytest.mark.parametrize("s", [Box([0, 0], [1, 1]), Ball([1, 1], 2), Halfspace([1, -2], 0.5), SIMPLEX])
def test_projection_fixes_members(s):
    z = s.center() if s.is_bounded else np.array([0.0, 0.0])
    np.testing.assert_allclose(project(s, z), z, atol=1e-12)


def test_box_validation_names_coordinate():
    with pytest.raises(EmptySetError, match="coordinate 1"):
        Box([0, 2], [1, 1])


def test_polytope_validation():
    with pytest.raises(EmptySetError):
        Polytope([[1.0], [-1.0]], [0.0, -1.0])
    with pytest.raises(ValueError):
        Polytope([[0.0, 0.0]], [1.0])
    with pytest.raises(ValueError):
        Halfspace([0, 0], 1)
    with pytest.raises(ValueError):
        Ball([0], -1)


def test_polytope_witness_and_bounds():
    assert contains(SIMPLEX, SIMPLEX.witness, 1e-9)
    lo, hi = SIMPLEX.bounds()
    np.testing.assert_allclose(lo, [0, 0], atol=1e-9)
    np.testing.assert_allclose(hi, [1, 1], atol=1e-9)
    with pytest.raises(UnboundedSetError):
        Polytope([[1.0, 1.0]], [1.0]).bounds()


def _thin_sliver():
    return Polytope([[1.0, 1.0], [-1.0, -1.0 + 1e-9], [0.0, 1.0], [0.0, -1.0]],
                    [1.0, -1.0 + 1e-9, 1.0, 0.0], max_iter=3)


def test_dykstra_exhaustion_falls_back_to_exact_solve():
    thin = _thin_sliver()
    z = np.array([5.0, -7.0])
    p = thin.project(z)
    assert thin.violation(p) <= 1e-12
    W = thin.grid(9)
    assert np.max((W - p) @ (z - p)) <= 1e-9


def test_dykstra_nonconvergence_is_reported(monkeypatch):
    import gnepkit.sets as sets_mod
    monkeypatch.setattr(sets_mod, "_ldp_projection", lambda G, h, z: None)
    monkeypatch.setattr(sets_mod, "_kkt_projection", lambda G, h, z, x: None)
    with pytest.raises(ConvergenceError) as info:
        _thin_sliver().project(np.array([5.0, -7.0]))
    assert info.value.residual > 0


def test_non_euclidean_projection_refused():
    with pytest.raises(NonEuclideanNormError):
        project(Box([0], [1]), [2.0], NormSpec("p_norm", p=1))


def test_product_set_projects_blockwise():
    P = ProductSet([Box([0], [1]), Ball([0, 0], 1)])
    np.testing.assert_allclose(P.project([2, 3, 4]), [1, 0.6, 0.8])
    assert P.as_box() is None
    assert ProductSet([Box([0], [1]), Box([2], [3])]).as_box() == Box([0, 2], [1, 3])


def test_grid_is_feasible_and_ordered():
    pts = SIMPLEX.grid(11)
    assert len(pts) == 66
    assert np.all(SIMPLEX.violations(pts) <= 1e-12)
    assert [tuple(p) for p in pts] == sorted(tuple(p) for p in pts)


def _example_maps():
    X1 = Parametric(ParametricBox(0, [ex.parse("x1 + 1")], [ex.parse("x2 + 2")]))
    X2 = Parametric(ParametricBox(1, [ex.parse("x2 + 1")], [ex.parse("x1 + 2")]))
    return X1, X2


def test_instantiate_example_maps():
    X1, X2 = _example_maps()
    assert instantiate(X1, [0, 0]) == Box([1], [2])
    assert instantiate(X2, [0, 1]) == Box([2], [2])
    assert instantiate(Fixed(Box([0], [1])), [5, 5]) == Box([0], [1])


def test_empty_instantiation_names_coordinate():
    m = Parametric(ParametricBox(1, [ex.parse("x1")], [ex.parse("x2")]))
    with pytest.raises(InfeasibleInstantiationError) as info:
        m.instantiate([2.0, 1.0])
    assert info.value.player == 1 and info.value.coordinate == 0


def test_bounding_box_examples():
    X1, X2 = _example_maps()
    K = Box([0, 0], [1, 1])
    assert bounding_box(X1, K) == Box([1], [3])
    assert bounding_box(X2, K) == Box([1], [3])
    assert bounding_box(Fixed(Ball([0, 0, 0], 1)), K) == Box([-1] * 3, [1] * 3)


def test_bounding_box_soundness(rng):
    m = Parametric(ParametricBox(0, [ex.parse("x1 * x2 - 1"), ex.parse("min(x1, x2)")],
                                 [ex.parse("x1^2 + x2"), ex.parse("2 + abs(x2)")]))
    domain = Box([-1, 0], [2, 1])
    B = bounding_box(m, domain)
    for _ in range(100):
        x = rng.uniform(domain.lower, domain.upper)
        s = m.instantiate(x)
        assert np.all(s.lower >= B.lower) and np.all(s.upper <= B.upper)


def test_slice_of_simplex():
    m = Slice(SIMPLEX, (0, 1))
    s = m.instantiate([0.3, 0.25])
    np.testing.assert_allclose([s.lower[0], s.upper[0]], [0, 0.75])
    s = m.instantiate([0.3, 1.0])
    np.testing.assert_allclose([s.lower[0], s.upper[0]], [0, 0], atol=1e-12)
    with pytest.raises(InfeasibleInstantiationError):
        m.instantiate([0.0, 1.5])


def test_slice_with_multidimensional_block():
    X = Polytope([[1.0, 1.0, 1.0]], [1.0], box=Box([0, 0, 0], [1, 1, 1]))
    s = Slice(X, (1, 3)).instantiate([0.5, 0.0, 0.0])
    assert contains(s, [0.25, 0.25], 1e-12)
    assert not contains(s, [0.4, 0.4], 1e-9)
    shifted = Slice(X, (1, 3)).shifted(3)
    assert shifted.instantiate([9, 9, 9, 0.5, 0, 0]) == s


def test_is_subset():
    assert is_subset(Box([0.2], [0.8]), Box([0], [1]))
    assert not is_subset(Box([0.2], [1.8]), Box([0], [1]))
    assert is_subset(Ball([0, 0], 0.5), SIMPLEX) is False


def _check_projection(s, z, P_z, w_samples, idem_tol):
    assert s.violation(P_z) <= 1e-9
    assert np.linalg.norm(s.project(P_z) - P_z) <= idem_tol
    vi = (w_samples - P_z) @ (z - P_z)
    assert np.max(vi) <= 1e-9


@pytest.mark.parametrize("kind", ["box", "ball", "halfspace", "polytope"])
def test_projection_properties_random(kind):
    rng = np.random.default_rng({"box": 1, "ball": 2, "halfspace": 3, "polytope": 4}[kind])
    for _ in range(200):
        d = int(rng.integers(1, 5))
        if kind == "box":
            lo = rng.normal(size=d)
            s = Box(lo, lo + rng.uniform(0, 2, d))
        elif kind == "ball":
            s = Ball(rng.normal(size=d), rng.uniform(0.1, 2))
        elif kind == "halfspace":
            s = Halfspace(rng.normal(size=d), rng.normal())
        else:
            w = rng.uniform(-0.5, 0.5, d)
            A = rng.normal(size=(int(rng.integers(1, 6)), d))
            s = Polytope(A, A @ w + rng.uniform(0.05, 1, len(A)), box=Box(-np.ones(d), np.ones(d)),
                         witness=w)
        z1, z2 = rng.normal(size=d) * 3, rng.normal(size=d) * 3
        p1, p2 = s.project(z1), s.project(z2)
        if kind == "halfspace":
            ws = np.array([s.project(rng.normal(size=d) * 3) for _ in range(20)])
        else:
            ws = s.grid(4)
        _check_projection(s, z1, p1, ws, 1e-12 if kind != "polytope" else 1e-9)
        assert np.linalg.norm(p1 - p2) <= np.linalg.norm(z1 - z2) + 1e-9


def test_polytope_degenerate_vertex_projection():
    # five constraints nearly active at a vertex in four dimensions
    a = np.array([0.34368200331517684, -0.44896452145391524, 0.673997957151228, -0.3059164994065411])
    poly = Polytope(a[None, :], np.array([0.42456217140559255]),
                    box=Box(-np.ones(4), np.ones(4)), witness=np.zeros(4))
    z = np.array([2.8306218717481144, -1.284291106181831, -3.5926652836311037, -3.1352145808030674])
    p = poly.project(z)
    assert poly.violation(p) <= 1e-12
    W = np.vstack([poly.grid(4), poly.project(p)])
    assert np.max((W - p) @ (z - p)) <= 1e-9
