"""Seeded generators of random test games."""
from __future__ import annotations

import numpy as np

from . import expr as ex
from .blocks import BlockStructure
from .game import GameDefinition
from .sets import Box, Parametric, ParametricBox, Polytope
from .solvers import rosen_build


def _linear(coefs, offset=0.0):
    return ex.sum_of([ex.Const(offset)] + [ex.mul(ex.Const(c), ex.Var(i)) for i, c in coefs if c != 0.0])


def random_rosen_game(seed: int, n_players: int | None = None) -> GameDefinition:
    """Jointly convex game with scalar blocks.

    The shared set is a random polytope ``{A x <= b} cap [-2, 2]^n`` built
    around a witness point; player ``nu`` minimizes
    ``d_nu (x_nu - c_nu)^2 + sum_mu e_{nu mu} x_nu x_mu`` with ``d_nu > 0``,
    and targets ``c`` outside the set so the shared constraints bind.
    """
    rng = np.random.default_rng(seed)
    p = int(n_players or rng.integers(2, 4))
    witness = rng.uniform(-0.5, 0.5, p)
    m = int(rng.integers(2, 5))
    A = rng.normal(size=(m, p))
    b = A @ witness + rng.uniform(0.05, 0.5, m)
    X = Polytope(A, b, box=Box(-2.0 * np.ones(p), 2.0 * np.ones(p)), witness=witness)
    objectives = []
    for nu in range(p):
        d = rng.uniform(0.5, 2.0)
        c = rng.uniform(-3.0, 3.0)
        xi = ex.Var(nu)
        theta = ex.mul(ex.Const(d), ex.power(ex.sub(xi, ex.Const(c)), 2))
        for mu in range(p):
            if mu != nu:
                e = rng.uniform(-0.2, 0.2) * d
                theta = ex.add(theta, ex.mul(ex.Const(e), ex.mul(xi, ex.Var(mu))))
        objectives.append(theta)
    return rosen_build(X, objectives, BlockStructure((1,) * p))


def random_selfmap_game(seed: int) -> GameDefinition:
    """Self-map game on ``[0, 1]^p`` with moving box constraints.

    Bounds are affine in the rivals' strategies and stay inside ``[0, 1]``;
    best responses are clamped affine maps with Lipschitz constant below
    one, so the equilibrium is unique.
    """
    rng = np.random.default_rng(seed)
    p = int(rng.integers(2, 4))
    n = p
    base = [Box([0.0], [1.0]) for _ in range(p)]
    objectives, maps = [], []
    for nu in range(p):
        rivals = [mu for mu in range(p) if mu != nu]
        d = rng.uniform(0.5, 2.0)
        c = rng.uniform(-0.2, 1.2)
        gam = rng.uniform(-0.3, 0.3, len(rivals)) / len(rivals)
        target = _linear(list(zip(rivals, gam)), c)
        objectives.append(ex.mul(ex.Const(d), ex.power(ex.sub(ex.Var(nu), target), 2)))
        lo = _linear(list(zip(rivals, rng.uniform(0.0, 0.2, len(rivals)) / len(rivals))),
                     rng.uniform(0.0, 0.3))
        hi = _linear(list(zip(rivals, -rng.uniform(0.0, 0.2, len(rivals)) / len(rivals))),
                     1.0 - rng.uniform(0.0, 0.3))
        maps.append(Parametric(ParametricBox(nu, [lo], [hi])))
    return GameDefinition(BlockStructure((1,) * n), tuple(base), tuple(objectives), tuple(maps),
                          kind="gnep_selfmap")


def random_polynomial(rng: np.random.Generator, n_vars: int, degree: int = 3,
                      n_terms: int | None = None) -> ex.Expr:
    """Random polynomial of total degree at most ``degree``."""
    n_terms = int(n_terms or rng.integers(1, 6))
    terms = []
    for _ in range(n_terms):
        mono = ex.Const(float(np.round(rng.uniform(-3, 3), 3)))
        for _ in range(int(rng.integers(0, degree + 1))):
            mono = ex.mul(mono, ex.power(ex.Var(int(rng.integers(n_vars))), 1))
        terms.append(mono)
    return ex.sum_of(terms)
