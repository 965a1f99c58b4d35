"""Solver-independent certificates and a brute-force fixed-point oracle.

Nothing here touches the best-response or solver code: minima are taken
over fixed dense grids, so a certificate cannot inherit a solver's blind
spots.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .blocks import norm_eval
from .exceptions import DimensionError, InfeasibleInstantiationError
from .sets import Box, ConvexSet

CERT_GRID = 256
MAX_ORACLE_POINTS = 10_000_000
MAX_CERT_POINTS = 2 ** 21


@dataclass
class Certificate:
    projection_residual: float
    membership_residual: float
    nash_residuals: list
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.nash_residuals = [float(r) for r in self.nash_residuals]
        self.passed = bool(self.projection_residual <= self.tol
                           and self.membership_residual <= self.tol
                           and all(r <= self.tol for r in self.nash_residuals))

    @property
    def max_residual(self) -> float:
        return max([self.projection_residual, self.membership_residual, *self.nash_residuals])

    def to_dict(self) -> dict:
        return {
            "projection_residual": self.projection_residual,
            "membership_residual": self.membership_residual,
            "nash_residuals": list(self.nash_residuals),
            "tol": self.tol,
            "passed": self.passed,
        }


def _points_per_axis(dim: int, k: int) -> int:
    return max(3, min(k, int(MAX_CERT_POINTS ** (1.0 / dim))))


def _feasible_grid(s: ConvexSet, k: int) -> np.ndarray:
    pts = s.grid(_points_per_axis(s.dim, k))
    if len(pts) == 0:
        pts = s.center()[None, :]
    return pts


def _grid_values(theta, sl, context, pts):
    X = np.repeat(np.asarray(context, dtype=float)[:, None], len(pts), axis=1)
    X[sl, :] = pts.T
    v = ex.evaluate(theta, X, nan_ok=True)
    return np.where(np.isnan(v), np.inf, v)


def grid_minimum(theta, sl, context, s: ConvexSet, k: int = CERT_GRID):
    """``(value, point)`` of the best node of a ``k``-per-axis grid over
    ``s``; ties go to the first node in lexicographic order."""
    pts = _feasible_grid(s, k)
    vals = _grid_values(theta, sl, context, pts)
    i = int(np.argmin(vals))
    return float(vals[i]), pts[i]


def _check_dims(g, *vectors):
    out = []
    for v in vectors:
        v = np.asarray(getattr(v, "values", v), dtype=float).reshape(-1)
        if v.size != g.n:
            raise DimensionError(f"expected a profile of length {g.n}, got {v.size}")
        out.append(v)
    return out


def _projection_residual(g, x_hat, y_hat):
    K = g.projection_set
    if g.norm.is_euclidean:
        return float(np.linalg.norm(x_hat - K.project(y_hat)))
    # non-Euclidean: compare distances against a sampled K
    k = max(3, int(1e5 ** (1.0 / g.n)))
    pts = K.grid(k)
    best = min(norm_eval(g.norm, y_hat - w) for w in pts) if len(pts) else np.inf
    return max(0.0, norm_eval(g.norm, y_hat - x_hat) - best, K.violation(x_hat))


def check_projected(g, x_hat, y_hat, tol: float = 1e-6, grid_points: int = CERT_GRID) -> Certificate:
    """Certify that ``(x_hat, y_hat)`` is a projected solution of ``g``:
    ``x_hat`` is the projection of ``y_hat`` onto K, ``y_hat`` lies in
    ``X(x_hat)``, and each ``y_hat^nu`` minimizes ``theta_nu`` over
    ``X_nu(x_hat)`` up to the grid minimum.

    Raises InfeasibleInstantiationError if some ``X_nu(x_hat)`` is empty.
    """
    x_hat, y_hat = _check_dims(g, x_hat, y_hat)
    proj = _projection_residual(g, x_hat, y_hat)
    membership = 0.0
    nash = []
    for nu in range(g.n_players):
        sl = g.structure.slice(nu)
        s = g.constraint_maps[nu].instantiate(x_hat)
        membership = max(membership, s.violation(y_hat[sl]))
        own = ex.evaluate(g.objectives[nu], y_hat)
        best, _ = grid_minimum(g.objectives[nu], sl, y_hat, s, grid_points)
        nash.append(own - best)
    return Certificate(proj, membership, nash, tol)


def check_gnep(g, x_hat, tol: float = 1e-6, grid_points: int = CERT_GRID) -> Certificate:
    """Certify a generalized Nash equilibrium of a self-map game, i.e. the
    projected-solution conditions with ``y_hat = x_hat``."""
    if g.kind == "gnep_moving":
        raise ValueError("check_gnep needs a self-map game; use check_projected")
    (x_hat,) = _check_dims(g, x_hat)
    return check_projected(g, x_hat, x_hat, tol, grid_points)


def rosen_classical_gap(x_hat, y_hat) -> float:
    """Euclidean distance between ``y_hat`` and ``x_hat``; zero for every
    projected solution of a jointly convex game."""
    x_hat = np.asarray(x_hat, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if x_hat.shape != y_hat.shape:
        raise DimensionError("x_hat and y_hat differ in shape")
    return float(np.linalg.norm(y_hat - x_hat))


@dataclass
class OracleResult:
    candidates: list  # (x_hat, y_hat, fp_residual) in grid order
    grid_n: int
    search_box: Box
    indices: list = field(default_factory=list, repr=False)

    @property
    def spacing(self) -> float:
        lo, hi = self.search_box.bounds()
        return float(np.max(hi - lo)) / (self.grid_n - 1)

    def clusters(self) -> list[list[int]]:
        """Candidate indices grouped by grid adjacency (king moves)."""
        idx = [np.asarray(i) for i in self.indices]
        remaining = set(range(len(idx)))
        out = []
        while remaining:
            seed = min(remaining)
            remaining.discard(seed)
            comp, stack = [seed], [seed]
            while stack:
                a = stack.pop()
                near = [b for b in remaining if np.max(np.abs(idx[a] - idx[b])) <= 1]
                for b in near:
                    remaining.discard(b)
                    comp.append(b)
                    stack.append(b)
            out.append(sorted(comp))
        return out

    def representatives(self) -> list:
        """Lowest-residual candidate of each cluster."""
        reps = []
        for comp in self.clusters():
            best = min(comp, key=lambda i: (self.candidates[i][2], i))
            reps.append(self.candidates[best])
        return reps


def brute_force_projected(g, grid_n: int, search_box: Box | None = None,
                          inner_points: int = CERT_GRID) -> OracleResult:
    """Evaluate ``|S(y) - y|`` over a full ``grid_n``-per-axis grid.

    ``S`` is recomputed here from dense-grid minimizations. Grid points
    whose residual is at most twice the grid spacing are returned as
    candidates, paired with their projection onto K.
    """
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    if float(grid_n) ** g.n > MAX_ORACLE_POINTS:
        raise ValueError(f"{grid_n}^{g.n} grid points exceed the limit of {MAX_ORACLE_POINTS}; "
                         "lower grid_n or shrink the problem")
    box = g.search_box() if search_box is None else search_box
    if box.dim != g.n:
        raise DimensionError("search box dimension does not match the profile")
    lo, hi = box.bounds()
    axes = [np.linspace(l, h, grid_n) for l, h in zip(lo, hi)]
    spacing = float(np.max(hi - lo)) / (grid_n - 1)
    threshold = 2.0 * spacing
    K = g.projection_set
    cache = {}
    candidates, indices = [], []
    for idx in np.ndindex(*([grid_n] * g.n)):
        y = np.array([axes[i][j] for i, j in enumerate(idx)])
        x = K.project(y)
        key = x.tobytes()
        if key not in cache:
            try:
                cache[key] = [m.instantiate(x) for m in g.constraint_maps]
            except InfeasibleInstantiationError:
                cache[key] = None
        sets = cache[key]
        if sets is None:
            continue
        sy = np.empty_like(y)
        for nu, s in enumerate(sets):
            sl = g.structure.slice(nu)
            _, z = grid_minimum(g.objectives[nu], sl, y, s, inner_points)
            sy[sl] = z
        r = float(np.linalg.norm(sy - y))
        if r <= threshold * (1 + 1e-12):
            candidates.append((x, y, r))
            indices.append(idx)
    return OracleResult(candidates, grid_n, box, indices)
