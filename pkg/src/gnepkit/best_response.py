"""Best responses and the maps built from them.

For a game with objectives ``theta_nu`` and constraint maps ``X_nu``:

* ``m_nu(x, y)`` is a minimizer of ``theta_nu(., y^{-nu})`` over ``X_nu(x)``,
* ``m_map(x, y)`` stacks the ``m_nu``,
* ``s_map(y) = m_map(P_K(y), y)``; its fixed points ``y`` give projected
  solutions ``(P_K(y), y)``.

Argmin sets may be fat, so one representative is selected: the inner
search starts from the lexicographically smallest near-optimal grid node,
which makes every map a deterministic function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .blocks import BlockVector
from .exceptions import ExprEvalError, NonSmoothError, UnboundedSetError
from .sets import ConvexSet, project

INV_PHI = (math.sqrt(5) - 1) / 2
METHODS = ("auto", "golden_section_1d", "projected_gradient", "grid_polish")


@dataclass(frozen=True)
class InnerSolverOptions:
    method: str = "auto"
    grid_points: int = 64
    pg_steps: int = 500
    tol_inner: float = 1e-9
    multistart_count: int = 8
    seed: int = 42

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown inner method {self.method!r}; choose from {METHODS}")
        if self.grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        if self.pg_steps < 1 or self.multistart_count < 1:
            raise ValueError("pg_steps and multistart_count must be positive")
        if not self.tol_inner > 0:
            raise ValueError("tol_inner must be positive")


@dataclass
class BestResponseResult:
    argmin: np.ndarray
    value: float
    inner_residual: float  # best grid value minus returned value
    evaluations: int


def _block_gradient(theta, start, stop):
    """Gradient expressions for one block, cached on the expression; None
    when the block's variables sit under min/max/abs."""
    cache = theta.__dict__.setdefault("_block_grads", {})
    key = (start, stop)
    if key not in cache:
        try:
            cache[key] = ex.grad(theta, wrt=range(start, stop))
        except NonSmoothError:
            cache[key] = None
    return cache[key]


class _Restricted:
    """``theta`` as a function of one block, the rest frozen at ``context``."""

    def __init__(self, theta, sl, context):
        self.theta, self.sl, self.context = theta, sl, np.asarray(context, dtype=float)
        self.evaluations = 0
        self._grad = _block_gradient(theta, sl.start, sl.stop)

    @property
    def smooth(self):
        return self._grad is not None

    def __call__(self, z):
        x = self.context.copy()
        x[self.sl] = z
        self.evaluations += 1
        try:
            v = ex.evaluate(self.theta, x, nan_ok=True)
        except ExprEvalError:
            return math.inf
        return math.inf if v != v else v

    def many(self, Z):
        Z = np.atleast_2d(Z)
        X = np.repeat(self.context[:, None], Z.shape[0], axis=1)
        X[self.sl, :] = Z.T
        self.evaluations += Z.shape[0]
        try:
            v = ex.evaluate(self.theta, X, nan_ok=True)
        except ExprEvalError:
            v = np.array([self(z) for z in Z])
        return np.where(np.isnan(v), np.inf, v)

    def gradient(self, z):
        x = self.context.copy()
        x[self.sl] = z
        return np.array([ex.evaluate(d, x) for d in self._grad])


def _better(v1, z1, v2, z2):
    """Strictly lower value wins; exact ties go to the lexicographically
    smaller point."""
    if v1 != v2:
        return v1 < v2
    return tuple(z1) < tuple(z2)


def _bisect_derivative(f, a, b):
    """Locate the minimizer of a smooth quasi-convex ``f`` on ``[a, b]`` by
    bisection on the sign of ``f'``; resolves to the last ulp."""
    lo, hi = a, b
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if f.gradient(np.array([mid]))[0] < 0:
            lo = mid
        else:
            hi = mid
    return [lo, hi]


def _golden(f, a, b, tol=1e-12):
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(np.array([c])), f(np.array([d]))
    while b - a > tol * (1.0 + abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(np.array([c]))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(np.array([d]))
        if not a < c < d < b:
            break
    return [a, c, d, b]


def _projected_gradient(f, s: ConvexSet, z0, steps):
    """Projected gradient with Armijo backtracking along the projection arc."""
    z = s.project(z0)
    fz = f(z)
    t = 1.0
    for _ in range(steps):
        g = f.gradient(z)
        if not np.all(np.isfinite(g)):
            break
        t = min(2.0 * t, 1e6)
        while True:
            z_new = s.project(z - t * g)
            f_new = f(z_new)
            if f_new <= fz + 1e-4 * float(g @ (z_new - z)) or t < 1e-20:
                break
            t *= 0.5
        step = float(np.linalg.norm(z_new - z))
        if f_new > fz:
            break
        z, fz = z_new, f_new
        if step <= 1e-15 * (1.0 + float(np.linalg.norm(z))):
            break
    return z, fz


def _compass(f, s: ConvexSet, z0, h0, max_evals):
    """Derivative-free compass search with halving steps."""
    z = s.project(z0)
    fz = f(z)
    d = z.size
    h = np.asarray(h0, dtype=float).copy()
    evals = 0
    while np.max(h) > 1e-13 * (1.0 + np.max(np.abs(z))) and evals < max_evals:
        best_z, best_f = z, fz
        for i in range(d):
            for sign in (-1.0, 1.0):
                cand = z.copy()
                cand[i] += sign * h[i]
                cand = s.project(cand)
                fc = f(cand)
                evals += 1
                if _better(fc, cand, best_f, best_z) and fc < fz:
                    best_z, best_f = cand, fc
        if best_f < fz:
            z, fz = best_z, best_f
        else:
            h *= 0.5
    return z, fz


def minimize_over(theta: ex.Expr, nu: int, context, s: ConvexSet,
                  opts: InnerSolverOptions | None = None, structure=None) -> BestResponseResult:
    """Minimize ``theta`` over block ``nu`` restricted to ``s`` with the
    other blocks fixed at ``context``.

    ``context`` is a :class:`BlockVector`, or an array together with
    ``structure``. The returned value never exceeds the best of a
    ``grid_points``-per-axis grid by more than ``tol_inner``.
    """
    opts = opts or InnerSolverOptions()
    if isinstance(context, BlockVector):
        structure, values = context.structure, context.values
    else:
        if structure is None:
            raise ValueError("an array context needs its block structure")
        values = np.asarray(context, dtype=float)
    sl = structure.slice(nu)
    d = sl.stop - sl.start
    if s.dim != d:
        raise ValueError(f"set dimension {s.dim} does not match block size {d}")
    if not s.is_bounded:
        raise UnboundedSetError(f"player {nu}: best response needs a bounded feasible set")
    f = _Restricted(theta, sl, values)

    grid = s.grid(opts.grid_points)
    if len(grid) == 0:
        grid = s.center()[None, :]
    vals = f.many(grid)
    grid_best = float(np.min(vals))
    if not np.isfinite(grid_best):
        raise ExprEvalError(f"player {nu}: objective is undefined on the whole feasible grid")
    i0 = int(np.flatnonzero(vals <= grid_best + opts.tol_inner)[0])
    z_best, f_best = grid[i0].copy(), float(vals[i0])

    method = opts.method
    if method == "auto":
        if d == 1:
            method = "bracket_1d"
        else:
            method = "projected_gradient" if f.smooth else "grid_polish"
    if method == "projected_gradient" and not f.smooth:
        method = "grid_polish"
    if method == "golden_section_1d" and d != 1:
        raise ValueError("golden_section_1d applies to one-dimensional blocks only")

    candidates = []
    if method in ("bracket_1d", "golden_section_1d"):
        lo, hi = s.bounds()
        a = grid[max(i0 - 1, 0), 0]
        b = grid[min(i0 + 1, len(grid) - 1), 0]
        a, b = max(a, lo[0]), min(b, hi[0])
        if b > a:
            if method == "bracket_1d" and f.smooth:
                pts = _bisect_derivative(f, a, b)
            else:
                pts = _golden(f, a, b)
            candidates = [(f(np.array([t])), np.array([t])) for t in pts]
    elif method == "projected_gradient":
        rng = np.random.default_rng([opts.seed, nu])
        lo, hi = s.bounds()
        starts = [z_best] + [s.project(rng.uniform(lo, hi)) for _ in range(opts.multistart_count - 1)]
        for z0 in starts:
            z, fz = _projected_gradient(f, s, z0, opts.pg_steps)
            candidates.append((fz, z))
    else:  # grid_polish
        lo, hi = s.bounds()
        k = max(opts.grid_points - 1, 1)
        z, fz = _compass(f, s, z_best, (hi - lo) / k, 200 * d * opts.pg_steps)
        candidates.append((fz, z))

    # refinements must strictly improve on the grid choice, so exact ties
    # keep the lexicographically selected grid node
    for fz, z in candidates:
        if fz < f_best:
            z_best, f_best = np.asarray(z, dtype=float), float(fz)
    return BestResponseResult(argmin=z_best, value=f_best,
                              inner_residual=grid_best - f_best, evaluations=f.evaluations)


def m_nu(g, nu: int, x, y, opts: InnerSolverOptions | None = None) -> np.ndarray:
    """A minimizer of ``theta_nu(., y^{-nu})`` over ``X_nu(x)``."""
    x = np.asarray(getattr(x, "values", x), dtype=float)
    y = np.asarray(getattr(y, "values", y), dtype=float)
    s = g.constraint_maps[nu].instantiate(x)
    return minimize_over(g.objectives[nu], nu, y, s, opts, structure=g.structure).argmin


def m_map(g, x, y, opts: InnerSolverOptions | None = None) -> np.ndarray:
    return np.concatenate([m_nu(g, nu, x, y, opts) for nu in range(g.n_players)])


def s_map(g, y, opts: InnerSolverOptions | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``(x, S(y))`` with ``x = P_K(y)`` and ``S(y) = M(x, y)``."""
    y = np.asarray(getattr(y, "values", y), dtype=float)
    x = project(g.projection_set, y, g.norm)
    return x, m_map(g, x, y, opts)
