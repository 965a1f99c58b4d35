"""Convex sets with membership, Euclidean projection and bounding boxes,
plus the constraint maps ``x -> X_nu(x)`` built on top of them."""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, nnls

from . import expr as ex
from .blocks import NormSpec
from .exceptions import (ConvergenceError, DimensionError, EmptySetError,
                         InfeasibleInstantiationError, IntervalError,
                         NonEuclideanNormError, UnboundedSetError)

PROJ_TOL = 1e-10
PROJ_MAX_ITER = 10_000
EXACT_AFTER_SWEEPS = 50


def _vec(z, name="vector"):
    z = np.atleast_1d(np.asarray(z, dtype=float)).reshape(-1)
    if not np.all(np.isfinite(z)):
        raise ValueError(f"{name} must be finite")
    return z


class ConvexSet:
    """Base class. Subclasses are immutable after construction."""

    dim: int

    def _check(self, z):
        z = _vec(z)
        if z.size != self.dim:
            raise DimensionError(f"set has dimension {self.dim}, point has {z.size}")
        return z

    def contains(self, z, tol: float = 0.0) -> bool:
        return self.violation(z) <= tol

    def violation(self, z) -> float:
        raise NotImplementedError

    def project(self, z) -> np.ndarray:
        raise NotImplementedError

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Componentwise bounding box; raises UnboundedSetError."""
        raise NotImplementedError

    @property
    def is_bounded(self) -> bool:
        try:
            lo, hi = self.bounds()
        except UnboundedSetError:
            return False
        return bool(np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)))

    def bounding_box(self) -> "Box":
        return Box(*self.bounds())

    def grid(self, k: int) -> np.ndarray:
        """Feasible points of a ``k``-per-axis grid over the bounding box,
        shape ``(m, dim)`` in lexicographic order."""
        lo, hi = self.bounds()
        pts = _tensor_grid(lo, hi, k)
        return pts[self.violations(pts) <= 1e-12]

    def violations(self, pts) -> np.ndarray:
        """Row-wise :meth:`violation` for an ``(m, dim)`` array."""
        return np.array([self.violation(p) for p in np.atleast_2d(pts)])

    def center(self) -> np.ndarray:
        lo, hi = self.bounds()
        return self.project(0.5 * (lo + hi))

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))


def _tensor_grid(lo, hi, k):
    axes = [np.unique(np.linspace(l, h, k)) for l, h in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


class Box(ConvexSet):
    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float)).reshape(-1)
        upper = np.atleast_1d(np.asarray(upper, dtype=float)).reshape(-1)
        if lower.shape != upper.shape:
            raise DimensionError("box bounds differ in length")
        if np.isnan(lower).any() or np.isnan(upper).any():
            raise ValueError("box bounds must not be NaN")
        bad = np.flatnonzero(lower > upper)
        if bad.size:
            i = int(bad[0])
            raise EmptySetError(f"box has lower > upper in coordinate {i}: {lower[i]} > {upper[i]}")
        lower.setflags(write=False)
        upper.setflags(write=False)
        self.lower, self.upper, self.dim = lower, upper, lower.size

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"

    def _key(self):
        return (self.lower.tobytes(), self.upper.tobytes())

    def violation(self, z):
        z = self._check(z)
        return float(max(np.max(self.lower - z, initial=0.0), np.max(z - self.upper, initial=0.0), 0.0))

    def violations(self, pts):
        pts = np.atleast_2d(pts)
        return np.maximum(np.max(np.maximum(self.lower - pts, pts - self.upper), axis=1), 0.0)

    def project(self, z):
        return np.clip(self._check(z), self.lower, self.upper)

    def bounds(self):
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise UnboundedSetError("box has infinite bounds")
        return self.lower.copy(), self.upper.copy()

    def grid(self, k):
        lo, hi = self.bounds()
        return _tensor_grid(lo, hi, k)

    def is_subset_of(self, other: "Box", tol=0.0) -> bool:
        return bool(np.all(self.lower >= other.lower - tol) and np.all(self.upper <= other.upper + tol))

    def hull(self, other: "Box") -> "Box":
        return Box(np.minimum(self.lower, other.lower), np.maximum(self.upper, other.upper))


class Ball(ConvexSet):
    def __init__(self, center, radius):
        self.center_ = _vec(center, "ball center")
        if not (radius >= 0) or not np.isfinite(radius):
            raise ValueError("ball radius must be finite and nonnegative")
        self.radius = float(radius)
        self.center_.setflags(write=False)
        self.dim = self.center_.size

    def __repr__(self):
        return f"Ball({self.center_.tolist()}, {self.radius})"

    def _key(self):
        return (self.center_.tobytes(), self.radius)

    def violation(self, z):
        z = self._check(z)
        return max(float(np.linalg.norm(z - self.center_)) - self.radius, 0.0)

    def violations(self, pts):
        d = np.linalg.norm(np.atleast_2d(pts) - self.center_, axis=1)
        return np.maximum(d - self.radius, 0.0)

    def project(self, z):
        z = self._check(z)
        d = z - self.center_
        r = np.linalg.norm(d)
        if r <= self.radius:
            return z
        return self.center_ + d * (self.radius / r)

    def bounds(self):
        return self.center_ - self.radius, self.center_ + self.radius

    def center(self):
        return self.center_.copy()


class Halfspace(ConvexSet):
    """``{x : a.x <= b}``."""

    def __init__(self, a, b):
        self.a = _vec(a, "halfspace normal")
        if not np.any(self.a != 0):
            raise ValueError("halfspace normal must be nonzero")
        self.b = float(b)
        self.a.setflags(write=False)
        self.dim = self.a.size

    def __repr__(self):
        return f"Halfspace({self.a.tolist()}, {self.b})"

    def _key(self):
        return (self.a.tobytes(), self.b)

    def violation(self, z):
        z = self._check(z)
        return max(float(self.a @ z) - self.b, 0.0)

    def project(self, z):
        z = self._check(z)
        excess = float(self.a @ z) - self.b
        if excess <= 0:
            return z
        return z - excess * self.a / float(self.a @ self.a)

    def bounds(self):
        raise UnboundedSetError("a halfspace is unbounded")


class Polytope(ConvexSet):
    """``{x : A x <= b}`` intersected with an optional bounding box.

    Nonemptiness is established at construction; ``witness`` is a feasible
    point (found by linear programming when not supplied).
    """

    def __init__(self, A, b, box: Box | None = None, witness=None,
                 tol: float = PROJ_TOL, max_iter: int = PROJ_MAX_ITER):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float)).reshape(-1)
        if A.shape[0] != b.size or A.shape[0] == 0:
            raise DimensionError("polytope needs a nonempty list of halfspaces with matching A, b")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("polytope data must be finite")
        if np.any(~np.any(A != 0, axis=1)):
            raise ValueError("polytope halfspace normals must be nonzero")
        if box is not None and box.dim != A.shape[1]:
            raise DimensionError("bounding box dimension does not match the halfspaces")
        A.setflags(write=False)
        b.setflags(write=False)
        self.A, self.b, self.box, self.dim = A, b, box, A.shape[1]
        self.tol, self.max_iter = tol, max_iter
        self._bounds = None
        if witness is not None:
            witness = _vec(witness, "witness")
            if self.violation(witness) > 1e-9:
                witness = None
        self.witness = witness if witness is not None else self._find_witness()

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[Halfspace], box: Box | None = None, **kw):
        return cls([h.a for h in halfspaces], [h.b for h in halfspaces], box=box, **kw)

    @property
    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(a, b) for a, b in zip(self.A, self.b)]

    def __repr__(self):
        return f"Polytope(m={self.A.shape[0]}, dim={self.dim}, box={self.box!r})"

    def _key(self):
        return (self.A.tobytes(), self.b.tobytes(), None if self.box is None else self.box._key())

    def _lp_bounds(self):
        if self.box is None:
            return [(None, None)] * self.dim
        return [(None if not np.isfinite(l) else l, None if not np.isfinite(u) else u)
                for l, u in zip(self.box.lower, self.box.upper)]

    def _find_witness(self):
        res = linprog(np.zeros(self.dim), A_ub=self.A, b_ub=self.b,
                      bounds=self._lp_bounds(), method="highs")
        if res.status != 0:
            raise EmptySetError("polytope is empty")
        return np.asarray(res.x, dtype=float)

    def violation(self, z):
        z = self._check(z)
        v = max(float(np.max(self.A @ z - self.b)), 0.0)
        if self.box is not None:
            v = max(v, self.box.violation(z))
        return v

    def violations(self, pts):
        pts = np.atleast_2d(pts)
        v = np.maximum(np.max(pts @ self.A.T - self.b, axis=1), 0.0)
        if self.box is not None:
            v = np.maximum(v, self.box.violations(pts))
        return v

    def bounds(self):
        if self._bounds is None:
            lo, hi = np.empty(self.dim), np.empty(self.dim)
            for i in range(self.dim):
                c = np.zeros(self.dim)
                for sign, out in ((1.0, lo), (-1.0, hi)):
                    c[i] = sign
                    res = linprog(c, A_ub=self.A, b_ub=self.b, bounds=self._lp_bounds(), method="highs")
                    if res.status == 3:
                        raise UnboundedSetError(f"polytope is unbounded along coordinate {i}")
                    if res.status != 0:
                        raise EmptySetError(f"bounding LP failed: {res.message}")
                    out[i] = res.x[i]
            if self.box is not None:
                lo = np.maximum(lo, self.box.lower)
                hi = np.minimum(hi, self.box.upper)
            self._bounds = (lo, hi)
        return self._bounds[0].copy(), self._bounds[1].copy()

    def center(self):
        return self.witness.copy()

    def _constraints(self):
        """All inequalities as ``G x <= h``, box bounds included."""
        G, h = [self.A], [self.b]
        if self.box is not None:
            eye = np.eye(self.dim)
            fin_u = np.isfinite(self.box.upper)
            fin_l = np.isfinite(self.box.lower)
            G += [eye[fin_u], -eye[fin_l]]
            h += [self.box.upper[fin_u], -self.box.lower[fin_l]]
        return np.vstack(G), np.concatenate(h)

    def project(self, z):
        z = self._check(z)
        if self.violation(z) <= 1e-14 * (1.0 + np.max(np.abs(self.b))):
            return z
        return _dykstra(self, z)


def _kkt_projection(G, h, z, x_approx):
    """Exact projection onto ``{G x <= h}`` assuming the constraints active
    at ``x_approx`` are the active set; ``None`` if KKT conditions fail."""
    scale = 1.0 + np.max(np.abs(h))
    active = G @ x_approx - h >= -1e-7 * scale
    if not np.any(active):
        return None
    return _kkt_solve(G, h, z, active, scale)


def _kkt_solve(G, h, z, active, scale):
    GA, hA = G[active], h[active]
    mu, *_ = np.linalg.lstsq(GA @ GA.T, GA @ z - hA, rcond=None)
    w = z - GA.T @ mu
    if np.any(mu < -1e-12 * scale):
        return None
    if np.any(G @ w - h > 1e-12 * scale):
        return None
    if np.max(np.abs(GA @ w - hA)) > 1e-10 * scale:
        return None
    return w


def _dykstra(poly: Polytope, z):
    """Dykstra's alternating projections over the halfspaces (and box).

    Every few sweeps the active set is read off the iterate and the KKT
    system is solved exactly; the first verified KKT point is returned.
    """
    G, h = poly._constraints()
    sets = list(zip(poly.A, poly.b))
    norms2 = np.einsum("ij,ij->i", poly.A, poly.A)
    x = z.copy()
    incs = np.zeros((len(sets) + (poly.box is not None), len(z)))
    change = np.inf
    for it in range(poly.max_iter):
        x_prev = x
        incs_prev = incs.copy()
        for i, (a, b) in enumerate(sets):
            y = x + incs[i]
            excess = a @ y - b
            x_new = y - (excess / norms2[i]) * a if excess > 0 else y
            incs[i] = y - x_new
            x = x_new
        if poly.box is not None:
            y = x + incs[-1]
            x_new = np.clip(y, poly.box.lower, poly.box.upper)
            incs[-1] = y - x_new
            x = x_new
        # the iterate alone can stall for a sweep while the increments move
        change = float(np.sqrt(np.sum((x - x_prev) ** 2) + np.sum((incs - incs_prev) ** 2)))
        if change <= 1e-6 or it < 8 or it % 10 == 9:
            w = _kkt_projection(G, h, z, x)
            if w is not None:
                return w
        if it == EXACT_AFTER_SWEEPS:
            # slow progress usually means a degenerate vertex; solve exactly
            w = _ldp_projection(G, h, z)
            if w is not None:
                return w
        if change <= poly.tol:
            break
    else:
        # degenerate vertices can make Dykstra crawl; fall back to an exact solve
        w = _ldp_projection(G, h, z)
        if w is None:
            raise ConvergenceError(f"Dykstra did not converge in {poly.max_iter} sweeps "
                                   f"(last change {change:.3e})", residual=change)
        return w
    w = _kkt_projection(G, h, z, x)
    return x if w is None else w


def _ldp_projection(G, h, z):
    """Projection onto ``{G x <= h}`` as a least-distance program.

    With ``u = x - z`` the problem is ``min |u|`` subject to ``-G u >= G z - h``,
    which Lawson and Hanson reduce to one nonnegative least-squares solve.
    """
    E, f = -G, G @ z - h
    n = len(z)
    M = np.vstack([E.T, f[None, :]])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    try:
        coef, _ = nnls(M, rhs, maxiter=50 * M.shape[1])
    except RuntimeError:
        return None
    r = M @ coef - rhs
    if abs(r[-1]) < 1e-14:
        return None
    w = z - r[:n] / r[-1]
    polished = _kkt_projection(G, h, z, w)
    if polished is not None:
        return polished
    scale = 1.0 + np.max(np.abs(h))
    polished = _active_set_search(G, h, z, w, scale)
    if polished is not None:
        return polished
    return w if np.all(G @ w - h <= 1e-10 * scale) else None


def _active_set_search(G, h, z, x_approx, scale, max_candidates=12):
    """Try every small subset of the nearly active constraints as the active
    set; the projection is unique, so the first KKT point found is it."""
    near = np.flatnonzero(G @ x_approx - h >= -1e-4 * scale)
    if len(near) > max_candidates:
        return None
    for k in range(1, min(len(near), len(z)) + 1):
        for subset in itertools.combinations(near, k):
            active = np.zeros(len(h), dtype=bool)
            active[list(subset)] = True
            w = _kkt_solve(G, h, z, active, scale)
            if w is not None:
                return w
    return None


class ProductSet(ConvexSet):
    """Cartesian product of per-block sets; projection is blockwise."""

    def __init__(self, sets: Sequence[ConvexSet]):
        self.sets = tuple(sets)
        if not self.sets:
            raise ValueError("product of zero sets")
        self.dims = tuple(s.dim for s in self.sets)
        self.offsets = np.concatenate([[0], np.cumsum(self.dims)]).astype(int)
        self.dim = int(self.offsets[-1])

    def __repr__(self):
        return f"ProductSet({list(self.sets)!r})"

    def _key(self):
        return tuple((type(s).__name__, s._key()) for s in self.sets)

    def _parts(self, z):
        return [z[self.offsets[i]:self.offsets[i + 1]] for i in range(len(self.sets))]

    def violation(self, z):
        z = self._check(z)
        return max(s.violation(p) for s, p in zip(self.sets, self._parts(z)))

    def project(self, z):
        z = self._check(z)
        return np.concatenate([s.project(p) for s, p in zip(self.sets, self._parts(z))])

    def bounds(self):
        b = [s.bounds() for s in self.sets]
        return np.concatenate([x[0] for x in b]), np.concatenate([x[1] for x in b])

    def center(self):
        return np.concatenate([s.center() for s in self.sets])

    def as_box(self) -> Box | None:
        if all(isinstance(s, Box) for s in self.sets):
            return Box(np.concatenate([s.lower for s in self.sets]),
                       np.concatenate([s.upper for s in self.sets]))
        return None


def contains(s: ConvexSet, z, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return s.contains(z, tol)


def project(s: ConvexSet, z, norm: NormSpec | None = None) -> np.ndarray:
    """Euclidean projection of ``z`` onto ``s``. Other norms are refused."""
    if norm is not None and not norm.is_euclidean:
        raise NonEuclideanNormError(
            f"projection under the {norm.kind} norm is not single-valued in general; "
            "only the Euclidean norm is supported")
    return s.project(z)


def is_subset(inner: ConvexSet, outer: ConvexSet, tol: float = 1e-9, k: int = 5) -> bool:
    """Containment test: exact for a box inside a convex set (vertex check),
    sampled on a ``k``-grid otherwise."""
    if isinstance(inner, Box) and inner.dim <= 12:
        lo, hi = inner.bounds()
        pts = np.array(list(itertools.product(*zip(lo, hi))))
    elif isinstance(inner, Box) and isinstance(outer, Box):
        return inner.is_subset_of(outer, tol)
    else:
        pts = inner.grid(k)
        if isinstance(inner, Ball):
            pts = np.vstack([pts, inner.center_])
    return all(outer.violation(p) <= tol for p in pts)


# ------------------------------------------------------------ constraint maps

class ConstraintMap:
    """``x -> X_nu(x)`` for one player."""

    def instantiate(self, x) -> ConvexSet:
        raise NotImplementedError

    def bounding_box(self, domain: ConvexSet) -> Box:
        raise NotImplementedError

    def shifted(self, offset: int) -> "ConstraintMap":
        """The same map reading its argument from ``x[offset:]``."""
        raise NotImplementedError


class Fixed(ConstraintMap):
    def __init__(self, set: ConvexSet):
        self.set = set

    def __repr__(self):
        return f"Fixed({self.set!r})"

    def __eq__(self, other):
        return isinstance(other, Fixed) and self.set == other.set

    def __hash__(self):
        return hash(("Fixed", self.set))

    def instantiate(self, x=None):
        return self.set

    def bounding_box(self, domain=None):
        return self.set.bounding_box()

    def shifted(self, offset):
        return self


class ParametricBox:
    """Box-valued map whose bounds are expressions in the full profile.

    ``lower_exprs``/``upper_exprs`` hold one expression per coordinate of the
    player's block.
    """

    def __init__(self, player: int, lower_exprs, upper_exprs):
        lower_exprs = [ex.as_expr(e) for e in lower_exprs]
        upper_exprs = [ex.as_expr(e) for e in upper_exprs]
        if len(lower_exprs) != len(upper_exprs) or not lower_exprs:
            raise DimensionError("parametric box needs matching, nonempty bound lists")
        self.player = int(player)
        self.lower_exprs = tuple(lower_exprs)
        self.upper_exprs = tuple(upper_exprs)
        self.dim = len(lower_exprs)

    def __repr__(self):
        lo = ", ".join(map(str, self.lower_exprs))
        hi = ", ".join(map(str, self.upper_exprs))
        return f"ParametricBox(player={self.player}, lower=[{lo}], upper=[{hi}])"

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        lo = np.array([ex.evaluate(e, x) for e in self.lower_exprs])
        hi = np.array([ex.evaluate(e, x) for e in self.upper_exprs])
        return lo, hi

    def n_vars(self):
        return max(ex.n_vars_required(e) for e in self.lower_exprs + self.upper_exprs)


class Parametric(ConstraintMap):
    def __init__(self, box: ParametricBox):
        self.box = box

    def __repr__(self):
        return f"Parametric({self.box!r})"

    def instantiate(self, x):
        lo, hi = self.box.evaluate(x)
        bad = np.flatnonzero(lo > hi)
        if bad.size:
            i = int(bad[0])
            raise InfeasibleInstantiationError(
                f"player {self.box.player}: lower bound {lo[i]:.17g} exceeds upper bound "
                f"{hi[i]:.17g} in coordinate {i}", player=self.box.player, coordinate=i)
        return Box(lo, hi)

    def bounding_box(self, domain: ConvexSet):
        dlo, dhi = domain.bounds()
        lo, hi = [], []
        for e in self.box.lower_exprs:
            lo.append(ex.interval(e, dlo, dhi)[0])
        for e in self.box.upper_exprs:
            hi.append(ex.interval(e, dlo, dhi)[1])
        return Box(lo, hi)

    def shifted(self, offset):
        f = lambda i: i + offset  # noqa: E731
        b = self.box
        return Parametric(ParametricBox(b.player, [ex.remap(e, f) for e in b.lower_exprs],
                                        [ex.remap(e, f) for e in b.upper_exprs]))


class Slice(ConstraintMap):
    """Slice of a shared set: ``{z : (z, x^{-nu}) in X}``.

    ``block`` is the ``(start, stop)`` range of the player's variables in
    the profile; the profile is read from ``x[read_offset:]``.
    """

    def __init__(self, shared: Polytope | Box, block: tuple[int, int], read_offset: int = 0,
                 slack: float = 1e-9):
        self.shared = shared
        self.block = (int(block[0]), int(block[1]))
        self.read_offset = int(read_offset)
        self.slack = slack
        if isinstance(shared, Box):
            self._A = np.zeros((0, shared.dim))
            self._b = np.zeros(0)
            self._box = shared
        else:
            self._A, self._b, self._box = shared.A, shared.b, shared.box

    def __repr__(self):
        return f"Slice({self.shared!r}, block={self.block}, read_offset={self.read_offset})"

    def instantiate(self, x):
        x = np.asarray(x, dtype=float)
        n = self.shared.dim
        xf = x[self.read_offset:self.read_offset + n]
        s, t = self.block
        rest = np.r_[0:s, t:n]
        A_blk = self._A[:, s:t]
        rhs = self._b - self._A[:, rest] @ xf[rest]
        lo = np.full(t - s, -np.inf)
        hi = np.full(t - s, np.inf)
        if self._box is not None:
            lo, hi = self._box.lower[s:t].copy(), self._box.upper[s:t].copy()
        zero = ~np.any(A_blk != 0, axis=1)
        if np.any(rhs[zero] < -self.slack * (1 + np.abs(self._b[zero]))):
            raise InfeasibleInstantiationError(
                f"slice for block {self.block} is empty at the given rivals' strategies")
        A_blk, rhs = A_blk[~zero], rhs[~zero]
        if t - s == 1:
            a = A_blk[:, 0]
            pos, negm = a > 0, a < 0
            if pos.any():
                hi[0] = min(hi[0], float(np.min(rhs[pos] / a[pos])))
            if negm.any():
                lo[0] = max(lo[0], float(np.max(rhs[negm] / a[negm])))
            if lo[0] > hi[0]:
                if lo[0] - hi[0] > self.slack * (1 + abs(lo[0]) + abs(hi[0])):
                    raise InfeasibleInstantiationError(
                        f"slice for block {self.block} is empty: {lo[0]:.17g} > {hi[0]:.17g}",
                        coordinate=0)
                lo[0] = hi[0] = 0.5 * (lo[0] + hi[0])
            return Box(lo, hi)
        box = Box(lo, hi) if self._box is not None else None
        if A_blk.shape[0] == 0:
            if box is None:
                raise UnboundedSetError("unconstrained slice")
            return box
        try:
            return Polytope(A_blk, rhs, box=box, witness=xf[s:t])
        except EmptySetError:
            raise InfeasibleInstantiationError(
                f"slice for block {self.block} is empty at the given rivals' strategies") from None

    def bounding_box(self, domain=None):
        lo, hi = self.shared.bounds()
        s, t = self.block
        return Box(lo[s:t], hi[s:t])

    def shifted(self, offset):
        return Slice(self.shared, self.block, self.read_offset + offset, self.slack)


def instantiate(m: ConstraintMap, x) -> ConvexSet:
    return m.instantiate(x)


def bounding_box(m: ConstraintMap, domain: ConvexSet) -> Box:
    """A box containing ``m(x)`` for every ``x`` in ``domain``.

    Parametric bounds go through interval arithmetic, which is tight for
    affine bounds; unsupported expressions raise IntervalError.
    """
    try:
        return m.bounding_box(domain)
    except ZeroDivisionError:
        raise IntervalError("division by zero in interval bounds") from None
