"""Solution pipelines.

* :func:`solve_projected` -- damped fixed-point iteration on the S-map.
* :func:`solve_gnep` -- damped Gauss-Seidel best-response sweeps for
  self-map games.
* :func:`reformulate_add_player` / :func:`extract_projected` /
  :func:`embed_projected` -- the extra-player reformulation, in which a
  projector player chasing the profile turns projected solutions into
  ordinary equilibria.
* :func:`rosen_build` -- jointly convex games from a shared set.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .best_response import InnerSolverOptions, m_nu, s_map
from .blocks import BlockStructure
from .exceptions import (CertificationError, DimensionError,
                         InfeasibleInstantiationError, NonEuclideanNormError)
from .game import GameDefinition
from .sets import Box, Fixed, Polytope, Slice
from .verify import Certificate, check_gnep, check_projected

log = logging.getLogger(__name__)

STATUSES = ("converged", "max_iter", "infeasible_instantiation", "error")


@dataclass(frozen=True)
class SolveOptions:
    damping: float = 0.5
    tol_fp: float = 1e-8
    max_outer: int = 5000
    restarts: int = 5
    seed: int = 42
    inner: InnerSolverOptions = field(default_factory=InnerSolverOptions)
    cert_tol: float = 1e-6
    keep_trace: bool = False

    def __post_init__(self):
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if not self.tol_fp > 0:
            raise ValueError("tol_fp must be positive")
        if self.max_outer < 1 or self.restarts < 0:
            raise ValueError("max_outer must be positive and restarts nonnegative")
        if self.inner.seed != self.seed:
            object.__setattr__(self, "inner", dataclasses.replace(self.inner, seed=self.seed))


@dataclass
class SolveReport:
    status: str
    x_hat: np.ndarray
    y_hat: np.ndarray
    fp_residual: float
    certificate: Certificate | None
    iterations: int
    trace: list | None = None
    message: str = ""
    seed: int = 42
    method: str = "direct"

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _require_euclidean(g):
    if not g.norm.is_euclidean:
        raise NonEuclideanNormError(
            "projection-based solving needs the Euclidean norm (single-valued projection)")


def _starts(box: Box, restarts: int, seed: int, project=None):
    lo, hi = box.bounds()
    y0 = 0.5 * (lo + hi)
    yield project(y0) if project else y0
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        y = rng.uniform(lo, hi)
        yield project(y) if project else y


def _safe_certificate(g, x, y, tol):
    try:
        return check_projected(g, x, y, tol)
    except InfeasibleInstantiationError:
        return None


def solve_projected(g: GameDefinition, opts: SolveOptions | None = None,
                    search_box: Box | None = None) -> SolveReport:
    """Search for a projected solution by iterating
    ``y <- (1 - damping) y + damping S(y)``.

    The first run starts at the center of a box containing ``X(K)``; on
    failure up to ``opts.restarts`` runs start from uniform points of that
    box. A run stops once ``|S(y) - y| <= tol_fp``, and the pair
    ``(P_K(y), y)`` is only reported as converged if it also passes
    :func:`check_projected` at ``opts.cert_tol``.

    ``search_box`` replaces the computed box containing ``X(K)``; it is
    required when K is unbounded.
    """
    opts = opts or SolveOptions()
    _require_euclidean(g)
    box = search_box if search_box is not None else g.search_box()
    lam = opts.damping
    best = None  # (residual, x, y, iterations, trace)
    uncertified = None
    for attempt, y in enumerate(_starts(box, opts.restarts, opts.seed)):
        trace = [] if opts.keep_trace else None
        try:
            for k in range(opts.max_outer):
                x, sy = s_map(g, y, opts.inner)
                r = float(np.linalg.norm(sy - y))
                if trace is not None:
                    trace.append(r)
                if best is None or r < best[0]:
                    best = (r, x, y, k + 1, trace)
                if r <= opts.tol_fp:
                    break
                y = (1 - lam) * y + lam * sy
            else:
                log.info("restart %d: no convergence after %d iterations (residual %.3e)",
                         attempt, opts.max_outer, r)
                continue
        except InfeasibleInstantiationError as exc:
            x = g.projection_set.project(y)
            return SolveReport("infeasible_instantiation", x, y, np.inf, None, k, trace,
                               str(exc), opts.seed)
        cert = check_projected(g, x, y, opts.cert_tol)
        if cert.passed:
            return SolveReport("converged", x, y, r, cert, k + 1, trace, "", opts.seed)
        log.info("restart %d: fixed point failed certification (max residual %.3e)",
                 attempt, cert.max_residual)
        uncertified = (r, x, y, k + 1, trace, cert)
    if uncertified is not None:
        r, x, y, k, trace, cert = uncertified
        return SolveReport("error", x, y, r, cert, k, trace,
                           "fixed point reached but certification failed "
                           "(inner minimization may have missed the global minimum)", opts.seed)
    r, x, y, k, trace = best
    return SolveReport("max_iter", x, y, r, _safe_certificate(g, x, y, opts.cert_tol), k, trace,
                       f"no convergence within {opts.max_outer} iterations on "
                       f"{opts.restarts + 1} starts; best residual {r:.3e}", opts.seed)


def solve_gnep(g: GameDefinition, opts: SolveOptions | None = None) -> SolveReport:
    """Damped Gauss-Seidel best-response sweeps for a self-map game.

    Players update in order, ``x^nu <- (1 - damping) x^nu + damping
    m_nu(x, x)``; a run converges when a full sweep moves the profile by at
    most ``tol_fp``. Games whose constraint maps leave K are refused.
    """
    opts = opts or SolveOptions()
    if g.kind == "gnep_moving":
        raise ValueError("solve_gnep needs a self-map game; use solve_projected for moving constraints")
    K = g.projection_set
    lam = opts.damping
    best = None
    uncertified = None
    for attempt, x in enumerate(_starts(g.domain_box(), opts.restarts, opts.seed, K.project)):
        trace = [] if opts.keep_trace else None
        x = np.array(x, dtype=float)
        try:
            for k in range(opts.max_outer):
                x_old = x.copy()
                for nu in range(g.n_players):
                    sl = g.structure.slice(nu)
                    x[sl] = (1 - lam) * x[sl] + lam * m_nu(g, nu, x, x, opts.inner)
                move = float(np.linalg.norm(x - x_old))
                if trace is not None:
                    trace.append(move)
                if best is None or move < best[0]:
                    best = (move, x.copy(), k + 1, trace)
                if move <= opts.tol_fp:
                    break
            else:
                continue
        except InfeasibleInstantiationError as exc:
            return SolveReport("infeasible_instantiation", x, x, np.inf, None, k, trace,
                               str(exc), opts.seed, "gnep")
        cert = check_gnep(g, x, opts.cert_tol)
        if cert.passed:
            return SolveReport("converged", x, x.copy(), move, cert, k + 1, trace, "", opts.seed, "gnep")
        uncertified = (move, x, k + 1, trace, cert)
    if uncertified is not None:
        move, x, k, trace, cert = uncertified
        return SolveReport("error", x, x.copy(), move, cert, k, trace,
                           "sweeps settled but certification failed", opts.seed, "gnep")
    move, x, k, trace = best
    return SolveReport("max_iter", x, x.copy(), move, _safe_certificate(g, x, x, opts.cert_tol), k,
                       trace, f"no convergence within {opts.max_outer} sweeps", opts.seed, "gnep")


def rosen_build(X: Polytope | Box, objectives, structure: BlockStructure, names=None) -> GameDefinition:
    """Jointly convex game on the shared set ``X``.

    Player ``nu`` controls block ``nu`` subject to ``(x^nu, x^{-nu}) in X``.
    Its base set is the coordinate-wise projection of ``X`` onto the block
    (from per-coordinate linear programs for polytopes), and profiles are
    projected onto ``X`` itself.
    """
    if not isinstance(structure, BlockStructure):
        structure = BlockStructure(tuple(structure))
    if X.dim != structure.total:
        raise DimensionError(f"shared set has dimension {X.dim}, profile has {structure.total}")
    lo, hi = X.bounds()
    base_sets, maps = [], []
    off = structure.offsets
    for nu in range(structure.n_players):
        s, t = off[nu], off[nu + 1]
        base_sets.append(Box(lo[s:t], hi[s:t]))
        maps.append(Slice(X, (s, t)))
    objectives = [ex.parse(o, structure.total) if isinstance(o, str) else o for o in objectives]
    return GameDefinition(structure, tuple(base_sets), tuple(objectives), tuple(maps),
                          kind="rosen_derived", joint_set=X, names=names)


def reformulate_add_player(g: GameDefinition, search_box: Box | None = None) -> GameDefinition:
    """Game with one extra player whose equilibria carry projected solutions.

    The profile becomes ``(x_0, x^{p+1})`` where ``x_0`` holds the original
    players' blocks and ``x^{p+1}`` is a point of K. Original players keep
    their objectives on ``x_0`` but face ``X_nu(x^{p+1})``; their strategy
    sets are the interval hull of ``K_nu`` and a box containing
    ``X_nu(K)``. The extra player minimizes ``|x_0 - x^{p+1}|^2`` over K,
    which has the same minimizers as the distance itself.

    ``search_box``, a box containing ``X(K)``, replaces the interval
    estimate of each player's reach.
    """
    _require_euclidean(g)
    n, p = g.n, g.n_players
    if search_box is not None and search_box.dim != n:
        raise DimensionError("search box dimension does not match the profile")
    hat_sets, hat_maps = [], []
    for nu in range(p):
        if search_box is None:
            reach = g.constraint_maps[nu].bounding_box(g.domain_box())
        else:
            sl = g.structure.slice(nu)
            reach = Box(search_box.lower[sl], search_box.upper[sl])
        hat_sets.append(g.base_sets[nu].bounding_box().hull(reach))
        hat_maps.append(g.constraint_maps[nu].shifted(n))
    K = g.projection_set
    if hasattr(K, "as_box") and K.as_box() is not None:
        K = K.as_box()
    hat_sets.append(K)
    hat_maps.append(Fixed(K))
    distance = ex.sum_of([ex.power(ex.sub(ex.Var(i), ex.Var(n + i)), 2) for i in range(n)])
    structure = BlockStructure(g.structure.dims + (n,))
    return GameDefinition(structure, tuple(hat_sets), g.objectives + (distance,), tuple(hat_maps),
                          kind="hat_game", names=g.names + ("projector",))


def extract_projected(hat_solution, g: GameDefinition, tol: float = 1e-5):
    """``(x_hat, y_hat)`` from an equilibrium of the extra-player game:
    ``x_hat`` is the projector's block, ``y_hat`` the original blocks.

    The pair is certified against ``g``; failure raises CertificationError.
    """
    v = np.asarray(getattr(hat_solution, "values", hat_solution), dtype=float).reshape(-1)
    if v.size != 2 * g.n:
        raise DimensionError(f"hat-game profile should have {2 * g.n} entries, got {v.size}")
    y_hat, x_hat = v[:g.n].copy(), v[g.n:].copy()
    cert = check_projected(g, x_hat, y_hat, tol)
    if not cert.passed:
        raise CertificationError("extracted pair is not a projected solution", cert)
    return x_hat, y_hat


def embed_projected(x_hat, y_hat, g: GameDefinition, tol: float = 1e-6) -> np.ndarray:
    """Profile ``(y_hat, x_hat)`` of the extra-player game for a certified
    projected solution of ``g``."""
    x_hat = np.asarray(x_hat, dtype=float).reshape(-1)
    y_hat = np.asarray(y_hat, dtype=float).reshape(-1)
    if x_hat.size != g.n or y_hat.size != g.n:
        raise DimensionError(f"expected two profiles of length {g.n}")
    cert = check_projected(g, x_hat, y_hat, tol)
    if not cert.passed:
        raise CertificationError("input pair is not a certified projected solution", cert)
    return np.concatenate([y_hat, x_hat])


def solve_reformulated(g: GameDefinition, opts: SolveOptions | None = None,
                       search_box: Box | None = None) -> SolveReport:
    """Projected solution via the extra-player game: solve it with
    :func:`solve_gnep`, then extract and certify against ``g``."""
    opts = opts or SolveOptions()
    hat = reformulate_add_player(g, search_box)
    rep = solve_gnep(hat, opts)
    v = rep.x_hat
    y_hat, x_hat = v[:g.n].copy(), v[g.n:].copy()
    try:
        cert = check_projected(g, x_hat, y_hat, opts.cert_tol)
    except InfeasibleInstantiationError as exc:
        return SolveReport("infeasible_instantiation", x_hat, y_hat, np.inf, None, rep.iterations,
                           rep.trace, str(exc), opts.seed, "reformulate")
    try:
        _, sy = s_map(g, y_hat, opts.inner)
        fp = float(np.linalg.norm(sy - y_hat))
    except InfeasibleInstantiationError:
        fp = np.inf
    status, message = rep.status, rep.message
    if status == "converged" and not cert.passed:
        status, message = "error", "hat-game equilibrium does not certify on the original game"
    return SolveReport(status, x_hat, y_hat, fp, cert, rep.iterations, rep.trace, message,
                       opts.seed, "reformulate")
