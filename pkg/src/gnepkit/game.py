"""The game record shared by every solver."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .blocks import EUCLIDEAN, BlockStructure, NormSpec
from .exceptions import DimensionError, GnepkitError
from .sets import (Box, ConstraintMap, ConvexSet, Fixed, ProductSet,
                   is_subset)

KINDS = ("nep", "gnep_selfmap", "gnep_moving", "rosen_derived", "hat_game")


class GameDefinitionError(GnepkitError, ValueError):
    pass


@dataclass(frozen=True)
class GameDefinition:
    """Players, base sets ``K_nu``, objectives ``theta_nu`` (over the full
    profile), constraint maps ``X_nu`` and the norm.

    ``joint_set``, when given, replaces ``prod K_nu`` as the set onto which
    profiles are projected; jointly convex games project onto their shared
    set. Instances are immutable and validated on construction.
    """

    structure: BlockStructure
    base_sets: tuple
    objectives: tuple
    constraint_maps: tuple
    norm: NormSpec = EUCLIDEAN
    kind: str = "gnep_moving"
    joint_set: ConvexSet | None = None
    names: tuple | None = None
    validate_samples: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        for name in ("base_sets", "objectives", "constraint_maps"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        p, n = self.structure.n_players, self.structure.total
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"player{i + 1}" for i in range(p)))
        else:
            object.__setattr__(self, "names", tuple(self.names))
        if not (len(self.base_sets) == len(self.objectives) == len(self.constraint_maps)
                == len(self.names) == p):
            raise DimensionError(f"game has {p} players but the per-player lists differ in length")
        if self.kind not in KINDS:
            raise GameDefinitionError(f"unknown game kind {self.kind!r}")
        objectives = tuple(ex.as_expr(o) for o in self.objectives)
        object.__setattr__(self, "objectives", objectives)
        for nu, (K, d) in enumerate(zip(self.base_sets, self.structure.dims)):
            if not isinstance(K, ConvexSet):
                raise GameDefinitionError(f"base set of player {nu} is not a ConvexSet")
            if K.dim != d:
                raise DimensionError(f"base set of player {nu} has dimension {K.dim}, block has {d}")
        for nu, th in enumerate(objectives):
            if ex.n_vars_required(th) > n:
                raise DimensionError(f"objective of player {nu} uses x{ex.n_vars_required(th)} > n = {n}")
        for nu, m in enumerate(self.constraint_maps):
            if not isinstance(m, ConstraintMap):
                raise GameDefinitionError(f"constraint map of player {nu} is not a ConstraintMap")
        if self.joint_set is not None and self.joint_set.dim != n:
            raise DimensionError("joint set dimension does not match the profile")
        if self.kind == "nep":
            for nu, (m, K) in enumerate(zip(self.constraint_maps, self.base_sets)):
                if not (isinstance(m, Fixed) and m.set == K):
                    raise GameDefinitionError(
                        f"nep game: constraint map of player {nu} must equal its base set")
        if self.kind == "gnep_selfmap" and self.validate_samples:
            bad = self.selfmap_violations()
            if bad:
                raise GameDefinitionError(
                    "gnep_selfmap game: X_nu(x) leaves K_nu for players " + ", ".join(map(str, bad)))

    @property
    def n_players(self) -> int:
        return self.structure.n_players

    @property
    def n(self) -> int:
        return self.structure.total

    @property
    def projection_set(self) -> ConvexSet:
        if self.joint_set is not None:
            return self.joint_set
        return ProductSet(self.base_sets)

    def domain_box(self) -> Box:
        """Bounding box of the projection set (the domain of the maps)."""
        return self.projection_set.bounding_box()

    def search_box(self, domain: ConvexSet | None = None) -> Box:
        """Box containing ``X(K) = prod X_nu(K)``."""
        domain = self.domain_box() if domain is None else domain
        parts = [m.bounding_box(domain) for m in self.constraint_maps]
        return Box(np.concatenate([b.lower for b in parts]), np.concatenate([b.upper for b in parts]))

    def sample_points(self, max_corners: int = 64) -> np.ndarray:
        """Deterministic sample of the projection set: its center and the
        projections of bounding-box corners."""
        K = self.projection_set
        lo, hi = K.bounds()
        pts = [K.center()]
        if self.n <= 6:
            corners = itertools.product(*zip(lo, hi))
        else:
            rng = np.random.default_rng(0)
            corners = (np.where(rng.random(self.n) < 0.5, lo, hi) for _ in range(max_corners))
        pts += [K.project(np.asarray(c, dtype=float)) for c in corners]
        return np.array(pts)

    def selfmap_violations(self) -> list[int]:
        bad = set()
        for x in self.sample_points():
            for nu, (m, K) in enumerate(zip(self.constraint_maps, self.base_sets)):
                if nu in bad:
                    continue
                if not is_subset(m.instantiate(x), K):
                    bad.add(nu)
        return sorted(bad)

    def with_kind(self, kind: str) -> "GameDefinition":
        return GameDefinition(self.structure, self.base_sets, self.objectives, self.constraint_maps,
                              self.norm, kind, self.joint_set, self.names)


def classify(structure, base_sets, constraint_maps, joint_set=None) -> str:
    """Pick the most specific kind among nep / gnep_selfmap / gnep_moving."""
    if all(isinstance(m, Fixed) and m.set == K for m, K in zip(constraint_maps, base_sets)):
        return "nep"
    g = GameDefinition(structure, base_sets, [ex.Const(0.0)] * len(base_sets), constraint_maps,
                       kind="gnep_moving", joint_set=joint_set)
    return "gnep_moving" if g.selfmap_violations() else "gnep_selfmap"


def make_game(dims, base_sets, objectives, constraint_maps=None, norm=EUCLIDEAN,
              kind=None, names=None, joint_set=None) -> GameDefinition:
    """Convenience constructor: parses string objectives, defaults missing
    constraint maps to the base sets and infers ``kind``."""
    structure = dims if isinstance(dims, BlockStructure) else BlockStructure(tuple(dims))
    n = structure.total
    objectives = [ex.parse(o, n) if isinstance(o, str) else o for o in objectives]
    if constraint_maps is None:
        constraint_maps = [None] * len(base_sets)
    constraint_maps = [Fixed(K) if m is None else m for m, K in zip(constraint_maps, base_sets)]
    if kind is None:
        kind = classify(structure, base_sets, constraint_maps, joint_set)
    return GameDefinition(structure, tuple(base_sets), tuple(objectives), tuple(constraint_maps),
                          norm, kind, joint_set, None if names is None else tuple(names))
