"""Block-partitioned vectors and norms.

A strategy profile ``x`` in R^n is split into player blocks
``x = (x^0, ..., x^{p-1})`` of sizes ``dims``. Player indices are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DimensionError


@dataclass(frozen=True)
class BlockStructure:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise DimensionError("a block structure needs at least one player")
        if any(d < 1 for d in dims):
            raise DimensionError(f"block sizes must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_players(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(o) for o in np.concatenate([[0], np.cumsum(self.dims)]))

    def slice(self, nu: int) -> slice:
        if not 0 <= nu < self.n_players:
            raise IndexError(f"player index {nu} out of range for {self.n_players} players")
        off = self.offsets
        return slice(off[nu], off[nu + 1])

    def split(self, values) -> list[np.ndarray]:
        values = np.asarray(values, dtype=float)
        return [values[self.slice(nu)].copy() for nu in range(self.n_players)]

    def concat(self, blocks) -> np.ndarray:
        blocks = [np.atleast_1d(np.asarray(b, dtype=float)) for b in blocks]
        if [b.size for b in blocks] != list(self.dims):
            raise DimensionError(f"block sizes {[b.size for b in blocks]} do not match {self.dims}")
        return np.concatenate(blocks)


@dataclass(frozen=True)
class BlockVector:
    structure: BlockStructure
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size != self.structure.total:
            raise DimensionError(
                f"expected {self.structure.total} entries, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("block vector entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, BlockVector):
            return NotImplemented
        return self.structure == other.structure and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.structure, self.values.tobytes()))

    def blocks(self) -> list[np.ndarray]:
        return self.structure.split(self.values)


def block_get(v: BlockVector, nu: int) -> np.ndarray:
    return v.values[v.structure.slice(nu)].copy()


def block_replace(v: BlockVector, nu: int, z) -> BlockVector:
    """Return ``(z, v^{-nu})``: ``v`` with block ``nu`` swapped for ``z``."""
    sl = v.structure.slice(nu)
    z = np.atleast_1d(np.asarray(z, dtype=float)).reshape(-1)
    if z.size != sl.stop - sl.start:
        raise DimensionError(
            f"block {nu} has size {sl.stop - sl.start}, got {z.size} values")
    values = v.values.copy()
    values[sl] = z
    return BlockVector(v.structure, values)


@dataclass(frozen=True)
class NormSpec:
    """One of ``euclidean``, ``p_norm`` (with ``p >= 1``) or
    ``weighted_euclidean`` (with strictly positive ``weights``)."""

    kind: str = "euclidean"
    p: float | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "p_norm", "weighted_euclidean"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "p_norm":
            if self.p is None or not (self.p >= 1):
                raise ValueError("p_norm needs p >= 1")
        if self.kind == "weighted_euclidean":
            if self.weights is None or len(self.weights) == 0:
                raise ValueError("weighted_euclidean needs weights")
            w = tuple(float(x) for x in self.weights)
            if any(not (x > 0) or not np.isfinite(x) for x in w):
                raise ValueError("norm weights must be finite and strictly positive")
            object.__setattr__(self, "weights", w)

    @property
    def is_euclidean(self) -> bool:
        return self.kind == "euclidean"


EUCLIDEAN = NormSpec()


def norm_eval(norm: NormSpec, v: Sequence[float]) -> float:
    v = np.asarray(v, dtype=float).reshape(-1)
    if norm.kind == "euclidean":
        return float(np.linalg.norm(v))
    if norm.kind == "p_norm":
        if np.isinf(norm.p):
            return float(np.max(np.abs(v), initial=0.0))
        return float(np.linalg.norm(v, ord=norm.p))
    w = np.asarray(norm.weights)
    if w.size != v.size:
        raise DimensionError(f"norm has {w.size} weights, vector has {v.size} entries")
    return float(np.sqrt(np.sum(w * v * v)))
