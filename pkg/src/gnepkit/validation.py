"""Input checks shared by the estimator layer."""
from __future__ import annotations

import numpy as np

from .blocks import BlockVector
from .exceptions import DimensionError
from .game import GameDefinition


def check_game(game) -> GameDefinition:
    """Accept a GameDefinition or a problem-file path / bundled name."""
    if isinstance(game, GameDefinition):
        return game
    if isinstance(game, (str, bytes)) or hasattr(game, "__fspath__"):
        from .serialization import load_problem
        return load_problem(game)
    raise TypeError(f"expected a GameDefinition or a problem file, got {type(game).__name__}")


def check_profile(v, n: int, name: str = "profile") -> np.ndarray:
    """Flat float copy of ``v`` with ``n`` finite entries."""
    if isinstance(v, BlockVector):
        v = v.values
    arr = np.array(v, dtype=float).reshape(-1)
    if arr.size != n:
        raise DimensionError(f"{name} should have {n} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def check_profiles(X, n: int, name: str = "X") -> np.ndarray:
    """2-D array of profiles, one per row."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise DimensionError(f"{name} should have shape (m, {n}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr
