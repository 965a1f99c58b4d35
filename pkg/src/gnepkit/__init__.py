"""Projected solutions of generalized Nash equilibrium problems.

A projected solution of a game whose constraint maps may leave the base
strategy set K is a pair ``(x_hat, y_hat)`` with ``x_hat`` the projection of
``y_hat`` onto K and ``y_hat`` a Nash equilibrium of the game frozen at
``X(x_hat)``.
"""
__version__ = "0.1.0"

from .best_response import InnerSolverOptions, m_map, m_nu, minimize_over, s_map
from .blocks import (EUCLIDEAN, BlockStructure, BlockVector, NormSpec, block_get,
                     block_replace, norm_eval)
from .game import GameDefinition, make_game
from .serialization import load_problem, read_problem, read_report, write_report
from .sets import (Ball, Box, Fixed, Halfspace, Parametric, ParametricBox, Polytope,
                   ProductSet, Slice, contains, project)
from .solvers import (SolveOptions, SolveReport, embed_projected, extract_projected,
                      reformulate_add_player, rosen_build, solve_gnep, solve_projected,
                      solve_reformulated)
from .verify import (Certificate, brute_force_projected, check_gnep, check_projected,
                     rosen_classical_gap)

__all__ = [
    "Ball", "BlockStructure", "BlockVector", "Box", "Certificate", "EUCLIDEAN", "Fixed",
    "GameDefinition", "Halfspace", "InnerSolverOptions", "NormSpec", "Parametric",
    "ParametricBox", "Polytope", "ProductSet", "Slice", "SolveOptions", "SolveReport",
    "block_get", "block_replace", "brute_force_projected", "check_gnep", "check_projected",
    "contains", "embed_projected", "extract_projected", "load_problem", "m_map", "m_nu",
    "make_game", "minimize_over", "norm_eval", "project", "read_problem", "read_report",
    "reformulate_add_player", "rosen_build", "rosen_classical_gap", "s_map", "solve_gnep",
    "solve_projected", "solve_reformulated", "write_report",
]
