"""Estimator-style wrappers.

``fit`` takes a game (or problem file) in place of training data;
fitted attributes carry a trailing underscore, and ``get_params`` /
``set_params`` come from scikit-learn's BaseEstimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .best_response import InnerSolverOptions, s_map
from .solvers import (SolveOptions, embed_projected, extract_projected,
                      reformulate_add_player, solve_gnep, solve_projected,
                      solve_reformulated)
from .validation import check_game, check_profile, check_profiles


class _SolverBase(BaseEstimator):
    def __init__(self, damping=0.5, tol_fp=1e-8, max_outer=5000, restarts=5, seed=42,
                 cert_tol=1e-6, inner_method="auto", grid_points=64):
        self.damping = damping
        self.tol_fp = tol_fp
        self.max_outer = max_outer
        self.restarts = restarts
        self.seed = seed
        self.cert_tol = cert_tol
        self.inner_method = inner_method
        self.grid_points = grid_points

    def _options(self) -> SolveOptions:
        inner = InnerSolverOptions(method=self.inner_method, grid_points=self.grid_points,
                                   seed=self.seed)
        return SolveOptions(damping=self.damping, tol_fp=self.tol_fp, max_outer=self.max_outer,
                            restarts=self.restarts, seed=self.seed, inner=inner,
                            cert_tol=self.cert_tol)

    def _store(self, game, report):
        self.game_ = game
        self.report_ = report
        self.x_hat_ = np.asarray(report.x_hat, dtype=float)
        self.y_hat_ = np.asarray(report.y_hat, dtype=float)
        self.certificate_ = report.certificate
        self.n_iter_ = report.iterations
        self.converged_ = report.status == "converged"
        return self

    def _check_fitted(self):
        if not hasattr(self, "report_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit(game) first")


class ProjectedSolutionSolver(_SolverBase):
    """Projected solution of a game.

    ``method`` is ``"direct"`` (damped S-map iteration) or
    ``"reformulate"`` (extra-player game). ``predict(Y)`` returns the
    projections of the rows of ``Y`` onto K, i.e. the ``x`` part of the
    S-map, and ``transform(Y)`` applies the S-map itself.
    """

    def __init__(self, method="direct", damping=0.5, tol_fp=1e-8, max_outer=5000, restarts=5,
                 seed=42, cert_tol=1e-6, inner_method="auto", grid_points=64, search_box=None):
        super().__init__(damping, tol_fp, max_outer, restarts, seed, cert_tol, inner_method,
                         grid_points)
        self.method = method
        self.search_box = search_box

    def fit(self, game, y=None):
        game = check_game(game)
        if self.method == "direct":
            report = solve_projected(game, self._options(), self.search_box)
        elif self.method == "reformulate":
            report = solve_reformulated(game, self._options(), self.search_box)
        else:
            raise ValueError(f"method must be 'direct' or 'reformulate', got {self.method!r}")
        return self._store(game, report)

    def transform(self, Y):
        self._check_fitted()
        Y = check_profiles(Y, self.game_.n, "Y")
        inner = self._options().inner
        return np.array([s_map(self.game_, y, inner)[1] for y in Y])

    def predict(self, Y):
        self._check_fitted()
        Y = check_profiles(Y, self.game_.n, "Y")
        K = self.game_.projection_set
        return np.array([K.project(y) for y in Y])


class GNEPSolver(_SolverBase):
    """Generalized equilibrium of a self-map game by Gauss-Seidel sweeps."""

    def fit(self, game, y=None):
        game = check_game(game)
        return self._store(game, solve_gnep(game, self._options()))

    @property
    def equilibrium_(self):
        self._check_fitted()
        return self.x_hat_


class HatGameTransformer(TransformerMixin, BaseEstimator):
    """Maps between a game and its extra-player reformulation.

    ``fit(game)`` builds ``hat_game_``; ``transform`` turns ``(x_hat,
    y_hat)`` pairs, given as rows ``[x_hat, y_hat]``, into hat-game
    profiles and ``inverse_transform`` recovers the rows. Both directions
    certify their input, so uncertified rows raise CertificationError.
    """

    def __init__(self, search_box=None, tol=1e-6):
        self.search_box = search_box
        self.tol = tol

    def fit(self, game, y=None):
        self.game_ = check_game(game)
        self.hat_game_ = reformulate_add_player(self.game_, self.search_box)
        return self

    def _check_fitted(self):
        if not hasattr(self, "hat_game_"):
            raise NotFittedError("HatGameTransformer is not fitted; call fit(game) first")

    def transform(self, pairs):
        self._check_fitted()
        n = self.game_.n
        rows = check_profiles(pairs, 2 * n, "pairs")
        return np.array([embed_projected(r[:n], r[n:], self.game_, self.tol) for r in rows])

    def inverse_transform(self, profiles):
        self._check_fitted()
        n = self.game_.n
        rows = check_profiles(profiles, 2 * n, "profiles")
        out = []
        for r in rows:
            x_hat, y_hat = extract_projected(r, self.game_, self.tol)
            out.append(np.concatenate([x_hat, y_hat]))
        return np.array(out)

    def embed(self, x_hat, y_hat):
        self._check_fitted()
        n = self.game_.n
        return embed_projected(check_profile(x_hat, n, "x_hat"), check_profile(y_hat, n, "y_hat"),
                               self.game_, self.tol)
