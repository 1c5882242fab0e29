"""scikit-learn style facades over the functional core.

Each stage of the flow is fit once and then queried:

* :class:`DelaySurfaceCharacterizer` fits a piecewise-linear delay model to
  an oracle and predicts clock-to-q delays at slack points.
* :class:`ClassicSTA` fits constant setup/hold/clock-to-q values to an
  oracle and predicts the traditional minimum period of circuits.
* :class:`PeriodOptimizer` fits to a delay model and predicts the minimum
  period that exploits setup/hold interdependency.
"""

from __future__ import annotations

from typing import List, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .characterizer import CharConfig, characterize
from .circuits import StageGraph
from .classic import DEFAULT_FACTOR, characterize_classic, count_violations, min_period_classic
from .model import PiecewiseDelayModel, ValidationReport, validate_model
from .optimizer import SolveOptions, Solution, Verdict, solve_min_period, validate_solution
from .validation import (check_model, check_oracle, check_positive, check_slack_points,
                         check_stage_graph)


def _graphs(X) -> List[StageGraph]:
    if isinstance(X, StageGraph):
        return [X]
    return [check_stage_graph(g) for g in X]


class DelaySurfaceCharacterizer(BaseEstimator):
    """Piecewise-linear clock-to-q delay model of one flip-flop.

    Parameters mirror :class:`CharConfig`. After :meth:`fit`, ``model_`` is
    the fitted :class:`PiecewiseDelayModel` and ``query_count_`` the number
    of distinct oracle queries it took.
    """

    def __init__(self, anchor_slack=150.0, k_th=5.0, d_th=2.0, search_resolution=0.25,
                 stable_step=4.0, stable_epsilon=0.5, max_split_depth=10, accuracy_margin=0.1):
        self.anchor_slack = anchor_slack
        self.k_th = k_th
        self.d_th = d_th
        self.search_resolution = search_resolution
        self.stable_step = stable_step
        self.stable_epsilon = stable_epsilon
        self.max_split_depth = max_split_depth
        self.accuracy_margin = accuracy_margin

    def config(self) -> CharConfig:
        return CharConfig(anchor_slack=self.anchor_slack, k_th=self.k_th, d_th=self.d_th,
                          search_resolution=self.search_resolution,
                          stable_step=self.stable_step, stable_epsilon=self.stable_epsilon,
                          max_split_depth=self.max_split_depth,
                          accuracy_margin=self.accuracy_margin)

    def fit(self, oracle, y=None):
        self.model_ = characterize(check_oracle(oracle), self.config())
        self.query_count_ = self.model_.query_count
        self.n_polygons_ = self.model_.n_polygons
        return self

    def predict(self, X) -> np.ndarray:
        """Model delay at each (setup, hold) row; NaN where no polygon covers it."""
        check_is_fitted(self, "model_")
        X = check_slack_points(X)
        return self.model_.evaluate(X[:, 0], X[:, 1])

    def validate(self, oracle, grid_resolution: float = 1.0) -> ValidationReport:
        check_is_fitted(self, "model_")
        return validate_model(self.model_, check_oracle(oracle), grid_resolution)

    def score(self, oracle, y=None, grid_resolution: float = 1.0) -> float:
        """Negated worst grid error, so that larger is better."""
        return -self.validate(oracle, grid_resolution).max_abs_error


class ClassicSTA(BaseEstimator):
    """Traditional timing with one (t_su, t_h, d_cq) triple per flip-flop."""

    def __init__(self, degradation_factor=DEFAULT_FACTOR, anchor_slack=150.0,
                 search_resolution=0.25):
        self.degradation_factor = degradation_factor
        self.anchor_slack = anchor_slack
        self.search_resolution = search_resolution

    def fit(self, oracle, y=None):
        cfg = CharConfig(anchor_slack=self.anchor_slack,
                         search_resolution=self.search_resolution,
                         k_th=max(5.0, 2 * self.search_resolution))
        self.params_ = characterize_classic(check_oracle(oracle), self.degradation_factor, cfg)
        return self

    def predict(self, X) -> np.ndarray:
        """Minimum classic period of each circuit."""
        check_is_fitted(self, "params_")
        return np.array([min_period_classic(g, self.params_) for g in _graphs(X)])

    def count_violations(self, graph: StageGraph, target_T: float):
        check_is_fitted(self, "params_")
        return count_violations(check_stage_graph(graph), self.params_,
                                check_positive("target_T", target_T))


class PeriodOptimizer(BaseEstimator):
    """Minimum clock period with clock-to-q delay depending on both slacks."""

    def __init__(self, trim=True, node_limit=100_000, gap_tol=1e-6, lp_method="auto",
                 time_limit: Optional[float] = None):
        self.trim = trim
        self.node_limit = node_limit
        self.gap_tol = gap_tol
        self.lp_method = lp_method
        self.time_limit = time_limit

    def options(self) -> SolveOptions:
        return SolveOptions(trim=self.trim, node_limit=self.node_limit, gap_tol=self.gap_tol,
                            lp_method=self.lp_method, time_limit=self.time_limit)

    def fit(self, model: PiecewiseDelayModel, y=None):
        self.model_ = check_model(model)
        return self

    def solve(self, graph: StageGraph) -> Solution:
        check_is_fitted(self, "model_")
        return solve_min_period(check_stage_graph(graph), self.model_, self.options())

    def predict(self, X) -> np.ndarray:
        """Optimized minimum period of each circuit."""
        return np.array([self.solve(g).T for g in _graphs(X)])

    def validate(self, solution: Solution, graph: StageGraph, oracle) -> Verdict:
        check_is_fitted(self, "model_")
        return validate_solution(solution, check_stage_graph(graph), self.model_,
                                 check_oracle(oracle))
