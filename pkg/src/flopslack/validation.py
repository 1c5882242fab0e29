"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .circuits import StageGraph
from .model import PiecewiseDelayModel
from .oracle import DelayOracle


def check_slack_points(X, oracle: DelayOracle = None) -> np.ndarray:
    """Return ``X`` as a float array of shape (n, 2) holding (setup, hold) slacks.

    Slacks must be finite and non-negative; with ``oracle`` they must also
    lie inside its domain.
    """
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected 2 columns (setup, hold), got {X.shape[1]}")
    if (X < 0).any():
        raise ValueError("slacks must be >= 0")
    if oracle is not None:
        s_lo, s_hi, h_lo, h_hi = oracle.domain
        bad = (X[:, 0] < s_lo) | (X[:, 0] > s_hi) | (X[:, 1] < h_lo) | (X[:, 1] > h_hi)
        if bad.any():
            raise ValueError(f"{int(bad.sum())} point(s) outside oracle domain {oracle.domain}")
    return X


def check_oracle(oracle) -> DelayOracle:
    if not (hasattr(oracle, "query") and hasattr(oracle, "f_bar") and hasattr(oracle, "domain")):
        raise TypeError(f"expected a delay oracle, got {type(oracle).__name__}")
    return oracle


def check_model(model) -> PiecewiseDelayModel:
    if not isinstance(model, PiecewiseDelayModel):
        raise TypeError(f"expected a PiecewiseDelayModel, got {type(model).__name__}")
    return model


def check_stage_graph(graph) -> StageGraph:
    if not isinstance(graph, StageGraph):
        raise TypeError(f"expected a StageGraph, got {type(graph).__name__}")
    return graph


def check_positive(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value
