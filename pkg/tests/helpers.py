"""Shared builders for the test suite: the canonical chain and small random models."""

import math
import random

from flopslack.circuits import StageGraph, generate_random_stage_graph, parse_stage_graph
from flopslack.model import (RECTANGLE, TRIANGLE, PiecewiseDelayModel, PlaneCoefficients,
                             Polygon, fit_plane)
from flopslack.oracle import REF45, FunctionOracle, analytic_delay

CC1_TEXT = """\
# canonical chain: FF1 -> FF2 -> FF3
ff FF1
ff FF2
ff FF3
stage FF1 FF2 dmax=500 dmin=50
stage FF2 FF3 dmax=300 dmin=50
"""


def cc1_graph() -> StageGraph:
    return parse_stage_graph(CC1_TEXT)


def cc1_model() -> PiecewiseDelayModel:
    p0 = Polygon(0, RECTANGLE, 30, 200, 30, 200, PlaneCoefficients(100, 0, 0))
    p1 = Polygon(1, RECTANGLE, 10, 30, 30, 200, PlaneCoefficients(120, 0, 0))
    return PiecewiseDelayModel((p0, p1), f_lower=100, f_upper=200, d_th=2, k_th=5)


def cc1_oracle() -> FunctionOracle:
    """Oracle that the two CC1 rectangles describe exactly."""

    def delay(s, h):
        if h < 30 or s < 10:
            return math.inf
        return 100.0 if s >= 30 else 120.0

    return FunctionOracle(delay, f_bar=200.0, domain=(0.0, 200.0, 0.0, 200.0))


def _ref(s, h):
    return analytic_delay((s, h), REF45)


def random_small_model(seed: int, n_poly: int) -> PiecewiseDelayModel:
    """Up to ``n_poly`` polygons with planes fit to REF45 corner samples.

    The first polygon is a wide low-delay rectangle so that most circuits are
    feasible; the rest are random rectangles and triangles nearer the wall.
    """
    rng = random.Random(seed)
    polys = [Polygon(0, RECTANGLE, 60, 150, 40, 150,
                     fit_plane([(s, h, _ref(s, h)) for s in (60, 150) for h in (40, 150)]))]
    while len(polys) < n_poly:
        s_l = rng.uniform(20, 90)
        h_l = rng.uniform(20, 90)
        s_u = s_l + rng.uniform(5, 60)
        h_u = h_l + rng.uniform(5, 60)
        pid = len(polys)
        if rng.random() < 0.3:
            corners = [(s_l, h_u, _ref(s_l, h_u)), (s_u, h_l, _ref(s_u, h_l)),
                       (s_u, h_u, _ref(s_u, h_u))]
            c_ts = (h_l - h_u) / (s_u - s_l)
            polys.append(Polygon(pid, TRIANGLE, s_l, s_u, h_l, h_u, fit_plane(corners),
                                 hypotenuse=(h_u - c_ts * s_l, c_ts), corners=tuple(corners)))
        else:
            corners = [(s, h, _ref(s, h)) for s in (s_l, s_u) for h in (h_l, h_u)]
            polys.append(Polygon(pid, RECTANGLE, s_l, s_u, h_l, h_u, fit_plane(corners),
                                 corners=tuple(corners)))
    return PiecewiseDelayModel(tuple(polys), f_lower=_ref(150, 150), f_upper=REF45.f_bar,
                               d_th=2.0, k_th=5.0)


def small_circuit(seed: int, max_ff: int = 4) -> StageGraph:
    rng = random.Random(seed)
    n_ff = rng.randint(1, max_ff)
    n_stage = rng.randint(1, min(2 * n_ff, n_ff * n_ff))
    return generate_random_stage_graph(n_ff, n_stage, dmax_range=(100.0, 500.0),
                                       dmin_fraction_range=(0.2, 0.6), seed=seed)


def random_circuit(seed: int) -> StageGraph:
    """Seeded 10-50 FF circuit with twice as many stages."""
    n = random.Random(seed).randint(10, 50)
    return generate_random_stage_graph(n, 2 * n, seed=seed)
