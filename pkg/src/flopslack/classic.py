"""Traditional constant setup/hold/clock-to-q timing.

The flip-flop is reduced to one (t_su, t_h, d_cq) triple found by sliding
the data edge toward the clock until the delay reaches a degradation factor
times the stable delay. The period is then the worst stage requirement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

from .characterizer import CharConfig, _probe
from .circuits import StageGraph
from .errors import CharacterizationError

logger = logging.getLogger(__name__)

#: factor for the "delay just starts to increase" setting
ONSET_FACTOR = 1.01
DEFAULT_FACTOR = 1.10


@dataclass(frozen=True)
class ClassicFFParams:
    t_su: float
    t_h: float
    d_cq: float
    degradation_factor: float = DEFAULT_FACTOR

    def __post_init__(self):
        if self.t_su < 0 or self.t_h < 0:
            raise ValueError("t_su and t_h must be >= 0")
        if not self.d_cq > 0:
            raise ValueError("d_cq must be > 0")
        if not self.degradation_factor >= 1:
            raise ValueError("degradation_factor must be >= 1")


class ViolationCounts(NamedTuple):
    setup_paths: int
    setup_ffs: int
    hold_paths: int
    hold_ffs: int


def _search_threshold(probe, limit, at, lo, hi, resolution):
    """Smallest x in [lo, hi] with a Valid delay <= limit at ``at(x)``, to ``resolution``."""

    def ok(x):
        d = probe(*at(x))
        return d is not None and d <= limit

    if ok(lo):
        return lo
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def characterize_classic(oracle, degradation_factor: float = DEFAULT_FACTOR,
                         cfg: CharConfig = CharConfig()) -> ClassicFFParams:
    if not degradation_factor >= 1:
        raise ValueError("degradation_factor must be >= 1")
    probe = _probe(oracle)
    big = cfg.anchor_slack
    stable = probe(big, big)
    if stable is None:
        raise CharacterizationError(f"anchor point ({big}, {big}) is metastable")
    limit = degradation_factor * stable
    if limit > oracle.f_bar:
        raise CharacterizationError(
            f"{degradation_factor} x stable delay {stable} exceeds the metastable threshold {oracle.f_bar}")
    lo_s, lo_h = oracle.domain[0], oracle.domain[2]
    t_su = _search_threshold(probe, limit, lambda x: (x, big), lo_s, big, cfg.search_resolution)
    t_h = _search_threshold(probe, limit, lambda x: (big, x), lo_h, big, cfg.search_resolution)
    return ClassicFFParams(t_su=t_su, t_h=t_h, d_cq=limit, degradation_factor=degradation_factor)


def min_period_classic(graph: StageGraph, params: ClassicFFParams) -> float:
    if not graph.stages:
        logger.warning("circuit has no stages; classic period is 0")
        return 0.0
    return max(params.d_cq + st.d_max + params.t_su for st in graph.stages)


def count_violations(graph: StageGraph, params: ClassicFFParams, target_T: float,
                     tol: float = 1e-9) -> ViolationCounts:
    if not target_T > 0:
        raise ValueError("target_T must be > 0")
    setup = [st for st in graph.stages if params.d_cq + st.d_max + params.t_su > target_T + tol]
    hold = [st for st in graph.stages if params.d_cq + st.d_min < params.t_h - tol]
    return ViolationCounts(len(setup), len({st.dst for st in setup}),
                           len(hold), len({st.dst for st in hold}))


def improvement_percent(t_classic: float, t_ilp: float) -> float:
    if t_classic == 0:
        return 0.0 if t_ilp == 0 else -math.inf
    return (t_classic - t_ilp) / t_classic * 100.0
