"""Minimum clock period with slack-dependent clock-to-q delays.

Each flip-flop picks one polygon of the delay model and a working point
(setup slack, hold slack) inside it. A stage i -> j then requires

    s_j + d_i + d_max(i, j) <= T        (setup side)
    h_j <= d_i + d_min(i, j)            (hold side)

where d_i is the plane value at flip-flop i's working point. Claimed slacks
may undershoot the real ones, which keeps every constraint an inequality
and the answer conservative. The period T is minimized as a MILP.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circuits import Stage, StageGraph
from .errors import BuildError, EnumerationLimitError, InfeasibleError, SolverLimitError
from .milp import (BINARY, EQ, FEAS_TOL, GE, INFEASIBLE, INT_TOL, LE, OPTIMAL, FEASIBLE, MilpModel,
                   bb_solve, lp_solve)
from .model import RECTANGLE, PiecewiseDelayModel, Polygon

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# trimming


@dataclass(frozen=True)
class TrimBounds:
    t_low: float
    t_high: float
    s_range: Dict[str, Tuple[float, float]]
    h_range: Dict[str, Tuple[float, float]]


def _delay_extremes(model: PiecewiseDelayModel) -> Tuple[float, float]:
    """Bounds on any plane value the model can produce.

    A plane fit only to corner samples can dip slightly below the stable
    delay or rise above the threshold, so the vertex values widen the range.
    """
    lo = min(p.value_range()[0] for p in model.polygons)
    hi = max(p.value_range()[1] for p in model.polygons)
    return min(model.f_lower, lo), max(model.f_upper, hi)


def compute_trim_bounds(graph: StageGraph, model: PiecewiseDelayModel) -> TrimBounds:
    f_lo, f_hi = _delay_extremes(model)
    if graph.stages:
        t_low = max(f_lo + st.d_max + model.s_min for st in graph.stages)
        t_high = max(f_hi + st.d_max + model.s_max for st in graph.stages)
    else:
        t_low = t_high = 0.0
    s_range, h_range = {}, {}
    for name in graph.flipflops:
        fanin = graph.fanin(name)
        if not fanin:
            s_range[name] = (model.s_min, model.s_max)
            h_range[name] = (model.h_min, model.h_max)
            continue
        dmax = [st.d_max for st in fanin]
        dmin = [st.d_min for st in fanin]
        s_range[name] = (max(0.0, t_low - f_hi - max(dmax)), t_high - f_lo - min(dmax))
        h_range[name] = (max(0.0, f_lo + min(dmin)), f_hi + max(dmin))
    return TrimBounds(t_low, t_high, s_range, h_range)


@dataclass(frozen=True)
class WorkingPoint:
    polygon_id: int
    s: float
    h: float
    d_cq: float


@dataclass
class TrimmedProblem:
    graph: StageGraph
    polygons: Dict[str, Tuple[Polygon, ...]]
    model: PiecewiseDelayModel
    original: StageGraph
    removed_stages: int = 0
    removed_ffs: int = 0
    t_floor: float = 0.0
    parked: Dict[str, WorkingPoint] = field(default_factory=dict)

    @property
    def n_t(self) -> int:
        return self.graph.n_ff

    @property
    def g_t(self) -> float:
        if not self.polygons:
            return 0.0
        return sum(len(v) for v in self.polygons.values()) / len(self.polygons)

    def assignment_count(self) -> int:
        return math.prod(len(v) for v in self.polygons.values())


def _park(model: PiecewiseDelayModel, polys: Sequence[Polygon]) -> WorkingPoint:
    """Lowest-delay vertex among ``polys``; ties go to the lowest id, then smaller slacks."""
    best = min(((p.plane(s, h), p.id, s, h) for p in polys for s, h in p.vertices()))
    d, pid, s, h = best
    return WorkingPoint(pid, s, h, d)


def untrimmed_problem(graph: StageGraph, model: PiecewiseDelayModel) -> TrimmedProblem:
    """Every flip-flop keeps every polygon; nothing is removed."""
    polys = {n: tuple(model.polygons) for n in graph.flipflops}
    return TrimmedProblem(graph, polys, model, graph)


def _available_values(p: Polygon, corner) -> Optional[Tuple[float, float]]:
    """Plane values reachable in ``p`` without claiming more than ``corner``."""
    cs, ch = corner
    if p.kind == RECTANGLE:
        s_u, h_u = min(p.s_u, cs), min(p.h_u, ch)
        if s_u < p.s_l or h_u < p.h_l:
            return None
        vals = [p.plane(s, h) for s in (p.s_l, s_u) for h in (p.h_l, h_u)]
        return min(vals), max(vals)
    if p.s_u <= cs and p.h_u <= ch:
        return p.value_range()
    return None


def _useful_delay(graph: StageGraph, model: PiecewiseDelayModel, bounds: TrimBounds,
                  name: str) -> float:
    """Delay beyond which no fan-out hold check of ``name`` can gain anything.

    A hold check allows h_dst <= delay + d_min, and the destination never
    claims more hold slack than its range or the model allow.
    """
    need = -math.inf
    for st in graph.fanout(name):
        need = max(need, min(model.h_max, bounds.h_range[st.dst][1]) - st.d_min)
    return need


def _drop_dominated(cands: List[Polygon], corner, useful: float) -> Tuple[Polygon, ...]:
    """Drop polygons that an always-available polygon can stand in for.

    Moving a flip-flop to a point at most ``corner`` with a delay between
    ``useful`` and the old delay loosens no constraint: its own setup and
    hold claims shrink, fan-out setup checks see a smaller delay and fan-out
    hold checks still admit every hold slack the destinations can use.
    """
    reach = {p.id: _available_values(p, corner) for p in cands}
    witnesses = [(p, r) for p in cands if (r := reach[p.id]) is not None]
    kept = {p.id for p in cands}
    for p in sorted(cands, key=lambda q: (-q.value_range()[0], -q.id)):
        low = p.value_range()[0]
        for q, (lo, hi) in witnesses:
            if q.id != p.id and q.id in kept and max(lo, useful) <= min(hi, low):
                kept.discard(p.id)
                break
    return tuple(p for p in cands if p.id in kept)


def trim(graph: StageGraph, model: PiecewiseDelayModel,
         bounds: Optional[TrimBounds] = None) -> TrimmedProblem:
    """Drop polygons, stages and flip-flops that cannot matter for the optimum.

    Polygons starting above a flip-flop's largest reachable slacks are
    dropped. Smaller claims are always available, so a polygon is also
    dropped when a kept polygon inside the always-available region offers a
    delay no higher than its lowest value yet still high enough for every
    fan-out hold check (see ``_useful_delay``).
    A stage whose endpoints are both left with only stable-plateau polygons
    has a constant requirement; it is folded into ``t_floor`` and removed.
    """
    if bounds is None:
        bounds = compute_trim_bounds(graph, model)
    polys: Dict[str, Tuple[Polygon, ...]] = {}
    for name in graph.flipflops:
        s_hi, h_hi = bounds.s_range[name][1], bounds.h_range[name][1]
        cands = [p for p in model.polygons if p.s_l <= s_hi and p.h_l <= h_hi]
        if not cands:
            raise InfeasibleError(f"flip-flop {name!r} has no polygon inside its slack range")
        if graph.fanin(name):
            corner = (min(bounds.s_range[name][0], model.s_max),
                      min(bounds.h_range[name][0], model.h_max))
        else:
            corner = (model.s_max, model.h_max)
        polys[name] = _drop_dominated(cands, corner, _useful_delay(graph, model, bounds, name))

    def stable_only(name):
        return all(model.is_stable(p) for p in polys[name])

    kept: List[Stage] = []
    t_floor = 0.0
    removed = 0
    for st in graph.stages:
        if stable_only(st.src) and stable_only(st.dst):
            dst_polys = polys[st.dst]
            if all(p.h_l <= model.f_lower + st.d_min for p in dst_polys):
                t_floor = max(t_floor, model.f_lower + st.d_max + min(p.s_l for p in dst_polys))
                removed += 1
                continue
        kept.append(st)
    used = {st.src for st in kept} | {st.dst for st in kept}
    parked = {}
    for name in graph.flipflops:
        if name not in used:
            # removed flip-flop: stable-only ones sit at their smallest claim, others at min delay
            cands = polys[name]
            if all(model.is_stable(p) for p in cands):
                p = min(cands, key=lambda q: (q.s_l, q.h_l, q.id))
                parked[name] = WorkingPoint(p.id, p.s_l, p.h_l, p.plane(p.s_l, p.h_l))
            else:
                parked[name] = _park(model, cands)
    names = tuple(n for n in graph.flipflops if n in used)
    reduced = StageGraph(names, tuple(kept))
    return TrimmedProblem(reduced, {n: polys[n] for n in names}, model, graph,
                          removed_stages=removed, removed_ffs=len(graph.flipflops) - len(names),
                          t_floor=t_floor, parked=parked)


# --------------------------------------------------------------------------
# model building


@dataclass
class VariableMap:
    T: int
    z: Dict[Tuple[str, int], int]
    s: Dict[Tuple[str, int], int]
    h: Dict[Tuple[str, int], int]

    def of(self, name) -> List[Tuple[int, int, int]]:
        """(z, s, h) indices of every polygon of one flip-flop, in polygon order."""
        return [(self.z[k], self.s[k], self.h[k]) for k in self.z if k[0] == name]


def build_milp(problem: TrimmedProblem) -> Tuple[MilpModel, VariableMap]:
    g = problem.graph
    idx = g.index()
    m = MilpModel("min_period")
    T = m.add_var("T", lb=problem.t_floor)
    z, s, h = {}, {}, {}
    delay_terms: Dict[str, Dict[int, float]] = {}
    for name in g.flipflops:
        i = idx[name]
        terms: Dict[int, float] = {}
        for p in problem.polygons[name]:
            key = (name, p.id)
            z[key] = m.add_var(f"z_{i}_{p.id}", BINARY)
            s[key] = m.add_var(f"s_{i}_{p.id}")
            h[key] = m.add_var(f"h_{i}_{p.id}")
            zk, sk, hk = z[key], s[key], h[key]
            m.add_constraint({sk: 1.0, zk: -p.s_u}, LE, 0.0, f"su_{i}_{p.id}")
            m.add_constraint({sk: 1.0, zk: -p.s_l}, GE, 0.0, f"sl_{i}_{p.id}")
            m.add_constraint({hk: 1.0, zk: -p.h_u}, LE, 0.0, f"hu_{i}_{p.id}")
            m.add_constraint({hk: 1.0, zk: -p.h_l}, GE, 0.0, f"hl_{i}_{p.id}")
            if p.hypotenuse is not None:
                c_t, c_ts = p.hypotenuse
                if not c_t > 0:
                    raise BuildError(f"polygon {p.id}: hypotenuse intercept {c_t} must be > 0")
                k = max(1.0, abs(c_ts))  # row scaled so a steep line stays well conditioned
                m.add_constraint({hk: 1.0 / k, zk: -c_t / k, sk: -c_ts / k}, GE, 0.0,
                                 f"hyp_{i}_{p.id}")
            terms[zk] = p.plane.c
            terms[sk] = p.plane.c_s
            terms[hk] = p.plane.c_h
        m.add_constraint({z[name, p.id]: 1.0 for p in problem.polygons[name]}, EQ, 1.0, f"one_{i}")
        delay_terms[name] = terms
    for st in g.stages:
        i, j = idx[st.src], idx[st.dst]
        setup: Dict[int, float] = {T: -1.0}
        hold: Dict[int, float] = {}
        for p in problem.polygons[st.dst]:
            setup[s[st.dst, p.id]] = setup.get(s[st.dst, p.id], 0.0) + 1.0
            hold[h[st.dst, p.id]] = hold.get(h[st.dst, p.id], 0.0) + 1.0
        for var, coef in delay_terms[st.src].items():
            setup[var] = setup.get(var, 0.0) + coef
            hold[var] = hold.get(var, 0.0) - coef
        m.add_constraint(setup, LE, -st.d_max, f"setup_{i}_{j}")
        m.add_constraint(hold, LE, st.d_min, f"hold_{i}_{j}")
    m.set_objective({T: 1.0})
    return m, VariableMap(T, z, s, h)


# --------------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class SolveOptions:
    trim: bool = True
    node_limit: int = 100_000
    gap_tol: float = 1e-6
    lp_method: str = "auto"
    time_limit: Optional[float] = None
    heuristic: bool = True


@dataclass
class Solution:
    T: float
    points: Dict[str, WorkingPoint]
    status: str
    gap: float
    n_s: int = 0
    n_t: int = 0
    n_p: int = 0
    g_t: float = 0.0
    removed_stages: int = 0
    removed_ffs: int = 0
    t_floor: float = 0.0
    nodes: int = 0
    runtime: float = 0.0


def _rounding_heuristic(problem, milp, vmap, dive_first=True):
    """Fix one polygon per flip-flop, then solve the remaining LP.

    A flip-flop split across polygons is moved to the polygon with the
    lowest plane value at its aggregated working point; on a convex-like
    surface that delay is no worse than the blended one, so the claimed
    slacks stay feasible. Without a covering polygon the largest z wins.

    The first call dives instead: it fixes the most decided split
    flip-flop, re-solves, and repeats, letting the LP repair the rest.
    """
    groups = [[(p, vmap.z[n, p.id], vmap.s[n, p.id], vmap.h[n, p.id]) for p in problem.polygons[n]]
              for n in problem.graph.flipflops]
    calls = [0]

    def choose(group, x, ub):
        open_ = [t for t in group if ub[t[1]] > 0.5]
        if not open_:
            return None
        top = max(open_, key=lambda t: (x[t[1]], -t[0].id))
        if x[top[1]] < 1 - 1e-6:
            s = sum(x[t[2]] for t in group)
            h = sum(x[t[3]] for t in group)
            covering = [t for t in open_ if t[0].contains(s, h, 1e-7)]
            if covering:
                top = min(covering, key=lambda t: (t[0].plane(s, h), t[0].id))
        return top

    def fix(group, pick, lb, ub):
        for t in group:
            lb[t[1]] = ub[t[1]] = 1.0 if t is pick else 0.0

    def round_all(x, lb, ub):
        lb2, ub2 = lb.copy(), ub.copy()
        for group in groups:
            pick = choose(group, x, ub)
            if pick is None:
                return None
            fix(group, pick, lb2, ub2)
        sol = lp_solve(milp, lb2, ub2, "auto")
        return sol.x if sol.status == OPTIMAL else None

    def dive(x, lb, ub):
        lb2, ub2 = lb.copy(), ub.copy()
        for _ in range(len(groups) + 1):
            split = []
            for group in groups:
                zmax = max(x[t[1]] for t in group)
                if zmax >= 1 - 1e-6:
                    fix(group, max(group, key=lambda t: x[t[1]]), lb2, ub2)
                else:
                    split.append((zmax, group))
            if not split:
                return x
            group = max(split, key=lambda t: t[0])[1]
            pick = choose(group, x, ub2)
            if pick is None:
                return None
            fix(group, pick, lb2, ub2)
            sol = lp_solve(milp, lb2, ub2, "auto")
            if sol.status != OPTIMAL:
                return None
            x = sol.x
        return None

    def heuristic(x, lb, ub):
        calls[0] += 1
        if dive_first and calls[0] == 1:
            found = dive(x, lb, ub)
            if found is not None:
                return found
        return round_all(x, lb, ub)

    return heuristic


def extract_points(problem: TrimmedProblem, vmap: VariableMap, x) -> Dict[str, WorkingPoint]:
    points = {}
    for name in problem.graph.flipflops:
        choices = [(x[vmap.z[name, p.id]], -p.id, p) for p in problem.polygons[name]]
        p = max(choices, key=lambda t: (t[0], t[1]))[2]
        key = (name, p.id)
        s = float(max(x[vmap.s[key]], 0.0))
        h = float(max(x[vmap.h[key]], 0.0))
        if problem.model.is_stable(p):
            # any point of the plateau gives the same delay; claim the least
            s, h = p.s_l, p.h_l
        points[name] = WorkingPoint(p.id, s, h, float(p.plane(s, h)))
    points.update(problem.parked)
    return points


def _critical_brancher(problem, milp, vmap):
    """Branch on the flip-flop whose blend matters most for the period.

    A split flip-flop touching a stage row with a nonzero dual is on the
    critical structure; among those the one whose blended delay sits
    furthest below the model surface is chosen. Its polygons are then split
    by center on the axis where the active ones spread most, so each child
    forbids one side. Without duals the default variable rule applies.
    """
    ffs = problem.graph.flipflops
    rows: Dict[int, List[int]] = {i: [] for i in range(len(ffs))}
    for r, con in enumerate(milp.constraints):
        if con.name.startswith(("setup_", "hold_")):
            _, i, j = con.name.split("_")
            rows[int(i)].append(r)
            rows[int(j)].append(r)
    groups = [[(p, vmap.z[n, p.id], vmap.s[n, p.id], vmap.h[n, p.id]) for p in problem.polygons[n]]
              for n in ffs]

    def brancher(sol, lb, ub):
        if sol.duals is None:
            return None
        x = sol.x
        best = None
        for i, group in enumerate(groups):
            zs = [x[t[1]] for t in group]
            if max(zs) >= 1 - INT_TOL:
                continue
            s = sum(x[t[2]] for t in group)
            h = sum(x[t[3]] for t in group)
            blended = sum(t[0].plane.c * x[t[1]] + t[0].plane.c_s * x[t[2]] + t[0].plane.c_h * x[t[3]]
                          for t in group)
            cover = [t[0].plane(s, h) for t in group if ub[t[1]] > 0.5 and t[0].contains(s, h, 1e-7)]
            excess = min(cover) - blended if cover else math.inf
            critical = any(abs(sol.duals[r]) > 1e-9 for r in rows[i])
            key = (critical, excess, -i)
            if best is None or key > best[0]:
                best = (key, group, s, h)
        if best is None:
            return None
        _, group, s, h = best
        open_ = [t for t in group if ub[t[1]] > 0.5]
        active = [t for t in open_ if x[t[1]] > INT_TOL]
        centers = {t[1]: t[0].center for t in open_}
        spread = [max(centers[t[1]][a] for t in active) - min(centers[t[1]][a] for t in active)
                  for a in (0, 1)]
        axis = 0 if spread[0] >= spread[1] else 1
        cut = (s, h)[axis]
        left = [t for t in open_ if centers[t[1]][axis] < cut]
        right = [t for t in open_ if centers[t[1]][axis] >= cut]
        if any(x[t[1]] > INT_TOL for t in left) and any(x[t[1]] > INT_TOL for t in right):
            return [[(t[1], 0.0) for t in right], [(t[1], 0.0) for t in left]]
        top = max(active, key=lambda t: x[t[1]])
        return [[(t[1], 1.0 if t is top else 0.0) for t in group], [(top[1], 0.0)]]

    return brancher


def solve_problem(problem: TrimmedProblem, options: SolveOptions = SolveOptions()) -> Solution:
    start = time.perf_counter()
    milp, vmap = build_milp(problem)
    heuristic = _rounding_heuristic(problem, milp, vmap) if options.heuristic else None
    res = bb_solve(milp, node_limit=options.node_limit, gap_tol=options.gap_tol,
                   lp_method=options.lp_method, heuristic=heuristic,
                   time_limit=options.time_limit,
                   brancher=_critical_brancher(problem, milp, vmap) if options.heuristic else None)
    if res.status == INFEASIBLE:
        raise InfeasibleError(_explain_infeasible(problem))
    if res.status not in (OPTIMAL, FEASIBLE):
        raise SolverLimitError(f"solver stopped with status {res.status!r} and no feasible solution")
    points = extract_points(problem, vmap, res.x)
    T = max(float(res.x[vmap.T]), problem.t_floor)
    n_s = problem.original.n_ff
    return Solution(T=T, points=points, status=res.status, gap=res.gap, n_s=n_s,
                    n_t=problem.n_t, n_p=problem.model.n_polygons, g_t=problem.g_t,
                    removed_stages=problem.removed_stages, removed_ffs=problem.removed_ffs,
                    t_floor=problem.t_floor, nodes=res.nodes,
                    runtime=time.perf_counter() - start)


def _explain_infeasible(problem: TrimmedProblem) -> str:
    """Name a stage whose hold side cannot be met by any polygon choice."""
    for st in problem.graph.stages:
        need = min(p.h_l for p in problem.polygons[st.dst])
        best_d = max(p.value_range()[1] for p in problem.polygons[st.src])
        if need > best_d + st.d_min + FEAS_TOL:
            return (f"stage {st.src} -> {st.dst}: hold slack needs at least {need:g} ps "
                    f"but at most {best_d + st.d_min:g} ps is available")
    return "no polygon assignment satisfies the timing constraints"


def solve_min_period(graph: StageGraph, model: PiecewiseDelayModel,
                     options: SolveOptions = SolveOptions()) -> Solution:
    start = time.perf_counter()
    if options.trim:
        problem = trim(graph, model, compute_trim_bounds(graph, model))
    else:
        problem = untrimmed_problem(graph, model)
    sol = solve_problem(problem, options)
    bad = check_constraints(sol, graph, model)
    if bad:
        raise SolverLimitError("solution failed its own constraint check: " + "; ".join(bad))
    sol.runtime = time.perf_counter() - start
    return sol


# --------------------------------------------------------------------------
# validation and brute force


def check_constraints(solution: Solution, graph: StageGraph, model: PiecewiseDelayModel,
                      tol: float = 1e-6) -> List[str]:
    """Re-check one-hot choice, polygon membership, planes and stage inequalities."""
    failures = []
    pts = solution.points
    for name in graph.flipflops:
        if name not in pts:
            failures.append(f"{name}: no working point")
            continue
        wp = pts[name]
        try:
            p = model.by_id(wp.polygon_id)
        except KeyError:
            failures.append(f"{name}: unknown polygon {wp.polygon_id}")
            continue
        if not p.contains(wp.s, wp.h, tol):
            failures.append(f"{name}: ({wp.s:g}, {wp.h:g}) outside polygon {p.id}")
        if abs(p.plane(wp.s, wp.h) - wp.d_cq) > tol:
            failures.append(f"{name}: d_cq {wp.d_cq:g} off the plane of polygon {p.id}")
    if failures:
        return failures
    if solution.T < solution.t_floor - tol:
        failures.append(f"T={solution.T:g} below the folded floor {solution.t_floor:g}")
    for st in graph.stages:
        a, b = pts[st.src], pts[st.dst]
        if b.s + a.d_cq + st.d_max > solution.T + tol:
            failures.append(f"setup {st.src}->{st.dst}: {b.s:g} + {a.d_cq:g} + {st.d_max:g} "
                            f"> T={solution.T:g}")
        if b.h > a.d_cq + st.d_min + tol:
            failures.append(f"hold {st.src}->{st.dst}: {b.h:g} > {a.d_cq:g} + {st.d_min:g}")
    return failures


@dataclass
class Verdict:
    ok: bool
    failures: List[str]
    checks: Dict[str, bool]


def validate_solution(solution: Solution, graph: StageGraph, model: PiecewiseDelayModel,
                      oracle) -> Verdict:
    """Check a solution against the model (a) and against the oracle (b)-(d)."""
    checks = {}
    failures = []
    a = check_constraints(solution, graph, model)
    checks["constraints"] = not a
    failures += a
    real = {}
    b, c = [], []
    for name, wp in solution.points.items():
        r = oracle.query((wp.s, wp.h))
        if not r.is_valid:
            b.append(f"{name}: oracle metastable at ({wp.s:g}, {wp.h:g})")
            continue
        real[name] = r.clock_to_q
        if abs(r.clock_to_q - wp.d_cq) > model.d_th + 1e-9:
            c.append(f"{name}: model {wp.d_cq:g} vs oracle {r.clock_to_q:g} exceeds d_th={model.d_th:g}")
    checks["oracle_valid"] = not b
    checks["model_error"] = not c
    failures += b + c
    d = []
    for st in graph.stages:
        if st.src not in real or st.dst not in solution.points:
            continue
        wp = solution.points[st.dst]
        setup = solution.T - real[st.src] - st.d_max
        hold = real[st.src] + st.d_min
        if setup < wp.s - model.d_th - 1e-9:
            d.append(f"setup {st.src}->{st.dst}: implied slack {setup:g} < claimed {wp.s:g} - d_th")
        if hold < wp.h - model.d_th - 1e-9:
            d.append(f"hold {st.src}->{st.dst}: implied slack {hold:g} < claimed {wp.h:g} - d_th")
    checks["propagation"] = not d
    failures += d
    return Verdict(not failures, failures, checks)


def brute_force_min_period(problem: TrimmedProblem, limit: int = 10**6,
                           lp_method: str = "simplex") -> float:
    """Minimum T over every polygon assignment, one LP per assignment."""
    count = problem.assignment_count()
    if count > limit:
        raise EnumerationLimitError(f"{count} assignments exceed the limit of {limit}")
    milp, vmap = build_milp(problem)
    names = problem.graph.flipflops
    choices = [[vmap.z[n, p.id] for p in problem.polygons[n]] for n in names]
    all_z = [zk for group in choices for zk in group]
    best = math.inf
    lb0 = np.array(milp.lb)
    ub0 = np.array(milp.ub)
    for combo in itertools.product(*choices):
        lb, ub = lb0.copy(), ub0.copy()
        lb[all_z] = ub[all_z] = 0.0
        lb[list(combo)] = ub[list(combo)] = 1.0
        sol = lp_solve(milp, lb, ub, lp_method)
        if sol.status == OPTIMAL:
            best = min(best, sol.objective)
    if not names:
        best = problem.t_floor
    if math.isinf(best):
        raise InfeasibleError("no polygon assignment is feasible")
    return max(best, problem.t_floor)
