"""Small mixed-integer linear programming toolkit.

``MilpModel`` holds variables, linear constraints and a linear objective to
minimize. ``lp_solve`` solves the continuous relaxation with a dense
two-phase primal simplex (or HiGHS for large models) and
``bb_solve`` runs best-first branch-and-bound over the binaries.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

CONTINUOUS = "continuous"
BINARY = "binary"
LE, GE, EQ = "<=", ">=", "="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"
FEASIBLE = "feasible"  # node limit reached with an incumbent
NO_SOLUTION = "no-solution"

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
INT_TOL = 1e-6


@dataclass(frozen=True)
class Constraint:
    index: np.ndarray
    coef: np.ndarray
    sense: str
    rhs: float
    name: str


class MilpModel:
    """Minimization model ``min c.x  s.t.  rows, lb <= x <= ub, some x binary``."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.var_names: List[str] = []
        self.kinds: List[str] = []
        self.lb: List[float] = []
        self.ub: List[float] = []
        self.constraints: List[Constraint] = []
        self.objective: Dict[int, float] = {}
        self._by_name: Dict[str, int] = {}

    # -- building --------------------------------------------------------

    def add_var(self, name: str, kind: str = CONTINUOUS, lb: float = 0.0,
                ub: float = math.inf) -> int:
        if name in self._by_name:
            raise ValueError(f"duplicate variable {name!r}")
        if kind == BINARY:
            lb, ub = 0.0, 1.0
        elif kind != CONTINUOUS:
            raise ValueError(f"unknown variable kind {kind!r}")
        if math.isnan(lb) or math.isnan(ub) or lb > ub:
            raise ValueError(f"invalid bounds [{lb}, {ub}] for {name!r}")
        self._by_name[name] = len(self.var_names)
        self.var_names.append(name)
        self.kinds.append(kind)
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        return len(self.var_names) - 1

    def _terms(self, terms) -> Tuple[np.ndarray, np.ndarray]:
        acc: Dict[int, float] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for j, a in items:
            if isinstance(j, str):
                j = self._by_name[j]
            if not 0 <= j < len(self.var_names):
                raise ValueError(f"term references undeclared variable {j}")
            a = float(a)
            if not math.isfinite(a):
                raise ValueError("coefficients must be finite")
            acc[j] = acc.get(j, 0.0) + a
        idx = np.array(sorted(acc), dtype=int)
        return idx, np.array([acc[j] for j in idx], dtype=float)

    def add_constraint(self, terms, sense: str, rhs: float, name: Optional[str] = None) -> int:
        if sense not in (LE, GE, EQ):
            raise ValueError(f"unknown sense {sense!r}")
        if not math.isfinite(rhs):
            raise ValueError("right-hand side must be finite")
        idx, coef = self._terms(terms)
        name = name or f"c{len(self.constraints)}"
        self.constraints.append(Constraint(idx, coef, sense, float(rhs), name))
        return len(self.constraints) - 1

    def set_objective(self, terms):
        idx, coef = self._terms(terms)
        self.objective = dict(zip(idx.tolist(), coef.tolist()))
        self._highs = None

    # -- queries ---------------------------------------------------------

    @property
    def n_vars(self):
        return len(self.var_names)

    @property
    def n_constraints(self):
        return len(self.constraints)

    @property
    def binaries(self) -> List[int]:
        return [j for j, k in enumerate(self.kinds) if k == BINARY]

    def index_of(self, name: str) -> int:
        return self._by_name[name]

    def cost_vector(self) -> np.ndarray:
        c = np.zeros(self.n_vars)
        for j, a in self.objective.items():
            c[j] = a
        return c

    def objective_value(self, x) -> float:
        return float(sum(a * x[j] for j, a in self.objective.items()))

    def dense_rows(self) -> np.ndarray:
        A = np.zeros((self.n_constraints, self.n_vars))
        for i, con in enumerate(self.constraints):
            A[i, con.index] = con.coef
        return A

    def sparse_rows(self):
        """Constraint matrix as CSR; cached until the next ``add_constraint``."""
        cache = getattr(self, "_csr", None)
        if cache is not None and cache[0] == (self.n_constraints, self.n_vars):
            return cache[1]
        from scipy.sparse import csr_matrix

        lengths = [len(c.index) for c in self.constraints]
        rows = np.repeat(np.arange(self.n_constraints), lengths)
        cols = np.concatenate([c.index for c in self.constraints] or [np.zeros(0, int)])
        vals = np.concatenate([c.coef for c in self.constraints] or [np.zeros(0)])
        csr = csr_matrix((vals, (rows, cols)), shape=(self.n_constraints, self.n_vars))
        self._csr = ((self.n_constraints, self.n_vars), csr)
        return csr

    def _row_data(self):
        cache = getattr(self, "_rows", None)
        if cache is None or len(cache[0]) != self.n_constraints:
            senses = np.array([c.sense for c in self.constraints], dtype=object)
            rhs = np.array([c.rhs for c in self.constraints], float)
            cache = (senses, rhs)
            self._rows = cache
        return cache

    def max_violation(self, x, lb=None, ub=None) -> float:
        """Largest constraint or bound violation of ``x`` (0 when feasible)."""
        x = np.asarray(x, float)
        lb = np.asarray(self.lb if lb is None else lb, float)
        ub = np.asarray(self.ub if ub is None else ub, float)
        worst = float(max(np.max(lb - x, initial=0.0), np.max(x - ub, initial=0.0)))
        if not self.constraints:
            return worst
        senses, rhs = self._row_data()
        lhs = self.sparse_rows() @ x
        viol = np.where(senses == LE, lhs - rhs, np.where(senses == GE, rhs - lhs, np.abs(lhs - rhs)))
        return max(worst, float(np.max(viol)))


@dataclass
class LpSolution:
    status: str
    objective: float = math.nan
    x: Optional[np.ndarray] = None
    iterations: int = 0
    #: row duals in constraint order when the backend reports them
    duals: Optional[np.ndarray] = None


@dataclass
class MilpSolution:
    status: str
    objective: float = math.nan
    x: Optional[np.ndarray] = None
    gap: float = math.inf
    nodes: int = 0
    bound: float = -math.inf
    lp_solves: int = 0


# --------------------------------------------------------------------------
# dense two-phase simplex


class _Tableau:
    """Tableau over standard form ``min c.y, A y = b, y >= 0`` with ``b >= 0``."""

    def __init__(self, A, b, basis, max_iter):
        m, n = A.shape
        self.T = np.hstack([A, b[:, None]]).astype(float)
        self.basis = list(basis)
        self.n = n
        self.max_iter = max_iter
        self.iterations = 0

    def set_cost(self, c):
        z = np.append(np.asarray(c, float), 0.0)
        for i, bvar in enumerate(self.basis):
            if z[bvar] != 0.0:
                z -= z[bvar] * self.T[i]
        self.z = z

    def pivot(self, r, k):
        T = self.T
        T[r] /= T[r, k]
        col = T[:, k].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, k] = 0.0
        T[r, k] = 1.0
        self.z -= self.z[k] * T[r]
        self.z[k] = 0.0
        self.basis[r] = k

    def run(self, allowed) -> str:
        """Iterate to optimality over columns where ``allowed`` is True."""
        T = self.T
        bland = False
        stall = 0
        piv_tol = 1e-9
        while True:
            if self.iterations >= self.max_iter:
                return ITERATION_LIMIT
            rc = np.where(allowed, self.z[:-1], 0.0)
            if rc.size == 0:
                return OPTIMAL  # every variable was fixed by its bounds
            if bland:
                cands = np.flatnonzero(rc < -OPT_TOL)
                if len(cands) == 0:
                    return OPTIMAL
                k = int(cands[0])
            else:
                k = int(np.argmin(rc))
                if rc[k] >= -OPT_TOL:
                    return OPTIMAL
            col = T[:, k]
            pos = col > piv_tol
            if not pos.any():
                return UNBOUNDED
            ratios = np.full(len(col), np.inf)
            ratios[pos] = T[pos, -1] / col[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
            # smallest basic index on ties, which together with Bland pricing prevents cycling
            r = int(min(ties, key=lambda i: self.basis[i]))
            if best <= 1e-12:
                stall += 1
                if stall > 50:
                    bland = True
            else:
                stall = 0
            self.pivot(r, k)
            self.iterations += 1


def _standard_form(model: MilpModel, lb, ub):
    """Map ``x = x0 + M y`` with ``y >= 0`` and build equality rows.

    Returns (A, b, c, x0, M, n_struct, slack_cols) or None if bounds are crossed.
    """
    n = model.n_vars
    x0 = np.zeros(n)
    cols = []  # (var, sign)
    extra_rows = []  # (column index in y, upper limit)
    for j in range(n):
        lo, hi = lb[j], ub[j]
        if lo > hi + FEAS_TOL:
            return None
        if math.isfinite(lo) and math.isfinite(hi) and hi - lo <= 0.0:
            x0[j] = lo
        elif math.isfinite(lo):
            x0[j] = lo
            cols.append((j, 1.0))
            if math.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif math.isfinite(hi):
            x0[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    ny = len(cols)
    M = np.zeros((n, ny))
    for k, (j, sgn) in enumerate(cols):
        M[j, k] = sgn
    A0 = model.dense_rows()
    senses = [con.sense for con in model.constraints]
    rhs = np.array([con.rhs for con in model.constraints], float)
    Ay = A0 @ M
    b = rhs - A0 @ x0
    # upper-bound rows for shifted variables
    for k, limit in extra_rows:
        row = np.zeros(ny)
        row[k] = 1.0
        Ay = np.vstack([Ay, row])
        b = np.append(b, limit)
        senses.append(LE)
    m = len(senses)
    n_slack = sum(1 for s in senses if s != EQ)
    A = np.zeros((m, ny + n_slack))
    A[:, :ny] = Ay
    slack_of_row = [-1] * m
    k = ny
    for i, s in enumerate(senses):
        if s == LE:
            A[i, k] = 1.0
        elif s == GE:
            A[i, k] = -1.0
        if s != EQ:
            slack_of_row[i] = k
            k += 1
    neg = b < 0
    A[neg] *= -1.0
    b = np.where(neg, -b, b)
    c = np.concatenate([model.cost_vector() @ M, np.zeros(n_slack)])
    return A, b, c, x0, M, slack_of_row


def _simplex(model: MilpModel, lb, ub, max_iter=None) -> LpSolution:
    sf = _standard_form(model, lb, ub)
    if sf is None:
        return LpSolution(INFEASIBLE)
    A, b, c, x0, M, slack_of_row = sf
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    # a slack with +1 coefficient can start basic; other rows get an artificial
    basis = []
    art_rows = []
    for i in range(m):
        k = slack_of_row[i]
        if k >= 0 and A[i, k] > 0:
            basis.append(k)
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    A_full = np.hstack([A, np.zeros((m, n_art))])
    for a, i in enumerate(art_rows):
        A_full[i, n + a] = 1.0
        basis[i] = n + a
    tab = _Tableau(A_full, b, basis, max_iter)
    scale = 1.0 + float(np.max(np.abs(b), initial=0.0))
    if n_art:
        tab.set_cost(np.concatenate([np.zeros(n), np.ones(n_art)]))
        status = tab.run(np.ones(n + n_art, bool))
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, iterations=tab.iterations)
        if -tab.z[-1] > FEAS_TOL * scale:
            return LpSolution(INFEASIBLE, iterations=tab.iterations)
        # drive zero-level artificials out of the basis; drop rows that are redundant
        keep = []
        for r in range(m):
            if tab.basis[r] >= n:
                row = tab.T[r, :n]
                k = int(np.argmax(np.abs(row)))
                if abs(row[k]) > 1e-9:
                    tab.pivot(r, k)
                    keep.append(r)
            else:
                keep.append(r)
        tab.T = np.hstack([tab.T[keep][:, :n], tab.T[keep][:, -1:]])
        tab.basis = [tab.basis[r] for r in keep]
    tab.set_cost(c)
    status = tab.run(np.ones(n, bool))
    if status != OPTIMAL:
        return LpSolution(status, iterations=tab.iterations)
    # recompute the basic values from the original columns to shed pivoting error
    y = np.zeros(n)
    B = A[:, tab.basis]
    try:
        if len(tab.basis) == m:
            y_b = np.linalg.solve(B, b)
        else:
            y_b = np.linalg.lstsq(B, b, rcond=None)[0]
        if np.min(y_b, initial=0.0) < -FEAS_TOL * scale:
            raise np.linalg.LinAlgError
        y[tab.basis] = np.maximum(y_b, 0.0)
    except np.linalg.LinAlgError:
        y[tab.basis] = np.maximum(tab.T[:, -1], 0.0)
    x = x0 + M @ y[:M.shape[1]]
    return LpSolution(OPTIMAL, model.objective_value(x), x, tab.iterations)


class _HighsSession:
    """One HiGHS instance per model, so later solves start from the last basis."""

    def __init__(self, model: MilpModel):
        import highspy

        self.highspy = highspy
        self.shape = (model.n_constraints, model.n_vars)
        inf = highspy.kHighsInf
        A = model.sparse_rows()
        senses = np.array([c.sense for c in model.constraints], dtype=object)
        rhs = np.array([c.rhs for c in model.constraints], float)
        lp = highspy.HighsLp()
        lp.num_col_, lp.num_row_ = model.n_vars, model.n_constraints
        lp.col_cost_ = model.cost_vector()
        lp.col_lower_ = np.zeros(model.n_vars)
        lp.col_upper_ = np.full(model.n_vars, inf)
        lp.row_lower_ = np.where(senses == LE, -inf, rhs)
        lp.row_upper_ = np.where(senses == GE, inf, rhs)
        lp.a_matrix_.format_ = highspy.MatrixFormat.kRowwise
        lp.a_matrix_.start_ = A.indptr
        lp.a_matrix_.index_ = A.indices
        lp.a_matrix_.value_ = A.data
        self.h = highspy.Highs()
        self.h.setOptionValue("output_flag", False)
        self.h.setOptionValue("primal_feasibility_tolerance", 1e-9)
        self.h.setOptionValue("dual_feasibility_tolerance", 1e-9)
        self.h.passModel(lp)
        self.cols = np.arange(model.n_vars, dtype=np.int32)

    def solve(self, model: MilpModel, lb, ub) -> LpSolution:
        inf = self.highspy.kHighsInf
        lo = np.where(np.isinf(lb), -inf, lb)
        hi = np.where(np.isinf(ub), inf, ub)
        self.h.changeColsBounds(len(self.cols), self.cols, lo, hi)
        self.h.run()
        code = self.h.getModelStatus()
        S = self.highspy.HighsModelStatus
        iters = int(self.h.getInfo().simplex_iteration_count)
        if code == S.kOptimal:
            sol = self.h.getSolution()
            x = np.asarray(sol.col_value, float)
            return LpSolution(OPTIMAL, model.objective_value(x), x, iters,
                              np.asarray(sol.row_dual, float))
        status = {S.kInfeasible: INFEASIBLE, S.kUnbounded: UNBOUNDED}.get(code, ITERATION_LIMIT)
        return LpSolution(status, iterations=iters)


def _highs(model: MilpModel, lb, ub) -> LpSolution:
    session = getattr(model, "_highs", None)
    if session is None or session.shape != (model.n_constraints, model.n_vars):
        session = model._highs = _HighsSession(model)
    sol = session.solve(model, lb, ub)
    if sol.status == ITERATION_LIMIT:
        # a stale basis can stall; retry once from scratch
        session = model._highs = _HighsSession(model)
        sol = session.solve(model, lb, ub)
    return sol


#: models with more tableau cells than this go to HiGHS under method="auto"
AUTO_DENSE_LIMIT = 250_000


def lp_solve(model: MilpModel, lb=None, ub=None, method: str = "auto",
             max_iter: Optional[int] = None) -> LpSolution:
    """Solve the continuous relaxation (binaries relaxed to [0, 1]).

    ``lb``/``ub`` override the model's bounds (used by branch-and-bound).
    ``method`` is "simplex", "highs" or "auto". A result is only reported
    optimal if it passes an independent residual check at ``FEAS_TOL``.
    """
    lb = np.asarray(model.lb if lb is None else lb, float)
    ub = np.asarray(model.ub if ub is None else ub, float)
    if method == "auto":
        cells = (model.n_constraints + model.n_vars) * (2 * model.n_vars + model.n_constraints)
        method = "simplex" if cells <= AUTO_DENSE_LIMIT else "highs"
    if method == "simplex":
        sol = _simplex(model, lb, ub, max_iter)
    elif method == "highs":
        sol = _highs(model, lb, ub)
    else:
        raise ValueError(f"unknown LP method {method!r}")
    if sol.status == OPTIMAL and method == "highs" and model.max_violation(sol.x, lb, ub) > FEAS_TOL:
        # a warm start can end on a poorly conditioned basis; retry from scratch
        model._highs = None
        sol = _highs(model, lb, ub)
    if sol.status == OPTIMAL:
        viol = model.max_violation(sol.x, lb, ub)
        if viol > FEAS_TOL:
            logger.warning("LP residual %.3g exceeds tolerance; reporting iteration-limit", viol)
            return LpSolution(ITERATION_LIMIT, iterations=sol.iterations)
    return sol


# --------------------------------------------------------------------------
# branch and bound

Heuristic = Callable[[np.ndarray, np.ndarray, np.ndarray], Optional[np.ndarray]]
Brancher = Callable[[LpSolution, np.ndarray, np.ndarray], Optional[List[List[Tuple[int, float]]]]]


def _fractional(x, binaries):
    f = x[binaries] - np.floor(x[binaries])
    frac = np.minimum(f, 1 - f)
    return binaries[frac > INT_TOL], f[frac > INT_TOL]


def bb_solve(model: MilpModel, node_limit: int = 100_000, gap_tol: float = 1e-6,
             lp_method: str = "auto", heuristic: Optional[Heuristic] = None,
             time_limit: Optional[float] = None, heuristic_every: int = 10,
             brancher: Optional[Brancher] = None) -> MilpSolution:
    """Best-first branch-and-bound on LP relaxations.

    Branches on the fractional binary nearest 0.5 (lowest index on ties) and
    prunes nodes whose bound is within 1e-9 of the incumbent. ``heuristic``
    may turn a relaxed solution into a feasible one; it runs at the root and
    then every ``heuristic_every`` nodes. ``brancher`` may replace the
    variable dichotomy with its own children, each a list of
    (variable index, fixed value) pairs; returning None falls back.
    """
    binaries = np.array(model.binaries, dtype=int)
    lb0 = np.array(model.lb, float)
    ub0 = np.array(model.ub, float)
    start = time.perf_counter()
    incumbent: Optional[np.ndarray] = None
    best = math.inf
    counter = itertools.count()
    nodes = 0
    lp_solves = 0

    def offer(x):
        nonlocal incumbent, best
        if x is None:
            return
        x = np.asarray(x, float).copy()
        x[binaries] = np.round(x[binaries])
        if model.max_violation(x) > FEAS_TOL:
            return
        obj = model.objective_value(x)
        if obj < best - 1e-12:
            incumbent, best = x, obj
            logger.debug("node %d: incumbent %.9g (bound %.9g)", nodes, obj, bound)

    root = lp_solve(model, lb0, ub0, lp_method)
    lp_solves += 1
    if root.status != OPTIMAL:
        status = root.status if root.status in (INFEASIBLE, UNBOUNDED) else ITERATION_LIMIT
        return MilpSolution(status, lp_solves=lp_solves)
    # nodes whose bounds agree within the gap tolerance are taken deepest
    # first, so a plateau of equal bounds is dived rather than swept
    def entry(bnd, depth, lb, ub, sol):
        key = math.floor(bnd / gap_tol) if gap_tol > 0 else bnd
        return (key, -depth, next(counter), bnd, lb, ub, sol)

    heap = [entry(root.objective, 0, lb0, ub0, root)]
    unresolved: List[float] = []
    bound = root.objective
    limit_hit = False
    while heap:
        item = heapq.heappop(heap)
        depth, node_bound, lb, ub, sol = -item[1], item[3], item[4], item[5], item[6]
        if node_bound >= best - 1e-9:
            continue
        lower = min([node_bound] + [e[3] for e in heap] + unresolved)
        if best - lower <= gap_tol:
            heapq.heappush(heap, item)
            break
        if nodes >= node_limit or (time_limit is not None and time.perf_counter() - start > time_limit):
            heapq.heappush(heap, item)
            limit_hit = True
            break
        nodes += 1
        x = sol.x
        frac_idx, frac_val = _fractional(x, binaries)
        if len(frac_idx) == 0:
            offer(x)
            continue
        if heuristic is not None and (nodes == 1 or nodes % heuristic_every == 0):
            offer(heuristic(x, lb, ub))
        children = brancher(sol, lb, ub) if brancher is not None else None
        if not children:
            dist = np.abs(frac_val - 0.5)
            j = int(frac_idx[np.flatnonzero(dist <= dist.min() + 1e-12)[0]])
            children = [[(j, 0.0)], [(j, 1.0)]]
        for fixes in children:
            clb, cub = lb.copy(), ub.copy()
            for j, val in fixes:
                clb[j] = cub[j] = val
            child = lp_solve(model, clb, cub, lp_method)
            lp_solves += 1
            if child.status == OPTIMAL and child.objective < best - 1e-9:
                heapq.heappush(heap, entry(child.objective, depth + 1, clb, cub, child))
            elif child.status not in (OPTIMAL, INFEASIBLE):
                # not proven empty: its region keeps the parent's bound
                unresolved.append(node_bound)
    live = [e[3] for e in heap if e[3] < best - 1e-9] + [b for b in unresolved if b < best - 1e-9]
    bound = min(live + [best]) if incumbent is not None else min(live, default=bound)
    if incumbent is None:
        if limit_hit or unresolved:
            return MilpSolution(NO_SOLUTION, nodes=nodes, bound=bound, lp_solves=lp_solves)
        return MilpSolution(INFEASIBLE, nodes=nodes, lp_solves=lp_solves)
    gap = max(0.0, best - bound)
    status = OPTIMAL if gap <= gap_tol else FEASIBLE
    return MilpSolution(status, best, incumbent, gap, nodes, bound, lp_solves)


# --------------------------------------------------------------------------
# LP text export


def _num(v: float) -> str:
    return f"{v:.12g}"


def _expr(pairs) -> str:
    parts = []
    for name, a in pairs:
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {_num(abs(a))} {name}")
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def export_lp_text(model: MilpModel) -> str:
    """Write the model in the conventional LP file format."""
    names = model.var_names
    out = [f"\\ {model.name}", "Minimize"]
    obj = [(names[j], a) for j, a in sorted(model.objective.items())]
    out.append(f" obj: {_expr(obj)}")
    if model.constraints:
        out.append("Subject To")
        for con in model.constraints:
            terms = [(names[j], a) for j, a in zip(con.index.tolist(), con.coef.tolist())]
            out.append(f" {con.name}: {_expr(terms)} {con.sense} {_num(con.rhs)}")
    out.append("Bounds")
    for j, name in enumerate(names):
        if model.kinds[j] == BINARY:
            continue
        lo, hi = model.lb[j], model.ub[j]
        if math.isinf(lo) and math.isinf(hi):
            out.append(f" {name} free")
        elif math.isinf(hi):
            out.append(f" {name} >= {_num(lo)}")
        elif math.isinf(lo):
            out.append(f" -inf <= {name} <= {_num(hi)}")
        else:
            out.append(f" {_num(lo)} <= {name} <= {_num(hi)}")
    bins = [names[j] for j in model.binaries]
    if bins:
        out.append("Binary")
        out.extend(f" {n}" for n in bins)
    out.append("End")
    return "\n".join(out) + "\n"
