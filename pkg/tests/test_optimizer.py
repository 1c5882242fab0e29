import dataclasses
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flopslack.circuits import Stage, StageGraph
from flopslack.errors import EnumerationLimitError, InfeasibleError
from flopslack.model import RECTANGLE, PiecewiseDelayModel, PlaneCoefficients, Polygon
from flopslack.optimizer import (SolveOptions, WorkingPoint, brute_force_min_period,
                                 check_constraints, compute_trim_bounds, solve_min_period, trim,
                                 untrimmed_problem, validate_solution)

from helpers import cc1_graph, cc1_model, cc1_oracle, random_small_model, small_circuit


def flat_model(h_l=30.0):
    p = Polygon(0, RECTANGLE, 10, 200, h_l, 200, PlaneCoefficients(100, 0, 0))
    return PiecewiseDelayModel((p,), 100, 200, 2, 5)


def test_trim_bounds_arithmetic():
    g = cc1_graph()
    b = compute_trim_bounds(g, cc1_model())
    assert b.t_low == 610 and b.t_high == 900
    assert b.s_range["FF2"] == (0, 300) and b.h_range["FF2"] == (150, 250)
    assert b.s_range["FF1"] == (10, 200) and b.h_range["FF1"] == (30, 200)


def test_cc1_optimum():
    sol = solve_min_period(cc1_graph(), cc1_model())
    assert sol.T == pytest.approx(610, abs=1e-6)
    assert sol.status == "optimal"
    assert sol.points["FF1"].polygon_id == 0 and sol.points["FF2"].polygon_id == 1
    assert check_constraints(sol, cc1_graph(), cc1_model()) == []


def test_cc1_untrimmed_and_brute_force():
    g, m = cc1_graph(), cc1_model()
    assert solve_min_period(g, m, SolveOptions(trim=False)).T == pytest.approx(610, abs=1e-6)
    assert brute_force_min_period(untrimmed_problem(g, m)) == pytest.approx(610, abs=1e-6)


def test_cc1_enumeration_by_hand():
    # each assignment reduces to max-of-constants: T >= s_j + d_i + dmax over stages,
    # with s_j at its polygon's lower edge, and d_i the source's constant delay
    g, m = cc1_graph(), cc1_model()
    s_low = {p.id: p.s_l for p in m.polygons}
    delay = {p.id: p.plane.c for p in m.polygons}
    best = min(
        max(s_low[a[st.dst]] + delay[a[st.src]] + st.d_max for st in g.stages)
        for ids in itertools.product((0, 1), repeat=3)
        for a in [dict(zip(g.flipflops, ids))]
        # hold needs h_j <= d_i + dmin; h_l = 30 and dmin = 50, so always met
    )
    assert best == 610


def test_cc1_validates_against_exact_oracle():
    g, m = cc1_graph(), cc1_model()
    v = validate_solution(solve_min_period(g, m), g, m, cc1_oracle())
    assert v.ok, v.failures
    assert all(v.checks.values())


def test_metastable_working_point_fails_check_b():
    g, m = cc1_graph(), cc1_model()
    sol = solve_min_period(g, m)
    bad = dict(sol.points)
    bad["FF1"] = WorkingPoint(1, 5.0, 40.0, 120.0)  # s=5 lies left of the valid region
    v = validate_solution(dataclasses.replace(sol, points=bad), g, m, cc1_oracle())
    assert not v.ok and not v.checks["oracle_valid"]
    assert any("FF1" in f for f in v.failures)


def test_single_ff_without_stages():
    g = StageGraph(("A",), ())
    sol = solve_min_period(g, flat_model())
    assert sol.status == "optimal" and sol.T == pytest.approx(sol.t_floor)
    assert brute_force_min_period(untrimmed_problem(g, flat_model())) == 0.0


def test_box_covering_everything_removes_nothing():
    g, m = cc1_graph(), cc1_model()
    b = compute_trim_bounds(g, m)
    wide = dataclasses.replace(b, s_range={n: (0, 1e9) for n in g.flipflops},
                               h_range={n: (0, 1e9) for n in g.flipflops})
    p = trim(g, m, wide)
    assert {n: len(v) for n, v in p.polygons.items()} == {n: 2 for n in g.flipflops}
    assert p.removed_stages == 0 and p.removed_ffs == 0 and p.t_floor == 0


def test_stable_only_stages_are_folded():
    # one stable polygon: every stage is removable and folds into t_floor
    g = StageGraph(("A", "B"), (Stage("A", "B", 300, 100), Stage("B", "A", 200, 100)))
    m = flat_model()
    p = trim(g, m, compute_trim_bounds(g, m))
    assert p.removed_stages == 2 and p.n_t == 0
    assert p.t_floor == pytest.approx(100 + 300 + 10)
    assert solve_min_period(g, m).T == pytest.approx(410)


def test_infeasible_hold_names_stage():
    g = StageGraph(("A",), (Stage("A", "A", 100, 0),))
    with pytest.raises(InfeasibleError, match="A -> A"):
        solve_min_period(g, flat_model(h_l=150))


def test_enumeration_limit():
    g = small_circuit(1, max_ff=4)
    with pytest.raises(EnumerationLimitError):
        brute_force_min_period(untrimmed_problem(g, random_small_model(1, 6)), limit=1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_matches_brute_force(seed, n_poly):
    g, m = small_circuit(seed, max_ff=3), random_small_model(seed, n_poly)
    try:
        want = brute_force_min_period(untrimmed_problem(g, m))
    except InfeasibleError:
        with pytest.raises(InfeasibleError):
            solve_min_period(g, m)
        return
    sol = solve_min_period(g, m)
    assert sol.T == pytest.approx(want, abs=1e-6)
    assert check_constraints(sol, g, m) == []
    assert sol.n_t <= sol.n_s and sol.g_t <= sol.n_p


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 100))
def test_longer_stage_never_lowers_period(seed, extra):
    g, m = small_circuit(seed, max_ff=3), random_small_model(seed, 4)
    st0 = g.stages[0]
    longer = StageGraph(g.flipflops, (Stage(st0.src, st0.dst, st0.d_max + extra, st0.d_min),)
                        + g.stages[1:])
    try:
        base = solve_min_period(g, m).T
    except InfeasibleError:
        return
    assert solve_min_period(longer, m).T >= base - 1e-6


def test_ref45_solution_validates(ref45, ref45_model):
    from flopslack.circuits import generate_random_stage_graph

    g = generate_random_stage_graph(20, 40, seed=11)
    sol = solve_min_period(g, ref45_model)
    v = validate_solution(sol, g, ref45_model, ref45)
    assert v.ok, v.failures
    for name, wp in sol.points.items():
        assert ref45_model.by_id(wp.polygon_id).contains(wp.s, wp.h, 1e-6)
