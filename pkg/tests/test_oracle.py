import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flopslack.errors import DomainError, ParseError
from flopslack.oracle import (METASTABLE, REF45, AnalyticOracle, AnalyticParams, DelaySample,
                              SlackPoint, Valid, analytic_delay, dump_grid, grid_oracle,
                              parse_grid_dump)

slack = st.floats(0, 300, allow_nan=False)


def closed_form(s, h):
    return 100 + 1000 * math.exp(-s / 8) + 1000 * math.exp(-h / 8)


def test_plateau_value():
    assert analytic_delay((150, 150), REF45) == pytest.approx(100.0, abs=1e-4)


def test_paper_point_matches_closed_form():
    assert analytic_delay((20, 150), REF45) == pytest.approx(182.085, abs=1e-3)
    assert analytic_delay((20, 150), REF45) == pytest.approx(closed_form(20, 150), rel=1e-12)


def test_boundary_crossing_at_8_ln_10():
    o = AnalyticOracle()
    assert not o.query((18.42, 150)).is_valid
    assert o.query((18.43, 150)).is_valid
    assert 18.42 < 8 * math.log(10) < 18.43


def test_query_responses():
    o = AnalyticOracle()
    r = o.query((150, 150))
    assert r.is_valid and r.clock_to_q == pytest.approx(100.0, abs=1e-4)
    assert o.query((0, 150)) is METASTABLE


def test_out_of_domain_is_error():
    with pytest.raises(DomainError):
        AnalyticOracle().query((301, 10))
    with pytest.raises(DomainError):
        SlackPoint(-1, 0)


@pytest.mark.parametrize("kw", [dict(d0=0), dict(tau_s=0), dict(amp_h=-1), dict(f_bar=50),
                                dict(domain_max=0)])
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        AnalyticParams(**kw)


def test_vectorized_delays_match_scalar():
    o = AnalyticOracle()
    s = np.array([0, 18, 20, 40, 150.0])
    h = np.array([150, 150, 20, 30, 150.0])
    vec = o.delays(s, h)
    for k in range(len(s)):
        r = o.query((s[k], h[k]))
        assert (np.isnan(vec[k]) and not r.is_valid) or vec[k] == pytest.approx(r.clock_to_q)


@given(slack, slack)
def test_symmetric(s, h):
    assert analytic_delay((s, h), REF45) == pytest.approx(analytic_delay((h, s), REF45), rel=1e-12)


@given(slack, slack, st.floats(1e-3, 50))
def test_monotone_in_each_slack(s, h, d):
    o = AnalyticOracle()
    base = o.query((s, h))
    for other in (o.query((min(s + d, 300), h)), o.query((s, min(h + d, 300)))):
        if base.is_valid and other.is_valid:
            assert other.clock_to_q <= base.clock_to_q
        if base.is_valid:
            assert other.is_valid


@given(slack, slack)
def test_valid_delays_bounded(s, h):
    r = AnalyticOracle().query((s, h))
    if r.is_valid:
        assert 0 < r.clock_to_q <= REF45.f_bar


def _grid(values, f_bar=200.0):
    return grid_oracle([DelaySample(SlackPoint(s, h), Valid(d) if d is not None else METASTABLE)
                        for (s, h), d in values.items()], f_bar)


def test_grid_constant():
    g = _grid({(s, h): 100.0 for s in (0, 10, 20) for h in (0, 10)})
    assert g.query((13.7, 4.2)).clock_to_q == pytest.approx(100.0)


def test_grid_bilinear_center():
    g = _grid({(0, 0): 100.0, (10, 0): 110.0, (0, 10): 110.0, (10, 10): 120.0})
    assert g.query((5, 5)).clock_to_q == pytest.approx(110.0)


def test_grid_exact_node():
    g = _grid({(0, 0): 100.0, (10, 0): 110.0, (0, 10): 105.0, (10, 10): 120.0})
    assert g.query((0, 10)).clock_to_q == 105.0


def test_grid_metastable_neighbor_poisons_cell():
    g = _grid({(0, 0): None, (10, 0): 110.0, (0, 10): 110.0, (10, 10): 120.0})
    assert not g.query((5, 5)).is_valid
    assert g.query((10, 10)).clock_to_q == 120.0


def test_grid_interpolated_over_threshold_is_metastable():
    g = _grid({(0, 0): 100.0, (10, 0): 100.0, (0, 10): 100.0, (10, 10): 100.0}, f_bar=99.0)
    assert not g.query((5, 5)).is_valid


def test_grid_incomplete():
    with pytest.raises(ValueError):
        _grid({(0, 0): 100.0, (10, 0): 100.0, (0, 10): 100.0})


def test_grid_dump_round_trip():
    o = AnalyticOracle()
    axis = [0, 10, 20, 40, 80]
    g = parse_grid_dump(dump_grid(o, axis, axis), REF45.f_bar)
    for s in axis:
        for h in axis:
            a, b = o.query((s, h)), g.query((s, h))
            assert a.is_valid == b.is_valid
            if a.is_valid:
                assert a.clock_to_q == b.clock_to_q


def test_grid_dump_parse_error_has_line():
    with pytest.raises(ParseError) as exc:
        parse_grid_dump("0 0 100\n0 1\n", 200.0)
    assert exc.value.line == 2


@settings(max_examples=50)
@given(st.floats(0, 10), st.floats(0, 10))
def test_grid_replays_bilinear_surface(s, h):
    # a bilinear surface is reproduced exactly by bilinear interpolation
    f = lambda s, h: 100 + 2 * s + 3 * h + 0.1 * s * h  # noqa: E731
    g = _grid({(a, b): f(a, b) for a in (0, 5, 10) for b in (0, 5, 10)})
    assert g.query((s, h)).clock_to_q == pytest.approx(f(s, h))
