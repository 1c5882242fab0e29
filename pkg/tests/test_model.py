import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from flopslack.errors import DegenerateFitError, ParseError
from flopslack.model import (RECTANGLE, TRIANGLE, PiecewiseDelayModel, PlaneCoefficients,
                             Polygon, chosen_corners, fit_plane, parse_model, serialize_model,
                             validate_model)
from flopslack.oracle import REF45, AnalyticOracle, FunctionOracle, analytic_delay

coord = st.floats(0, 200, allow_nan=False)
delay = st.floats(50, 300, allow_nan=False)


def test_flat_plane():
    p = fit_plane([(0, 0, 100), (10, 0, 100), (0, 10, 100), (10, 10, 100)])
    assert (p.c, p.c_s, p.c_h) == pytest.approx((100, 0, 0))


def test_four_corner_fit_drops_lowest():
    p = fit_plane([(20, 20, 120), (40, 20, 110), (20, 40, 110), (40, 40, 100)])
    assert (p.c, p.c_s, p.c_h) == pytest.approx((140, -0.5, -0.5))
    # the dropped corner happens to lie on this plane
    assert p(40, 40) == pytest.approx(100)
    q = fit_plane([(20, 20, 120), (40, 20, 110), (20, 40, 110), (40, 40, 90)])
    assert (q.c, q.c_s, q.c_h) == pytest.approx((140, -0.5, -0.5))


def test_triangle_fit():
    p = fit_plane([(10, 10, 150), (30, 10, 120), (10, 30, 120)])
    assert (p.c, p.c_s, p.c_h) == pytest.approx((180, -1.5, -1.5))


def test_collinear_fit_fails():
    with pytest.raises(DegenerateFitError):
        fit_plane([(0, 0, 1), (1, 1, 2), (2, 2, 3)])


@given(coord, coord, coord, coord, coord, coord, delay, delay, delay)
def test_plane_passes_through_samples(s0, h0, s1, h1, s2, h2, d0, d1, d2):
    area = (s1 - s0) * (h2 - h0) - (s2 - s0) * (h1 - h0)
    assume(abs(area) > 1.0)
    pts = [(s0, h0, d0), (s1, h1, d1), (s2, h2, d2)]
    p = fit_plane(pts)
    # independent check: least squares on the same 3x3 system
    ref = np.linalg.lstsq(np.array([[1, s, h] for s, h, _ in pts]), np.array([d0, d1, d2]),
                          rcond=None)[0]
    assert (p.c, p.c_s, p.c_h) == pytest.approx(tuple(ref), rel=1e-6, abs=1e-6)
    for s, h, d in pts:
        assert p(s, h) == pytest.approx(d, abs=1e-6)


@given(st.floats(0, 100), st.floats(1, 50), st.floats(0, 100), st.floats(1, 50))
def test_four_corner_fit_is_conservative_on_convex_surface(s_l, ds, h_l, dh):
    # on a convex surface the plane through the 3 largest corners is an upper
    # bound at the dropped corner
    corners = [(s, h, analytic_delay((s, h), REF45))
               for s in (s_l, s_l + ds) for h in (h_l, h_l + dh)]
    p = fit_plane(corners)
    kept = chosen_corners(corners)
    dropped = [c for c in corners if c not in kept]
    assert len(dropped) == 1
    s, h, d = dropped[0]
    assert p(s, h) >= d - 1e-9 * max(1.0, abs(d))


def test_polygon_invariants():
    with pytest.raises(ValueError):
        Polygon(0, RECTANGLE, 10, 10, 0, 5, PlaneCoefficients(1, 0, 0))
    with pytest.raises(ValueError):
        Polygon(0, TRIANGLE, 0, 10, 0, 10, PlaneCoefficients(1, 0, 0))
    with pytest.raises(ValueError):
        Polygon(0, TRIANGLE, 0, 10, 0, 10, PlaneCoefficients(1, 0, 0), hypotenuse=(10, 1))


def test_triangle_contains_only_above_hypotenuse():
    t = Polygon(0, TRIANGLE, 0, 10, 0, 10, PlaneCoefficients(1, 0, 0), hypotenuse=(10, -1))
    assert t.contains(10, 10) and t.contains(5, 5) and t.contains(0, 10)
    assert not t.contains(2, 2)
    assert sorted(t.vertices()) == [(0, 10), (10, 0), (10, 10)]


def test_model_requires_polygons():
    with pytest.raises(ValueError):
        PiecewiseDelayModel((), 100, 200, 2, 5)


def test_evaluate_takes_lowest_covering_plane():
    a = Polygon(0, RECTANGLE, 0, 10, 0, 10, PlaneCoefficients(120, 0, 0))
    b = Polygon(1, RECTANGLE, 5, 15, 0, 10, PlaneCoefficients(110, 0, 0))
    m = PiecewiseDelayModel((a, b), 100, 200, 2, 5)
    assert m.evaluate(2, 2) == 120 and m.evaluate(7, 2) == 110
    assert math.isnan(m.evaluate(20, 2))


def test_round_trip_default_model(ref45_model):
    text = serialize_model(ref45_model)
    back = parse_model(text)
    assert back == ref45_model
    assert serialize_model(back) == text


def test_parse_rejects_empty_polygon_list():
    doc = {"stable_delay": 100, "metastable_threshold": 200, "d_th": 2, "k_th": 5, "polygons": []}
    with pytest.raises(ParseError):
        parse_model(json.dumps(doc))


def test_parse_rejects_unknown_key_with_line():
    text = ('{\n "stable_delay": 100,\n "metastable_threshold": 200,\n "d_th": 2,\n'
            ' "k_th": 5,\n "color": 1,\n "polygons": []\n}')
    with pytest.raises(ParseError) as exc:
        parse_model(text)
    assert exc.value.line == 6


def test_parse_rejects_unknown_polygon_key():
    doc = {"stable_delay": 100, "metastable_threshold": 200, "d_th": 2, "k_th": 5,
           "polygons": [{"kind": "rectangle", "s_l": 0, "s_u": 1, "h_l": 0, "h_u": 1,
                         "c": 100, "c_s": 0, "c_h": 0, "slope": 3}]}
    with pytest.raises(ParseError):
        parse_model(json.dumps(doc))


def test_parse_malformed_json():
    with pytest.raises(ParseError) as exc:
        parse_model('{\n "d_th": 2,\n oops\n}')
    assert exc.value.line == 3


def test_validate_flat_model_on_constant_oracle():
    o = FunctionOracle(lambda s, h: 100.0, f_bar=200, domain=(0, 50, 0, 50))
    m = PiecewiseDelayModel((Polygon(0, RECTANGLE, 0, 50, 0, 50, PlaneCoefficients(100, 0, 0)),),
                            100, 200, 2, 5)
    rep = validate_model(m, o, 1.0)
    assert rep.max_abs_error == 0 and rep.coverage_fraction == 1.0


def test_validate_matches_explicit_grid_loop():
    o = AnalyticOracle()
    corners = [(s, h, analytic_delay((s, h), REF45)) for s in (40, 60) for h in (40, 60)]
    p = Polygon(0, RECTANGLE, 40, 60, 40, 60, fit_plane(corners), corners=tuple(corners))
    m = PiecewiseDelayModel((p,), 100, 200, 2, 5)
    worst = 0.0
    for s in range(40, 61):
        for h in range(40, 61):
            worst = max(worst, abs(p.plane(s, h) - analytic_delay((s, h), REF45)))
    rep = validate_model(m, o, 1.0)
    assert rep.max_abs_error == pytest.approx(worst, rel=1e-12)
    assert rep.coverage_fraction == 1.0
