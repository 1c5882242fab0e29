"""Piecewise-linear delay model: polygons, plane fitting, (de)serialization
and dense-grid validation against an oracle."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateFitError, ParseError

TRIANGLE = "triangle"
RECTANGLE = "rectangle"


@dataclass(frozen=True)
class PlaneCoefficients:
    c: float
    c_s: float
    c_h: float

    def __call__(self, s, h):
        return self.c + self.c_s * s + self.c_h * h


@dataclass(frozen=True)
class Polygon:
    """A slack region carrying one delay plane.

    Rectangles are the box ``[s_l, s_u] x [h_l, h_u]``. Triangles are the part
    of that box on or above the hypotenuse ``h = c_t + c_ts * s``.
    ``corners`` holds the ``(s, h, delay)`` samples the plane was fit to.
    """

    id: int
    kind: str
    s_l: float
    s_u: float
    h_l: float
    h_u: float
    plane: PlaneCoefficients
    hypotenuse: Optional[Tuple[float, float]] = None
    corners: Tuple[Tuple[float, float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in (TRIANGLE, RECTANGLE):
            raise ValueError(f"unknown polygon kind {self.kind!r}")
        if not (0 <= self.s_l < self.s_u and 0 <= self.h_l < self.h_u):
            raise ValueError(
                f"polygon {self.id}: bad bounds s=[{self.s_l}, {self.s_u}] h=[{self.h_l}, {self.h_u}]"
            )
        if (self.kind == TRIANGLE) != (self.hypotenuse is not None):
            raise ValueError(f"polygon {self.id}: hypotenuse present iff triangle")
        if self.hypotenuse is not None and not self.hypotenuse[1] < 0:
            raise ValueError(f"polygon {self.id}: hypotenuse slope must be negative")

    @property
    def is_triangle(self):
        return self.kind == TRIANGLE

    def contains(self, s, h, tol=1e-9):
        inside = ((s >= self.s_l - tol) & (s <= self.s_u + tol)
                  & (h >= self.h_l - tol) & (h <= self.h_u + tol))
        if self.hypotenuse is not None:
            c_t, c_ts = self.hypotenuse
            # tolerance along the steeper axis, so steep lines are not held tighter
            inside = inside & (h >= c_t + c_ts * s - tol * max(1.0, abs(c_ts)))
        return inside

    def vertices(self):
        if self.hypotenuse is None:
            return [(self.s_l, self.h_l), (self.s_u, self.h_l),
                    (self.s_l, self.h_u), (self.s_u, self.h_u)]
        # right angle sits at the upper-right box corner
        return [(self.s_l, self.h_u), (self.s_u, self.h_l), (self.s_u, self.h_u)]

    def value_range(self):
        vals = [self.plane(s, h) for s, h in self.vertices()]
        return min(vals), max(vals)

    def is_constant(self, value, tol=1e-9):
        lo, hi = self.value_range()
        return abs(lo - value) <= tol and abs(hi - value) <= tol

    @property
    def center(self):
        return (0.5 * (self.s_l + self.s_u), 0.5 * (self.h_l + self.h_u))


@dataclass(frozen=True)
class PiecewiseDelayModel:
    polygons: Tuple[Polygon, ...]
    f_lower: float
    f_upper: float
    d_th: float
    k_th: float
    query_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "polygons", tuple(self.polygons))
        if not self.polygons:
            raise ValueError("a delay model needs at least one polygon")
        if not self.f_lower < self.f_upper:
            raise ValueError("stable delay must be below the metastable threshold")

    @property
    def s_min(self):
        return min(p.s_l for p in self.polygons)

    @property
    def s_max(self):
        return max(p.s_u for p in self.polygons)

    @property
    def h_min(self):
        return min(p.h_l for p in self.polygons)

    @property
    def h_max(self):
        return max(p.h_u for p in self.polygons)

    @property
    def n_polygons(self):
        return len(self.polygons)

    def by_id(self, pid) -> Polygon:
        for p in self.polygons:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def is_stable(self, polygon: Polygon, tol=1e-9):
        return polygon.kind == RECTANGLE and polygon.is_constant(self.f_lower, tol)

    def evaluate(self, s, h, reduce="min"):
        """Plane value of the covering polygons at ``(s, h)``; NaN if uncovered."""
        s = np.asarray(s, float)
        h = np.asarray(h, float)
        fill = np.inf if reduce == "min" else -np.inf
        best = np.full(np.broadcast(s, h).shape, fill)
        for p in self.polygons:
            inside = p.contains(s, h)
            val = np.where(inside, p.plane(s, h), fill)
            best = np.minimum(best, val) if reduce == "min" else np.maximum(best, val)
        return np.where(np.isfinite(best), best, np.nan)


def fit_plane(corners: Sequence[Tuple[float, float, float]]) -> PlaneCoefficients:
    """Plane through three ``(s, h, delay)`` samples.

    With four samples the three largest delays are used (conservative for a
    convex surface); equal delays prefer smaller ``s`` then smaller ``h``.
    """
    corners = [tuple(map(float, c)) for c in corners]
    if len(corners) not in (3, 4):
        raise ValueError(f"fit_plane needs 3 or 4 corners, got {len(corners)}")
    if len(corners) == 4:
        corners = sorted(corners, key=lambda c: (-c[2], c[0], c[1]))[:3]
    a = np.array([[1.0, s, h] for s, h, _ in corners])
    b = np.array([d for _, _, d in corners])
    (s0, h0), (s1, h1), (s2, h2) = [(c[0], c[1]) for c in corners]
    area2 = (s1 - s0) * (h2 - h0) - (s2 - s0) * (h1 - h0)
    scale = max(abs(s1 - s0), abs(s2 - s0), abs(h1 - h0), abs(h2 - h0), 1e-300)
    if abs(area2) <= 1e-12 * scale * scale:
        raise DegenerateFitError(f"collinear fitting points {corners}")
    c, c_s, c_h = np.linalg.solve(a, b)
    return PlaneCoefficients(float(c), float(c_s), float(c_h))


def chosen_corners(corners):
    """The samples :func:`fit_plane` would pass through."""
    corners = [tuple(map(float, c)) for c in corners]
    if len(corners) == 4:
        corners = sorted(corners, key=lambda c: (-c[2], c[0], c[1]))[:3]
    return tuple(corners)


# --------------------------------------------------------------------------
# serialization

_MODEL_KEYS = {"stable_delay", "metastable_threshold", "d_th", "k_th", "polygons", "query_count"}
_POLY_KEYS = {"id", "kind", "s_l", "s_u", "h_l", "h_u", "c", "c_s", "c_h", "c_t", "c_ts", "corners"}
_POLY_REQUIRED = {"kind", "s_l", "s_u", "h_l", "h_u", "c", "c_s", "c_h"}


def serialize_model(model: PiecewiseDelayModel) -> str:
    polys = []
    for p in model.polygons:
        d = {"id": p.id, "kind": p.kind, "s_l": p.s_l, "s_u": p.s_u, "h_l": p.h_l, "h_u": p.h_u,
             "c": p.plane.c, "c_s": p.plane.c_s, "c_h": p.plane.c_h}
        if p.hypotenuse is not None:
            d["c_t"], d["c_ts"] = p.hypotenuse
        if p.corners:
            d["corners"] = [list(c) for c in p.corners]
        polys.append(d)
    doc = {
        "stable_delay": model.f_lower,
        "metastable_threshold": model.f_upper,
        "d_th": model.d_th,
        "k_th": model.k_th,
        "query_count": model.query_count,
        "polygons": polys,
    }
    return json.dumps(doc, indent=1) + "\n"


def _line_of(text, needle):
    pos = text.find(needle)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else None


def _num(value, what, text):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParseError(f"{what} must be a finite number, got {value!r}", _line_of(text, f'"{what}"'))
    return float(value)


def parse_model(text: str) -> PiecewiseDelayModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("model file must hold a JSON object", 1)
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ParseError(f"unknown key {key!r}", _line_of(text, f'"{key}"'))
    for key in _MODEL_KEYS - {"query_count"}:
        if key not in doc:
            raise ParseError(f"missing key {key!r}", 1)
    raw_polys = doc["polygons"]
    if not isinstance(raw_polys, list) or not raw_polys:
        raise ParseError("model must contain a non-empty 'polygons' list", _line_of(text, '"polygons"'))
    polys = []
    for idx, rp in enumerate(raw_polys):
        if not isinstance(rp, dict):
            raise ParseError(f"polygon #{idx} is not an object", _line_of(text, '"polygons"'))
        unknown = set(rp) - _POLY_KEYS
        if unknown:
            key = sorted(unknown)[0]
            raise ParseError(f"polygon #{idx}: unknown key {key!r}", _line_of(text, f'"{key}"'))
        missing = _POLY_REQUIRED - set(rp)
        if missing:
            raise ParseError(f"polygon #{idx}: missing keys {sorted(missing)}", _line_of(text, '"polygons"'))
        kind = rp["kind"]
        hyp = None
        if kind == TRIANGLE:
            if "c_t" not in rp or "c_ts" not in rp:
                raise ParseError(f"polygon #{idx}: triangle needs c_t and c_ts", _line_of(text, '"polygons"'))
            hyp = (_num(rp["c_t"], "c_t", text), _num(rp["c_ts"], "c_ts", text))
        elif "c_t" in rp or "c_ts" in rp:
            raise ParseError(f"polygon #{idx}: c_t/c_ts only allowed on triangles", _line_of(text, '"c_t'))
        corners = tuple(tuple(_num(v, "corners", text) for v in c) for c in rp.get("corners", ()))
        try:
            polys.append(Polygon(
                id=int(rp.get("id", idx)), kind=kind,
                s_l=_num(rp["s_l"], "s_l", text), s_u=_num(rp["s_u"], "s_u", text),
                h_l=_num(rp["h_l"], "h_l", text), h_u=_num(rp["h_u"], "h_u", text),
                plane=PlaneCoefficients(_num(rp["c"], "c", text), _num(rp["c_s"], "c_s", text),
                                        _num(rp["c_h"], "c_h", text)),
                hypotenuse=hyp, corners=corners))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"polygon #{idx}: {exc}", _line_of(text, '"polygons"')) from None
    try:
        return PiecewiseDelayModel(
            polygons=tuple(polys),
            f_lower=_num(doc["stable_delay"], "stable_delay", text),
            f_upper=_num(doc["metastable_threshold"], "metastable_threshold", text),
            d_th=_num(doc["d_th"], "d_th", text),
            k_th=_num(doc["k_th"], "k_th", text),
            query_count=int(doc.get("query_count", 0)),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), 1) from None


# --------------------------------------------------------------------------
# validation against an oracle


@dataclass(frozen=True)
class ValidationReport:
    grid_resolution: float
    max_abs_error: float
    coverage_fraction: float
    worst_point: Optional[Tuple[float, float]]
    margin: float = 0.0
    interior_coverage: float = 1.0
    n_valid: int = 0


def _axis(lo, hi, res):
    start = math.ceil(lo / res - 1e-9) * res
    return np.arange(start, hi + 1e-9, res)


def validate_model(model: PiecewiseDelayModel, oracle, grid_resolution: float = 1.0,
                   margin: Optional[float] = None) -> ValidationReport:
    """Compare the model with the oracle on a regular grid.

    At every Valid grid point covered by at least one polygon the error is
    the smallest ``|plane - oracle|`` among the covering polygons.
    ``interior_coverage`` restricts coverage to Valid points farther than
    ``margin`` (default ``model.k_th``) from the nearest metastable point.
    """
    from scipy.ndimage import distance_transform_edt

    if margin is None:
        margin = model.k_th
    res = float(grid_resolution)
    s_lo, s_hi, h_lo, h_hi = oracle.domain
    # distance to metastability is measured on a grid reaching the domain edge
    s_full = _axis(s_lo, min(s_hi, model.s_max), res)
    h_full = _axis(h_lo, min(h_hi, model.h_max), res)
    S, H = np.meshgrid(s_full, h_full, indexing="ij")
    truth = oracle.delays(S, H)
    valid = ~np.isnan(truth)
    dist = distance_transform_edt(valid) * res if (~valid).any() else np.full(S.shape, np.inf)

    window = (S >= model.s_min - 1e-9) & (H >= model.h_min - 1e-9)
    err = np.full(S.shape, np.inf)
    covered = np.zeros(S.shape, bool)
    for p in model.polygons:
        inside = p.contains(S, H) & window
        if not inside.any():
            continue
        covered |= inside
        e = np.abs(p.plane(S, H) - np.where(valid, truth, 0.0))
        err = np.where(inside, np.minimum(err, e), err)

    pts = valid & window
    n_valid = int(pts.sum())
    scored = pts & covered
    if scored.any():
        masked = np.where(scored, err, -np.inf)
        k = np.unravel_index(int(np.argmax(masked)), S.shape)
        max_err = float(masked[k])
        worst = (float(S[k]), float(H[k]))
    else:
        max_err, worst = 0.0, None
    far = pts & (dist > margin)
    return ValidationReport(
        grid_resolution=res,
        max_abs_error=max_err,
        coverage_fraction=float(scored.sum() / n_valid) if n_valid else 1.0,
        worst_point=worst,
        margin=float(margin),
        interior_coverage=float((far & covered).sum() / far.sum()) if far.any() else 1.0,
        n_valid=n_valid,
    )


def renumber(polygons) -> Tuple[Polygon, ...]:
    return tuple(replace(p, id=i) for i, p in enumerate(polygons))
