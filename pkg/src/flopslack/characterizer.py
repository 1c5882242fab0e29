"""Adaptive piecewise-linear characterization of a clock-to-q delay surface.

Pipeline: boundary anchors -> boundary segment refinement -> boundary
triangles -> stable corner -> band rectangles (split by accuracy) -> merge.
Every oracle call goes through :class:`CachedOracle`, which counts distinct
queries so characterization cost can be reported.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from .errors import CharacterizationError
from .model import (RECTANGLE, TRIANGLE, PiecewiseDelayModel, PlaneCoefficients,
                    Polygon, fit_plane, renumber)
from .oracle import DelayOracle, SlackPoint

logger = logging.getLogger(__name__)

SETUP = "setup"
HOLD = "hold"

Point = Tuple[float, float]


@dataclass(frozen=True)
class CharConfig:
    anchor_slack: float = 150.0
    k_th: float = 5.0
    d_th: float = 2.0
    search_resolution: float = 0.25
    stable_step: float = 4.0
    stable_epsilon: float = 0.5
    max_split_depth: int = 10
    accuracy_margin: float = 0.1

    @property
    def check_limit(self):
        """Error allowed at check points; the margin covers unsampled interior error."""
        return self.d_th * (1.0 - self.accuracy_margin)

    def __post_init__(self):
        for name in ("anchor_slack", "k_th", "d_th", "search_resolution",
                     "stable_step", "stable_epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.search_resolution < self.k_th:
            raise ValueError("search_resolution must be smaller than k_th")
        if int(self.max_split_depth) != self.max_split_depth or self.max_split_depth < 1:
            raise ValueError("max_split_depth must be an integer >= 1")
        if not 0 <= self.accuracy_margin < 1:
            raise ValueError("accuracy_margin must be in [0, 1)")


class CachedOracle(DelayOracle):
    """Memoizing front for an oracle; keys are slacks rounded to 1e-6 ps.

    Not thread-safe: give each worker its own instance.
    """

    def __init__(self, oracle: DelayOracle):
        self.oracle = oracle
        self.f_bar = oracle.f_bar
        self.domain = oracle.domain
        self._cache = {}

    @property
    def query_count(self):
        return len(self._cache)

    def query(self, point):
        s, h = point
        key = (round(float(s), 6), round(float(h), 6))
        resp = self._cache.get(key)
        if resp is None:
            resp = self.oracle.query((float(s), float(h)))
            self._cache[key] = resp
        return resp

    def known_within(self, s_l, s_u, h_l, h_u):
        """Already-recorded Valid samples inside a box, as (s, h, delay)."""
        for (s, h), r in self._cache.items():
            if s_l <= s <= s_u and h_l <= h <= h_u and r.is_valid:
                yield s, h, r.clock_to_q

    def __call__(self, s, h) -> Optional[float]:
        r = self.query((s, h))
        return r.clock_to_q if r.is_valid else None


def _probe(oracle) -> CachedOracle:
    return oracle if isinstance(oracle, CachedOracle) else CachedOracle(oracle)


def _as_tuple(p) -> Point:
    s, h = p
    return (float(s), float(h))


# --------------------------------------------------------------------------
# boundary


def find_axis_anchor(oracle, axis: str, cfg: CharConfig = CharConfig()) -> SlackPoint:
    """Smallest Valid slack along one axis with the other slack held at the anchor.

    ``axis=HOLD`` searches hold slack with setup fixed large (point A);
    ``axis=SETUP`` searches setup slack with hold fixed large (point B).
    """
    probe = _probe(oracle)
    big = cfg.anchor_slack

    def at(x):
        return (big, x) if axis == HOLD else (x, big)

    if axis not in (SETUP, HOLD):
        raise ValueError(f"axis must be {SETUP!r} or {HOLD!r}")
    if probe(*at(big)) is None:
        raise CharacterizationError(f"no valid delay along the {axis} axis at the anchor")
    lo, hi = 0.0, big
    if probe(*at(lo)) is not None:
        return SlackPoint(*at(lo))
    while hi - lo > cfg.search_resolution:
        mid = 0.5 * (lo + hi)
        if probe(*at(mid)) is None:
            lo = mid
        else:
            hi = mid
    return SlackPoint(*at(hi))


def _perpendicular_search(probe: CachedOracle, p: Point, q: Point, cfg: CharConfig):
    """Walk from the midpoint of p-q toward the metastable side.

    Returns ``(D, distance)`` where D is the last Valid point found. When no
    crossing exists the midpoint itself is returned with distance 0.
    """
    cs, ch = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
    ds, dh = q[0] - p[0], q[1] - p[1]
    length = math.hypot(ds, dh)
    if length == 0:
        return (cs, ch), 0.0
    ns, nh = dh / length, -ds / length
    if ns + nh > 0:
        ns, nh = -ns, -nh
    res = cfg.search_resolution

    if probe(cs, ch) is None:
        # chord crosses a non-convex dent: back off away from the wall
        t_max = 0.5 * length
        if probe(cs - t_max * ns, ch - t_max * nh) is None:
            return (cs, ch), 0.0
        lo, hi = 0.0, t_max  # lo invalid, hi valid
        while hi - lo > res:
            mid = 0.5 * (lo + hi)
            if probe(cs - mid * ns, ch - mid * nh) is None:
                lo = mid
            else:
                hi = mid
        return (cs - hi * ns, ch - hi * nh), hi

    limits = [c / -n for c, n in ((cs, ns), (ch, nh)) if n < 0]
    t_max = min(limits) if limits else 0.0
    if t_max <= 0 or probe(cs + t_max * ns, ch + t_max * nh) is not None:
        return (cs, ch), 0.0
    lo, hi = 0.0, t_max  # lo valid, hi invalid
    while hi - lo > res:
        mid = 0.5 * (lo + hi)
        if probe(cs + mid * ns, ch + mid * nh) is None:
            hi = mid
        else:
            lo = mid
    return (cs + lo * ns, ch + lo * nh), lo


def refine_boundary(oracle, a, b, cfg: CharConfig = CharConfig()) -> List[Tuple[Point, Point]]:
    """Approximate the metastable boundary between anchors a and b by a chain
    of segments whose endpoints lie on the boundary. Ordered by setup slack."""
    probe = _probe(oracle)
    p, q = sorted((_as_tuple(a), _as_tuple(b)))

    def refine(p, q, depth):
        if depth >= cfg.max_split_depth:
            return [(p, q)]
        d, dist = _perpendicular_search(probe, p, q, cfg)
        if dist <= cfg.k_th:
            return [(p, q)]
        return refine(p, d, depth + 1) + refine(d, q, depth + 1)

    segments = refine(p, q, 0)
    return sorted(((min(u, v), max(u, v)) for u, v in segments), key=lambda seg: seg[0])


def _triangle(p: Point, q: Point, r: Point, dp, dq, dr) -> Polygon:
    plane = fit_plane([(*p, dp), (*q, dq), (*r, dr)])
    c_ts = (q[1] - p[1]) / (q[0] - p[0])
    c_t = p[1] - c_ts * p[0]
    return Polygon(id=-1, kind=TRIANGLE, s_l=p[0], s_u=q[0], h_l=q[1], h_u=p[1],
                   plane=plane, hypotenuse=(c_t, c_ts),
                   corners=((*p, dp), (*q, dq), (*r, dr)))


def build_boundary_triangles(oracle, segments, cfg: CharConfig = CharConfig()) -> List[Polygon]:
    """Turn each boundary segment into the hypotenuse of a right triangle.

    The right angle sits at the componentwise maximum of the two endpoints.
    A triangle whose plane misses the oracle by more than ``d_th`` at the
    middle of its hypotenuse is split at the boundary and both halves are
    rebuilt.
    """
    probe = _probe(oracle)
    res = cfg.search_resolution

    def build(p, q, depth):
        if not (q[0] > p[0] and p[1] > q[1]):
            return []  # zero-area piece
        dp, dq = probe(*p), probe(*q)
        if dp is None or dq is None:
            raise CharacterizationError(f"boundary endpoint {p if dp is None else q} is metastable")
        r = (q[0], p[1])
        dr = probe(*r)
        tries = 0
        while dr is None:
            tries += 1
            if tries > cfg.max_split_depth:
                raise CharacterizationError(f"right-angle corner near {r} stays metastable")
            r = (r[0] + res, r[1] + res)
            dr = probe(*r)
        tri = _triangle(p, q, r, dp, dq, dr)
        m = (0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]))
        checks = [m, ((p[0] + q[0] + r[0]) / 3, (p[1] + q[1] + r[1]) / 3),
                  (0.5 * (p[0] + r[0]), 0.5 * (p[1] + r[1])),
                  (0.5 * (q[0] + r[0]), 0.5 * (q[1] + r[1]))]
        err = _max_error(tri, checks, probe, cfg.check_limit)
        if err > cfg.check_limit and depth < cfg.max_split_depth:
            d, _ = _perpendicular_search(probe, p, q, cfg)
            if not (q[0] > d[0] > p[0] and p[1] > d[1] > q[1]):
                # the endpoints sit up to one resolution step off the wall, so
                # the wall point can fall outside the box; halve the chord instead
                d = m if probe(*m) is not None else None
            if d is not None:
                return build(p, d, depth + 1) + build(d, q, depth + 1)
        if err > cfg.check_limit:
            logger.warning("triangle %s-%s misses by %.3g ps at split depth limit", p, q, err)
        return [tri]

    out = []
    for p, q in segments:
        p, q = sorted((_as_tuple(p), _as_tuple(q)))
        out.extend(build(p, q, 0))
    return sorted(out, key=lambda t: (t.s_l, -t.h_u))


# --------------------------------------------------------------------------
# plateau and rectangles


def find_stable_corner(oracle, cfg: CharConfig = CharConfig()) -> SlackPoint:
    """Walk the diagonal from the anchor toward the origin while the delay
    stays within ``stable_epsilon`` of the anchor delay; return the last
    stable point."""
    probe = _probe(oracle)
    x = cfg.anchor_slack
    f_lower = probe(x, x)
    if f_lower is None:
        raise CharacterizationError("anchor point is metastable")
    while x > 0:
        nxt = max(x - cfg.stable_step, 0.0)
        d = probe(nxt, nxt)
        if d is None or d > f_lower + cfg.stable_epsilon:
            break
        x = nxt
    return SlackPoint(x, x)


def _rect_polygon(box, probe: CachedOracle) -> Optional[Polygon]:
    s_l, s_u, h_l, h_u = box
    corners = []
    for s, h in ((s_l, h_l), (s_u, h_l), (s_l, h_u), (s_u, h_u)):
        d = probe(s, h)
        if d is None:
            return None
        corners.append((s, h, d))
    return Polygon(id=-1, kind=RECTANGLE, s_l=s_l, s_u=s_u, h_l=h_l, h_u=h_u,
                   plane=fit_plane(corners), corners=tuple(corners))


def _check_points(rect: Polygon):
    # an exponential wall puts the worst error off-center, toward the small
    # slacks, so the quadrant centers on that side are checked too
    yield rect.center
    for fs, fh in ((0.25, 0.25), (0.75, 0.25), (0.25, 0.75)):
        yield (rect.s_l + fs * (rect.s_u - rect.s_l), rect.h_l + fh * (rect.h_u - rect.h_l))


def _max_error(poly: Polygon, points, probe: CachedOracle, limit=math.inf) -> float:
    worst = 0.0
    for s, h in points:
        d = probe(s, h)
        if d is None:
            return math.inf
        worst = max(worst, abs(poly.plane(s, h) - d))
        if worst > limit:
            break
    return worst


def _rect_plane(box, probe: CachedOracle):
    s_l, s_u, h_l, h_u = box
    return fit_plane([(s, h, probe(s, h)) for s, h in
                      ((s_l, h_l), (s_u, h_l), (s_l, h_u), (s_u, h_u))])


def _center_error(rect: Polygon, probe: CachedOracle, limit=math.inf) -> float:
    return _max_error(rect, _check_points(rect), probe, limit)


def _halves(lo, hi):
    mid = 0.5 * (lo + hi)
    return [(lo, mid), (mid, hi)]


def _split_rect(box, probe, cfg, depth) -> List[Polygon]:
    rect = _rect_polygon(box, probe)
    if rect is None:
        return []  # the boundary triangles already cover this area
    if _center_error(rect, probe, cfg.check_limit) <= cfg.check_limit:
        return [rect]
    if depth >= cfg.max_split_depth:
        logger.warning("rectangle %s exceeds d_th at split depth limit", box)
        return [rect]
    s_l, s_u, h_l, h_u = box
    c = {(s, h): d for s, h, d in rect.corners}
    # the fit error comes from curvature along the axis where the delay
    # moves most; halve only that axis (both on a tie, giving a quadtree step)
    drop_s = max(abs(c[s_l, h] - c[s_u, h]) for h in (h_l, h_u))
    drop_h = max(abs(c[s, h_l] - c[s, h_u]) for s in (s_l, s_u))
    s_parts = _halves(s_l, s_u) if drop_s >= drop_h else [(s_l, s_u)]
    h_parts = _halves(h_l, h_u) if drop_h >= drop_s else [(h_l, h_u)]
    # depth counts quadtree levels; a one-axis split is half a level
    step = 1.0 if len(s_parts) == len(h_parts) else 0.5
    out = []
    for hl, hu in h_parts:
        for sl, su in s_parts:
            out.extend(_split_rect((sl, su, hl, hu), probe, cfg, depth + step))
    return out


def _vertical_legs(triangles, top):
    """(s, h_lo, h_hi) pieces of the boundary staircase, top to bottom."""
    tris = sorted(triangles, key=lambda t: -t.h_u)
    legs = []
    prev_low = top
    for t in tris:
        if t.h_u < prev_low - 1e-12:
            legs.append((t.s_l, t.h_u, prev_low))  # vertical stretch of the boundary
        legs.append((t.s_u, t.h_l, t.h_u))
        prev_low = min(prev_low, t.h_l)
    return legs


def build_rectangles(oracle, triangles, h_corner, cfg: CharConfig = CharConfig()) -> List[Polygon]:
    """Stable rectangle plus accuracy-split rectangles filling the band between
    the boundary triangles and the stable region.

    The band is tiled by horizontal strips, one per vertical triangle leg,
    reaching right to the stable corner above it and to the anchor below it.
    """
    probe = _probe(oracle)
    big = cfg.anchor_slack
    f_lower = probe(big, big)
    if f_lower is None:
        raise CharacterizationError("anchor point is metastable")
    hs, hh = _as_tuple(h_corner)
    out = []
    if hs < big and hh < big:
        out.append(Polygon(id=-1, kind=RECTANGLE, s_l=hs, s_u=big, h_l=hh, h_u=big,
                           plane=PlaneCoefficients(f_lower, 0.0, 0.0),
                           corners=((big, big, f_lower),)))
    else:
        hs = hh = big
    seeds = []
    for x, lo, hi in _vertical_legs(triangles, big):
        if lo < hh:
            seeds.append((x, big, lo, min(hi, hh)))
        if hi > hh:
            seeds.append((x, hs, max(lo, hh), hi))
    for s_l, s_u, h_l, h_u in seeds:
        if s_u - s_l > 1e-12 and h_u - h_l > 1e-12:
            out.extend(_split_rect((s_l, s_u, h_l, h_u), probe, cfg, 0))
    return out


def _fit_from_corners(rects):
    return len(rects.corners) >= 3


def merge_rectangles(oracle, rects, cfg: CharConfig = CharConfig()) -> List[Polygon]:
    """Greedily merge edge-adjacent, extent-aligned rectangles.

    Scans bottom-left to top-right trying the right neighbour, then the upper
    one, and accepts a merge when the refit plane is within ``d_th`` of the
    oracle at the merged center. Repeats until nothing changes. Rectangles
    whose plane was not fit from corners (the stable plateau) are left alone.
    """
    probe = _probe(oracle)
    fixed = [r for r in rects if not _fit_from_corners(r)]
    live = {i: r for i, r in enumerate(r for r in rects if _fit_from_corners(r))}
    next_key = len(live)

    def k(x):
        return round(x, 9)

    changed = True
    while changed:
        changed = False
        by_left = {}
        by_bottom = {}
        for key, r in live.items():
            by_left.setdefault((k(r.s_l), k(r.h_l), k(r.h_u)), []).append(key)
            by_bottom.setdefault((k(r.h_l), k(r.s_l), k(r.s_u)), []).append(key)
        for key in sorted(live, key=lambda i: (live[i].h_l, live[i].s_l, live[i].s_u, live[i].h_u)):
            if key not in live:
                continue
            r = live[key]
            candidates = [
                (by_left.get((k(r.s_u), k(r.h_l), k(r.h_u)), []),
                 lambda n: (r.s_l, n.s_u, r.h_l, r.h_u)),
                (by_bottom.get((k(r.h_u), k(r.s_l), k(r.s_u)), []),
                 lambda n: (r.s_l, r.s_u, r.h_l, n.h_u)),
            ]
            for keys, span in candidates:
                merged = None
                for nk in keys:
                    if nk == key or nk not in live:
                        continue
                    box = span(live[nk])
                    # reject from samples already on record before paying for new queries
                    if any(abs(plane_at(s, h) - d) > cfg.check_limit
                           for plane_at in [_rect_plane(box, probe)]
                           for s, h, d in probe.known_within(*box)):
                        continue
                    m = _rect_polygon(box, probe)
                    if m is not None and _center_error(m, probe, cfg.check_limit) <= cfg.check_limit:
                        merged = (nk, m)
                        break
                if merged:
                    nk, m = merged
                    del live[key], live[nk]
                    live[next_key] = m
                    next_key += 1
                    changed = True
                    break
            if changed:
                break
    return fixed + sorted(live.values(), key=lambda r: (r.h_l, r.s_l))


# --------------------------------------------------------------------------
# pipeline


def _inside_box(p: Polygon, box) -> bool:
    s_l, s_u, h_l, h_u = box
    return (p.s_l >= s_l - 1e-9 and p.s_u <= s_u + 1e-9
            and p.h_l >= h_l - 1e-9 and p.h_u <= h_u + 1e-9)


def characterize(oracle, cfg: CharConfig = CharConfig()) -> PiecewiseDelayModel:
    probe = _probe(oracle)
    big = cfg.anchor_slack
    f_lower = probe(big, big)
    if f_lower is None:
        raise CharacterizationError(f"anchor point ({big}, {big}) is metastable")
    a = find_axis_anchor(probe, HOLD, cfg)
    b = find_axis_anchor(probe, SETUP, cfg)
    segments = refine_boundary(probe, b, a, cfg)
    triangles = build_boundary_triangles(probe, segments, cfg)
    h_corner = find_stable_corner(probe, cfg)
    rects = build_rectangles(probe, triangles, h_corner, cfg)
    stable = [r for r in rects if not _fit_from_corners(r)]
    rects = merge_rectangles(probe, rects, cfg)
    if stable:
        box = (stable[0].s_l, stable[0].s_u, stable[0].h_l, stable[0].h_u)
        triangles = [t for t in triangles if not _inside_box(t, box)]
        rects = stable + [r for r in rects if r not in stable and not _inside_box(r, box)]
    polygons = renumber(triangles + rects)
    return PiecewiseDelayModel(polygons=polygons, f_lower=f_lower, f_upper=oracle.f_bar,
                               d_th=cfg.d_th, k_th=cfg.k_th, query_count=probe.query_count)
