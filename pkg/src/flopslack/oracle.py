"""Clock-to-q delay oracles.

An oracle answers "what is the clock-to-q delay of the flip-flop when the
data input switches ``s`` ps before and ``h`` ps after the clock edge?".
The characterizer treats it as ground truth. Two implementations ship with
the package: a closed-form analytic surface and a replay oracle that
interpolates a recorded grid of samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

import numpy as np

from .errors import DomainError, ParseError


@dataclass(frozen=True)
class SlackPoint:
    setup_slack: float
    hold_slack: float

    def __post_init__(self):
        if not (self.setup_slack >= 0 and self.hold_slack >= 0):
            raise DomainError(
                f"slacks must be non-negative, got ({self.setup_slack}, {self.hold_slack})"
            )

    def __iter__(self):
        yield self.setup_slack
        yield self.hold_slack


@dataclass(frozen=True)
class Valid:
    clock_to_q: float

    @property
    def is_valid(self):
        return True


@dataclass(frozen=True)
class Metastable:
    @property
    def is_valid(self):
        return False


METASTABLE = Metastable()
OracleResponse = Union[Valid, Metastable]


@dataclass(frozen=True)
class DelaySample:
    point: SlackPoint
    response: OracleResponse

    @property
    def delay(self) -> Optional[float]:
        return self.response.clock_to_q if self.response.is_valid else None


@dataclass(frozen=True)
class AnalyticParams:
    """Parameters of the sum-of-exponentials delay surface."""

    d0: float = 100.0
    amp_s: float = 1000.0
    amp_h: float = 1000.0
    tau_s: float = 8.0
    tau_h: float = 8.0
    f_bar: Optional[float] = None
    domain_max: float = 300.0

    def __post_init__(self):
        if self.f_bar is None:
            object.__setattr__(self, "f_bar", 2.0 * self.d0)
        problems = []
        if not self.d0 > 0:
            problems.append("d0 must be > 0")
        if self.amp_s < 0 or self.amp_h < 0:
            problems.append("amplitudes must be >= 0")
        if not (self.tau_s > 0 and self.tau_h > 0):
            problems.append("decay constants must be > 0")
        if not self.f_bar > self.d0:
            problems.append("f_bar must exceed d0")
        if not self.domain_max > 0:
            problems.append("domain_max must be > 0")
        if problems:
            raise ValueError("invalid AnalyticParams: " + "; ".join(problems))


#: Reference parameter set used throughout the tests and examples.
REF45 = AnalyticParams(d0=100.0, amp_s=1000.0, amp_h=1000.0, tau_s=8.0, tau_h=8.0,
                       f_bar=200.0, domain_max=300.0)


def analytic_delay(point, params: AnalyticParams) -> float:
    s, h = point
    return (params.d0
            + params.amp_s * math.exp(-s / params.tau_s)
            + params.amp_h * math.exp(-h / params.tau_h))


class DelayOracle:
    """Base class for oracles.

    Subclasses implement :meth:`_raw` (or override :meth:`query`) and set
    ``f_bar`` and ``domain`` = ``(s_lo, s_hi, h_lo, h_hi)``. Oracles are
    immutable after construction, so concurrent queries are safe.
    """

    f_bar: float
    domain: tuple

    @property
    def domain_max(self) -> float:
        return min(self.domain[1], self.domain[3])

    def _check_domain(self, s, h):
        s_lo, s_hi, h_lo, h_hi = self.domain
        eps = 1e-9
        if not (s_lo - eps <= s <= s_hi + eps and h_lo - eps <= h <= h_hi + eps):
            raise DomainError(f"point ({s}, {h}) outside oracle domain {self.domain}")

    def _raw(self, s: float, h: float) -> float:
        raise NotImplementedError

    def query(self, point) -> OracleResponse:
        s, h = point
        self._check_domain(s, h)
        d = self._raw(s, h)
        if not math.isfinite(d) or d > self.f_bar:
            return METASTABLE
        return Valid(d)

    def delays(self, s, h) -> np.ndarray:
        """Vectorized query: delays on broadcast arrays, NaN where metastable."""
        s, h = np.broadcast_arrays(np.asarray(s, float), np.asarray(h, float))
        out = np.empty(s.shape)
        for idx in np.ndindex(s.shape):
            r = self.query((s[idx], h[idx]))
            out[idx] = r.clock_to_q if r.is_valid else np.nan
        return out


class AnalyticOracle(DelayOracle):
    def __init__(self, params: AnalyticParams = REF45):
        self.params = params
        self.f_bar = params.f_bar
        self.domain = (0.0, params.domain_max, 0.0, params.domain_max)

    def _raw(self, s, h):
        return analytic_delay((s, h), self.params)

    def delays(self, s, h):
        p = self.params
        s = np.asarray(s, float)
        h = np.asarray(h, float)
        d = p.d0 + p.amp_s * np.exp(-s / p.tau_s) + p.amp_h * np.exp(-h / p.tau_h)
        return np.where(d > p.f_bar, np.nan, d)

    def __repr__(self):
        return f"AnalyticOracle({self.params!r})"


class FunctionOracle(DelayOracle):
    """Wrap an arbitrary ``f(s, h) -> delay`` callable as an oracle."""

    def __init__(self, func: Callable[[float, float], float], f_bar: float,
                 domain=(0.0, 300.0, 0.0, 300.0)):
        self.func = func
        self.f_bar = float(f_bar)
        self.domain = tuple(float(v) for v in domain)

    def _raw(self, s, h):
        return float(self.func(s, h))


class GridOracle(DelayOracle):
    """Replay oracle over a complete axis-aligned grid of samples.

    Queries interpolate bilinearly between the four enclosing samples; if
    any of them is metastable, or the interpolated delay exceeds ``f_bar``,
    the response is metastable.
    """

    def __init__(self, s_axis, h_axis, table, f_bar):
        self.s_axis = np.asarray(s_axis, float)
        self.h_axis = np.asarray(h_axis, float)
        self.table = np.asarray(table, float)  # NaN marks metastable samples
        self.table.setflags(write=False)
        self.f_bar = float(f_bar)
        self.domain = (self.s_axis[0], self.s_axis[-1], self.h_axis[0], self.h_axis[-1])

    @staticmethod
    def _cell(axis, x):
        i = int(np.searchsorted(axis, x, side="right")) - 1
        i = min(max(i, 0), len(axis) - 2)
        span = axis[i + 1] - axis[i]
        return i, (x - axis[i]) / span

    def _raw(self, s, h):
        if len(self.s_axis) == 1 or len(self.h_axis) == 1:
            i = int(np.argmin(abs(self.s_axis - s)))
            j = int(np.argmin(abs(self.h_axis - h)))
            return self.table[i, j] if not np.isnan(self.table[i, j]) else math.inf
        i, u = self._cell(self.s_axis, s)
        j, v = self._cell(self.h_axis, h)
        corners = self.table[i:i + 2, j:j + 2]
        weights = np.array([[(1 - u) * (1 - v), (1 - u) * v], [u * (1 - v), u * v]])
        # a zero-weight metastable neighbor still poisons the cell, except at an
        # exact node where the node's own response is returned
        if np.isnan(corners).any():
            exact = weights > 1 - 1e-12
            if exact.any() and not np.isnan(corners[exact]).any():
                return float(corners[exact][0])
            return math.inf
        return float((weights * corners).sum())


def grid_oracle(samples: Iterable[DelaySample], f_bar: float) -> GridOracle:
    """Build a :class:`GridOracle` from samples that form a complete grid."""
    samples = list(samples)
    if not samples:
        raise ValueError("grid oracle needs at least one sample")
    s_axis = sorted({p.point.setup_slack for p in samples})
    h_axis = sorted({p.point.hold_slack for p in samples})
    if len(samples) != len(s_axis) * len(h_axis):
        raise ValueError(
            f"incomplete grid: {len(samples)} samples for a "
            f"{len(s_axis)}x{len(h_axis)} grid"
        )
    s_index = {v: i for i, v in enumerate(s_axis)}
    h_index = {v: j for j, v in enumerate(h_axis)}
    table = np.full((len(s_axis), len(h_axis)), np.nan)
    seen = np.zeros(table.shape, bool)
    for smp in samples:
        i, j = s_index[smp.point.setup_slack], h_index[smp.point.hold_slack]
        if seen[i, j]:
            raise ValueError(f"duplicate grid sample at {tuple(smp.point)}")
        seen[i, j] = True
        if smp.response.is_valid:
            table[i, j] = smp.response.clock_to_q
    return GridOracle(s_axis, h_axis, table, f_bar)


def parse_grid_dump(text: str, f_bar: float) -> GridOracle:
    """Parse the dense-sweep dump format: one ``s h delay|META`` line per sample."""
    samples = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"expected 's h delay|META', got {raw!r}", lineno)
        try:
            s, h = float(fields[0]), float(fields[1])
            resp = METASTABLE if fields[2] == "META" else Valid(float(fields[2]))
            samples.append(DelaySample(SlackPoint(s, h), resp))
        except (ValueError, DomainError) as exc:
            raise ParseError(str(exc), lineno) from None
    try:
        return grid_oracle(samples, f_bar)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dump_grid(oracle: DelayOracle, s_values, h_values) -> str:
    lines = []
    for s in s_values:
        for h in h_values:
            r = oracle.query((s, h))
            val = repr(float(r.clock_to_q)) if r.is_valid else "META"
            lines.append(f"{float(s)!r} {float(h)!r} {val}")
    return "\n".join(lines) + "\n"
