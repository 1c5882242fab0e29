"""Flat ``key = value`` configuration files.

One file configures both the delay oracle and the characterizer. Keys are
the :class:`AnalyticParams` and :class:`CharConfig` field names; a
``grid_dump`` key points at a dense-sweep dump to replay instead of the
analytic surface. Unknown keys are an error, never silently ignored.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Dict, Optional

from .characterizer import CharConfig
from .classic import ClassicFFParams
from .errors import ParseError
from .oracle import AnalyticOracle, AnalyticParams, DelayOracle, parse_grid_dump

ORACLE_KEYS = tuple(f.name for f in dataclasses.fields(AnalyticParams))
CHAR_KEYS = tuple(f.name for f in dataclasses.fields(CharConfig))
CLASSIC_KEYS = tuple(f.name for f in dataclasses.fields(ClassicFFParams))
_INT_KEYS = {"max_split_depth"}


def parse_key_values(text: str, allowed) -> Dict[str, str]:
    """Raw ``key -> value`` strings; ``#`` starts a comment."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            raise ParseError(f"unknown key {key!r}", lineno)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno)
        out[key] = value
    return out


def _number(key: str, value: str):
    try:
        return int(value) if key in _INT_KEYS else float(value)
    except ValueError:
        raise ParseError(f"{key}: not a number: {value!r}") from None


@dataclass
class RunSettings:
    """Oracle and characterizer settings read from one configuration file."""

    oracle_params: AnalyticParams = field(default_factory=AnalyticParams)
    char_config: CharConfig = field(default_factory=CharConfig)
    grid_dump: Optional[str] = None

    def oracle(self) -> DelayOracle:
        if self.grid_dump is None:
            return AnalyticOracle(self.oracle_params)
        with open(self.grid_dump) as fh:
            return parse_grid_dump(fh.read(), self.oracle_params.f_bar)


def parse_config(text: str, base_dir: str = ".", overrides: Optional[Dict[str, float]] = None) -> RunSettings:
    """Build :class:`RunSettings`; ``overrides`` win over file values."""
    raw = parse_key_values(text, set(ORACLE_KEYS) | set(CHAR_KEYS) | {"grid_dump"})
    grid = raw.pop("grid_dump", None)
    values = {k: _number(k, v) for k, v in raw.items()}
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    try:
        params = AnalyticParams(**{k: v for k, v in values.items() if k in ORACLE_KEYS})
        cfg = CharConfig(**{k: v for k, v in values.items() if k in CHAR_KEYS})
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if grid is not None and not os.path.isabs(grid):
        grid = os.path.join(base_dir, grid)
    return RunSettings(params, cfg, grid)


def write_config(settings: RunSettings) -> str:
    lines = [f"{k} = {getattr(settings.oracle_params, k)!r}" for k in ORACLE_KEYS]
    lines += [f"{k} = {getattr(settings.char_config, k)!r}" for k in CHAR_KEYS]
    if settings.grid_dump is not None:
        lines.append(f"grid_dump = {settings.grid_dump}")
    return "\n".join(lines) + "\n"


def parse_classic_params(text: str) -> ClassicFFParams:
    """``t_su``, ``t_h`` and ``d_cq`` (plus optional ``degradation_factor``)."""
    raw = parse_key_values(text, set(CLASSIC_KEYS))
    missing = {"t_su", "t_h", "d_cq"} - set(raw)
    if missing:
        raise ParseError(f"missing keys: {', '.join(sorted(missing))}")
    try:
        return ClassicFFParams(**{k: _number(k, v) for k, v in raw.items()})
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def write_classic_params(params: ClassicFFParams) -> str:
    return "".join(f"{k} = {getattr(params, k)!r}\n" for k in CLASSIC_KEYS)
