"""Circuit ingestion: stage graphs, gate netlists and synthetic benchmarks.

A stage graph lists flip-flops and the max/min combinational delay between
each ordered pair that is connected. Gate netlists are reduced to a stage
graph by longest/shortest path over the acyclic gate network.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ParseError

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Stage:
    src: str
    dst: str
    d_max: float
    d_min: float


@dataclass(frozen=True)
class StageGraph:
    flipflops: Tuple[str, ...]
    stages: Tuple[Stage, ...]

    def __post_init__(self):
        object.__setattr__(self, "flipflops", tuple(self.flipflops))
        object.__setattr__(self, "stages", tuple(Stage(*s) if not isinstance(s, Stage) else s
                                                 for s in self.stages))
        if len(set(self.flipflops)) != len(self.flipflops):
            raise ValueError("flip-flop names must be unique")
        names = set(self.flipflops)
        pairs = set()
        for st in self.stages:
            if st.src not in names or st.dst not in names:
                raise ValueError(f"stage {st.src}->{st.dst} references an unknown flip-flop")
            if not 0 <= st.d_min <= st.d_max:
                raise ValueError(f"stage {st.src}->{st.dst} needs 0 <= d_min <= d_max")
            if (st.src, st.dst) in pairs:
                raise ValueError(f"duplicate stage {st.src}->{st.dst}")
            pairs.add((st.src, st.dst))

    @property
    def n_ff(self):
        return len(self.flipflops)

    def index(self) -> Dict[str, int]:
        return {n: i for i, n in enumerate(self.flipflops)}

    def fanin(self, name) -> List[Stage]:
        return [s for s in self.stages if s.dst == name]

    def fanout(self, name) -> List[Stage]:
        return [s for s in self.stages if s.src == name]


@dataclass(frozen=True)
class Gate:
    name: str
    d_min: float
    d_max: float


@dataclass(frozen=True)
class Netlist:
    flipflops: Tuple[str, ...]
    gates: Tuple[Gate, ...]
    nets: Tuple[Tuple[str, str], ...] = field(default_factory=tuple)


# --------------------------------------------------------------------------
# parsing


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _name(tok, lineno):
    if not NAME_RE.match(tok):
        raise ParseError(f"invalid name {tok!r}", lineno)
    return tok


def _keyvals(tokens, keys, lineno) -> Dict[str, float]:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in keys:
            raise ParseError(f"expected one of {', '.join(k + '=' for k in keys)}, got {tok!r}", lineno)
        if key in out:
            raise ParseError(f"{key} given twice", lineno)
        try:
            out[key] = float(val)
        except ValueError:
            raise ParseError(f"malformed number {val!r} for {key}", lineno) from None
        if out[key] != out[key] or out[key] in (float("inf"), float("-inf")):
            raise ParseError(f"{key} must be finite", lineno)
    missing = [k for k in keys if k not in out]
    if missing:
        raise ParseError(f"missing {', '.join(missing)}", lineno)
    return out


def parse_stage_graph(text: str) -> StageGraph:
    ffs: List[str] = []
    stages: List[Stage] = []
    seen = set()
    pairs = set()
    for lineno, tok in _lines(text):
        kind = tok[0]
        if kind == "ff":
            if len(tok) != 2:
                raise ParseError("expected 'ff <name>'", lineno)
            name = _name(tok[1], lineno)
            if name in seen:
                raise ParseError(f"duplicate flip-flop {name!r}", lineno)
            seen.add(name)
            ffs.append(name)
        elif kind == "stage":
            if len(tok) != 5:
                raise ParseError("expected 'stage <src> <dst> dmax=<ps> dmin=<ps>'", lineno)
            src, dst = _name(tok[1], lineno), _name(tok[2], lineno)
            for n in (src, dst):
                if n not in seen:
                    raise ParseError(f"unknown flip-flop {n!r}", lineno)
            kv = _keyvals(tok[3:], ("dmax", "dmin"), lineno)
            if kv["dmin"] < 0:
                raise ParseError("dmin must be >= 0", lineno)
            if kv["dmin"] > kv["dmax"]:
                raise ParseError(f"dmin={kv['dmin']} exceeds dmax={kv['dmax']}", lineno)
            if (src, dst) in pairs:
                raise ParseError(f"duplicate stage {src} -> {dst}", lineno)
            pairs.add((src, dst))
            stages.append(Stage(src, dst, kv["dmax"], kv["dmin"]))
        else:
            raise ParseError(f"unknown statement {kind!r}", lineno)
    return StageGraph(tuple(ffs), tuple(stages))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_stage_graph(graph: StageGraph) -> str:
    out = [f"ff {n}" for n in graph.flipflops]
    out += [f"stage {s.src} {s.dst} dmax={_fmt(s.d_max)} dmin={_fmt(s.d_min)}" for s in graph.stages]
    return "\n".join(out) + "\n"


def parse_gate_netlist(text: str) -> Netlist:
    ffs: List[str] = []
    gates: List[Gate] = []
    nets: List[Tuple[str, str, int]] = []
    kinds: Dict[str, str] = {}
    for lineno, tok in _lines(text):
        kind = tok[0]
        if kind == "ff":
            if len(tok) != 2:
                raise ParseError("expected 'ff <name>'", lineno)
            name = _name(tok[1], lineno)
            if name in kinds:
                raise ParseError(f"duplicate element {name!r}", lineno)
            kinds[name] = "ff"
            ffs.append(name)
        elif kind == "gate":
            if len(tok) != 4:
                raise ParseError("expected 'gate <name> dmin=<ps> dmax=<ps>'", lineno)
            name = _name(tok[1], lineno)
            if name in kinds:
                raise ParseError(f"duplicate element {name!r}", lineno)
            kv = _keyvals(tok[2:], ("dmin", "dmax"), lineno)
            if kv["dmin"] < 0 or kv["dmin"] > kv["dmax"]:
                raise ParseError(f"gate {name} needs 0 <= dmin <= dmax", lineno)
            kinds[name] = "gate"
            gates.append(Gate(name, kv["dmin"], kv["dmax"]))
        elif kind == "net":
            if len(tok) != 3:
                raise ParseError("expected 'net <src> <dst>'", lineno)
            nets.append((_name(tok[1], lineno), _name(tok[2], lineno), lineno))
        else:
            raise ParseError(f"unknown statement {kind!r}", lineno)
    for src, dst, lineno in nets:
        for n in (src, dst):
            if n not in kinds:
                raise ParseError(f"net references undeclared element {n!r}", lineno)
    netlist = Netlist(tuple(ffs), tuple(gates), tuple((a, b) for a, b, _ in nets))
    cycle = _gate_cycle(netlist)
    if cycle is not None:
        at = next((ln for a, b, ln in nets if a == cycle and kinds[b] == "gate"), None)
        raise ParseError(f"combinational loop through gate {cycle!r}", at)
    return netlist


def _gate_successors(netlist: Netlist) -> Dict[str, List[str]]:
    gates = {g.name for g in netlist.gates}
    succ: Dict[str, List[str]] = {g: [] for g in gates}
    for a, b in netlist.nets:
        if a in gates and b in gates:
            succ[a].append(b)
    return succ


def _gate_order(netlist: Netlist) -> Tuple[List[str], Optional[str]]:
    """Topological order of the gates (Kahn); second item names a gate on a cycle."""
    succ = _gate_successors(netlist)
    indeg = {g: 0 for g in succ}
    for g in succ:
        for b in succ[g]:
            indeg[b] += 1
    order = [g.name for g in netlist.gates if indeg[g.name] == 0]
    i = 0
    while i < len(order):
        for b in succ[order[i]]:
            indeg[b] -= 1
            if indeg[b] == 0:
                order.append(b)
        i += 1
    if len(order) == len(succ):
        return order, None
    # walk predecessors-with-nonzero-indegree until a node repeats: that node is on a cycle
    left = {g for g, d in indeg.items() if d > 0}
    node = next(g.name for g in netlist.gates if g.name in left)
    preds = {g: [a for a in succ if g in succ[a] and a in left] for g in left}
    visited = set()
    while node not in visited:
        visited.add(node)
        node = preds[node][0]
    return order, node


def _gate_cycle(netlist: Netlist) -> Optional[str]:
    return _gate_order(netlist)[1]


def extract_stages(netlist: Netlist) -> StageGraph:
    """Max/min gate-delay sums over all FF-to-FF paths through gates only."""
    order, cyc = _gate_order(netlist)
    if cyc is not None:
        raise ValueError(f"combinational loop through gate {cyc!r}")
    gates = {g.name: g for g in netlist.gates}
    ffset = set(netlist.flipflops)
    succ_all: Dict[str, List[str]] = {}
    for a, b in netlist.nets:
        succ_all.setdefault(a, []).append(b)
    bounds: Dict[Tuple[str, str], Tuple[float, float]] = {}

    def record(src, dst, lo, hi):
        if (src, dst) in bounds:
            plo, phi = bounds[src, dst]
            lo, hi = min(lo, plo), max(hi, phi)
        bounds[src, dst] = (lo, hi)

    for src in netlist.flipflops:
        # (min, max) arrival at each gate output reachable from src
        arrival: Dict[str, Tuple[float, float]] = {}
        for b in succ_all.get(src, []):
            if b in ffset:
                record(src, b, 0.0, 0.0)
            else:
                arrival[b] = (gates[b].d_min, gates[b].d_max)
        for g in order:
            if g not in arrival:
                continue
            lo, hi = arrival[g]
            for b in succ_all.get(g, []):
                if b in ffset:
                    record(src, b, lo, hi)
                else:
                    cand = (lo + gates[b].d_min, hi + gates[b].d_max)
                    if b in arrival:
                        cand = (min(cand[0], arrival[b][0]), max(cand[1], arrival[b][1]))
                    arrival[b] = cand
    stages = [Stage(s, d, bounds[s, d][1], bounds[s, d][0])
              for s in netlist.flipflops for d in netlist.flipflops if (s, d) in bounds]
    return StageGraph(netlist.flipflops, tuple(stages))


def parse_circuit(text: str) -> StageGraph:
    """Parse either grammar; files with gate or net statements are netlists."""
    for _, tok in _lines(text):
        if tok[0] in ("gate", "net"):
            return extract_stages(parse_gate_netlist(text))
    return parse_stage_graph(text)


def generate_random_stage_graph(n_ff: int, n_stage: int, dmax_range=(100.0, 500.0),
                                dmin_fraction_range=(0.05, 0.5), seed: int = 0,
                                prefix: str = "ff") -> StageGraph:
    """Seeded random stage graph with distinct (src, dst) pairs, self-loops allowed."""
    if n_ff < 1:
        raise ValueError("n_ff must be >= 1")
    if not 0 <= n_stage <= n_ff * n_ff:
        raise ValueError(f"cannot place {n_stage} distinct stages on {n_ff} flip-flops "
                         f"(at most {n_ff * n_ff} ordered pairs)")
    lo, hi = dmax_range
    flo, fhi = dmin_fraction_range
    if not (0 <= lo <= hi and 0 <= flo <= fhi <= 1):
        raise ValueError("invalid delay ranges")
    rng = random.Random(seed)
    names = tuple(f"{prefix}{i}" for i in range(n_ff))
    if n_stage > n_ff * n_ff // 2:
        pairs = rng.sample([(i, j) for i in range(n_ff) for j in range(n_ff)], n_stage)
    else:
        chosen = set()
        pairs = []
        while len(pairs) < n_stage:
            p = (rng.randrange(n_ff), rng.randrange(n_ff))
            if p not in chosen:
                chosen.add(p)
                pairs.append(p)
    stages = []
    for i, j in pairs:
        dmax = rng.uniform(lo, hi)
        stages.append(Stage(names[i], names[j], dmax, dmax * rng.uniform(flo, fhi)))
    return StageGraph(names, tuple(stages))


def path_bounds_brute_force(netlist: Netlist) -> Dict[Tuple[str, str], Tuple[float, float]]:
    """Enumerate every FF-to-FF path explicitly; (d_min, d_max) per pair. Small inputs only."""
    gates = {g.name: g for g in netlist.gates}
    ffset = set(netlist.flipflops)
    succ: Dict[str, List[str]] = {}
    for a, b in netlist.nets:
        succ.setdefault(a, []).append(b)
    out: Dict[Tuple[str, str], Tuple[float, float]] = {}

    def walk(src, node, lo, hi):
        for b in succ.get(node, []):
            if b in ffset:
                plo, phi = out.get((src, b), (lo, hi))
                out[src, b] = (min(plo, lo), max(phi, hi))
            else:
                walk(src, b, lo + gates[b].d_min, hi + gates[b].d_max)

    for f in netlist.flipflops:
        walk(f, f, 0.0, 0.0)
    return out


def as_stage_list(graph: StageGraph) -> Sequence[Tuple[str, str, float, float]]:
    return [(s.src, s.dst, s.d_max, s.d_min) for s in graph.stages]
