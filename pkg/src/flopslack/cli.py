"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 input or parse error,
3 infeasible timing, 4 solver or enumeration limit.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from typing import Dict, List, Optional, Sequence

from .characterizer import CharConfig, characterize
from .circuits import StageGraph, generate_random_stage_graph, parse_circuit, write_stage_graph
from .classic import (DEFAULT_FACTOR, ONSET_FACTOR, ClassicFFParams, characterize_classic,
                      count_violations, improvement_percent, min_period_classic)
from .config import RunSettings, parse_classic_params, parse_config, write_classic_params
from .errors import (CharacterizationError, DomainError, EnumerationLimitError, InfeasibleError,
                     ParseError, SolverLimitError)
from .milp import export_lp_text
from .model import parse_model, serialize_model, validate_model
from .optimizer import (SolveOptions, Solution, build_milp, compute_trim_bounds, solve_min_period,
                        trim, untrimmed_problem)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2, 3, 4

#: column order of the comparison report
COMPARE_COLUMNS = ("circuit", "n_s", "n_t", "g_t", "T_classic", "T_ilp", "t_s", "t'_s",
                   "v_p^s", "v_f^s", "v_p^h", "v_f^h", "runtime")
SWEEP_COLUMNS = ("target", "d_th", "n_polygons", "circuits", "optimal", "T_mean", "nodes",
                 "runtime")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# input helpers


def _read(path: str, what: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _settings(args) -> RunSettings:
    overrides = {"d_th": getattr(args, "d_th", None), "k_th": getattr(args, "k_th", None)}
    if args.config is None:
        return parse_config("", overrides=overrides)
    text = _read(args.config, "config")
    try:
        return parse_config(text, os.path.dirname(os.path.abspath(args.config)), overrides)
    except ParseError as exc:
        raise ParseError(f"{args.config}: {exc}") from None


def _circuit(path: Optional[str]) -> StageGraph:
    if path is None:
        raise UsageError("--circuit is required")
    text = _read(path, "circuit")
    try:
        return parse_circuit(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _model(path: Optional[str]):
    if path is None:
        raise UsageError("--model is required")
    text = _read(path, "model")
    try:
        return parse_model(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _classic(args, factor: Optional[float] = None) -> ClassicFFParams:
    if getattr(args, "params", None) is not None:
        try:
            return parse_classic_params(_read(args.params, "params"))
        except ParseError as exc:
            raise ParseError(f"{args.params}: {exc}") from None
    settings = _settings(args)
    f = factor if factor is not None else args.factor
    return characterize_classic(settings.oracle(), f, settings.char_config)


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# report formatting


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}".rstrip("0").rstrip(".") if abs(v) < 1e12 else repr(v)
    return str(v)


def format_table(rows: Sequence[Dict], columns: Sequence[str]) -> str:
    """Right-aligned text table with a header row."""
    cells = [[str(c) for c in columns]] + [[_cell(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    return "".join("  ".join(v.rjust(w) for v, w in zip(row, widths)).rstrip() + "\n"
                   for row in cells)


def format_machine(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def solution_document(sol: Solution) -> Dict:
    return {
        "T": sol.T, "status": sol.status, "gap": sol.gap,
        "n_s": sol.n_s, "n_t": sol.n_t, "n_p": sol.n_p, "g_t": sol.g_t,
        "removed_stages": sol.removed_stages, "removed_ffs": sol.removed_ffs,
        "t_floor": sol.t_floor, "nodes": sol.nodes, "runtime": sol.runtime,
        "flipflops": [{"name": n, "polygon": wp.polygon_id, "s": wp.s, "h": wp.h, "d_cq": wp.d_cq}
                      for n, wp in sol.points.items()],
    }


def solution_text(sol: Solution) -> str:
    head = (f"T = {_cell(sol.T)} ps  status = {sol.status}  gap = {_cell(sol.gap)}\n"
            f"n_s = {sol.n_s}  n_t = {sol.n_t}  n_p = {sol.n_p}  g_t = {sol.g_t:.2f}  "
            f"removed stages = {sol.removed_stages}  removed ffs = {sol.removed_ffs}  "
            f"nodes = {sol.nodes}  runtime = {sol.runtime:.3f} s\n\n")
    rows = [{"name": n, "polygon": wp.polygon_id, "s": wp.s, "h": wp.h, "d_cq": wp.d_cq}
            for n, wp in sol.points.items()]
    return head + format_table(rows, ("name", "polygon", "s", "h", "d_cq"))


def _report(doc: Dict, fmt: str, text: str) -> str:
    return format_machine(doc) if fmt == "machine" else text


def compare_row(name: str, graph: StageGraph, sol: Solution, classic: ClassicFFParams,
                onset: ClassicFFParams) -> Dict:
    """One comparison row; violations are the classic view at the optimized period."""
    t_classic = min_period_classic(graph, classic)
    t_onset = min_period_classic(graph, onset)
    v = count_violations(graph, classic, sol.T) if sol.T > 0 else None
    return {
        "circuit": name, "n_s": sol.n_s, "n_t": sol.n_t, "g_t": round(sol.g_t, 6),
        "T_classic": t_classic, "T_ilp": sol.T, "T_onset": t_onset,
        "t_s": improvement_percent(t_classic, sol.T),
        "t'_s": improvement_percent(t_onset, sol.T),
        "v_p^s": v.setup_paths if v else 0, "v_f^s": v.setup_ffs if v else 0,
        "v_p^h": v.hold_paths if v else 0, "v_f^h": v.hold_ffs if v else 0,
        "runtime": sol.runtime,
    }


# --------------------------------------------------------------------------
# subcommands


def cmd_characterize(args) -> int:
    settings = _settings(args)
    start = time.perf_counter()
    model = characterize(settings.oracle(), settings.char_config)
    runtime = time.perf_counter() - start
    _emit(serialize_model(model), args.out)
    doc = {"n_polygons": model.n_polygons, "query_count": model.query_count,
           "stable_delay": model.f_lower, "d_th": model.d_th, "runtime": runtime}
    text = (f"polygons = {model.n_polygons}  queries = {model.query_count}  "
            f"stable delay = {_cell(model.f_lower)}  runtime = {runtime:.3f} s\n")
    # the summary goes wherever the model does not
    (sys.stdout if args.out is not None else sys.stderr).write(_report(doc, args.format, text))
    return EXIT_OK


def cmd_validate_model(args) -> int:
    model = _model(args.model)
    rep = validate_model(model, _settings(args).oracle(), args.resolution)
    doc = {"grid_resolution": rep.grid_resolution, "max_abs_error": rep.max_abs_error,
           "coverage_fraction": rep.coverage_fraction, "interior_coverage": rep.interior_coverage,
           "margin": rep.margin, "worst_point": rep.worst_point, "d_th": model.d_th,
           "within_d_th": rep.max_abs_error <= model.d_th}
    text = (f"max |error| = {rep.max_abs_error:.4f} ps at {rep.worst_point} "
            f"(d_th = {_cell(model.d_th)})\n"
            f"coverage = {rep.coverage_fraction:.4f}  beyond k_th = {rep.interior_coverage:.4f}\n")
    _emit(_report(doc, args.format, text), args.out)
    return EXIT_OK


def cmd_sta(args) -> int:
    graph = _circuit(args.circuit)
    params = _classic(args)
    T = min_period_classic(graph, params)
    doc = {"T": T, "t_su": params.t_su, "t_h": params.t_h, "d_cq": params.d_cq,
           "degradation_factor": params.degradation_factor}
    text = (f"T = {_cell(T)} ps\nt_su = {_cell(params.t_su)}  t_h = {_cell(params.t_h)}  "
            f"d_cq = {_cell(params.d_cq)}  factor = {_cell(params.degradation_factor)}\n")
    _emit(_report(doc, args.format, text), args.out)
    if args.save_params:
        with open(args.save_params, "w") as fh:
            fh.write(write_classic_params(params))
    return EXIT_OK


def _solve_options(args) -> SolveOptions:
    return SolveOptions(trim=not args.no_trim, node_limit=args.node_limit,
                        time_limit=args.time_limit)


def cmd_optimize(args) -> int:
    graph = _circuit(args.circuit)
    model = _model(args.model)
    opts = _solve_options(args)
    if args.export_lp:
        problem = trim(graph, model, compute_trim_bounds(graph, model)) if opts.trim \
            else untrimmed_problem(graph, model)
        with open(args.export_lp, "w") as fh:
            fh.write(export_lp_text(build_milp(problem)[0]))
    sol = solve_min_period(graph, model, opts)
    _emit(_report(solution_document(sol), args.format, solution_text(sol)), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.target_t is None:
        raise UsageError("--target-t is required")
    if not args.target_t > 0:
        raise UsageError("--target-t must be > 0")
    graph = _circuit(args.circuit)
    params = _classic(args)
    v = count_violations(graph, params, args.target_t)
    doc = {"target_T": args.target_t, "v_p^s": v.setup_paths, "v_f^s": v.setup_ffs,
           "v_p^h": v.hold_paths, "v_f^h": v.hold_ffs}
    text = (f"target T = {_cell(args.target_t)} ps\n"
            f"setup: {v.setup_paths} paths, {v.setup_ffs} flip-flops\n"
            f"hold:  {v.hold_paths} paths, {v.hold_ffs} flip-flops\n")
    _emit(_report(doc, args.format, text), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    if not args.circuit:
        raise UsageError("--circuit is required")
    model = _model(args.model)
    classic = _classic(args, args.factor)
    onset = _classic(args, args.onset_factor) if args.params is None else classic
    rows = []
    for path in args.circuit:
        graph = _circuit(path)
        sol = solve_min_period(graph, model, _solve_options(args))
        rows.append(compare_row(os.path.basename(path), graph, sol, classic, onset))
    _emit(_report({"rows": rows}, args.format, format_table(rows, COMPARE_COLUMNS)), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    n_stage = args.n_stage if args.n_stage is not None else 2 * args.n_ff
    graph = generate_random_stage_graph(args.n_ff, n_stage, tuple(args.dmax_range),
                                        tuple(args.dmin_fraction), seed=args.seed)
    text = f"# random circuit: {args.n_ff} flip-flops, {n_stage} stages, seed {args.seed}\n"
    _emit(text + write_stage_graph(graph), args.out)
    return EXIT_OK


def coarsen_schedule(oracle, cfg: CharConfig, targets: Sequence[int], growth: float = 1.1,
                     max_steps: int = 200):
    """For each target, the model from the smallest d_th (on a geometric grid) within it.

    d_th starts at ``cfg.d_th`` and grows by ``growth`` until every target
    is met or the step budget runs out.
    """
    found = {}
    d = cfg.d_th
    for _ in range(max_steps):
        pending = [t for t in targets if t not in found]
        if not pending:
            break
        step = dataclasses.replace(cfg, d_th=d)
        model = characterize(oracle, step)
        for t in pending:
            if model.n_polygons <= t:
                found[t] = model
        d *= growth
    missing = [t for t in targets if t not in found]
    if missing:
        raise CharacterizationError(f"no d_th up to {d / growth:g} reaches {missing} polygons")
    return found


def run_sweep(graphs: Sequence[StageGraph], oracle, cfg: CharConfig, targets: Sequence[int],
              options: SolveOptions = SolveOptions()) -> List[Dict]:
    """One row per polygon target; runtime and nodes are summed over ``graphs``."""
    models = coarsen_schedule(oracle, cfg, targets)
    rows = []
    for t in sorted(targets):
        m = models[t]
        sols = [solve_min_period(g, m, options) for g in graphs]
        rows.append({"target": t, "d_th": m.d_th, "n_polygons": m.n_polygons,
                     "circuits": len(sols), "T": [s.T for s in sols],
                     "T_mean": sum(s.T for s in sols) / len(sols),
                     "status": [s.status for s in sols],
                     "optimal": sum(s.status == "optimal" for s in sols),
                     "nodes": sum(s.nodes for s in sols),
                     "runtime": sum(s.runtime for s in sols)})
    return rows


def cmd_sweep(args) -> int:
    if not args.circuit:
        raise UsageError("--circuit is required")
    graphs = [_circuit(path) for path in args.circuit]
    settings = _settings(args)
    try:
        targets = sorted({int(t) for t in args.targets.split(",")})
    except ValueError:
        raise UsageError(f"--targets must be comma-separated integers, got {args.targets!r}")
    if not targets or min(targets) < 1:
        raise UsageError("--targets must be positive")
    rows = run_sweep(graphs, settings.oracle(), settings.char_config, targets,
                     _solve_options(args))
    _emit(_report({"rows": rows}, args.format, format_table(rows, SWEEP_COLUMNS)), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flopslack", description="Setup/hold-aware clock period analysis.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, *, config=False, model=False, circuit=False, params=False, solve=False):
        sp.add_argument("--out", help="write the result here instead of standard output")
        sp.add_argument("--format", choices=("text", "machine"), default="text")
        if config:
            sp.add_argument("--config", help="key = value oracle/characterizer configuration")
        if model:
            sp.add_argument("--model", help="delay model file")
        if circuit:
            sp.add_argument("--circuit", help="stage or gate-level circuit file")
        if params:
            sp.add_argument("--params", help="classic t_su/t_h/d_cq file (skips characterization)")
            sp.add_argument("--factor", type=float, default=DEFAULT_FACTOR,
                            help="delay degradation factor for classic characterization")
        if solve:
            sp.add_argument("--no-trim", action="store_true", help="solve without trimming")
            sp.add_argument("--node-limit", type=int, default=100_000)
            sp.add_argument("--time-limit", type=float, default=None, help="seconds")
        return sp

    sp = common(sub.add_parser("characterize", help="build a delay model"), config=True)
    sp.add_argument("--d-th", type=float, help="override d_th")
    sp.add_argument("--k-th", type=float, help="override k_th")
    sp.set_defaults(func=cmd_characterize)

    sp = common(sub.add_parser("validate-model", help="compare a model with its oracle"),
                config=True, model=True)
    sp.add_argument("--resolution", type=float, default=1.0, help="grid step in ps")
    sp.set_defaults(func=cmd_validate_model)

    sp = common(sub.add_parser("sta", help="classic minimum period"),
                config=True, circuit=True, params=True)
    sp.add_argument("--save-params", help="also write the classic parameters here")
    sp.set_defaults(func=cmd_sta)

    sp = common(sub.add_parser("optimize", help="optimized minimum period"),
                model=True, circuit=True, solve=True)
    sp.add_argument("--export-lp", help="write the solved MILP in LP format")
    sp.set_defaults(func=cmd_optimize)

    sp = common(sub.add_parser("check", help="classic violations at a target period"),
                config=True, circuit=True, params=True)
    sp.add_argument("--target-t", type=float, help="clock period in ps")
    sp.set_defaults(func=cmd_check)

    sp = common(sub.add_parser("compare", help="classic vs optimized comparison rows"),
                config=True, model=True, params=True, solve=True)
    sp.add_argument("--circuit", action="append", help="circuit file (repeatable)")
    sp.add_argument("--onset-factor", type=float, default=ONSET_FACTOR,
                    help="degradation factor of the 'delay starts to rise' setting")
    sp.set_defaults(func=cmd_compare)

    sp = common(sub.add_parser("gen", help="seeded random stage circuit"))
    sp.add_argument("--n-ff", type=int, required=True)
    sp.add_argument("--n-stage", type=int, help="default: twice the flip-flop count")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dmax-range", type=float, nargs=2, default=(100.0, 500.0),
                    metavar=("LO", "HI"))
    sp.add_argument("--dmin-fraction", type=float, nargs=2, default=(0.05, 0.5),
                    metavar=("LO", "HI"), help="d_min as a fraction of d_max")
    sp.set_defaults(func=cmd_gen)

    sp = common(sub.add_parser("sweep", help="runtime and period versus polygon count"),
                config=True, solve=True)
    sp.add_argument("--circuit", action="append", help="circuit file (repeatable)")
    sp.add_argument("--targets", default="8,16,32,64", help="polygon count targets")
    sp.set_defaults(func=cmd_sweep)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n{parser.format_usage()}")
        return EXIT_USAGE
    except (ParseError, DomainError, CharacterizationError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except (SolverLimitError, EnumerationLimitError) as exc:
        sys.stderr.write(f"limit: {exc}\n")
        return EXIT_LIMIT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
