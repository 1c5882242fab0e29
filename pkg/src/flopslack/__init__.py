"""Setup/hold-aware static timing analysis.

A flip-flop's clock-to-q delay grows as its setup and hold slacks shrink.
This package characterizes that surface as a piecewise-linear model and
computes the minimum clock period of a circuit with a mixed-integer linear
program that lets each flip-flop pick its own working point, next to the
traditional constant setup/hold/clock-to-q analysis.
"""

from .characterizer import CharConfig, characterize
from .circuits import (Netlist, Stage, StageGraph, extract_stages, generate_random_stage_graph,
                       parse_circuit, parse_gate_netlist, parse_stage_graph, write_stage_graph)
from .classic import (ClassicFFParams, ViolationCounts, characterize_classic, count_violations,
                      min_period_classic)
from .errors import (BuildError, CharacterizationError, DegenerateFitError, DomainError,
                     EnumerationLimitError, FlopslackError, InfeasibleError, ParseError,
                     SolverLimitError)
from .estimators import ClassicSTA, DelaySurfaceCharacterizer, PeriodOptimizer
from .milp import MilpModel, bb_solve, export_lp_text, lp_solve
from .model import (PiecewiseDelayModel, PlaneCoefficients, Polygon, ValidationReport, fit_plane,
                    parse_model, serialize_model, validate_model)
from .optimizer import (Solution, SolveOptions, brute_force_min_period, build_milp,
                        compute_trim_bounds, solve_min_period, trim, validate_solution)
from .oracle import (REF45, AnalyticOracle, AnalyticParams, DelaySample, GridOracle, SlackPoint,
                     analytic_delay, grid_oracle, parse_grid_dump)

__version__ = "0.1.0"

__all__ = [
    "AnalyticOracle", "AnalyticParams", "BuildError", "CharConfig", "CharacterizationError",
    "ClassicFFParams", "ClassicSTA", "DegenerateFitError", "DelaySample",
    "DelaySurfaceCharacterizer", "DomainError", "EnumerationLimitError", "FlopslackError",
    "GridOracle", "InfeasibleError", "MilpModel", "Netlist", "ParseError", "PeriodOptimizer",
    "PiecewiseDelayModel", "PlaneCoefficients", "Polygon", "REF45", "SlackPoint", "Solution",
    "SolveOptions", "SolverLimitError", "Stage", "StageGraph", "ValidationReport",
    "ViolationCounts", "analytic_delay", "bb_solve", "brute_force_min_period", "build_milp",
    "characterize", "characterize_classic", "compute_trim_bounds", "count_violations",
    "export_lp_text", "extract_stages", "fit_plane", "generate_random_stage_graph",
    "grid_oracle", "lp_solve", "min_period_classic", "parse_circuit", "parse_gate_netlist",
    "parse_grid_dump", "parse_model", "parse_stage_graph", "serialize_model", "solve_min_period",
    "trim", "validate_model", "validate_solution", "write_stage_graph",
]
