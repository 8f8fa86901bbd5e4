"""Search-based solver for quantified integer programs with interdependent domains."""

from .mcn import McnSpec, build_mcn, gen_graph
from .model import (
    NEG_INF,
    POS_INF,
    UNKNOWN,
    LinearRow,
    QuantifiedProgram,
    Quantifier,
    Sense,
    VarKind,
    make_program,
)
from .oracle import extended_minimax, game_value, verify_strategy
from .qlp import parse_qlp, write_qlp, write_solution_xml
from .search import SolveResult, SolverConfig, Status, solve

__all__ = [
    "LinearRow",
    "McnSpec",
    "NEG_INF",
    "POS_INF",
    "QuantifiedProgram",
    "Quantifier",
    "Sense",
    "SolveResult",
    "SolverConfig",
    "Status",
    "UNKNOWN",
    "VarKind",
    "build_mcn",
    "extended_minimax",
    "game_value",
    "gen_graph",
    "make_program",
    "parse_qlp",
    "solve",
    "verify_strategy",
    "write_qlp",
    "write_solution_xml",
]
