"""Command line driver: ``solve``, ``oracle``, ``gen-mcn`` and ``selftest``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import golden
from .mcn import VARIANTS, McnSpec, build_mcn, gen_graph, read_edge_list
from .model import InvalidProgram, format_value
from .oracle import DEFAULT_LIMIT, TooLarge, game_value
from .qlp import QlpError, parse_qlp, write_qlp, write_solution_xml
from .search import RELAXATION_MODES, SolverConfig, Status, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TIMEOUT = 2
EXIT_INFEASIBLE = 3

_STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.UNBOUNDED_WIN: EXIT_OK,
    Status.INCUMBENT: EXIT_TIMEOUT,
    Status.TIMEOUT: EXIT_TIMEOUT,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
}

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}


def _configure_logging() -> None:
    name = os.environ.get("QSOLVE_LOG", "quiet").strip().lower()
    level = _LOG_LEVELS.get(name, logging.WARNING)
    logger = logging.getLogger("qsolve")
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(name)s %(levelname)s %(message)s"))
        logger.addHandler(handler)


def _format_pv(pv) -> str:
    if pv is None:
        return "-"
    return ",".join(format_value(v) for v in pv)


def _stats_line(result) -> str:
    s = result.stats
    pairs = {
        "status": result.status.value,
        "value": format_value(result.value),
        "runtime": f"{result.runtime:.3f}",
        **{k: v for k, v in s.summary().items()},
        "backjumps": s.backjumps,
        "relax_prunes": s.relax_prunes,
    }
    return " ".join(f"{k}={v}" for k, v in pairs.items())


def _config(args) -> SolverConfig:
    return SolverConfig(
        time_limit=args.time_limit,
        simply_restricted=args.simply_restricted,
        scp=not args.no_scp,
        relaxation=args.relaxation,
        scenario_cap=args.scenario_cap,
        exact_lp=args.exact_lp,
        seed=args.seed,
    )


def _read_program(path: str):
    text = Path(path).read_text()
    return parse_qlp(text)


def cmd_solve(args) -> int:
    program = _read_program(args.file)
    result = solve(program, _config(args))
    out = Path(args.output) if args.output else Path(args.file + ".sol")
    out.write_text(write_solution_xml(result, Path(args.file).name, out.name))
    value = result.incumbent if result.status is Status.TIMEOUT else result.value
    print(f"status {result.status.value}")
    print(f"objective {format_value(value)}")
    print(f"pv {_format_pv(result.pv)}")
    print(_stats_line(result))
    return _STATUS_EXIT[result.status]


def cmd_oracle(args) -> int:
    program = _read_program(args.file)
    res = game_value(program, limit=args.limit)
    print(f"value {format_value(res.value)}")
    print(f"pv {_format_pv(res.pv)}")
    return EXIT_OK


def cmd_gen_mcn(args) -> int:
    if args.edges:
        graph = read_edge_list(Path(args.edges).read_text(), args.nodes)
    else:
        if args.nodes is None:
            raise ValueError("--nodes is required without --edges")
        graph = gen_graph(args.nodes, args.density, args.seed)
    spec = McnSpec(graph, args.omega, args.phi, args.lam, args.variant, args.seed)
    text = write_qlp(build_mcn(spec))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def selftest(out=None) -> bool:
    """Solve every worked example, compare with the known value and the oracle."""
    out = out or sys.stdout
    ok_all = True
    cases = [(name, build(), golden.EXPECTED[name][0]) for name, build in golden.BUILDERS.items()]
    cases.append(("sample_qlp", parse_qlp(golden.SAMPLE_QLP), -1))
    for name, program, expected in cases:
        result = solve(program)
        oracle = game_value(program).value
        ok = result.value == expected and oracle == expected
        ok_all &= ok
        print(
            f"{'PASS' if ok else 'FAIL'} {name} solver={format_value(result.value)} "
            f"oracle={format_value(oracle)} expected={format_value(expected)}",
            file=out,
        )
    return ok_all


def cmd_selftest(args) -> int:
    return EXIT_OK if selftest() else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsolve", description="Quantified integer program solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a QLP file and write <file>.sol")
    p.add_argument("file")
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--simply-restricted", action="store_true")
    p.add_argument("--no-scp", action="store_true")
    p.add_argument("--relaxation", choices=RELAXATION_MODES, default="fixed-scenario")
    p.add_argument("--scenario-cap", type=int, default=8)
    p.add_argument("--exact-lp", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="game value by full enumeration")
    p.add_argument("file")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="maximum number of plays")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen-mcn", help="emit a critical node instance as QLP")
    p.add_argument("--nodes", type=int)
    p.add_argument("--density", type=float, default=0.15)
    p.add_argument("--edges", help="edge list file instead of a random graph")
    p.add_argument("--omega", type=int, default=1, help="vaccination budget")
    p.add_argument("--phi", type=int, default=1, help="infection budget")
    p.add_argument("--lam", type=int, default=1, help="protection budget")
    p.add_argument("--variant", choices=VARIANTS, default="P")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_gen_mcn)

    p = sub.add_parser("selftest", help="check the worked examples")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (QlpError, InvalidProgram, TooLarge, ValueError, OSError) as exc:
        print(f"qsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


__all__ = ["build_parser", "main", "selftest"]
