"""Small worked instances with known values, shared by tests and the CLI."""

from __future__ import annotations

from fractions import Fraction

from .model import POS_INF, NEG_INF, QuantifiedProgram, Sense, eq, geq, leq, make_program

SAMPLE_QLP = """\
MINIMIZE
x1 +2x2 -5x3 +x4
SUBJECT TO
 x1 -2x2 +x3 -x4 <= 1
-x1 + x2 +x3 -x4 <= 1
UNCERTAINTY SUBJECT TO
x1 - x3 <= 1
BOUNDS
0 <= x1 <= 2
0 <= x2 <= 1
0 <= x3 <= 1
0 <= x4 <= 1
BINARIES
x2 x3
GENERAL
x1
EXISTS
x1 x2 x4
ALL
x3
ORDER
x1 x2 x3 x4
END
"""


def continuous_recourse_example() -> QuantifiedProgram:
    """Binary first stage, binary uncertainty, continuous recourse in [-2, 2]."""
    rows = [
        leq([-10, -4, 2], 0),
        leq([-10, 4, -2], 4),
        leq([10, 4, 1], 12),
        leq([10, -4, -1], 8),
    ]
    return make_program(
        [1, 1, -1], "EAE", lower=[0, 0, -2], upper=[1, 1, 2], exists_rows=rows, kinds="iic"
    )


def decision_dependent_example() -> QuantifiedProgram:
    """First-stage choice in {1, 2, 3} shapes the legal universal replies."""
    return make_program(
        [1, 1, 2],
        "EAA",
        lower=[1, 0, 0],
        upper=[3, 1, 1],
        exists_rows=[leq([1, 1, 1], 3), leq([2, -3, 0], 3)],
        forall_rows=[geq([-1, 2, 1], 0)],
    )


def four_level_example() -> QuantifiedProgram:
    """Binary four-variable instance with interdependent universal rows."""
    return make_program(
        [2, 1, -2, -2],
        "EAEA",
        exists_rows=[geq([-1, 1, 1, 0], 0), eq([0, 1, -1, 0], 0), leq([1, 1, 1, 0], 2)],
        forall_rows=[geq([-1, 1, 1, 0], 0), leq([1, 1, 0, 0], 1), geq([1, -1, -1, 0], -1)],
    )


def _no_suicide(universal_follows: bool) -> QuantifiedProgram:
    link = geq([-1, 1, 0, 0, 0], 0) if universal_follows else leq([-1, 1, 0, 0, 0], 0)
    return make_program(
        [0, 0, 0, 0, 0],
        "EAEAE",
        exists_rows=[geq([0, 0, 1, 0, 0], 1), eq([0, Fraction(1, 2), 0, 0, 1], Fraction(1, 2))],
        forall_rows=[leq([0, 0, 1, 0, 0], 0), link],
        names=["x0", "y0", "x1", "y1", "x2"],
    )


def no_suicide_example() -> QuantifiedProgram:
    """Both systems conflict; the existential player loses first."""
    return _no_suicide(False)


def no_suicide_win_example() -> QuantifiedProgram:
    """Variant where the existential player can exhaust the universal moves."""
    return _no_suicide(True)


def bound_in_domain_example() -> QuantifiedProgram:
    """``x2 >= 1`` imposed through the domain of the universal variable."""
    row = leq([1, 1], 1)
    return make_program([1, 0], "EA", lower=[0, 1], upper=[1, 1], exists_rows=[row], forall_rows=[row])


def bound_in_rows_example() -> QuantifiedProgram:
    """``x2 >= 1`` imposed only as a universal row."""
    row = leq([1, 1], 1)
    return make_program([1, 0], "EA", exists_rows=[row], forall_rows=[row, geq([0, 1], 1)])


def scenario_relaxation_example() -> QuantifiedProgram:
    """Two-round binary game used to compare scenario relaxations."""
    return make_program(
        [2, -1, 1, 1],
        "EAEA",
        exists_rows=[leq([1, 1, 1, 1], 3), leq([0, -1, -1, 1], 0)],
    )


def dominance_example() -> QuantifiedProgram:
    """Instance where a MIP-style dominance row destroys feasibility."""
    return make_program(
        [-1, -1, -1],
        "EAE",
        exists_rows=[leq([-3, 2, -2], 0), leq([1, -2, 1], 0)],
    )


def dominance_fixed_example() -> QuantifiedProgram:
    """``dominance_example`` with the row ``x3 <= x1`` added."""
    p = dominance_example()
    return make_program(
        [-1, -1, -1],
        "EAE",
        exists_rows=list(p.exists_rows) + [leq([-1, 0, 1], 0)],
    )


def lp_example():
    """``max 2x1 + x3 - 1`` over a small box; optimum 2 at (1, 1)."""
    return dict(
        rows=[leq([1, 1], 2), leq([0, -1], 1)],
        objective=[2, 1],
        constant=-1,
        lower=[0, 0],
        upper=[1, 1],
    )


def uniform_tree(depth: int) -> QuantifiedProgram:
    """Constraint-free alternating binary game, used for pruning counts."""
    q = "".join("E" if t % 2 == 0 else "A" for t in range(depth))
    return make_program([1 << (depth - 1 - t) for t in range(depth)], q)


EXPECTED = {
    "continuous_recourse_example": (Fraction(1), (0, 1, 0)),
    "decision_dependent_example": (Fraction(2), (1, 1, 0)),
    "four_level_example": (Fraction(-2), (0, 0, 0, 1)),
    "no_suicide_example": (NEG_INF, None),
    "no_suicide_win_example": (POS_INF, None),
    "bound_in_domain_example": (Fraction(0), None),
    "bound_in_rows_example": (POS_INF, None),
    "scenario_relaxation_example": (Fraction(1), None),
    "dominance_example": (Fraction(-2), (0, 1, 1)),
    "dominance_fixed_example": (NEG_INF, None),
}

BUILDERS = {
    "continuous_recourse_example": continuous_recourse_example,
    "decision_dependent_example": decision_dependent_example,
    "four_level_example": four_level_example,
    "no_suicide_example": no_suicide_example,
    "no_suicide_win_example": no_suicide_win_example,
    "bound_in_domain_example": bound_in_domain_example,
    "bound_in_rows_example": bound_in_rows_example,
    "scenario_relaxation_example": scenario_relaxation_example,
    "dominance_example": dominance_example,
    "dominance_fixed_example": dominance_fixed_example,
}

__all__ = ["SAMPLE_QLP", "BUILDERS", "EXPECTED", "Sense"]
