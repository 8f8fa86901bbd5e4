from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsolve.golden import BUILDERS, EXPECTED, continuous_recourse_example
from qsolve.model import Quantifier, binarize, is_finite, leq, make_program
from qsolve.oracle import (
    NotWinning,
    StrategyNode,
    StrategyTree,
    TooLarge,
    Winning,
    block_minimax,
    enumerate_minimax,
    extended_minimax,
    game_value,
    is_simply_restricted,
    verify_strategy,
)

from instances import random_instance


def _leaf(*play):
    return StrategyNode(None, play=tuple(Fraction(v) for v in play))


def _recourse_strategy(first, replies):
    second = StrategyNode(1, Quantifier.FORALL, {v: _leaf(first, v, x3) for v, x3 in replies.items()})
    return StrategyTree(StrategyNode(0, Quantifier.EXISTS, {first: second}))


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_golden_values_by_both_routes(name):
    p = BUILDERS[name]()
    expected, pv = EXPECTED[name]
    assert enumerate_minimax(p).value == expected
    assert block_minimax(p).value == expected
    assert game_value(p).value == expected
    if pv is not None:
        assert game_value(p).pv == tuple(Fraction(v) for v in pv)


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_binarization_preserves_golden_values(name):
    p = BUILDERS[name]()
    bp = binarize(p)
    v = game_value(bp.program).value
    if is_finite(v):
        v += bp.offset
    assert v == EXPECTED[name][0]


def test_recourse_strategies_are_verified():
    p = continuous_recourse_example()
    good = _recourse_strategy(0, {0: -2, 1: 0})
    assert verify_strategy(p, good) == Winning(Fraction(1))
    other = _recourse_strategy(1, {0: 2, 1: -2})
    assert verify_strategy(p, other) == Winning(Fraction(-1))


def test_strategy_missing_a_universal_branch_is_rejected():
    p = continuous_recourse_example()
    tree = _recourse_strategy(0, {0: -2, 1: 0}).copy_without([(0, 0), (1, 1)])
    out = verify_strategy(p, tree)
    assert isinstance(out, NotWinning)
    assert "not covered" in out.reason


def test_strategy_with_infeasible_leaf_is_rejected():
    p = continuous_recourse_example()
    tree = _recourse_strategy(0, {0: 2, 1: 0})
    assert isinstance(verify_strategy(p, tree), NotWinning)


def test_guard_rejects_large_programs():
    p = make_program([1] * 30, "EA" * 15)
    with pytest.raises(TooLarge):
        extended_minimax(p, limit=2**10)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_routes_agree_and_strategy_wins(seed):
    p = random_instance(seed, max_bits=10).program
    full = enumerate_minimax(p, with_strategy=True)
    assert block_minimax(p).value == full.value
    if is_finite(full.value) and full.strategy is not None:
        assert verify_strategy(p, full.strategy) == Winning(full.value)


def test_simple_restriction_detection():
    assert is_simply_restricted(BUILDERS["scenario_relaxation_example"]())
    # y1 = 1 is illegal only through both rows together
    p = make_program([0, 0], "AA", forall_rows=[leq([1, 1], 1), leq([1, -1], 0)])
    assert not is_simply_restricted(p)
    q = make_program([0, 0], "AA", forall_rows=[leq([1, 1], 1)])
    assert is_simply_restricted(q)
