import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsolve.model import (
    NEG_INF,
    POS_INF,
    UNKNOWN,
    InvalidProgram,
    Quantifier,
    Sense,
    binarize,
    bits_for,
    ext_max,
    ext_min,
    format_value,
    leq,
    make_program,
    normalize_sense,
    report_value,
    validate,
)

from instances import random_instance


def test_blocks_follow_quantifier_runs():
    p = make_program([0] * 5, "EEAAE")
    assert [(b.start, b.stop) for b in p.blocks] == [(0, 2), (2, 4), (4, 5)]
    assert len(p.blocks) == 3 and p.gamma == 0
    assert p.block_of(3) == 1


def test_unknown_is_a_singleton_and_ignored_by_extremes():
    assert UNKNOWN is type(UNKNOWN)()
    assert ext_max([UNKNOWN, Fraction(3), NEG_INF]) == 3
    assert ext_min([Fraction(3), POS_INF, UNKNOWN]) == 3
    assert ext_max([UNKNOWN]) is UNKNOWN
    assert format_value(POS_INF) == "+inf"


def test_validation_rules():
    bad_order = make_program([1, 1], "EA", lower=[1, 0], upper=[0, 1])
    assert "bounds-order" in validate(bad_order).rules()
    cont_univ = make_program([1, 1], "EA", kinds="ic")
    assert "continuous-universal" in validate(cont_univ).rules()
    cont_early = make_program([1, 1, 1], "EAE", kinds="cii")
    assert "continuous-not-final" in validate(cont_early).rules()
    empty = make_program([1], "E", lower=[Fraction(1, 3)], upper=[Fraction(2, 3)])
    assert "empty-domain" in validate(empty).rules()
    infeasible = make_program([1, 1], "EA", forall_rows=[leq([0, 1], -1)])
    assert "universal-infeasible" in validate(infeasible).rules()
    with pytest.raises(InvalidProgram):
        binarize(infeasible)


def test_normalize_sense_is_idempotent():
    p = make_program([1, -2], "EA", sense=Sense.MINIMIZE)
    q = normalize_sense(p)
    assert q.sense is Sense.MAXIMIZE and q.negated
    assert q.objective == (-1, 2)
    assert normalize_sense(q) == q
    assert report_value(q, Fraction(5)) == -5
    assert report_value(q, POS_INF) == NEG_INF


def test_bits_for_domains():
    assert [bits_for(s) for s in (1, 2, 3, 4, 5, 8, 9)] == [1, 1, 2, 2, 3, 3, 4]


def test_binarize_adds_bound_row_for_non_power_of_two_domain():
    p = make_program([1, 0], "EA", lower=[0, -1], upper=[2, 1])
    bp = binarize(p)
    assert bp.program.n == 4
    assert bp.bound_rows == 2
    assert all(q is Quantifier.EXISTS for q in bp.program.quantifiers[:2])


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_binarize_round_trip_preserves_objective_and_rows(seed):
    p = random_instance(seed).program
    bp = binarize(p)
    ranges = [p.domain(j) if p.is_integer(j) else [p.lower[j]] for j in range(p.n)]
    for x in itertools.islice(itertools.product(*ranges), 200):
        enc = bp.encode(x)
        assert bp.decode(enc) == tuple(Fraction(v) for v in x)
        assert bp.program.objective_value(enc) + bp.offset == p.objective_value(x)
        assert bp.program.exists_ok(enc) == p.exists_ok(x)
        assert bp.program.forall_ok(enc) == p.forall_ok(x)
