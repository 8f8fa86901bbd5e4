import itertools
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from qsolve.golden import lp_example
from qsolve.lp import (
    IntegerSystem,
    LpProblem,
    certifies_infeasible,
    dual_bound,
    exact_simplex,
    farkas_cut,
    ip_feasible,
    primal_feasible,
    solve_lp,
)
from qsolve.model import leq


@st.composite
def small_lps(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(0, 5))
    coef = st.integers(-3, 3)
    rows = [leq([draw(coef) for _ in range(n)], draw(st.integers(-3, 4))) for _ in range(m)]
    c = [draw(coef) for _ in range(n)]
    lo = [draw(st.integers(-2, 0)) for _ in range(n)]
    hi = [draw(st.integers(0, 2)) for _ in range(n)]
    return rows, c, lo, hi


def test_small_example_optimum():
    ex = lp_example()
    p = LpProblem.from_rows(ex["rows"], ex["objective"], ex["lower"], ex["upper"])
    out = solve_lp(p, exact=True)
    assert out.optimal
    assert out.objective + ex["constant"] == 2
    assert out.x == (1, 1)


def test_crossed_bounds_are_infeasible():
    p = LpProblem.from_rows([leq([1], 0), leq([-1], -1)], [0], [-5], [5])
    out = exact_simplex(p)
    assert out.infeasible
    assert certifies_infeasible(p, out.ray)


@settings(max_examples=300, deadline=None)
@given(small_lps())
def test_float_lp_agrees_with_exact_lp(data):
    rows, c, lo, hi = data
    p = LpProblem.from_rows(rows, c, lo, hi)
    exact = exact_simplex(p)
    approx = solve_lp(p, exact=False)
    assert approx.status == exact.status
    if exact.optimal:
        assert abs(float(approx.objective) - float(exact.objective)) < 1e-6


@settings(max_examples=300, deadline=None)
@given(small_lps())
def test_exact_certificates(data):
    rows, c, lo, hi = data
    p = LpProblem.from_rows(rows, c, lo, hi)
    out = exact_simplex(p)
    if out.infeasible:
        assert certifies_infeasible(p, out.ray)
    else:
        assert primal_feasible(p, out.x)
        assert dual_bound(p, out.duals) == out.objective
        assert sum(ci * xi for ci, xi in zip(c, out.x)) == out.objective


@settings(max_examples=200, deadline=None)
@given(small_lps())
def test_integer_feasibility_matches_enumeration(data):
    rows, _, lo, hi = data
    points = itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)])
    brute = any(all(r.satisfied(x) for r in rows) for x in points)
    assert ip_feasible(rows, lo, hi) == brute
    sys_ = IntegerSystem(rows, len(lo), [True] * len(lo))
    w = sys_.witness(lo, hi)
    assert (w is not None) == brute
    if w is not None:
        assert all(r.satisfied(w) for r in rows)


def test_integer_system_with_continuous_column():
    # 2y = x with x integer in [0, 1] and y continuous: x = 1, y = 1/2 works
    rows = [leq([1, -2], 0), leq([-1, 2], 0), leq([-1, 0], -1)]
    sys_ = IntegerSystem(rows, 2, [True, False])
    w = sys_.witness([0, 0], [1, 1])
    assert w == (1, Fraction(1, 2))


def test_farkas_cut_excludes_fixation():
    # x1 + x2 >= 2 with x1 fixed to 0 and x2 in [0, 1] is infeasible
    rows = [leq([-1, -1], -2)]
    cut = farkas_cut([1], rows, [0, 0], [1, 1], {0: Fraction(0)})
    assert cut.violated
    assert cut.clause == ((0, Fraction(0)),)
    assert not cut.global_infeasible
    ok = farkas_cut([1], rows, [0, 0], [1, 1], {0: Fraction(1)})
    assert not ok.violated
