from hypothesis import given, settings
from hypothesis import strategies as st

from qsolve.conflict import ClauseDatabase, Trail, analyze_conflict, clause_as_row, row_literals


def _worked_trail():
    t = Trail()
    t.push(1, 1, 1)
    t.push(21, 0, 10)
    t.push(7, 0, 12)
    t.push(2, 0, 14)
    t.push(3, 0, 15)
    # x2 + x3 + x9 >= 1 in <= form
    t.push(9, 0, 16, reason=((2, -1), (3, -1), (9, -1)))
    t.push(15, 1, 20)
    return t


def test_worked_conflict_learns_expected_clause():
    # 3x1 + 5x7 + 6x9 - 3x15 - 3x21 >= 6 in <= form
    a = _worked_trail().analyze_row(((1, -3), (7, -5), (9, -6), (15, 3), (21, 3)))
    assert clause_as_row(a.clause) == ({2: 1, 3: 1, 7: 1, 15: -1}, 0)
    assert a.asserting == (15, 0)
    assert a.target == 15
    assert a.level == 20


def test_clause_as_row_counts_negative_literals():
    assert clause_as_row([(2, 1), (3, 1), (15, 0)]) == ({2: 1, 3: 1, 15: -1}, 0)
    assert clause_as_row([(4, 0), (5, 0)]) == ({4: -1, 5: -1}, -1)


def test_row_literals_skip_non_contributing_columns():
    value = {0: 1, 1: 0, 2: 1, 3: -1}.get
    assert row_literals(((0, 2), (1, 3), (2, -1), (3, 5)), value) == [(0, 0)]


def test_single_level_decisions_give_previous_level_as_target():
    levels = {0: 3, 1: 3}
    a = analyze_conflict([(0, 0), (1, 0)], levels.__getitem__, {0: 0, 1: 1}.__getitem__, lambda j: None)
    assert a.clause == ((0, 0), (1, 0))
    assert a.asserting is None
    assert a.target == 0


def test_erasable_top_literal_is_removed():
    levels = {0: 1, 1: 2, 2: 3}
    position = {0: 0, 1: 1, 2: 2}
    a = analyze_conflict(
        [(0, 1), (1, 1), (2, 1)],
        levels.__getitem__,
        position.__getitem__,
        lambda j: None,
        erasable=lambda j, clause: j == 2,
    )
    assert a.clause == ((0, 1), (1, 1))
    assert a.erased == ((2, 1),)
    assert a.asserting == (1, 1)


def test_clause_database_watches_latest_literals():
    db = ClauseDatabase(4)
    order = {0: 0, 1: 2, 2: 1}
    idx = db.add([(0, 1), (1, 0), (2, 1)], order.__getitem__)
    assert len(db) == 1
    watched = {db.clauses[idx][i] for i in db.watched[idx]}
    assert watched == {(1, 0), (2, 1)}
    assert idx in db.watches[2 * 1 + 0] and idx in db.watches[2 * 2 + 1]
    db.bump(idx)
    assert db.activity[idx] == 2.0


@st.composite
def trails(draw):
    n = draw(st.integers(3, 10))
    t = Trail()
    level = 0
    for j in range(n):
        v = draw(st.integers(0, 1))
        earlier = list(t.entries)
        implied = earlier and draw(st.booleans())
        if implied:
            support = draw(st.lists(st.sampled_from(earlier), min_size=1, max_size=3, unique=True))
            # A clause over earlier columns, all false, plus the literal x_j = v.
            reason = [(i, 1 if t.value(i) == 1 else -1) for i in support]
            reason.append((j, -1 if v == 1 else 1))
            # <= form of: sum over the falsified literals + the implied one >= 1
            t.push(j, v, level, reason=tuple((i, -a) for i, a in reason))
        else:
            level += 1
            t.push(j, v, level)
    return t


@settings(max_examples=200, deadline=None)
@given(trails(), st.data())
def test_learnt_clause_is_false_under_the_trail(trail, data):
    cols = list(trail.entries)
    support = data.draw(st.lists(st.sampled_from(cols), min_size=1, max_size=5, unique=True))
    coefs = tuple((j, 1 if trail.value(j) == 1 else -1) for j in support)
    a = trail.analyze_row(coefs)
    for j, v in a.clause:
        assert trail.value(j) != v
        assert trail.entries[j].reason is None
    assert a.level >= a.target
