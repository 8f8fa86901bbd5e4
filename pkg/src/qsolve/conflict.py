"""Conflict analysis and the learnt clause store.

A literal ``(j, v)`` over a binary column reads "x_j = v".  A clause is
satisfied when one of its literals holds; a learnt clause is false under the
trail that produced it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

Literal = tuple[int, int]


def row_literals(
    coefs: Iterable[tuple[int, object]],
    value: Callable[[int], int],
    keep: Callable[[int], bool] = lambda j: True,
) -> list[Literal]:
    """Literals that would lower the activity of ``coefs @ x <= rhs``.

    A binary column contributes when it sits at its activity-maximizing
    value; its literal asks for the other value.
    """
    out = []
    for j, a in coefs:
        v = value(j)
        if v < 0 or not keep(j):
            continue
        if a > 0 and v == 1:
            out.append((j, 0))
        elif a < 0 and v == 0:
            out.append((j, 1))
    return out


def clause_as_row(clause: Iterable[Literal]) -> tuple[dict[int, int], int]:
    """``sum(coef * x) >= rhs`` form of a clause, e.g. ``x2 + x3 - x15 >= 0``."""
    coefs: dict[int, int] = {}
    rhs = 1
    for j, v in clause:
        if v == 1:
            coefs[j] = 1
        else:
            coefs[j] = -1
            rhs -= 1
    return coefs, rhs


@dataclass
class Analysis:
    clause: tuple[Literal, ...]
    level: int  # highest decision level in the clause
    target: int  # second-highest level; 0 for unit clauses
    asserting: Optional[Literal]  # the unique literal at ``level``, if any
    erased: tuple[Literal, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.clause


def analyze_conflict(
    literals: Iterable[Literal],
    level: Callable[[int], int],
    position: Callable[[int], int],
    reason: Callable[[int], Optional[Sequence[Literal]]],
    erasable: Optional[Callable[[int, Mapping[int, int]], bool]] = None,
) -> Analysis:
    """Turn the falsified ``literals`` of a conflict into a learnt clause.

    ``reason(j)`` returns the literals of the constraint that implied ``j``
    (restricted to earlier trail entries), ``[]`` to drop ``j`` entirely, or
    ``None`` to keep ``j`` as a literal.  Implied entries are expanded from
    the latest trail position backwards.  Afterwards, while the literal at
    the highest level is accepted by ``erasable``, it is removed.
    """
    clause: dict[int, int] = {}
    reasons: dict[int, Optional[Sequence[Literal]]] = {}
    heap: list[tuple[int, int]] = []

    def add(lit: Literal) -> None:
        j, v = lit
        if j in clause:
            return
        clause[j] = v
        if j not in reasons:
            reasons[j] = reason(j)
        if reasons[j] is not None:
            heapq.heappush(heap, (-position(j), j))

    for lit in literals:
        add(lit)
    while heap:
        _, j = heapq.heappop(heap)
        if j not in clause:
            continue
        del clause[j]
        for lit in reasons[j]:
            add(lit)

    erased = []
    while clause and erasable is not None:
        top = max(clause, key=lambda j: (level(j), position(j)))
        if not erasable(top, clause):
            break
        erased.append((top, clause.pop(top)))

    lits = tuple(sorted(clause.items()))
    if not lits:
        return Analysis((), 0, 0, None, tuple(erased))
    levels = sorted((level(j) for j, _ in lits), reverse=True)
    l1 = levels[0]
    l2 = next((l for l in levels if l < l1), 0)
    top = [lit for lit in lits if level(lit[0]) == l1]
    return Analysis(lits, l1, l2, top[0] if len(top) == 1 else None, tuple(erased))


@dataclass
class TrailEntry:
    value: int
    level: int
    reason: Optional[tuple[tuple[int, object], ...]] = None  # row coefs in <= form


@dataclass
class Trail:
    """Plain trail description for analysing a conflict outside the engine.

    Entries are kept in assignment order; each implied entry carries the
    ``<=`` row that implied it.
    """

    entries: dict[int, TrailEntry] = field(default_factory=dict)

    def push(self, j: int, value: int, level: int, reason=None) -> None:
        self.entries[j] = TrailEntry(value, level, reason)

    def value(self, j: int) -> int:
        e = self.entries.get(j)
        return -1 if e is None else e.value

    def analyze_row(self, coefs: Iterable[tuple[int, object]]) -> Analysis:
        order = {j: i for i, j in enumerate(self.entries)}

        def reason(j):
            row = self.entries[j].reason
            if row is None:
                return None
            return row_literals(row, self.value, keep=lambda i: i != j and order.get(i, 1 << 30) < order[j])

        lits = row_literals(coefs, self.value)
        return analyze_conflict(lits, lambda j: self.entries[j].level, order.__getitem__, reason)


class ClauseDatabase:
    """Learnt clauses under a two-watched-literal scheme.

    Watches are indexed by literal ``2 * j + v``.  Clauses are never deleted,
    so no reason on the trail can disappear.
    """

    def __init__(self, n: int):
        self.clauses: list[tuple[Literal, ...]] = []
        self.watched: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n)]
        self.activity: list[float] = []

    def __len__(self) -> int:
        return len(self.clauses)

    def add(self, clause: Sequence[Literal], order: Callable[[int], int]) -> int:
        """Store ``clause`` watching its two most recently assigned literals."""
        idx = len(self.clauses)
        lits = tuple(clause)
        self.clauses.append(lits)
        self.activity.append(1.0)
        ranked = sorted(range(len(lits)), key=lambda i: -order(lits[i][0]))
        w = ranked[:2] if len(lits) > 1 else [0, 0]
        self.watched.append(list(w))
        for i in set(w):
            j, v = lits[i]
            self.watches[2 * j + v].append(idx)
        return idx

    def bump(self, idx: int) -> None:
        self.activity[idx] += 1.0
