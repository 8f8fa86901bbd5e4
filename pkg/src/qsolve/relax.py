"""Node bounds: plain LP, LP with a fixed scenario, and the scenario DEP.

All relaxations work on a binarized program.  A node is described by a
mapping ``fixed`` from column to value (the trail) and by ``prefix_end``,
the index of the first variable not yet decided by play order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .lp import FEAS_TOL, LpProblem, solve_lp
from .model import LinearRow, QuantifiedProgram, Quantifier


class PoolEmpty(ValueError):
    """No usable scenario for a DEP."""


@dataclass
class Bound:
    status: str  # "optimal", "infeasible" or "skipped"
    value: Optional[float | Fraction] = None
    x: Optional[Sequence[float]] = None
    ray: Optional[Sequence[float]] = None
    kind: str = "plain"

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"


# ---------------------------------------------------------------------------
# Scenario pool
# ---------------------------------------------------------------------------


@dataclass
class Scenario:
    values: tuple[int, ...]
    score: float
    age: int


class ScenarioPool:
    """Bounded set of complete universal plays with activity scores.

    Events add to a scenario's score; every ``decay_every`` events all scores
    are multiplied by ``decay``.  At capacity the lowest score is evicted,
    the oldest entry first on ties.
    """

    def __init__(self, universal: Sequence[int], cap: int = 8, decay: float = 0.9, decay_every: int = 16):
        if cap < 1:
            raise ValueError("scenario cap must be at least 1")
        self.universal = tuple(universal)
        self.cap = cap
        self.decay = decay
        self.decay_every = decay_every
        self.entries: list[Scenario] = []
        self._events = 0
        self._clock = 0

    def __len__(self) -> int:
        return len(self.entries)

    def _tick(self) -> None:
        self._events += 1
        if self._events % self.decay_every == 0:
            for s in self.entries:
                s.score *= self.decay

    def record(self, values: Sequence[int], amount: float = 1.0) -> None:
        values = tuple(int(v) for v in values)
        for s in self.entries:
            if s.values == values:
                s.score += amount
                self._tick()
                return
        if len(self.entries) >= self.cap:
            worst = min(self.entries, key=lambda s: (s.score, s.age))
            if worst.score >= amount:
                self._tick()
                return
            self.entries.remove(worst)
        self._clock += 1
        self.entries.append(Scenario(values, amount, self._clock))
        self._tick()

    def bump_prefix(self, prefix: Mapping[int, int], amount: float = 1.0) -> int:
        """Bump every scenario that agrees with ``prefix``; returns the count."""
        pos = {j: i for i, j in enumerate(self.universal)}
        hit = 0
        for s in self.entries:
            if all(s.values[pos[j]] == v for j, v in prefix.items() if j in pos):
                s.score += amount
                hit += 1
        self._tick()
        return hit

    def ranked(self) -> list[dict[int, int]]:
        order = sorted(self.entries, key=lambda s: (-s.score, s.age))
        return [dict(zip(self.universal, s.values)) for s in order]


# ---------------------------------------------------------------------------
# Relaxation context
# ---------------------------------------------------------------------------


@dataclass
class RelaxationLog:
    fixed: dict
    prefix_end: int
    value: float | Fraction
    kind: str


@dataclass
class RelaxationContext:
    """LP views of the existential system of a binarized program.

    ``forall_rows`` is the universal system the search reasons with; it may
    differ from ``program.forall_rows`` by dropped bound rows.
    """

    program: QuantifiedProgram
    forall_rows: tuple[LinearRow, ...]
    exact: bool = False
    calls: int = 0
    log: list[RelaxationLog] = field(default_factory=list)

    def __post_init__(self):
        p = self.program
        n = p.n
        self.n = n
        self.rows = tuple(p.exists_rows)
        A = np.zeros((len(self.rows), n))
        for i, r in enumerate(self.rows):
            for j, a in r.coefs:
                A[i, j] = float(a)
        self._A = A
        self._b = np.array([float(r.rhs) for r in self.rows])
        self._c = np.array([float(c) for c in p.objective])
        self._lo = np.array([float(v) for v in p.lower])
        self._hi = np.array([float(v) for v in p.upper])
        self.universal = [j for j in range(n) if p.quantifiers[j] is Quantifier.FORALL]
        in_forall = set()
        for r in self.forall_rows:
            in_forall.update(r.support())
        self.in_forall = in_forall
        self.exists_in_forall = sorted(j for j in in_forall if p.quantifiers[j] is Quantifier.EXISTS)
        self.polyhedral = not self.exists_in_forall
        self.block = [p.block_of(j) for j in range(n)]
        self.block_start = [b.start for b in p.blocks]

    # -- helpers -----------------------------------------------------------

    def _solve(self, A, b, c, lo, hi, rows=None, kind="plain") -> Bound:
        self.calls += 1
        if self.exact:
            p = _exact_problem(A, b, c, lo, hi) if rows is None else rows
            out = solve_lp(p, exact=True)
            if out.infeasible:
                return Bound("infeasible", ray=out.ray, kind=kind)
            return Bound("optimal", out.objective, out.x, kind=kind)
        try:
            status, x, y, obj, _ = _kernels.solve_dense(A, b, c, lo, hi, 5000, FEAS_TOL)
        except Exception:  # pragma: no cover - defensive
            return Bound("skipped", kind=kind)
        if status == _kernels.STATUS_OPTIMAL:
            return Bound("optimal", float(obj), x, kind=kind)
        if status == _kernels.STATUS_INFEASIBLE:
            return Bound("infeasible", ray=y, kind=kind)
        return Bound("skipped", kind=kind)

    def _box(self, fixed: Mapping[int, Fraction | int]):
        lo = self._lo.copy()
        hi = self._hi.copy()
        for j, v in fixed.items():
            lo[j] = hi[j] = float(v)
        return lo, hi

    def _exact_rows(self, fixed):
        lo = list(self.program.lower)
        hi = list(self.program.upper)
        return LpProblem.from_rows(self.rows, self.program.objective, lo, hi, fixed)

    def record(self, fixed, prefix_end, bound: Bound) -> None:
        if bound.optimal:
            self.log.append(RelaxationLog(dict(fixed), prefix_end, bound.value, bound.kind))

    # -- plain LP ------------------------------------------------------------

    def plain(self, fixed: Mapping[int, Fraction | int]) -> Bound:
        """Existential system with the trail fixed; everything else relaxed."""
        lo, hi = self._box(fixed)
        exact = self._exact_rows(fixed) if self.exact else None
        return self._solve(self._A, self._b, self._c, lo, hi, rows=exact, kind="plain")

    # -- fixed scenario --------------------------------------------------------

    def scenario_fixing(
        self, fixed: Mapping[int, Fraction | int], prefix_end: int, scenario: Mapping[int, int]
    ) -> dict[int, int]:
        """Universal columns the scenario may pin at this node.

        Columns outside every universal row can always be pinned.  When all
        existential columns of the universal rows belong to the prefix, and
        the scenario completed by the trail satisfies the universal rows,
        every universal column is pinned.
        """
        free = [j for j in self.universal if j not in fixed]
        pins = {j: scenario[j] for j in free if j not in self.in_forall}
        if all(j < prefix_end and j in fixed for j in self.exists_in_forall):
            point = dict(fixed)
            for j in free:
                point[j] = scenario[j]
            if all(r.activity_map(point) <= r.rhs for r in self.forall_rows):
                pins = {j: scenario[j] for j in free}
        return pins

    def fixed_scenario(
        self, fixed: Mapping[int, Fraction | int], prefix_end: int, scenario: Mapping[int, int]
    ) -> Bound:
        pins = self.scenario_fixing(fixed, prefix_end, scenario)
        full = dict(fixed)
        full.update(pins)
        lo, hi = self._box(full)
        exact = self._exact_rows(full) if self.exact else None
        return self._solve(self._A, self._b, self._c, lo, hi, rows=exact, kind="fixed-scenario")

    def scenario_legal(self, fixed: Mapping[int, Fraction | int], scenario: Mapping[int, int]) -> bool:
        """Scenario completed by the trail satisfies the universal rows.

        Only meaningful for polyhedral instances, where universal rows
        mention universal columns only.
        """
        point = {j: fixed.get(j, scenario.get(j)) for j in self.universal}
        return all(r.activity_map(point) <= r.rhs for r in self.forall_rows)

    # -- scenario DEP ----------------------------------------------------------

    def dep_problem(self, fixed: Mapping[int, Fraction | int], scenarios: Sequence[Mapping[int, int]]):
        """Dense DEP data ``(A, b, c, lo, hi, columns)``; the last column is ``k``.

        Existential copies are shared between scenarios that agree on every
        universal variable preceding the copy's block.
        """
        if not scenarios:
            raise PoolEmpty("no scenarios")
        p = self.program
        plays = []
        for s in scenarios:
            play = {j: int(fixed[j]) if j in fixed else int(s[j]) for j in self.universal}
            if play not in plays:
                plays.append(play)
        columns: dict[tuple, int] = {}

        def column(j: int, play) -> int:
            start = self.block_start[self.block[j]]
            key = (j, tuple(play[u] for u in self.universal if u < start))
            if key not in columns:
                columns[key] = len(columns)
            return columns[key]

        Arows: list[dict[int, Fraction]] = []
        brhs: list[Fraction] = []
        for play in plays:
            point = dict(fixed)
            point.update(play)
            for r in list(self.rows) + [None]:
                coefs: dict[int, Fraction] = {}
                if r is None:
                    # k - c x(s) <= c(fixed part)
                    rhs = Fraction(0)
                    coefs[-1] = Fraction(1)
                    terms = enumerate(p.objective)
                    sign = -1
                else:
                    rhs = r.rhs
                    terms = r.coefs
                    sign = 1
                for j, a in terms:
                    if not a:
                        continue
                    if j in point:
                        rhs -= sign * a * Fraction(point[j])
                    else:
                        col = column(j, play)
                        coefs[col] = coefs.get(col, Fraction(0)) + sign * a
                Arows.append(coefs)
                brhs.append(rhs)
        ncols = len(columns) + 1
        kcol = ncols - 1
        A = [[Fraction(0)] * ncols for _ in Arows]
        for i, coefs in enumerate(Arows):
            for col, a in coefs.items():
                A[i][kcol if col == -1 else col] = a
        lo = [Fraction(0)] * ncols
        hi = [Fraction(0)] * ncols
        for (j, _), col in columns.items():
            lo[col], hi[col] = p.lower[j], p.upper[j]
        big = sum(abs(c) * max(abs(p.lower[j]), abs(p.upper[j])) for j, c in enumerate(p.objective)) + 1
        lo[kcol], hi[kcol] = -big, big
        c = [Fraction(0)] * ncols
        c[kcol] = Fraction(1)
        return LpProblem(A, brhs, c, lo, hi), columns

    def dep(self, fixed: Mapping[int, Fraction | int], scenarios: Sequence[Mapping[int, int]]) -> Bound:
        problem, _ = self.dep_problem(fixed, scenarios)
        if self.exact:
            self.calls += 1
            out = solve_lp(problem, exact=True)
            if out.infeasible:
                return Bound("infeasible", kind="s-relaxation")
            return Bound("optimal", out.objective, kind="s-relaxation")
        A, b, c, lo, hi = problem.float_data()
        bound = self._solve(A, b, c, lo, hi, kind="s-relaxation")
        bound.x = None
        bound.ray = None
        return bound


def _exact_problem(A, b, c, lo, hi) -> LpProblem:
    return LpProblem(
        [[Fraction(float(v)) for v in row] for row in A],
        [Fraction(float(v)) for v in b],
        [Fraction(float(v)) for v in c],
        [Fraction(float(v)) for v in lo],
        [Fraction(float(v)) for v in hi],
    )


__all__ = [
    "Bound",
    "PoolEmpty",
    "RelaxationContext",
    "RelaxationLog",
    "Scenario",
    "ScenarioPool",
]
