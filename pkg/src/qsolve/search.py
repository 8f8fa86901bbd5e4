"""Alpha-beta search with propagation and learning for quantified programs.

The engine works on the binarized program.  Each node fixes the next
unassigned integer column in play order; existential nodes maximize,
universal nodes minimize over their legal values.  Values are extended:
Fractions, ``-inf`` (existential player loses) and ``+inf`` (universal
player loses).

Two views of the trail are kept.  Existential rows and learnt clauses see
every assignment.  Universal rows see only the prefix (columns before the
next decision) together with universal implications, so an existential
implication about the future never decides a universal loss.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .conflict import Analysis, ClauseDatabase, analyze_conflict
from .lp import IntegerSystem, LpProblem, farkas_cut, solve_lp
from .model import (
    NEG_INF,
    POS_INF,
    BinarizedProgram,
    ExtendedValue,
    LinearRow,
    QuantifiedProgram,
    Quantifier,
    VarKind,
    binarize,
    is_finite,
    normalize_sense,
    report_value,
)
from .relax import Bound, RelaxationContext, ScenarioPool

log = logging.getLogger("qsolve.search")

RELAXATION_MODES = ("none", "fixed-scenario", "s-relaxation")
PRUNE_TOL = 1e-6


class Status(enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED_WIN = "UNBOUNDED-WIN"
    TIMEOUT = "TIMEOUT"
    INCUMBENT = "INCUMBENT"


@dataclass
class SolverConfig:
    time_limit: float = 3600.0
    simply_restricted: bool = False
    scp: bool = True
    relaxation: str = "fixed-scenario"
    scenario_cap: int = 8
    exact_lp: bool = False
    seed: int = 0
    learn: bool = True
    log_relaxations: bool = False
    record_scp: bool = False
    # Optional ordering hook: (engine, column) -> values to try in order.
    polarity: Optional[Callable[["Engine", int], Sequence[int]]] = None

    def __post_init__(self):
        if self.relaxation not in RELAXATION_MODES:
            raise ValueError(f"unknown relaxation mode {self.relaxation!r}")
        if self.scenario_cap < 1:
            raise ValueError("scenario cap must be at least 1")


@dataclass
class Statistics:
    nodes: int = 0
    decisions: int = 0
    propagations: int = 0
    learnt: int = 0
    scp_cuts: int = 0
    relax_calls: int = 0
    relax_prunes: int = 0
    leaves: int = 0
    backjumps: int = 0
    scp_checks: list = field(default_factory=list)

    def summary(self) -> dict[str, int]:
        return {
            "nodes": self.nodes,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "learnt": self.learnt,
            "scp_cuts": self.scp_cuts,
            "relax_calls": self.relax_calls,
            "leaves": self.leaves,
        }


@dataclass
class SolveResult:
    status: Status
    value: ExtendedValue  # in the program's own sense
    internal: ExtendedValue  # maximization value of the binarized program
    pv: Optional[tuple[Fraction, ...]]  # decoded principal variation
    play: Optional[tuple]  # binarized principal variation
    incumbent: ExtendedValue
    stats: Statistics
    runtime: float
    binarized: BinarizedProgram


@dataclass
class Witness:
    """A leaf reached under the returned value, with its SCP marks."""

    value: Fraction
    play: tuple
    ok: frozenset = frozenset()


@dataclass
class Backjump:
    level: int


class _Timeout(Exception):
    pass


class _Refuted(Exception):
    """A conflict with no literal above level 0: the root loses."""


DECISION = ("d",)


def _scale(row: LinearRow, cont: Sequence[bool], lower, upper):
    """Integer coefficients for the integer columns plus an integer rhs.

    Continuous columns are folded into the rhs at their most favourable
    value, which keeps the row a valid relaxation for propagation.
    """
    den = 1
    for _, a in row.coefs:
        den = math.lcm(den, a.denominator)
    den = math.lcm(den, row.rhs.denominator)
    rhs = row.rhs * den
    coefs = []
    for j, a in row.coefs:
        a = a * den
        if cont[j]:
            rhs -= a * lower[j] if a > 0 else a * upper[j]
        else:
            coefs.append((j, int(a)))
    return coefs, math.floor(rhs)


class Engine:
    """Search state for one binarized program."""

    def __init__(self, program: QuantifiedProgram, config: SolverConfig | None = None):
        self.config = config or SolverConfig()
        self.source = program
        self.bp = binarize(normalize_sense(program))
        p = self.bp.program
        self.program = p
        n = p.n
        self.n = n
        self.univ = [q is Quantifier.FORALL for q in p.quantifiers]
        self.cont = [k is VarKind.CONTINUOUS for k in p.kinds]
        self.int_cols = [j for j in range(n) if not self.cont[j]]
        self.cont_cols = [j for j in range(n) if self.cont[j]]
        self.block = [p.block_of(j) for j in range(n)]
        self.objective = p.objective

        # Universal rows used by the search: drop bound rows that only
        # restrict existential bits; their existential copy is kept.
        keep = []
        for i, r in enumerate(p.forall_rows):
            if self.bp.mirrored_forall(i) and not any(self.univ[j] for j, _ in r.coefs):
                continue
            keep.append(r)
        self.forall_rows = tuple(keep)
        self.exists_rows = tuple(p.exists_rows)
        self.polyhedral = all(self.univ[j] for r in self.forall_rows for j, _ in r.coefs)
        in_forall = set()
        for r in self.forall_rows:
            in_forall.update(r.support())
        self.in_forall = in_forall

        # Integer-scaled rows.
        self.e_coef, self.e_rhs = [], []
        for r in self.exists_rows:
            c, b = _scale(r, self.cont, p.lower, p.upper)
            self.e_coef.append(c)
            self.e_rhs.append(b)
        self.a_coef, self.a_rhs = [], []
        for r in self.forall_rows:
            c, b = _scale(r, self.cont, p.lower, p.upper)
            self.a_coef.append(c)
            self.a_rhs.append(b)
        self.col_e = [[] for _ in range(n)]
        for i, c in enumerate(self.e_coef):
            for j, a in c:
                self.col_e[j].append((i, a))
        self.col_a = [[] for _ in range(n)]
        for i, c in enumerate(self.a_coef):
            for j, a in c:
                self.col_a[j].append((i, a))
        self.e_imply = [max((abs(a) for j, a in c if not self.univ[j]), default=0) for c in self.e_coef]
        self.a_imply = [max((abs(a) for j, a in c if self.univ[j]), default=0) for c in self.a_coef]
        self.forall_propagation = self.polyhedral
        self.mixed_rows = [r for r in self.exists_rows if any(self.cont[j] for j, _ in r.coefs)]
        self.mixed_cols = sorted({j for r in self.mixed_rows for j, _ in r.coefs if not self.cont[j]})
        self.original_rows = {j: [i for i, _ in self.col_e[j]] for j in range(n)}

        self.integer_mask = [not c for c in self.cont]
        self.exists_system = IntegerSystem(self.exists_rows, n, self.integer_mask)
        self.forall_system = IntegerSystem(self.forall_rows, n, self.integer_mask)
        self._forall_point = None

        # Row-wise legality is exact only when every column it reasons about
        # is a whole original variable.
        single = {c for e in self.bp.encodings if len(e.columns) == 1 and e.size == 2 for c in e.columns}
        watched = set(self.in_forall) | {j for j in range(n) if self.univ[j]}
        self.simple_legality = self.config.simply_restricted and watched <= single

        self.scp_enabled = self.config.scp and not self.forall_rows
        self.never_pos_inf = self._never_pos_inf()
        self.relax = RelaxationContext(p, self.forall_rows, exact=self.config.exact_lp)
        self.use_relax = self.config.relaxation != "none"
        self.pool = ScenarioPool([j for j in range(n) if self.univ[j]], cap=self.config.scenario_cap)
        self.killers: list[list[int]] = [[] for _ in range(n)]
        self._leaf_cache: dict = {}
        where = {j: i for i, j in enumerate(self.cont_cols)}
        self._leaf_int_parts = []
        self._leaf_dense = []
        for r in self.mixed_rows:
            dense = [Fraction(0)] * len(self.cont_cols)
            part = []
            for j, a in r.coefs:
                if self.cont[j]:
                    dense[where[j]] = a
                else:
                    part.append((j, int(a) if a.denominator == 1 else a))
            self._leaf_int_parts.append((tuple(part), r.rhs))
            self._leaf_dense.append(tuple(dense))
        self.stats = Statistics()
        self._reset_state()

    # ------------------------------------------------------------------
    # State
    # ------------------------------------------------------------------

    def _reset_state(self) -> None:
        n = self.n
        self._trace = log.isEnabledFor(logging.DEBUG)
        self.val = [-1] * n
        self.lev = [0] * n
        self.rsn: list = [None] * n
        self.tpos = [0] * n
        self.trail: list[int] = []
        self.a_active = [False] * n
        self.astack: list[int] = []
        self.a_front = 0
        self.e_min = [sum(min(0, a) for _, a in c) for c in self.e_coef]
        self.a_min = [sum(min(0, a) for _, a in c) for c in self.a_coef]
        self.equeue: list[int] = []
        self.aqueue: list[int] = []
        self.level = 0
        self.frames: list[tuple[int, int]] = []  # (column, decision level)
        self.db = ClauseDatabase(n)

    def assignment(self) -> dict[int, int]:
        return {j: v for j, v in enumerate(self.val) if v >= 0}

    def _checkpoint(self):
        return len(self.trail), len(self.astack), self.a_front

    def _restore(self, cp) -> None:
        t, a, front = cp
        while len(self.astack) > a:
            self._deactivate(self.astack.pop())
        while len(self.trail) > t:
            j = self.trail.pop()
            v = self.val[j]
            for r, a_ in self.col_e[j]:
                self.e_min[r] -= _delta(a_, v)
            self.val[j] = -1
            self.rsn[j] = None
        self.a_front = front
        self.equeue.clear()
        self.aqueue.clear()

    def _assign(self, j: int, v: int, reason) -> None:
        self.val[j] = v
        self.lev[j] = self.level
        self.rsn[j] = reason
        self.tpos[j] = len(self.trail)
        self.trail.append(j)
        for r, a in self.col_e[j]:
            self.e_min[r] += _delta(a, v)
        self.equeue.append(j)
        if reason is DECISION or reason[0] == "a":
            self._activate(j)

    def _activate(self, j: int) -> None:
        if self.a_active[j]:
            return
        self.a_active[j] = True
        self.astack.append(j)
        v = self.val[j]
        for r, a in self.col_a[j]:
            self.a_min[r] += _delta(a, v)
        if self.col_a[j]:
            self.aqueue.append(j)

    def _deactivate(self, j: int) -> None:
        self.a_active[j] = False
        v = self.val[j]
        for r, a in self.col_a[j]:
            self.a_min[r] -= _delta(a, v)

    # ------------------------------------------------------------------
    # Propagation
    # ------------------------------------------------------------------

    def _propagate(self):
        """Run to a fixpoint; returns a conflict tuple or ``None``.

        Universal rows are settled first: their implications never depend
        on existential ones, and a universal conflict outranks an
        existential one found in the same pass.
        """
        val = self.val
        while self.aqueue or self.equeue:
            while self.aqueue:
                j = self.aqueue.pop()
                for r, _ in self.col_a[j]:
                    slack = self.a_rhs[r] - self.a_min[r]
                    if slack < 0:
                        return ("A", r)
                    if self.forall_propagation and slack < self.a_imply[r]:
                        for i, a in self.a_coef[r]:
                            if val[i] < 0 and self.univ[i] and abs(a) > slack:
                                self._assign(i, 0 if a > 0 else 1, ("a", r))
                                self.stats.propagations += 1
            if self.equeue:
                j = self.equeue.pop()
                v = val[j]
                for r, a in self.col_e[j]:
                    if not _delta(a, v):
                        continue
                    slack = self.e_rhs[r] - self.e_min[r]
                    if slack < 0:
                        return ("E", r)
                    if slack < self.e_imply[r]:
                        for i, b in self.e_coef[r]:
                            if val[i] < 0 and not self.univ[i] and abs(b) > slack:
                                self._assign(i, 0 if b > 0 else 1, ("e", r))
                                self.stats.propagations += 1
                conf = self._propagate_clauses(j, 1 - v)
                if conf is not None:
                    return conf
        return None

    def _propagate_clauses(self, j: int, false_value: int):
        db = self.db
        wl = db.watches[2 * j + false_value]
        val = self.val
        i = 0
        while i < len(wl):
            k = wl[i]
            lits = db.clauses[k]
            w = db.watched[k]
            me = 0 if lits[w[0]] == (j, false_value) else 1
            other = lits[w[1 - me]]
            ov = val[other[0]]
            if ov == other[1] and w[0] != w[1]:
                i += 1
                continue
            moved = False
            for idx, (x, xv) in enumerate(lits):
                if idx == w[0] or idx == w[1]:
                    continue
                if val[x] < 0 or val[x] == xv:
                    w[me] = idx
                    wl[i] = wl[-1]
                    wl.pop()
                    db.watches[2 * x + xv].append(k)
                    moved = True
                    break
            if moved:
                continue
            if w[0] == w[1] or ov == 1 - other[1]:
                db.bump(k)
                return ("C", k)
            if ov < 0 and not self.univ[other[0]]:
                self._assign(other[0], other[1], ("c", k))
                self.stats.propagations += 1
            i += 1
        return None

    # ------------------------------------------------------------------
    # Conflict analysis
    # ------------------------------------------------------------------

    def _reason_literals(self, j: int):
        r = self.rsn[j]
        if r is None or r is DECISION:
            return None
        kind, data = r
        pos = self.tpos[j]
        val = self.val
        if kind == "e":
            if self.lev[j] == 0:
                return []
            return [
                (i, 0 if a > 0 else 1)
                for i, a in self.e_coef[data]
                if i != j and val[i] >= 0 and self.tpos[i] < pos and _delta(a, val[i])
            ]
        if kind == "c":
            return [lit for lit in self.db.clauses[data] if lit[0] != j]
        if kind == "a":
            if not self.polyhedral:
                return None
            return [
                (i, 0 if a > 0 else 1)
                for i, a in self.a_coef[data]
                if i != j and self.a_active[i] and self.tpos[i] < pos and _delta(a, val[i])
            ]
        return None

    def _erasable(self, j: int, clause) -> bool:
        # A universal branch literal that is played after every existential
        # literal of the clause can be dropped: the universal player may
        # always choose to falsify it.
        if not self.univ[j] or self.rsn[j] is not DECISION:
            return False
        if not self.polyhedral or j in self.in_forall:
            return False
        for i in clause:
            if i != j and not self.univ[i] and self.block[i] > self.block[j]:
                return False
        return True

    def conflict_literals(self, conf) -> list[tuple[int, int]]:
        kind, data = conf
        if kind == "E":
            return [(i, 0 if a > 0 else 1) for i, a in self.e_coef[data] if self.val[i] >= 0 and _delta(a, self.val[i])]
        if kind == "C":
            return list(self.db.clauses[data])
        return list(data)

    def analyze(self, conf) -> Analysis:
        return analyze_conflict(
            self.conflict_literals(conf),
            self.lev.__getitem__,
            self.tpos.__getitem__,
            self._reason_literals,
            self._erasable,
        )

    def _conflict(self, conf) -> Backjump:
        res = self.analyze(conf)
        if res.empty or res.level == 0:
            raise _Refuted()
        if self.config.learn:
            self.db.add(res.clause, self.tpos.__getitem__)
            self.stats.learnt += 1
        self.stats.backjumps += 1
        return Backjump(res.level)

    # ------------------------------------------------------------------
    # Universal legality
    # ------------------------------------------------------------------

    def _forall_fixed(self) -> dict[int, int]:
        return {j: self.val[j] for j in range(self.n) if self.a_active[j] and j in self.in_forall}

    def legal_universal(self, j: int, v: int) -> bool:
        """Full legality: the universal system keeps an integer completion."""
        if j not in self.in_forall:
            return True
        for r, a in self.col_a[j]:
            if self.a_min[r] + _delta(a, v) > self.a_rhs[r]:
                return False
        fixed = self._forall_fixed()
        fixed[j] = v
        pt = self._forall_point
        if pt is not None and all(pt[i] == x for i, x in fixed.items()):
            return True
        lo = list(self.program.lower)
        hi = list(self.program.upper)
        for i, x in fixed.items():
            lo[i] = hi[i] = Fraction(x)
        w = self.forall_system.witness(lo, hi)
        if w is None:
            return False
        self._forall_point = tuple(int(x) for x in w)
        return True

    def _exists_feasible(self, prefix_end: int) -> bool:
        lo = list(self.program.lower)
        hi = list(self.program.upper)
        for j in range(prefix_end):
            if self.val[j] >= 0:
                lo[j] = hi[j] = Fraction(self.val[j])
        return self.exists_system.feasible(lo, hi)

    def _forall_loss(self, prefix_end: int):
        # Every leaf below violates the universal rows.
        return (POS_INF if self._exists_feasible(prefix_end) else NEG_INF), None

    def _never_pos_inf(self) -> bool:
        """The universal player can never be forced into a loss."""
        if self.polyhedral:
            return True
        first_univ = next((j for j in range(self.n) if self.univ[j]), self.n)
        if any(not self.univ[j] and j > first_univ for j in self.in_forall):
            return False
        # Some universal play must fit every existential choice.
        rows = []
        for r in self.forall_rows:
            coefs = {}
            rhs = r.rhs
            for j, a in r.coefs:
                if self.univ[j]:
                    coefs[j] = a
                else:
                    rhs -= a * (self.program.upper[j] if a > 0 else self.program.lower[j])
            rows.append(LinearRow.make(coefs, rhs))
        return IntegerSystem(rows, self.n, self.integer_mask).feasible(self.program.lower, self.program.upper)

    # ------------------------------------------------------------------
    # Search
    # ------------------------------------------------------------------

    def _tick(self) -> None:
        self.stats.nodes += 1
        if self.stats.nodes & 127 == 0 and time.monotonic() > self._deadline:
            raise _Timeout()

    def _next_column(self) -> int:
        for j in self.int_cols:
            if self.val[j] < 0:
                return j
        return self.n

    def _enter(self):
        """Advance the prefix; returns ``(pos, conflict)``."""
        while True:
            pos = self._next_column()
            for j in range(self.a_front, pos):
                if self.val[j] >= 0:
                    self._activate(j)
            self.a_front = max(self.a_front, pos)
            conf = self._propagate()
            if conf is not None or self._next_column() == pos:
                return pos, conf

    def _node(self, alpha, beta):
        self._tick()
        pos, conf = self._enter()
        if conf is not None:
            if conf[0] == "A":
                return self._forall_loss(pos)
            return self._conflict(conf)
        if pos >= self.n:
            return self._leaf()
        hint = None
        if self.use_relax:
            kind, out = self._relaxation(pos, alpha)
            if kind != "hint":
                return out
            hint = out
        if self.univ[pos]:
            return self._min_node(pos, alpha, beta)
        return self._max_node(pos, alpha, beta, hint)

    def _order(self, j: int, hint) -> list[int]:
        if self.config.polarity is not None:
            return list(self.config.polarity(self, j))
        if self.univ[j]:
            ks = self.killers[j]
            if ks:
                return [ks[-1], 1 - ks[-1]]
            return [0, 1] if self.objective[j] >= 0 else [1, 0]
        if hint is not None:
            return [1, 0] if hint[j] >= 0.5 else [0, 1]
        return [1, 0] if self.objective[j] > 0 else [0, 1]

    def _decide(self, j: int, v: int, alpha, beta):
        """Assign ``x_j = v`` at a new level and search below it."""
        self.level += 1
        level = self.level
        self._assign(j, v, DECISION)
        self.stats.decisions += 1
        if self._trace:
            log.debug("decide level=%d %s=%d", level, self.bp.program.names[j], v)
        self.frames.append((j, level))
        conf = self._propagate()
        if conf is None:
            res = self._node(alpha, beta)
        elif conf[0] == "A":
            res = None
        else:
            res = self._conflict(conf)
        return level, res

    def _undo(self, cp) -> None:
        self.frames.pop()
        self._restore(cp)
        self.level -= 1

    def _max_node(self, j: int, alpha, beta, hint):
        score: ExtendedValue = NEG_INF
        best = None
        for v in self._order(j, hint):
            cp = self._checkpoint()
            level, res = self._decide(j, v, max(alpha, score), beta)
            if res is None:
                res = self._forall_loss(j + 1)
            self._undo(cp)
            if isinstance(res, Backjump):
                if res.level < level:
                    return res
                val, w = NEG_INF, None
            else:
                val, w = res
            if val > score:
                score, best = val, w
                if self.level == 0:
                    self._incumbent = (score, best)
            if score >= beta:
                break
        return score, best

    def _min_node(self, j: int, alpha, beta):
        score: ExtendedValue = POS_INF
        best = None
        legal = False
        simply = self.simple_legality
        for idx, v in enumerate(self._order(j, None)):
            if not simply and not self.legal_universal(j, v):
                continue
            cp = self._checkpoint()
            level, res = self._decide(j, v, alpha, min(beta, score))
            self._undo(cp)
            if res is None:
                continue  # the universal rows reject this move
            legal = True
            if isinstance(res, Backjump):
                if res.level < level:
                    return res
                val, w = NEG_INF, None
            else:
                val, w = res
            if val < score:
                score, best = val, w
            if score <= alpha:
                self._killer(j, v)
                break
            if idx == 0 and self.scp_enabled and w is not None and level in w.ok and w.value == val:
                self.stats.scp_cuts += 1
                break
        if not legal:
            return self._forall_loss(j)
        return score, best

    def _killer(self, j: int, v: int) -> None:
        ks = self.killers[j]
        if v in ks:
            ks.remove(v)
        ks.append(v)
        del ks[:-2]
        prefix = {i: self.val[i] for i in range(j) if self.univ[i] and self.val[i] >= 0}
        prefix[j] = v
        self.pool.bump_prefix(prefix, 0.5)

    # ------------------------------------------------------------------
    # Leaves
    # ------------------------------------------------------------------

    def _leaf(self):
        self.stats.leaves += 1
        x = list(self.val)
        value = sum((c * x[j] for j, c in enumerate(self.objective) if c and not self.cont[j]), Fraction(0))
        play: list = [Fraction(v) if v >= 0 else Fraction(0) for v in x]
        if self.mixed_rows or any(self.cont):
            out = self._continuous_leaf(x)
            if isinstance(out, Backjump):
                return out
            cvalue, cx = out
            value += cvalue
            for j in range(self.n):
                if self.cont[j]:
                    play[j] = cx[j]
        play = tuple(play)
        self.pool.record([int(play[j]) for j in self.pool.universal])
        ok = self._scp_marks(play) if self.scp_enabled else frozenset()
        return value, Witness(value, play, ok)

    def _continuous_leaf(self, x):
        rhs = tuple(b - sum(a * x[j] for j, a in part) for part, b in self._leaf_int_parts)
        if rhs not in self._leaf_cache:
            self._leaf_cache[rhs] = self._solve_leaf_lp(rhs)
        out = self._leaf_cache[rhs]
        if out.infeasible:
            p = self.program
            fixed = {j: Fraction(x[j]) for j in self.int_cols}
            cut = farkas_cut(out.ray, self.mixed_rows, p.lower, p.upper, fixed)
            lits = [(j, 1 - int(v)) for j, v in cut.clause]
            return self._conflict(("L", lits))
        return out.objective, out.x

    def _solve_leaf_lp(self, rhs):
        """Exact LP over the continuous columns; ``rhs`` already holds the integer part."""
        p = self.program
        cols = self.cont_cols
        lp = LpProblem(
            [list(r) for r in self._leaf_dense],
            list(rhs),
            [self.objective[j] for j in cols],
            [Fraction(p.lower[j]) for j in cols],
            [Fraction(p.upper[j]) for j in cols],
        )
        out = solve_lp(lp, exact=True)
        if out.optimal:
            full = [Fraction(0)] * self.n
            for j, v in zip(cols, out.x):
                full[j] = v
            out.x = tuple(full)
        return out

    # ------------------------------------------------------------------
    # Strategic copy-pruning marks
    # ------------------------------------------------------------------

    def _scp_marks(self, play) -> frozenset:
        """Levels of universal ancestors whose sibling may copy this leaf."""
        ok = []
        W = Fraction(0)
        F: dict[int, Fraction] = {}
        act: dict[int, Fraction] = {}
        rows = self.exists_rows
        record = self.config.record_scp
        for k, level in reversed(self.frames):
            if not self.univ[k]:
                continue
            xt = int(play[k])
            ck = self.objective[k]
            cond2 = ck * (1 - 2 * xt) + W >= 0
            cond3 = True
            inspected = 0
            for i in self.original_rows[k]:
                inspected += 1
                if i not in act:
                    act[i] = rows[i].activity(play)
                a = rows[i].coef(k)
                if act[i] + a * (1 - 2 * xt) + F.get(i, 0) > rows[i].rhs:
                    cond3 = False
            if record:
                self.stats.scp_checks.append((k, inspected, len(self.original_rows[k])))
            if not (cond2 and cond3):
                break
            ok.append(level)
            W += ck * (1 - xt) if ck <= 0 else -ck * xt
            for i in self.original_rows[k]:
                a = rows[i].coef(k)
                F[i] = F.get(i, 0) + max(a, 0) - a * xt
        return frozenset(ok)

    # ------------------------------------------------------------------
    # Relaxations
    # ------------------------------------------------------------------

    def _relaxation(self, pos: int, alpha):
        """Bound the node.

        Returns ``("prune", result)``, ``("backjump", jump)`` or
        ``("hint", x)`` with an LP point (or ``None``) for branching.
        """
        fixed = {j: self.val[j] for j in self.int_cols if self.val[j] >= 0}
        ctx = self.relax
        bound: Optional[Bound] = None
        mode = self.config.relaxation
        ranked = self.pool.ranked() if len(self.pool) else []
        if mode == "s-relaxation" and self.polyhedral and self.block[pos] <= 1:
            scen = [s for s in ranked if ctx.scenario_legal(fixed, s)]
            if len(scen) >= 2:
                bound = ctx.dep(fixed, scen)
                if not bound.optimal:
                    bound = None
        hint = None
        if bound is None and ranked:
            b = ctx.fixed_scenario(fixed, pos, ranked[0])
            if b.optimal:
                bound = b
        if bound is None:
            bound = ctx.plain(fixed)
            if bound.infeasible:
                p = self.program
                cut = farkas_cut(bound.ray, self.exists_rows, p.lower, p.upper, fixed)
                if cut.violated:
                    lits = [(j, 1 - int(v)) for j, v in cut.clause]
                    return "backjump", self._conflict(("L", lits))
                bound = None
        self.stats.relax_calls = ctx.calls
        if bound is None or not bound.optimal:
            return "hint", None
        if bound.x is not None:
            hint = bound.x
        if not self.never_pos_inf:
            return "hint", hint
        if self.config.log_relaxations:
            ctx.record(fixed, pos, bound)
        if alpha != NEG_INF and is_finite(alpha):
            ub = bound.value
            if isinstance(ub, Fraction):
                pruned = ub <= alpha
            else:
                pruned = ub + PRUNE_TOL * (1 + abs(ub)) <= alpha
            if pruned:
                self.stats.relax_prunes += 1
                return "prune", (alpha, None)
        return "hint", hint

    # ------------------------------------------------------------------
    # Driver
    # ------------------------------------------------------------------

    def run(self) -> SolveResult:
        start = time.monotonic()
        self._deadline = start + self.config.time_limit
        self._incumbent = (NEG_INF, None)
        self._reset_state()
        status = None
        try:
            res = self._node(NEG_INF, POS_INF)
            if isinstance(res, Backjump):
                value, w = NEG_INF, None
            else:
                value, w = res
        except _Refuted:
            value, w = NEG_INF, None
        except _Timeout:
            value, w = self._incumbent
            status = Status.TIMEOUT
        self.stats.relax_calls = self.relax.calls
        runtime = time.monotonic() - start
        internal = value
        shifted = value + self.bp.offset if is_finite(value) else value
        reported = report_value(self.bp.program, shifted)
        if status is None:
            if value == NEG_INF:
                status = Status.INFEASIBLE
            elif value == POS_INF:
                status = Status.UNBOUNDED_WIN
            else:
                status = Status.OPTIMAL
        play = w.play if w is not None else None
        pv = self.bp.decode(play) if play is not None else None
        inc = self._incumbent[0]
        inc = report_value(self.bp.program, inc + self.bp.offset if is_finite(inc) else inc)
        log.info("status=%s value=%s nodes=%d", status.value, reported, self.stats.nodes)
        return SolveResult(status, reported, internal, pv, play, inc, self.stats, runtime, self.bp)


def _delta(a: int, v: int) -> int:
    """Activity increase over the row minimum when a column takes ``v``."""
    if a > 0:
        return a if v == 1 else 0
    return -a if v == 0 else 0


def solve(program: QuantifiedProgram, config: SolverConfig | None = None) -> SolveResult:
    """Solve ``program`` and report its value in the program's own sense."""
    return Engine(program, config).run()


__all__ = [
    "Backjump",
    "Engine",
    "SolveResult",
    "SolverConfig",
    "Statistics",
    "Status",
    "Witness",
    "solve",
]
