"""Brute-force evaluation of the extended minimax value.

Two routes are provided.  The enumeration route tabulates every play at once
with numpy and reduces the table axis by axis; it also yields an explicit
strategy tree.  The block route recurses over variable blocks, skips subtrees
whose rows are already hopeless and only resolves their outcome when it can
matter.  Neither shares code with the search engine; leaves with continuous
variables are scored by exact LP solves.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .lp import IntegerSystem, LpProblem, solve_lp
from .model import (
    NEG_INF,
    POS_INF,
    UNKNOWN,
    ExtendedValue,
    LinearRow,
    QuantifiedProgram,
    Quantifier,
    VarKind,
    ext_max,
    ext_min,
    normalize_sense,
    report_value,
    require_valid,
)

DEFAULT_LIMIT = 2**26
ENUMERATION_LIMIT = 2**18


class TooLarge(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Strategy trees
# ---------------------------------------------------------------------------


@dataclass
class StrategyNode:
    """A node of a strategy; ``var`` is None at leaves."""

    var: Optional[int]
    quantifier: Optional[Quantifier] = None
    children: dict = field(default_factory=dict)
    play: Optional[tuple] = None

    @property
    def is_leaf(self) -> bool:
        return self.var is None


@dataclass
class StrategyTree:
    root: StrategyNode

    def leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node
            else:
                stack.extend(node.children.values())

    def copy_without(self, path: Sequence[tuple[int, int]]) -> "StrategyTree":
        """Copy with the subtree at ``path`` (list of (var, value)) removed."""
        import copy

        tree = copy.deepcopy(self)
        node = tree.root
        for var, val in path[:-1]:
            node = node.children[val]
        node.children.pop(path[-1][1])
        return tree


@dataclass(frozen=True)
class Winning:
    value: ExtendedValue


@dataclass(frozen=True)
class NotWinning:
    witness: tuple[tuple[int, Fraction], ...]
    reason: str


@dataclass
class OracleResult:
    value: ExtendedValue
    pv: Optional[tuple] = None
    strategy: Optional[StrategyTree] = None
    leaves: int = 0


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _scaled(row: LinearRow) -> tuple[dict[int, int], int]:
    dens = [a.denominator for _, a in row.coefs] + [row.rhs.denominator]
    lcm = 1
    for d in dens:
        lcm = lcm * d // math.gcd(lcm, d)
    return {j: int(a * lcm) for j, a in row.coefs}, int(row.rhs * lcm)


class _Layout:
    """Integer/continuous column split and scaled row data for one program."""

    def __init__(self, program: QuantifiedProgram, fixed: Mapping[int, int] | None):
        self.p = program
        self.int_vars = [j for j in range(program.n) if program.kinds[j] is VarKind.INTEGER]
        self.cont_vars = [j for j in range(program.n) if program.kinds[j] is VarKind.CONTINUOUS]
        self.pos = {j: k for k, j in enumerate(self.int_vars)}
        fixed = dict(fixed or {})
        self.domains = []
        for j in self.int_vars:
            dom = list(program.domain(j))
            if j in fixed:
                v = int(fixed[j])
                dom = [v] if v in dom else []
            self.domains.append(dom)
        for j in fixed:
            if program.kinds[j] is not VarKind.INTEGER:
                raise ValueError("only integer columns can be fixed")
        cont = set(self.cont_vars)
        self.e_plain, self.e_mixed = [], []
        for r in program.exists_rows:
            (self.e_mixed if any(j in cont for j, _ in r.coefs) else self.e_plain).append(r)
        self.a_rows = list(program.forall_rows)
        if any(j in cont for r in self.a_rows for j, _ in r.coefs):
            raise ValueError("continuous columns in universal rows are not supported")
        self.c_int = [program.objective[j] for j in self.int_vars]
        self._lp_cache: dict = {}
        if self.cont_vars:
            # Mixed rows scaled to integers, so that the integer part of every
            # residual can be computed in one product.
            scaled = [_scaled(r) for r in self.e_mixed]
            self._mixed_int = np.zeros((len(scaled), len(self.int_vars)), dtype=np.int64)
            for i, (coefs, _) in enumerate(scaled):
                for j, a in coefs.items():
                    if j in self.pos:
                        self._mixed_int[i, self.pos[j]] = a
            self._mixed_rhs = np.array([rhs for _, rhs in scaled], dtype=np.int64)
            self._mixed_cont = [[Fraction(coefs.get(j, 0)) for j in self.cont_vars] for coefs, _ in scaled]
            self._cont_c = [program.objective[j] for j in self.cont_vars]
            self._cont_lo = [program.lower[j] for j in self.cont_vars]
            self._cont_hi = [program.upper[j] for j in self.cont_vars]
            self.lp_solves = 0

    def plays(self) -> int:
        return math.prod(len(d) for d in self.domains)

    def residuals(self, X: np.ndarray) -> np.ndarray:
        """Scaled right-hand sides of the mixed rows for each integer point."""
        if not len(self._mixed_rhs):
            return np.zeros((len(X), 0), dtype=np.int64)
        return self._mixed_rhs - X @ self._mixed_int.T

    def continuous_leaf(self, x_int: Sequence[int], residual: Sequence[int] | None = None):
        """Best continuous completion: (value, values) or None if infeasible."""
        if residual is None:
            residual = self.residuals(np.asarray([x_int], dtype=np.int64).reshape(1, -1))[0]
        key = tuple(int(v) for v in residual)
        hit = self._lp_cache.get(key)
        if hit is None:
            self.lp_solves += 1
            lp = LpProblem(
                [list(row) for row in self._mixed_cont],
                [Fraction(v) for v in key],
                list(self._cont_c),
                list(self._cont_lo),
                list(self._cont_hi),
            )
            out = solve_lp(lp, exact=True)
            hit = (out.objective, out.x) if out.optimal else False
            self._lp_cache[key] = hit
        return hit or None

    def full_play(self, x_int: Sequence[int], x_cont: Sequence[Fraction] | None) -> tuple:
        out = [Fraction(0)] * self.p.n
        for j, v in zip(self.int_vars, x_int):
            out[j] = Fraction(v)
        if x_cont is not None:
            for j, v in zip(self.cont_vars, x_cont):
                out[j] = v
        return tuple(out)


# ---------------------------------------------------------------------------
# Enumeration route
# ---------------------------------------------------------------------------


def _row_matrix(rows: Sequence[LinearRow], layout: _Layout):
    k = len(layout.int_vars)
    A = np.zeros((len(rows), k), dtype=np.int64)
    b = np.zeros(len(rows), dtype=np.int64)
    for i, r in enumerate(rows):
        coefs, rhs = _scaled(r)
        for j, a in coefs.items():
            A[i, layout.pos[j]] = a
        b[i] = rhs
    return A, b


def enumerate_minimax(
    program: QuantifiedProgram,
    fixed: Mapping[int, int] | None = None,
    limit: int = ENUMERATION_LIMIT,
    with_strategy: bool = False,
) -> OracleResult:
    lay = _Layout(program, fixed)
    total = lay.plays()
    if total > limit:
        raise TooLarge(f"{total} plays exceed the enumeration limit {limit}")
    if total == 0:
        raise ValueError("a fixed value lies outside its domain")
    dims = [len(d) for d in lay.domains]
    grids = np.indices(dims).reshape(len(dims), -1).T if dims else np.zeros((1, 0), dtype=np.int64)
    X = np.zeros(grids.shape, dtype=np.int64)
    for k, dom in enumerate(lay.domains):
        X[:, k] = np.asarray(dom, dtype=np.int64)[grids[:, k]]

    Ae, be = _row_matrix(lay.e_plain, lay)
    Aa, ba = _row_matrix(lay.a_rows, lay)
    eok = np.all(X @ Ae.T <= be, axis=1) if len(be) else np.ones(total, dtype=bool)
    aok = np.all(X @ Aa.T <= ba, axis=1) if len(ba) else np.ones(total, dtype=bool)

    # Finite leaf values: exact rationals, replaced by their rank.
    values: list = [None] * total
    conts: dict[int, tuple] = {}
    lcm = 1
    for c in lay.c_int:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ci = np.array([int(c * lcm) for c in lay.c_int], dtype=np.int64)
    base = X @ ci if len(ci) else np.zeros(total, dtype=np.int64)
    for idx in np.flatnonzero(eok):
        v = Fraction(int(base[idx]), lcm)
        if lay.cont_vars:
            leaf = lay.continuous_leaf(X[idx].tolist())
            if leaf is None:
                eok[idx] = False
                continue
            v += leaf[0]
            conts[int(idx)] = leaf[1]
        values[idx] = v
    distinct = sorted({v for v in values if v is not None})
    rank = {v: float(i) for i, v in enumerate(distinct)}
    W = np.full(total, np.nan)
    W[eok & aok] = [rank[values[i]] for i in np.flatnonzero(eok & aok)]
    W[~eok & aok] = -np.inf
    W[eok & ~aok] = np.inf

    layers = [W.reshape(dims) if dims else W.reshape(())]
    for k in range(len(dims) - 1, -1, -1):
        q = program.quantifiers[lay.int_vars[k]]
        ufunc = np.fmax if q is Quantifier.EXISTS else np.fmin
        layers.append(ufunc.reduce(layers[-1], axis=-1))
    layers.reverse()

    def decode(r):
        if np.isnan(r):
            return UNKNOWN
        if np.isinf(r):
            return POS_INF if r > 0 else NEG_INF
        return distinct[int(r)]

    root = float(layers[0])
    # Principal variation: follow the first child carrying the node value.
    idx: list[int] = []
    for k in range(len(dims)):
        node = layers[k][tuple(idx)]
        if np.isnan(node):
            break
        kids = layers[k + 1][tuple(idx)]
        idx.append(int(np.flatnonzero(kids == node)[0]))
    x_int = [lay.domains[k][i] for k, i in enumerate(idx)]
    if len(idx) == len(dims):
        flat = int(np.ravel_multi_index(idx, dims)) if dims else 0
        pv = lay.full_play(x_int, conts.get(flat))
    else:
        pv = tuple(Fraction(v) for v in x_int)

    strategy = None
    if with_strategy:
        eflat = eok.reshape(dims) if dims else eok.reshape(())
        aflat = aok.reshape(dims) if dims else aok.reshape(())
        e_layers, a_layers = [eflat], [aflat]
        for _ in range(len(dims)):
            e_layers.append(np.logical_or.reduce(e_layers[-1], axis=-1))
            a_layers.append(np.logical_or.reduce(a_layers[-1], axis=-1))
        e_layers.reverse()
        a_layers.reverse()

        def build(k: int, prefix: tuple) -> StrategyNode:
            if k == len(dims):
                flat = int(np.ravel_multi_index(prefix, dims)) if dims else 0
                x = [lay.domains[t][i] for t, i in enumerate(prefix)]
                return StrategyNode(None, play=lay.full_play(x, conts.get(flat)))
            j = lay.int_vars[k]
            q = program.quantifiers[j]
            node = StrategyNode(j, q)
            if q is Quantifier.EXISTS:
                legal = np.flatnonzero(e_layers[k + 1][prefix])
                if len(legal):
                    target = layers[k][prefix]
                    kids = layers[k + 1][prefix]
                    hits = np.flatnonzero(kids == target) if not np.isnan(target) else legal
                    choice = int(hits[0]) if len(hits) else int(legal[0])
                    node.children[lay.domains[k][choice]] = build(k + 1, prefix + (choice,))
            else:
                for i in np.flatnonzero(a_layers[k + 1][prefix]):
                    node.children[lay.domains[k][int(i)]] = build(k + 1, prefix + (int(i),))
            return node

        strategy = StrategyTree(build(0, ()))

    return OracleResult(decode(root), pv, strategy, total)


# ---------------------------------------------------------------------------
# Block route
# ---------------------------------------------------------------------------


class _DeadE:
    """Subtree where every play breaks the existential rows."""


class _DeadA:
    """Subtree where every play breaks the universal rows."""


class _BlockEvaluator:
    def __init__(self, program: QuantifiedProgram, fixed: Mapping[int, int] | None):
        self.p = program
        self.fixed = dict(fixed or {})
        self.lay = _Layout(program, fixed)
        lay = self.lay
        self.int_blocks: list[list[int]] = []  # positions into int_vars, per block
        self.block_q: list[Quantifier] = []
        for b in program.blocks:
            ks = [lay.pos[j] for j in b if j in lay.pos]
            if ks:
                self.int_blocks.append(ks)
                self.block_q.append(b.quantifier)
        self.e_rows = [_scaled(r) for r in program.exists_rows]
        self.a_rows = [_scaled(r) for r in program.forall_rows]
        # Minimum contribution of columns at or after each integer block.
        nb = len(self.int_blocks)
        cont = set(lay.cont_vars)
        start_of = {}
        for t, ks in enumerate(self.int_blocks):
            for k in ks:
                start_of[lay.int_vars[k]] = t

        def tail_mins(rows):
            out = []
            for coefs, _ in rows:
                tails = [Fraction(0)] * (nb + 1)
                for j, a in coefs.items():
                    lo, hi = program.lower[j], program.upper[j]
                    if j in cont:
                        m = a * lo if a > 0 else a * hi
                        t_from = nb
                    else:
                        lo, hi = math.ceil(lo), math.floor(hi)
                        m = a * lo if a > 0 else a * hi
                        t_from = start_of[j]
                    for t in range(t_from + 1):
                        tails[t] += m
                out.append(tails)
            return out

        # tails[t]: summed minima of the columns in integer blocks >= t and of
        # every continuous column.
        self.e_tail = tail_mins(self.e_rows)
        self.a_tail = tail_mins(self.a_rows)
        int_mask = [k is VarKind.INTEGER for k in program.kinds]
        self.e_system = IntegerSystem(program.exists_rows, program.n, int_mask)
        self.a_system = IntegerSystem(program.forall_rows, program.n, int_mask)
        self.leaf_count = 0

        ncols = len(lay.int_vars)
        self.Ae, self.be = _row_matrix(lay.e_plain, lay)
        self.Aa, self.ba = _row_matrix(lay.a_rows, lay)
        lcm = 1
        for c in lay.c_int:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        self.obj_lcm = lcm
        self.ci = np.array([int(c * lcm) for c in lay.c_int], dtype=np.int64)
        self.ncols = ncols

    # -- lazy dead-subtree resolution ------------------------------------

    def _box(self, x: list[Optional[int]]):
        lo = list(self.p.lower)
        hi = list(self.p.upper)
        for j, v in self.fixed.items():
            lo[j] = hi[j] = Fraction(v)
        for k, v in enumerate(x):
            if v is not None:
                j = self.lay.int_vars[k]
                lo[j] = hi[j] = Fraction(v)
        return lo, hi

    def resolve(self, kind, x):
        lo, hi = self._box(x)
        if kind is _DeadE:
            return NEG_INF if self.a_system.feasible(lo, hi) else UNKNOWN
        return POS_INF if self.e_system.feasible(lo, hi) else UNKNOWN

    def _row_dead(self, rows, tails, x, t_next):
        for (coefs, rhs), tail in zip(rows, tails):
            act = tail[t_next]
            for j, a in coefs.items():
                k = self.lay.pos.get(j)
                if k is not None and x[k] is not None:
                    act += a * x[k]
            if act > rhs:
                return True
        return False

    # -- recursion ---------------------------------------------------------

    def evaluate(self):
        x: list[Optional[int]] = [None] * self.ncols
        if not self.int_blocks:
            value, play = self._leaves(x, None)
            return value, play
        return self._block(0, x)

    def _combine(self, q, entries, x_of):
        """entries: list of (value-or-dead-kind, play, assignment)."""
        direct = [(v, play) for v, play, _ in entries if v is not _DeadE and v is not _DeadA]
        pick = ext_max if q is Quantifier.EXISTS else ext_min
        best = pick(v for v, _ in direct)
        best_play = next((pl for v, pl in direct if v == best and best is not UNKNOWN), None)
        winning_dead = _DeadA if q is Quantifier.EXISTS else _DeadE
        losing_dead = _DeadE if q is Quantifier.EXISTS else _DeadA
        target = POS_INF if q is Quantifier.EXISTS else NEG_INF
        if best != target:
            for v, play, a in entries:
                if v is winning_dead and self.resolve(v, a) == target:
                    return target, play
        if best is UNKNOWN:
            for v, play, a in entries:
                if v is losing_dead:
                    r = self.resolve(v, a)
                    if r is not UNKNOWN:
                        return r, play
        return best, best_play

    def _block(self, t: int, x: list[Optional[int]]):
        ks = self.int_blocks[t]
        q = self.block_q[t]
        if t == len(self.int_blocks) - 1:
            return self._final_block(t, x)
        entries = []
        for combo in itertools.product(*(self.lay.domains[k] for k in ks)):
            for k, v in zip(ks, combo):
                x[k] = v
            e_dead = self._row_dead(self.e_rows, self.e_tail, x, t + 1)
            a_dead = self._row_dead(self.a_rows, self.a_tail, x, t + 1)
            snapshot = list(x)
            if e_dead and a_dead:
                entries.append((UNKNOWN, None, snapshot))
            elif e_dead:
                entries.append((_DeadE, self._partial(snapshot), snapshot))
            elif a_dead:
                entries.append((_DeadA, self._partial(snapshot), snapshot))
            else:
                v, play = self._block(t + 1, x)
                entries.append((v, play, snapshot))
        for k in ks:
            x[k] = None
        return self._combine(q, entries, None)

    def _partial(self, x):
        return tuple(Fraction(v) for v in x if v is not None)

    def _final_block(self, t: int, x: list[Optional[int]]):
        ks = self.int_blocks[t]
        q = self.block_q[t]
        combos = list(itertools.product(*(self.lay.domains[k] for k in ks)))
        if not combos:
            return UNKNOWN, None
        X = np.zeros((len(combos), self.ncols), dtype=np.int64)
        for k, v in enumerate(x):
            if v is not None:
                X[:, k] = v
        X[:, ks] = np.asarray(combos, dtype=np.int64).reshape(len(combos), len(ks))
        self.leaf_count += len(combos)
        eok = np.all(X @ self.Ae.T <= self.be, axis=1) if len(self.be) else np.ones(len(combos), bool)
        aok = np.all(X @ self.Aa.T <= self.ba, axis=1) if len(self.ba) else np.ones(len(combos), bool)
        base = X @ self.ci if len(self.ci) else np.zeros(len(combos), dtype=np.int64)
        best: ExtendedValue = UNKNOWN
        best_play = None
        better = (lambda a, b: a > b) if q is Quantifier.EXISTS else (lambda a, b: a < b)
        R = self.lay.residuals(X) if self.lay.cont_vars else None
        for i in range(len(combos)):
            e, a = bool(eok[i]), bool(aok[i])
            cont = None
            if e:
                val = Fraction(int(base[i]), self.obj_lcm)
                if self.lay.cont_vars:
                    leaf = self.lay.continuous_leaf(X[i].tolist(), R[i])
                    if leaf is None:
                        e = False
                    else:
                        val += leaf[0]
                        cont = leaf[1]
            if e and a:
                w = val
            elif a:
                w = NEG_INF
            elif e:
                w = POS_INF
            else:
                continue
            if best is UNKNOWN or better(w, best):
                best = w
                best_play = self.lay.full_play(X[i].tolist(), cont)
        return best, best_play

    def _leaves(self, x, _):
        # No integer columns at all: a single continuous leaf.
        lay = self.lay
        eok = all(r.satisfied([0] * self.p.n) for r in lay.e_plain)
        aok = all(r.satisfied([0] * self.p.n) for r in lay.a_rows)
        val, cont = Fraction(0), None
        if eok and lay.cont_vars:
            leaf = lay.continuous_leaf([])
            if leaf is None:
                eok = False
            else:
                val, cont = leaf
        play = lay.full_play([], cont)
        if eok and aok:
            return val, play
        if aok:
            return NEG_INF, play
        if eok:
            return POS_INF, play
        return UNKNOWN, play


def block_minimax(
    program: QuantifiedProgram,
    fixed: Mapping[int, int] | None = None,
    limit: int = DEFAULT_LIMIT,
) -> OracleResult:
    ev = _BlockEvaluator(program, fixed)
    total = ev.lay.plays()
    if total > limit:
        raise TooLarge(f"{total} plays exceed the oracle limit {limit}")
    if total == 0:
        raise ValueError("a fixed value lies outside its domain")
    value, play = ev.evaluate()
    return OracleResult(value, play, None, ev.leaf_count)


def extended_minimax(
    program: QuantifiedProgram,
    fixed: Mapping[int, int] | None = None,
    limit: int = DEFAULT_LIMIT,
    with_strategy: bool = False,
    route: str = "auto",
) -> OracleResult:
    """Extended minimax value, principal variation and optionally a strategy.

    ``fixed`` pins integer columns to single values, which evaluates the
    subtree below the corresponding node when the pinned columns form a
    prefix of the variable order.
    """
    require_valid(program)
    if route == "auto":
        plays = _Layout(program, fixed).plays()
        route = "enumerate" if (with_strategy or plays <= 2**14) else "block"
    if route == "enumerate":
        return enumerate_minimax(program, fixed, min(limit, ENUMERATION_LIMIT), with_strategy)
    return block_minimax(program, fixed, limit)


def game_value(program: QuantifiedProgram, limit: int = DEFAULT_LIMIT) -> OracleResult:
    """Oracle result with the value reported in the program's own sense."""
    norm = normalize_sense(program)
    res = extended_minimax(norm, limit=limit)
    return OracleResult(report_value(norm, res.value), res.pv, res.strategy, res.leaves)


# ---------------------------------------------------------------------------
# Strategy verification
# ---------------------------------------------------------------------------


def verify_strategy(program: QuantifiedProgram, tree: StrategyTree):
    """Check a strategy move by move and return its guaranteed value."""
    int_mask = [k is VarKind.INTEGER for k in program.kinds]
    e_sys = IntegerSystem(program.exists_rows, program.n, int_mask)
    a_sys = IntegerSystem(program.forall_rows, program.n, int_mask)
    order = [j for j in range(program.n) if program.kinds[j] is VarKind.INTEGER]

    def box(path):
        lo, hi = list(program.lower), list(program.upper)
        for j, v in path:
            lo[j] = hi[j] = Fraction(v)
        return lo, hi

    worst: list[ExtendedValue] = []

    def walk(node: StrategyNode, depth: int, path: list):
        if depth == len(order):
            if not node.is_leaf or node.play is None:
                raise ShapeMismatch("expected a leaf")
            play = node.play
            for j, v in path:
                if play[j] != v:
                    raise ShapeMismatch("leaf play disagrees with its path")
            for j in range(program.n):
                if not program.lower[j] <= play[j] <= program.upper[j]:
                    return NotWinning(tuple(path), "leaf outside the domain")
            if not program.exists_ok(play):
                return NotWinning(tuple(path), "existential rows violated at leaf")
            worst.append(program.objective_value(play) if program.forall_ok(play) else POS_INF)
            return None
        j = order[depth]
        if node.var != j:
            raise ShapeMismatch(f"expected variable {j}, found {node.var}")
        q = program.quantifiers[j]
        if q is Quantifier.EXISTS:
            if len(node.children) > 1:
                return NotWinning(tuple(path), "existential node with several children")
            if not node.children:
                return NotWinning(tuple(path), "existential node without a move")
            (v, child), = node.children.items()
            if v not in program.domain(j) or not e_sys.feasible(*box(path + [(j, v)])):
                return NotWinning(tuple(path + [(j, Fraction(v))]), "illegal existential move")
            return walk(child, depth + 1, path + [(j, Fraction(v))])
        legal = [v for v in program.domain(j) if a_sys.feasible(*box(path + [(j, v)]))]
        for v in legal:
            if v not in node.children:
                return NotWinning(tuple(path + [(j, Fraction(v))]), "legal universal move not covered")
        if not legal:
            worst.append(POS_INF)
            return None
        for v in legal:
            out = walk(node.children[v], depth + 1, path + [(j, Fraction(v))])
            if out is not None:
                return out
        return None

    out = walk(tree.root, 0, [])
    if out is not None:
        return out
    return Winning(min(worst) if worst else POS_INF)


# ---------------------------------------------------------------------------
# Simple restriction
# ---------------------------------------------------------------------------


def is_simply_restricted(program: QuantifiedProgram, limit: int = 2**20) -> bool:
    """Whether every illegal universal value is caught by a single row.

    Checked over all prefixes in the domain by full enumeration of the
    universal rows.
    """
    lay = _Layout(program, None)
    total = lay.plays()
    if total > limit:
        raise TooLarge(f"{total} plays exceed the limit {limit}")
    dims = [len(d) for d in lay.domains]
    if not dims:
        return True
    grids = np.indices(dims).reshape(len(dims), -1).T
    X = np.zeros(grids.shape, dtype=np.int64)
    for k, dom in enumerate(lay.domains):
        X[:, k] = np.asarray(dom, dtype=np.int64)[grids[:, k]]
    Aa, ba = _row_matrix(lay.a_rows, lay)
    if not len(ba):
        return True
    acts = X @ Aa.T
    aok = np.all(acts <= ba, axis=1).reshape(dims)
    # Row minima over each suffix of columns.
    lo = np.array([d[0] for d in lay.domains])
    hi = np.array([d[-1] for d in lay.domains])
    mins = np.minimum(Aa * lo, Aa * hi)  # rows x cols
    feas = [aok]
    for _ in range(len(dims)):
        feas.append(np.logical_or.reduce(feas[-1], axis=-1))
    feas.reverse()  # feas[k] has shape dims[:k]
    for k in range(len(dims)):
        j = lay.int_vars[k]
        if program.quantifiers[j] is not Quantifier.FORALL:
            continue
        legal = feas[k + 1]  # shape dims[:k+1]
        prefixes = np.indices(dims[: k + 1]).reshape(k + 1, -1).T
        vals = np.zeros(prefixes.shape, dtype=np.int64)
        for t in range(k + 1):
            vals[:, t] = np.asarray(lay.domains[t], dtype=np.int64)[prefixes[:, t]]
        partial = vals @ Aa[:, : k + 1].T + mins[:, k + 1 :].sum(axis=1)
        caught = np.any(partial > ba, axis=1)
        flat_legal = legal.reshape(-1)
        if np.any(~flat_legal & ~caught):
            return False
    return True
