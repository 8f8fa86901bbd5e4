"""Linear programming layer.

Float solves go through the dense kernel in ``_kernels``; an exact rational
simplex serves as fallback and as the reference the float results are
certified against.  The integer feasibility test built on top of both is
exact.

Sign convention: an infeasibility certificate is a vector ``y >= 0`` with
``y @ b < min over the box of (y @ A) @ x``.  Its negation is the ``pi <= 0``
ray form of the same Farkas argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .model import LinearRow

FEAS_TOL = 1e-9
ROUND_DENOMINATOR = 10**6


class NumericalBreakdown(RuntimeError):
    """The float simplex hit its iteration guard."""


@dataclass
class LpProblem:
    """``max c @ x`` subject to ``A @ x <= b`` and ``lo <= x <= hi``.

    Data is kept exactly; the float copy is built on first use.
    """

    A: list[list[Fraction]]
    b: list[Fraction]
    c: list[Fraction]
    lo: list[Fraction]
    hi: list[Fraction]
    _float: Optional[tuple] = field(default=None, repr=False, compare=False)
    _sparse: Optional[list] = field(default=None, repr=False, compare=False)

    @property
    def sparse_rows(self) -> list[list[tuple[int, Fraction]]]:
        if self._sparse is None:
            self._sparse = [[(j, a) for j, a in enumerate(row) if a] for row in self.A]
        return self._sparse

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.b)

    @staticmethod
    def from_rows(
        rows: Sequence[LinearRow],
        objective: Sequence,
        lo: Sequence,
        hi: Sequence,
        fixed: Mapping[int, Fraction] | None = None,
    ) -> "LpProblem":
        n = len(objective)
        lo = [Fraction(v) for v in lo]
        hi = [Fraction(v) for v in hi]
        for j, v in (fixed or {}).items():
            lo[j] = hi[j] = Fraction(v)
        A = []
        for r in rows:
            dense = [Fraction(0)] * n
            for j, a in r.coefs:
                dense[j] = a
            A.append(dense)
        return LpProblem(A, [r.rhs for r in rows], [Fraction(v) for v in objective], lo, hi)

    def float_data(self):
        if self._float is None:
            A = np.array([[float(a) for a in row] for row in self.A], dtype=float).reshape(self.m, self.n)
            self._float = (
                A,
                np.array([float(v) for v in self.b]),
                np.array([float(v) for v in self.c]),
                np.array([float(v) for v in self.lo]),
                np.array([float(v) for v in self.hi]),
            )
        return self._float


@dataclass
class LpOutcome:
    status: str  # "optimal" or "infeasible"
    objective: Optional[Fraction | float] = None
    x: Optional[tuple] = None
    duals: Optional[tuple] = None
    ray: Optional[tuple] = None
    exact: bool = False
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"


# ---------------------------------------------------------------------------
# Exact certificate checks
# ---------------------------------------------------------------------------


def box_min(coef: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return coef * lo if coef >= 0 else coef * hi


def box_max(coef: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return coef * hi if coef >= 0 else coef * lo


def aggregate(y: Sequence[Fraction], A: Sequence[Sequence[tuple[int, Fraction]]], n: int) -> list[Fraction]:
    """``y @ A`` for sparse rows ``A``."""
    g = [Fraction(0)] * n
    for yi, row in zip(y, A):
        if yi:
            for j, a in row:
                g[j] += yi * a
    return g


def certifies_infeasible(p: LpProblem, y: Sequence[Fraction]) -> bool:
    """Exact check that ``y`` proves the LP has no point in its box."""
    if any(v < 0 for v in y):
        return False
    g = aggregate(y, p.sparse_rows, p.n)
    lhs = sum((yi * bi for yi, bi in zip(y, p.b)), Fraction(0))
    rhs = sum((box_min(g[j], p.lo[j], p.hi[j]) for j in range(p.n)), Fraction(0))
    return lhs < rhs


def dual_bound(p: LpProblem, y: Sequence[Fraction]) -> Fraction:
    """Upper bound on the LP value implied by multipliers ``y >= 0``."""
    g = aggregate(y, p.sparse_rows, p.n)
    total = sum((yi * bi for yi, bi in zip(y, p.b)), Fraction(0))
    for j in range(p.n):
        total += box_max(p.c[j] - g[j], p.lo[j], p.hi[j])
    return total


def primal_feasible(p: LpProblem, x: Sequence[Fraction]) -> bool:
    for j in range(p.n):
        if not p.lo[j] <= x[j] <= p.hi[j]:
            return False
    for row, bi in zip(p.sparse_rows, p.b):
        if sum((a * x[j] for j, a in row), Fraction(0)) > bi:
            return False
    return True


def _round(v: float) -> Fraction:
    return Fraction(v).limit_denominator(ROUND_DENOMINATOR)


def _round_point(p: LpProblem, x) -> list[Fraction]:
    out = []
    for j, v in enumerate(x):
        lo, hi = p.lo[j], p.hi[j]
        if abs(v - float(lo)) <= 1e-9:
            out.append(lo)
        elif abs(v - float(hi)) <= 1e-9:
            out.append(hi)
        else:
            out.append(min(max(_round(v), lo), hi))
    return out


# ---------------------------------------------------------------------------
# Exact simplex
# ---------------------------------------------------------------------------


def exact_simplex(p: LpProblem) -> LpOutcome:
    """Bounded-variable simplex over rationals with Bland's rule."""
    m, n = p.m, p.n
    zero = Fraction(0)
    width = [p.hi[j] - p.lo[j] for j in range(n)]
    if any(w < 0 for w in width):
        # Crossed bounds: a single variable's box is empty.
        return _crossed_bounds(p)
    bp = [p.b[i] - sum((a * p.lo[j] for j, a in enumerate(p.A[i]) if a), zero) for i in range(m)]
    art_rows = [i for i in range(m) if bp[i] < 0]
    ncols = n + m + len(art_rows)
    T = [[zero] * ncols for _ in range(m)]
    xb = [zero] * m
    basis = [0] * m
    ub: list[Optional[Fraction]] = list(width) + [None] * (m + len(art_rows))
    k = 0
    for i in range(m):
        if bp[i] < 0:
            for j in range(n):
                T[i][j] = -p.A[i][j]
            T[i][n + i] = Fraction(-1)
            T[i][n + m + k] = Fraction(1)
            basis[i] = n + m + k
            xb[i] = -bp[i]
            k += 1
        else:
            for j in range(n):
                T[i][j] = p.A[i][j]
            T[i][n + i] = Fraction(1)
            basis[i] = n + i
            xb[i] = bp[i]
    at_upper = [False] * ncols
    allowed = [True] * ncols
    iters = 0

    def reduced(cost):
        d = list(cost)
        for i in range(m):
            cb = cost[basis[i]]
            if cb:
                row = T[i]
                for j in range(ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d

    def run(d):
        nonlocal iters
        while True:
            basic = set(basis)
            j = -1
            for q in range(ncols):
                if q in basic or not allowed[q] or ub[q] == 0:
                    continue
                if (d[q] < 0) if at_upper[q] else (d[q] > 0):
                    j = q
                    break
            if j < 0:
                return
            s = -1 if at_upper[j] else 1
            col = [T[i][j] * s for i in range(m)]
            tmin = None
            r = -1
            for i in range(m):
                if col[i] > 0:
                    lim = xb[i] / col[i]
                elif col[i] < 0 and ub[basis[i]] is not None:
                    lim = (ub[basis[i]] - xb[i]) / (-col[i])
                else:
                    continue
                if tmin is None or lim < tmin or (lim == tmin and basis[i] < basis[r]):
                    tmin, r = lim, i
            if ub[j] is not None and (tmin is None or ub[j] <= tmin):
                t = ub[j]
                for i in range(m):
                    xb[i] -= t * col[i]
                at_upper[j] = not at_upper[j]
            else:
                if tmin is None:
                    raise ArithmeticError("unbounded LP with finite bounds")
                t = tmin
                for i in range(m):
                    xb[i] -= t * col[i]
                leaving = basis[r]
                at_upper[leaving] = col[r] < 0
                value = ub[j] - t if at_upper[j] else t
                at_upper[j] = False
                piv = T[r][j]
                T[r] = [v / piv for v in T[r]]
                prow = T[r]
                for i in range(m):
                    if i != r and T[i][j]:
                        f = T[i][j]
                        T[i] = [a - f * bq for a, bq in zip(T[i], prow)]
                fd = d[j]
                if fd:
                    for q in range(ncols):
                        if prow[q]:
                            d[q] -= fd * prow[q]
                basis[r] = j
                xb[r] = value
            iters += 1

    if art_rows:
        cost = [zero] * (n + m) + [Fraction(-1)] * len(art_rows)
        d = reduced(cost)
        run(d)
        if any(xb[i] > 0 for i in range(m) if basis[i] >= n + m):
            ray = tuple(max(-d[n + i], zero) for i in range(m))
            return LpOutcome("infeasible", ray=ray, exact=True, iterations=iters)
        for q in range(n + m, ncols):
            ub[q] = zero
            allowed[q] = False

    cost = list(p.c) + [zero] * (m + len(art_rows))
    d = reduced(cost)
    run(d)
    vals = [(ub[q] if at_upper[q] else zero) for q in range(ncols)]
    for i in range(m):
        vals[basis[i]] = xb[i]
    x = tuple(p.lo[j] + vals[j] for j in range(n))
    obj = sum((p.c[j] * x[j] for j in range(n)), zero)
    duals = tuple(max(-d[n + i], zero) for i in range(m))
    return LpOutcome("optimal", obj, x, duals, exact=True, iterations=iters)


def _crossed_bounds(p: LpProblem) -> LpOutcome:
    # No row multiplier certifies an empty box; report an empty ray.
    return LpOutcome("infeasible", ray=tuple(Fraction(0) for _ in range(p.m)), exact=True)


# ---------------------------------------------------------------------------
# Public solve
# ---------------------------------------------------------------------------


def solve_lp(p: LpProblem, exact: bool = False, max_iter: int = 5000) -> LpOutcome:
    """Solve ``p``; with ``exact`` the returned data is rational and checked.

    The float kernel runs first.  In exact mode its certificate is rounded
    and verified in rationals, falling back to the rational simplex when the
    check fails or the float kernel breaks down.
    """
    if any(p.lo[j] > p.hi[j] for j in range(p.n)):
        return _crossed_bounds(p)
    A, b, c, lo, hi = p.float_data()
    status, x, y, obj, iters = _kernels.solve_dense(A, b, c, lo, hi, max_iter, FEAS_TOL)
    if status == _kernels.STATUS_ITERATION_LIMIT:
        if exact:
            return exact_simplex(p)
        raise NumericalBreakdown(f"simplex exceeded {max_iter} iterations")
    if status == _kernels.STATUS_UNBOUNDED:
        # Cannot happen with finite bounds; let the exact code decide.
        return exact_simplex(p)
    if not exact:
        if status == _kernels.STATUS_INFEASIBLE:
            return LpOutcome("infeasible", ray=tuple(float(v) for v in y), iterations=iters)
        return LpOutcome(
            "optimal", obj, tuple(float(v) for v in x), tuple(float(v) for v in y), iterations=iters
        )
    if status == _kernels.STATUS_INFEASIBLE:
        ray = tuple(_round(v) for v in y)
        if certifies_infeasible(p, ray):
            return LpOutcome("infeasible", ray=ray, exact=True, iterations=iters)
        return exact_simplex(p)
    xr = _round_point(p, x)
    yr = tuple(max(_round(v), Fraction(0)) for v in y)
    if primal_feasible(p, xr):
        value = sum((cj * xj for cj, xj in zip(p.c, xr)), Fraction(0))
        if dual_bound(p, yr) == value:
            return LpOutcome("optimal", value, tuple(xr), yr, exact=True, iterations=iters)
    return exact_simplex(p)


def float_infeasible_certified(p: LpProblem, y) -> Optional[tuple[Fraction, ...]]:
    """Round a float Farkas vector and return it if it checks exactly."""
    ray = tuple(_round(v) for v in y)
    return ray if certifies_infeasible(p, ray) else None


# ---------------------------------------------------------------------------
# Farkas cuts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FarkasCut:
    """``sum(coef * x[j]) <= rhs`` over fixed columns, valid for the system.

    ``clause`` lists ``(column, value)`` pairs: at least one of them must
    change for the cut to be satisfiable.
    """

    coefs: tuple[tuple[int, Fraction], ...]
    rhs: Fraction
    clause: tuple[tuple[int, Fraction], ...]
    violated: bool

    @property
    def global_infeasible(self) -> bool:
        return self.violated and not self.clause


def farkas_cut(
    y: Sequence,
    rows: Sequence[LinearRow],
    lo: Sequence,
    hi: Sequence,
    fixed: Mapping[int, Fraction],
) -> FarkasCut:
    """Cut implied by multipliers ``y >= 0`` on ``rows``.

    Free columns range over ``[lo, hi]``; their worst case is moved to the
    right-hand side so the cut only mentions fixed columns.
    """
    yq = [Fraction(v) if not isinstance(v, float) else _round(v) for v in y]
    yq = [max(v, Fraction(0)) for v in yq]
    g: dict[int, Fraction] = {}
    rhs = Fraction(0)
    for yi, r in zip(yq, rows):
        if not yi:
            continue
        rhs += yi * r.rhs
        for j, a in r.coefs:
            g[j] = g.get(j, Fraction(0)) + yi * a
    coefs = []
    lhs = Fraction(0)
    for j in sorted(g):
        a = g[j]
        if not a:
            continue
        if j in fixed:
            coefs.append((j, a))
            lhs += a * Fraction(fixed[j])
        else:
            rhs -= box_min(a, Fraction(lo[j]), Fraction(hi[j]))
    violated = lhs > rhs
    clause = tuple(
        (j, Fraction(fixed[j]))
        for j, a in coefs
        if a * Fraction(fixed[j]) > box_min(a, Fraction(lo[j]), Fraction(hi[j]))
    )
    return FarkasCut(tuple(coefs), rhs, clause, violated)


# ---------------------------------------------------------------------------
# Integer feasibility
# ---------------------------------------------------------------------------


class IntegerSystem:
    """Exact feasibility oracle for ``rows`` over a box with integer columns."""

    def __init__(self, rows: Sequence[LinearRow], n: int, integer: Sequence[bool]):
        self.rows = tuple(rows)
        self.n = n
        self.integer = tuple(integer)
        self._sparse = [(r.coefs, r.rhs) for r in self.rows]
        self._cols: list[list[int]] = [[] for _ in range(n)]
        for i, r in enumerate(self.rows):
            for j, _ in r.coefs:
                self._cols[j].append(i)
        A = np.zeros((len(self.rows), n))
        for i, r in enumerate(self.rows):
            for j, a in r.coefs:
                A[i, j] = float(a)
        self._A = A
        self._b = np.array([float(r.rhs) for r in self.rows])
        self.nodes = 0

    def feasible(self, lo: Sequence, hi: Sequence) -> bool:
        lo = [Fraction(v) for v in lo]
        hi = [Fraction(v) for v in hi]
        for j in range(self.n):
            if self.integer[j]:
                lo[j] = Fraction(math.ceil(lo[j]))
                hi[j] = Fraction(math.floor(hi[j]))
            if lo[j] > hi[j]:
                return False
        if not self.rows:
            return True
        return self._search(lo, hi)

    def witness(self, lo: Sequence, hi: Sequence):
        """A feasible integer point (continuous columns may be rational)."""
        self._found = None
        ok = self.feasible(lo, hi)
        if not self.rows and ok:
            return tuple(Fraction(math.ceil(v)) if self.integer[j] else Fraction(v) for j, v in enumerate(lo))
        return self._found if ok else None

    def _propagate(self, lo: list[Fraction], hi: list[Fraction]) -> bool:
        queue = list(range(len(self.rows)))
        queued = [True] * len(self.rows)
        budget = 50 * (len(self.rows) + 1)
        while queue:
            i = queue.pop()
            queued[i] = False
            coefs, rhs = self._sparse[i]
            minact = Fraction(0)
            for j, a in coefs:
                minact += a * lo[j] if a > 0 else a * hi[j]
            slack = rhs - minact
            if slack < 0:
                return False
            budget -= 1
            if budget < 0:
                continue
            for j, a in coefs:
                if a > 0:
                    span = hi[j] - lo[j]
                    if a * span <= slack:
                        continue
                    nb = lo[j] + slack / a
                    if self.integer[j]:
                        nb = Fraction(math.floor(nb))
                    if nb < hi[j]:
                        hi[j] = nb
                    else:
                        continue
                else:
                    span = hi[j] - lo[j]
                    if -a * span <= slack:
                        continue
                    nb = hi[j] + slack / a
                    if self.integer[j]:
                        nb = Fraction(math.ceil(nb))
                    if nb > lo[j]:
                        lo[j] = nb
                    else:
                        continue
                if lo[j] > hi[j]:
                    return False
                for k in self._cols[j]:
                    if not queued[k]:
                        queued[k] = True
                        queue.append(k)
        return True

    def _rows_hold(self, x: Sequence[Fraction]) -> bool:
        for coefs, rhs in self._sparse:
            if sum((a * x[j] for j, a in coefs), Fraction(0)) > rhs:
                return False
        return True

    def _continuous_feasible(self, lo, hi) -> Optional[tuple]:
        p = LpProblem.from_rows(self.rows, [0] * self.n, lo, hi)
        out = solve_lp(p, exact=True)
        return out.x if out.optimal else None

    def _search(self, lo: list[Fraction], hi: list[Fraction]) -> bool:
        self.nodes += 1
        if not self._propagate(lo, hi):
            return False
        free_int = [j for j in range(self.n) if self.integer[j] and lo[j] < hi[j]]
        free_cont = [j for j in range(self.n) if not self.integer[j] and lo[j] < hi[j]]
        if not free_int:
            if not free_cont:
                if self._rows_hold(lo):
                    self._found = tuple(lo)
                    return True
                return False
            x = self._continuous_feasible(lo, hi)
            if x is not None:
                self._found = x
                return True
            return False

        flo = np.array([float(v) for v in lo])
        fhi = np.array([float(v) for v in hi])
        status, x, y, _, _ = _kernels.solve_dense(
            self._A, self._b, np.zeros(self.n), flo, fhi, 5000, FEAS_TOL
        )
        if status == _kernels.STATUS_INFEASIBLE:
            ray = tuple(_round(v) for v in y)
            if self._certifies(ray, lo, hi):
                return False
        if status == _kernels.STATUS_OPTIMAL:
            cand = list(lo)
            integral = True
            for j in free_int:
                v = round(x[j])
                if abs(x[j] - v) > 1e-6:
                    integral = False
                    break
                cand[j] = Fraction(min(max(v, int(lo[j])), int(hi[j])))
            if integral:
                if not free_cont:
                    if self._rows_hold(cand):
                        self._found = tuple(cand)
                        return True
                else:
                    clo, chi = list(cand), list(cand)
                    for j in free_cont:
                        clo[j], chi[j] = lo[j], hi[j]
                    xc = self._continuous_feasible(clo, chi)
                    if xc is not None:
                        self._found = xc
                        return True
            pick, frac = free_int[0], -1.0
            for j in free_int:
                f = abs(x[j] - math.floor(x[j]) - 0.5)
                f = 0.5 - f
                if f > frac + 1e-12:
                    pick, frac = j, f
            split = math.floor(x[pick])
            prefer_up = x[pick] - split >= 0.5
        else:
            pick = free_int[0]
            split = math.floor((lo[pick] + hi[pick]) / 2)
            prefer_up = False
        split = min(max(split, int(lo[pick])), int(hi[pick]) - 1)
        down = (lo[pick], Fraction(split))
        up = (Fraction(split + 1), hi[pick])
        for child in ((up, down) if prefer_up else (down, up)):
            clo, chi = list(lo), list(hi)
            clo[pick], chi[pick] = child
            if self._search(clo, chi):
                return True
        return False

    def _certifies(self, ray, lo, hi) -> bool:
        if any(v < 0 for v in ray):
            return False
        g: dict[int, Fraction] = {}
        lhs = Fraction(0)
        for yi, (coefs, rhs) in zip(ray, self._sparse):
            if not yi:
                continue
            lhs += yi * rhs
            for j, a in coefs:
                g[j] = g.get(j, Fraction(0)) + yi * a
        bound = sum((box_min(a, lo[j], hi[j]) for j, a in g.items()), Fraction(0))
        return lhs < bound


def ip_feasible(
    rows: Sequence[LinearRow],
    lower: Sequence,
    upper: Sequence,
    fixed: Mapping[int, Fraction] | None = None,
    integer: Sequence[bool] | None = None,
) -> bool:
    """True iff some point of the box with integral integer columns satisfies ``rows``.

    ``fixed`` pins columns to values (a trail).  Columns default to integer.
    """
    n = len(lower)
    integer = [True] * n if integer is None else integer
    lo = list(lower)
    hi = list(upper)
    for j, v in (fixed or {}).items():
        lo[j] = hi[j] = Fraction(v)
    return IntegerSystem(rows, n, integer).feasible(lo, hi)
