"""Quantified integer program data model.

A program is an ordered list of variables, each bound by an existential or a
universal quantifier, together with two linear systems in ``<=`` normal form:
the existential system restricts the maximizing player and the universal
system restricts the minimizing player.  All numbers are exact rationals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction, str, float]


class Quantifier(enum.Enum):
    EXISTS = "E"
    FORALL = "A"

    def __str__(self) -> str:
        return self.value


class VarKind(enum.Enum):
    INTEGER = "integer"
    CONTINUOUS = "continuous"


class Sense(enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


# ---------------------------------------------------------------------------
# Extended values
# ---------------------------------------------------------------------------

NEG_INF = -math.inf
POS_INF = math.inf


class _Unknown:
    """The outcome of a position that legal play never reaches."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"

    def __reduce__(self):
        return (_Unknown, ())


UNKNOWN = _Unknown()

# Finite values are Fractions (or ints); the infinities are the float
# infinities, which order correctly against Fractions.
ExtendedValue = Union[Fraction, int, float, _Unknown]


def is_finite(v: ExtendedValue) -> bool:
    return v is not UNKNOWN and not (isinstance(v, float) and math.isinf(v))


def value_tag(v: ExtendedValue) -> str:
    if v is UNKNOWN:
        return "unknown"
    if v == NEG_INF:
        return "-inf"
    if v == POS_INF:
        return "+inf"
    return "finite"


def ext_max(values: Iterable[ExtendedValue]) -> ExtendedValue:
    """Maximum that skips unknown entries unless every entry is unknown."""
    best: ExtendedValue = UNKNOWN
    for v in values:
        if v is UNKNOWN:
            continue
        if best is UNKNOWN or v > best:
            best = v
    return best


def ext_min(values: Iterable[ExtendedValue]) -> ExtendedValue:
    best: ExtendedValue = UNKNOWN
    for v in values:
        if v is UNKNOWN:
            continue
        if best is UNKNOWN or v < best:
            best = v
    return best


def ext_negate(v: ExtendedValue) -> ExtendedValue:
    if v is UNKNOWN:
        return v
    return -v


def format_value(v: ExtendedValue) -> str:
    if v is UNKNOWN:
        return "+-inf"
    if v == POS_INF:
        return "+inf"
    if v == NEG_INF:
        return "-inf"
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# Rows and programs
# ---------------------------------------------------------------------------


def to_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class LinearRow:
    """``sum(coef * x[index]) <= rhs`` with sorted, nonzero coefficients."""

    coefs: tuple[tuple[int, Fraction], ...]
    rhs: Fraction

    @staticmethod
    def make(coefs: Mapping[int, Number] | Sequence[Number], rhs: Number) -> "LinearRow":
        if isinstance(coefs, Mapping):
            items = coefs.items()
        else:
            items = enumerate(coefs)
        acc: dict[int, Fraction] = {}
        for j, a in items:
            a = to_fraction(a)
            if a != 0:
                acc[int(j)] = acc.get(int(j), Fraction(0)) + a
        clean = tuple(sorted((j, a) for j, a in acc.items() if a != 0))
        return LinearRow(clean, to_fraction(rhs))

    def activity(self, x: Sequence[Number]) -> Fraction:
        return sum((a * x[j] for j, a in self.coefs), Fraction(0))

    def activity_map(self, x: Mapping[int, Number]) -> Fraction:
        return sum((a * to_fraction(x[j]) for j, a in self.coefs), Fraction(0))

    def satisfied(self, x: Sequence[Number]) -> bool:
        return self.activity(x) <= self.rhs

    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.coefs)

    def coef(self, j: int) -> Fraction:
        for i, a in self.coefs:
            if i == j:
                return a
        return Fraction(0)

    def negated(self) -> "LinearRow":
        return LinearRow(tuple((j, -a) for j, a in self.coefs), -self.rhs)


def leq(coefs, rhs) -> LinearRow:
    return LinearRow.make(coefs, rhs)


def geq(coefs, rhs) -> LinearRow:
    return LinearRow.make(coefs, rhs).negated()


def eq(coefs, rhs) -> tuple[LinearRow, LinearRow]:
    r = LinearRow.make(coefs, rhs)
    return (r, r.negated())


@dataclass(frozen=True)
class Block:
    quantifier: Quantifier
    start: int
    stop: int

    def __iter__(self):
        return iter(range(self.start, self.stop))

    def __len__(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class QuantifiedProgram:
    names: tuple[str, ...]
    objective: tuple[Fraction, ...]
    quantifiers: tuple[Quantifier, ...]
    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]
    kinds: tuple[VarKind, ...]
    exists_rows: tuple[LinearRow, ...] = ()
    forall_rows: tuple[LinearRow, ...] = ()
    sense: Sense = Sense.MAXIMIZE
    negated: bool = False
    _blocks: tuple[Block, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_blocks", _compute_blocks(self.quantifiers))

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def blocks(self) -> tuple[Block, ...]:
        return self._blocks

    @property
    def gamma(self) -> int:
        return sum(1 for k in self.kinds if k is VarKind.CONTINUOUS)

    @property
    def m_exists(self) -> int:
        return len(self.exists_rows)

    @property
    def m_forall(self) -> int:
        return len(self.forall_rows)

    def block_of(self, j: int) -> int:
        for t, b in enumerate(self.blocks):
            if b.start <= j < b.stop:
                return t
        raise IndexError(j)

    def is_integer(self, j: int) -> bool:
        return self.kinds[j] is VarKind.INTEGER

    def objective_value(self, x: Sequence[Number]) -> Fraction:
        return sum((c * x[j] for j, c in enumerate(self.objective) if c), Fraction(0))

    def exists_ok(self, x: Sequence[Number]) -> bool:
        return all(r.satisfied(x) for r in self.exists_rows)

    def forall_ok(self, x: Sequence[Number]) -> bool:
        return all(r.satisfied(x) for r in self.forall_rows)

    def domain(self, j: int) -> range:
        """Integer values of variable ``j`` (integer variables only)."""
        return range(math.ceil(self.lower[j]), math.floor(self.upper[j]) + 1)

    def index(self, name: str) -> int:
        return self.names.index(name)


def _compute_blocks(quantifiers: Sequence[Quantifier]) -> tuple[Block, ...]:
    blocks: list[Block] = []
    start = 0
    for j in range(1, len(quantifiers) + 1):
        if j == len(quantifiers) or quantifiers[j] is not quantifiers[start]:
            blocks.append(Block(quantifiers[start], start, j))
            start = j
    return tuple(blocks)


def make_program(
    objective: Sequence[Number],
    quantifiers: str | Sequence[Quantifier],
    lower: Sequence[Number] | None = None,
    upper: Sequence[Number] | None = None,
    exists_rows: Iterable[LinearRow | tuple[LinearRow, ...]] = (),
    forall_rows: Iterable[LinearRow | tuple[LinearRow, ...]] = (),
    kinds: Sequence[VarKind] | str | None = None,
    names: Sequence[str] | None = None,
    sense: Sense = Sense.MAXIMIZE,
) -> QuantifiedProgram:
    """Convenience constructor; bounds default to binary, kinds to integer.

    ``quantifiers`` may be a string such as ``"EAE"``; ``kinds`` a string of
    ``i``/``c`` characters.  Row arguments may contain equality pairs.
    """
    n = len(objective)
    if isinstance(quantifiers, str):
        quantifiers = [Quantifier(q) for q in quantifiers]
    if kinds is None:
        kinds = [VarKind.INTEGER] * n
    elif isinstance(kinds, str):
        kinds = [VarKind.CONTINUOUS if k == "c" else VarKind.INTEGER for k in kinds]
    if names is None:
        names = [f"x{j + 1}" for j in range(n)]
    lower = [0] * n if lower is None else lower
    upper = [1] * n if upper is None else upper
    return QuantifiedProgram(
        names=tuple(names),
        objective=tuple(to_fraction(c) for c in objective),
        quantifiers=tuple(quantifiers),
        lower=tuple(to_fraction(v) for v in lower),
        upper=tuple(to_fraction(v) for v in upper),
        kinds=tuple(kinds),
        exists_rows=_flatten_rows(exists_rows),
        forall_rows=_flatten_rows(forall_rows),
        sense=sense,
    )


def _flatten_rows(rows) -> tuple[LinearRow, ...]:
    out: list[LinearRow] = []
    for r in rows:
        if isinstance(r, LinearRow):
            out.append(r)
        else:
            out.extend(r)
    return tuple(out)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    index: int
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def add(self, rule: str, index: int, message: str) -> None:
        self.violations.append(Violation(rule, index, message))


def validate(program: QuantifiedProgram) -> ValidationReport:
    """Check the structural preconditions of a program; never raises."""
    rep = ValidationReport()
    n = program.n
    for name, seq in (
        ("objective", program.objective),
        ("quantifiers", program.quantifiers),
        ("lower", program.lower),
        ("upper", program.upper),
        ("kinds", program.kinds),
    ):
        if len(seq) != n:
            rep.add("length-mismatch", -1, f"{name} has length {len(seq)}, expected {n}")
    if not rep.ok:
        return rep

    for j in range(n):
        lo, hi = program.lower[j], program.upper[j]
        if lo > hi:
            rep.add("bounds-order", j, f"{program.names[j]}: lower {lo} > upper {hi}")
        elif program.kinds[j] is VarKind.INTEGER and math.ceil(lo) > math.floor(hi):
            rep.add("empty-domain", j, f"{program.names[j]}: no integer in [{lo}, {hi}]")

    final = program.blocks[-1] if program.blocks else None
    continuous = set()
    for j in range(n):
        if program.kinds[j] is not VarKind.CONTINUOUS:
            continue
        continuous.add(j)
        if program.quantifiers[j] is Quantifier.FORALL:
            rep.add("continuous-universal", j, f"{program.names[j]}: continuous in universal block")
        elif final is None or j < final.start:
            rep.add("continuous-not-final", j, f"{program.names[j]}: continuous outside the final block")

    for system, rows in (("exists", program.exists_rows), ("forall", program.forall_rows)):
        for i, r in enumerate(rows):
            for j, _ in r.coefs:
                if not 0 <= j < n:
                    rep.add("row-index", i, f"{system} row {i} references column {j}")
            if system == "forall" and any(j in continuous for j, _ in r.coefs):
                rep.add("continuous-in-universal-row", i, f"universal row {i} uses a continuous variable")
    if not rep.ok:
        return rep

    if program.forall_rows:
        from .lp import ip_feasible

        if not ip_feasible(program.forall_rows, program.lower, program.upper, {}, _int_mask(program)):
            rep.add("universal-infeasible", -1, "universal system infeasible over the domain")
    return rep


def _int_mask(program: QuantifiedProgram) -> tuple[bool, ...]:
    return tuple(k is VarKind.INTEGER for k in program.kinds)


class InvalidProgram(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(v.message for v in report.violations))


def require_valid(program: QuantifiedProgram) -> QuantifiedProgram:
    rep = validate(program)
    if not rep.ok:
        raise InvalidProgram(rep)
    return program


def normalize_sense(program: QuantifiedProgram) -> QuantifiedProgram:
    """Return an equivalent maximization program; idempotent.

    Minimization is turned into maximization of the negated objective and the
    ``negated`` flag records that reported values must be negated back.
    """
    if program.sense is Sense.MAXIMIZE:
        return program
    return replace(
        program,
        objective=tuple(-c for c in program.objective),
        sense=Sense.MAXIMIZE,
        negated=not program.negated,
    )


def report_value(program: QuantifiedProgram, internal: ExtendedValue) -> ExtendedValue:
    """Map an internal (maximization) value back to the program's own sense."""
    return ext_negate(internal) if program.negated else internal


# ---------------------------------------------------------------------------
# Binarization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VarEncoding:
    original: int
    kind: VarKind
    shift: Fraction
    columns: tuple[int, ...]
    size: int  # domain size for integers, 0 for continuous

    def decode(self, values: Sequence[Number]) -> Fraction:
        if self.kind is VarKind.CONTINUOUS:
            return to_fraction(values[self.columns[0]])
        return self.shift + sum((int(values[c]) << i for i, c in enumerate(self.columns)), 0)


@dataclass(frozen=True)
class BinarizedProgram:
    original: QuantifiedProgram
    program: QuantifiedProgram
    encodings: tuple[VarEncoding, ...]
    offset: Fraction
    bound_rows: int  # trailing rows of both systems encoding domain upper bounds

    def encode(self, x: Sequence[Number]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.program.n
        for enc in self.encodings:
            v = to_fraction(x[enc.original])
            if enc.kind is VarKind.CONTINUOUS:
                out[enc.columns[0]] = v
                continue
            k = int(v - enc.shift)
            if not 0 <= k < enc.size:
                raise ValueError(f"value {v} outside the domain of {self.original.names[enc.original]}")
            for i, c in enumerate(enc.columns):
                out[c] = Fraction((k >> i) & 1)
        return tuple(out)

    def decode(self, values: Sequence[Number]) -> tuple[Fraction, ...]:
        return tuple(enc.decode(values) for enc in self.encodings)

    def mirrored_forall(self, i: int) -> bool:
        """True for universal rows that duplicate an existential bound row."""
        return i >= self.program.m_forall - self.bound_rows


def bits_for(size: int) -> int:
    # A singleton domain keeps one bit pinned to zero by its bound row so
    # that the block structure survives.
    return max(1, (size - 1).bit_length())


def binarize(program: QuantifiedProgram) -> BinarizedProgram:
    """Replace every integer variable by least-significant-first bits."""
    require_valid(program)
    names: list[str] = []
    objective: list[Fraction] = []
    quantifiers: list[Quantifier] = []
    lower: list[Fraction] = []
    upper: list[Fraction] = []
    kinds: list[VarKind] = []
    encodings: list[VarEncoding] = []
    offset = Fraction(0)
    bound_rows: list[LinearRow] = []

    for j in range(program.n):
        q, c, name = program.quantifiers[j], program.objective[j], program.names[j]
        if program.kinds[j] is VarKind.CONTINUOUS:
            col = len(names)
            names.append(name)
            objective.append(c)
            quantifiers.append(q)
            lower.append(program.lower[j])
            upper.append(program.upper[j])
            kinds.append(VarKind.CONTINUOUS)
            encodings.append(VarEncoding(j, VarKind.CONTINUOUS, Fraction(0), (col,), 0))
            continue
        dom = program.domain(j)
        shift = Fraction(dom.start)
        size = len(dom)
        nb = bits_for(size)
        cols = []
        for i in range(nb):
            cols.append(len(names))
            names.append(name if (nb == 1 and size == 2 and shift == 0) else f"{name}#{i}")
            objective.append(c * (1 << i))
            quantifiers.append(q)
            lower.append(Fraction(0))
            upper.append(Fraction(1))
            kinds.append(VarKind.INTEGER)
        offset += c * shift
        if (1 << nb) - 1 > size - 1:
            bound_rows.append(LinearRow.make({col: 1 << i for i, col in enumerate(cols)}, size - 1))
        encodings.append(VarEncoding(j, VarKind.INTEGER, shift, tuple(cols), size))

    def rewrite(row: LinearRow) -> LinearRow:
        coefs: dict[int, Fraction] = {}
        rhs = row.rhs
        for j, a in row.coefs:
            enc = encodings[j]
            if enc.kind is VarKind.CONTINUOUS:
                coefs[enc.columns[0]] = coefs.get(enc.columns[0], Fraction(0)) + a
                continue
            rhs -= a * enc.shift
            for i, col in enumerate(enc.columns):
                coefs[col] = coefs.get(col, Fraction(0)) + a * (1 << i)
        return LinearRow.make(coefs, rhs)

    exists_rows = tuple(rewrite(r) for r in program.exists_rows) + tuple(bound_rows)
    forall_rows = tuple(rewrite(r) for r in program.forall_rows) + tuple(bound_rows)
    binary = QuantifiedProgram(
        names=tuple(names),
        objective=tuple(objective),
        quantifiers=tuple(quantifiers),
        lower=tuple(lower),
        upper=tuple(upper),
        kinds=tuple(kinds),
        exists_rows=exists_rows,
        forall_rows=forall_rows,
        sense=program.sense,
        negated=program.negated,
    )
    return BinarizedProgram(program, binary, tuple(encodings), offset, len(bound_rows))


def is_binary(program: QuantifiedProgram) -> bool:
    return all(
        k is VarKind.CONTINUOUS or (program.lower[j] == 0 and program.upper[j] == 1)
        for j, k in enumerate(program.kinds)
    )


def has_polyhedral_uncertainty(program: QuantifiedProgram, ignore_rows: int = 0) -> bool:
    """No existential variable occurs in a universal row.

    The trailing ``ignore_rows`` universal rows are skipped (bound rows that
    also live in the existential system cannot hand the universal player a
    loss on their own).
    """
    rows = program.forall_rows[: program.m_forall - ignore_rows]
    for r in rows:
        for j, _ in r.coefs:
            if program.quantifiers[j] is Quantifier.EXISTS:
                return False
    return True
