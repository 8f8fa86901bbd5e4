"""QLP text format and the XML solution file.

QLP extends the LP file format with an ``UNCERTAINTY SUBJECT TO`` section
for the universal system and the ``EXISTS``, ``ALL`` and ``ORDER`` lists.
Line breaks inside expressions carry no meaning and keywords are
case-insensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence
from xml.sax.saxutils import quoteattr

from .model import (
    LinearRow,
    NEG_INF,
    POS_INF,
    QuantifiedProgram,
    Quantifier,
    Sense,
    VarKind,
    is_finite,
    require_valid,
)


class QlpError(ValueError):
    """Parse error with a 1-based source location."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class UnknownVariable(QlpError):
    pass


class DuplicateInOrder(QlpError):
    pass


class MissingSection(QlpError):
    pass


class QlpSyntaxError(QlpError):
    pass


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\\[^\n]*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_.\[\]{}#$%&~@^!'|]*)
  | (?P<rel><=|>=|=<|=>|<|>|=)
  | (?P<sign>[+-])
  | (?P<colon>:)
  | (?P<star>\*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QlpSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "newline":
            line += 1
            start = m.end()
        elif kind not in ("space", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    return out


_SECTIONS = {
    ("MINIMIZE",): "min",
    ("MINIMISE",): "min",
    ("MINIMUM",): "min",
    ("MIN",): "min",
    ("MAXIMIZE",): "max",
    ("MAXIMISE",): "max",
    ("MAXIMUM",): "max",
    ("MAX",): "max",
    ("SUBJECT", "TO"): "rows",
    ("SUCH", "THAT"): "rows",
    ("ST",): "rows",
    ("UNCERTAINTY", "SUBJECT", "TO"): "urows",
    ("BOUNDS",): "bounds",
    ("BOUND",): "bounds",
    ("BINARIES",): "binaries",
    ("BINARY",): "binaries",
    ("BIN",): "binaries",
    ("GENERAL",): "general",
    ("GENERALS",): "general",
    ("GEN",): "general",
    ("EXISTS",): "exists",
    ("ALL",): "all",
    ("ORDER",): "order",
    ("END",): "end",
}
_MAX_KEY = max(len(k) for k in _SECTIONS)


def _sections(tokens: list[Token]) -> list[tuple[str, Token, list[Token]]]:
    """Split the stream at section keywords; returns (section, keyword, body)."""
    out: list[tuple[str, Token, list[Token]]] = []
    i = 0
    while i < len(tokens):
        hit = None
        for width in range(_MAX_KEY, 0, -1):
            words = tokens[i : i + width]
            if len(words) == width and all(t.kind == "name" for t in words):
                key = tuple(t.text.upper() for t in words)
                # A keyword followed by ':' is a row label, not a section.
                nxt = tokens[i + width] if i + width < len(tokens) else None
                if key in _SECTIONS and not (nxt is not None and nxt.kind == "colon"):
                    hit = (_SECTIONS[key], width)
                    break
        if hit is not None:
            out.append((hit[0], tokens[i], []))
            i += hit[1]
            if hit[0] == "end":
                if i < len(tokens):
                    t = tokens[i]
                    raise QlpSyntaxError(f"text after END: {t.text!r}", t.line, t.column)
                break
            continue
        if not out:
            t = tokens[i]
            raise QlpSyntaxError(f"expected MINIMIZE or MAXIMIZE, found {t.text!r}", t.line, t.column)
        out[-1][2].append(tokens[i])
        i += 1
    return out


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class _Cursor:
    def __init__(self, tokens: list[Token], end: Optional[Token] = None):
        self.tokens = tokens
        self.i = 0
        self.end = end

    def peek(self) -> Optional[Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Token:
        t = self.peek()
        if t is None:
            where = self.tokens[-1] if self.tokens else self.end
            line, col = (where.line, where.column) if where else (0, 0)
            raise QlpSyntaxError("unexpected end of section", line, col)
        self.i += 1
        return t

    def done(self) -> bool:
        return self.i >= len(self.tokens)


def _number(cur: _Cursor) -> Fraction:
    sign = 1
    t = cur.take()
    while t.kind == "sign":
        sign = -sign if t.text == "-" else sign
        t = cur.take()
    if t.kind != "number":
        raise QlpSyntaxError(f"expected a number, found {t.text!r}", t.line, t.column)
    return sign * Fraction(t.text)


def _expression(cur: _Cursor, stop_on_rel: bool) -> list[tuple[Token, Fraction]]:
    """Linear terms ``[sign] [coef] [*] name``, up to a relation or the end."""
    terms: list[tuple[Token, Fraction]] = []
    while True:
        t = cur.peek()
        if t is None or (stop_on_rel and t.kind == "rel"):
            break
        sign = 1
        seen_sign = False
        while t is not None and t.kind == "sign":
            sign = -sign if t.text == "-" else sign
            seen_sign = True
            cur.take()
            t = cur.peek()
        if terms and not seen_sign:
            raise QlpSyntaxError(f"expected '+' or '-' before {t.text!r}", t.line, t.column)
        coef = Fraction(1)
        t = cur.take()
        if t.kind == "number":
            coef = Fraction(t.text)
            t = cur.take()
            if t.kind == "star":
                t = cur.take()
        if t.kind != "name":
            raise QlpSyntaxError(f"expected a variable name, found {t.text!r}", t.line, t.column)
        terms.append((t, sign * coef))
    return terms


def _skip_label(cur: _Cursor) -> None:
    t = cur.peek()
    if t is not None and t.kind == "name" and cur.i + 1 < len(cur.tokens) and cur.tokens[cur.i + 1].kind == "colon":
        cur.i += 2


def _relation(t: Token) -> str:
    if t.text in ("<=", "=<", "<"):
        return "<="
    if t.text in (">=", "=>", ">"):
        return ">="
    return "="


def _rows(cur: _Cursor) -> list[tuple[list[tuple[Token, Fraction]], str, Fraction, Token]]:
    rows = []
    while not cur.done():
        _skip_label(cur)
        first = cur.peek()
        terms = _expression(cur, stop_on_rel=True)
        if not terms:
            t = cur.peek() or first
            raise QlpSyntaxError("row without terms", t.line, t.column)
        rel = cur.take()
        if rel.kind != "rel":
            raise QlpSyntaxError(f"expected a relation, found {rel.text!r}", rel.line, rel.column)
        rhs = _number(cur)
        rows.append((terms, _relation(rel), rhs, first))
    return rows


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def parse_qlp(text: str) -> QuantifiedProgram:
    """Parse a QLP document into a validated program."""
    tokens = tokenize(text)
    if not tokens:
        raise MissingSection("empty document")
    sections = _sections(tokens)
    by_kind: dict[str, tuple[Token, list[Token]]] = {}
    for kind, key, body in sections:
        slot = "sense" if kind in ("min", "max") else kind
        if slot in by_kind:
            raise QlpSyntaxError(f"section {key.text} given twice", key.line, key.column)
        by_kind[slot] = (key, body)
    sense_kind = next(k for k, _, _ in sections if k in ("min", "max")) if "sense" in by_kind else None
    if sense_kind is None:
        raise MissingSection("missing MINIMIZE or MAXIMIZE")
    if "order" not in by_kind:
        raise MissingSection("missing ORDER section")

    def names_of(slot: str) -> list[Token]:
        if slot not in by_kind:
            return []
        out = []
        for t in by_kind[slot][1]:
            if t.kind != "name":
                raise QlpSyntaxError(f"expected a variable name, found {t.text!r}", t.line, t.column)
            out.append(t)
        return out

    order = names_of("order")
    position: dict[str, int] = {}
    for t in order:
        if t.text in position:
            raise DuplicateInOrder(f"{t.text} appears twice in ORDER", t.line, t.column)
        position[t.text] = len(position)
    quant: dict[str, Quantifier] = {}
    for slot, q in (("exists", Quantifier.EXISTS), ("all", Quantifier.FORALL)):
        for t in names_of(slot):
            if t.text in quant:
                raise QlpError(f"{t.text} has more than one quantifier", t.line, t.column)
            quant[t.text] = q
    for t in order:
        if t.text not in quant:
            raise UnknownVariable(f"{t.text} in ORDER has no quantifier", t.line, t.column)
    for slot in ("exists", "all"):
        for t in names_of(slot):
            if t.text not in position:
                raise UnknownVariable(f"{t.text} is quantified but missing from ORDER", t.line, t.column)

    def column(t: Token) -> int:
        if t.text not in position:
            raise UnknownVariable(f"unknown variable {t.text}", t.line, t.column)
        return position[t.text]

    n = len(order)
    key, body = by_kind["sense"]
    cur = _Cursor(body, key)
    _skip_label(cur)
    objective = [Fraction(0)] * n
    for t, a in _expression(cur, stop_on_rel=True):
        objective[column(t)] += a
    if not cur.done():
        t = cur.peek()
        raise QlpSyntaxError(f"unexpected {t.text!r} in objective", t.line, t.column)

    def system(slot: str) -> list[LinearRow]:
        if slot not in by_kind:
            return []
        key, body = by_kind[slot]
        out = []
        for terms, rel, rhs, _ in _rows(_Cursor(body, key)):
            coefs: dict[int, Fraction] = {}
            for t, a in terms:
                j = column(t)
                coefs[j] = coefs.get(j, Fraction(0)) + a
            if rel in ("<=", "="):
                out.append(LinearRow.make(coefs, rhs))
            if rel in (">=", "="):
                out.append(LinearRow.make({j: -a for j, a in coefs.items()}, -rhs))
        return out

    exists_rows = system("rows")
    forall_rows = system("urows")

    binaries = {column(t) for t in names_of("binaries")}
    general = {column(t) for t in names_of("general")}
    lower: list[Optional[Fraction]] = [None] * n
    upper: list[Optional[Fraction]] = [None] * n
    for j in binaries:
        lower[j], upper[j] = Fraction(0), Fraction(1)
    if "bounds" in by_kind:
        key, body = by_kind["bounds"]
        _bounds(_Cursor(body, key), column, lower, upper)
    names = [t.text for t in order]
    for j in range(n):
        if lower[j] is None:
            lower[j] = Fraction(0)
        if upper[j] is None:
            t = order[j]
            raise QlpError(f"{t.text} needs a finite upper bound", t.line, t.column)
    kinds = [VarKind.INTEGER if (j in binaries or j in general) else VarKind.CONTINUOUS for j in range(n)]
    program = QuantifiedProgram(
        names=tuple(names),
        objective=tuple(objective),
        quantifiers=tuple(quant[nm] for nm in names),
        lower=tuple(lower),
        upper=tuple(upper),
        kinds=tuple(kinds),
        exists_rows=tuple(exists_rows),
        forall_rows=tuple(forall_rows),
        sense=Sense.MINIMIZE if sense_kind == "min" else Sense.MAXIMIZE,
    )
    return require_valid(program)


def _bounds(cur: _Cursor, column, lower: list, upper: list) -> None:
    """``lo <= x <= hi``, ``x <= hi``, ``x >= lo``, ``lo <= x``, ``x = v``."""

    def is_number_start(t: Optional[Token]) -> bool:
        return t is not None and (t.kind == "number" or t.kind == "sign")

    while not cur.done():
        t = cur.peek()
        if is_number_start(t):
            lo = _number(cur)
            rel = cur.take()
            if rel.kind != "rel":
                raise QlpSyntaxError(f"expected a relation, found {rel.text!r}", rel.line, rel.column)
            name = cur.take()
            if name.kind != "name":
                raise QlpSyntaxError(f"expected a variable name, found {name.text!r}", name.line, name.column)
            j = column(name)
            r = _relation(rel)
            if r == "<=":
                lower[j] = lo
            elif r == ">=":
                upper[j] = lo
            else:
                lower[j] = upper[j] = lo
            nxt = cur.peek()
            if nxt is not None and nxt.kind == "rel":
                rel2 = cur.take()
                v = _number(cur)
                if _relation(rel2) == "<=":
                    upper[j] = v
                elif _relation(rel2) == ">=":
                    lower[j] = v
                else:
                    raise QlpSyntaxError("unexpected '=' in a range bound", rel2.line, rel2.column)
            continue
        name = cur.take()
        if name.kind != "name":
            raise QlpSyntaxError(f"expected a bound, found {name.text!r}", name.line, name.column)
        j = column(name)
        rel = cur.take()
        if rel.kind != "rel":
            raise QlpSyntaxError(f"expected a relation, found {rel.text!r}", rel.line, rel.column)
        v = _number(cur)
        r = _relation(rel)
        if r == "<=":
            upper[j] = v
        elif r == ">=":
            lower[j] = v
        else:
            lower[j] = upper[j] = v


# ---------------------------------------------------------------------------
# Writer
# ---------------------------------------------------------------------------


def _format_number(v: Fraction) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    # Exact decimal expansion; only denominators 2^k 5^m have one.
    d = v.denominator
    k = 0
    while d % 2 == 0:
        d //= 2
        k += 1
    m = 0
    while d % 5 == 0:
        d //= 5
        m += 1
    if d == 1:
        digits = max(k, m)
        scaled = v * 10**digits
        s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
        out = s[:-digits] + "." + s[-digits:]
        return ("-" if v < 0 else "") + out
    raise ValueError(f"{v} has no finite decimal form")


def _terms(coefs: Sequence[tuple[int, Fraction]], names: Sequence[str]) -> str:
    parts = []
    for j, a in coefs:
        if not a:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        coef = "" if mag == 1 else _format_number(mag) + " "
        parts.append(f"{sign} {coef}{names[j]}")
    if not parts:
        return "0 " + names[0] if names else "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:] if text.startswith("- ") else text


def _pair_rows(rows: Sequence[LinearRow]) -> Iterator[tuple[LinearRow, str]]:
    i = 0
    while i < len(rows):
        r = rows[i]
        if i + 1 < len(rows) and rows[i + 1] == r.negated():
            yield r, "="
            i += 2
        else:
            yield r, "<="
            i += 1


def write_qlp(program: QuantifiedProgram) -> str:
    """QLP text that parses back to ``program``.

    Every number must have a finite decimal expansion.
    """
    names = program.names
    lines = ["MINIMIZE" if program.sense is Sense.MINIMIZE else "MAXIMIZE"]
    obj = [(j, c) for j, c in enumerate(program.objective) if c]
    lines.append(" " + _terms(obj, names) if obj else " 0 " + names[0])

    def emit(title: str, rows: Sequence[LinearRow]) -> None:
        lines.append(title)
        for r, rel in _pair_rows(rows):
            lines.append(f" {_terms(r.coefs, names)} {rel} {_format_number(r.rhs)}")

    emit("SUBJECT TO", program.exists_rows)
    if program.forall_rows:
        emit("UNCERTAINTY SUBJECT TO", program.forall_rows)
    lines.append("BOUNDS")
    for j, nm in enumerate(names):
        lines.append(f" {_format_number(program.lower[j])} <= {nm} <= {_format_number(program.upper[j])}")
    ints = [j for j in range(program.n) if program.kinds[j] is VarKind.INTEGER]
    binaries = [names[j] for j in ints if program.lower[j] == 0 and program.upper[j] == 1]
    general = [names[j] for j in ints if not (program.lower[j] == 0 and program.upper[j] == 1)]
    if binaries:
        lines += ["BINARIES", " " + " ".join(binaries)]
    if general:
        lines += ["GENERAL", " " + " ".join(general)]
    ex = [nm for j, nm in enumerate(names) if program.quantifiers[j] is Quantifier.EXISTS]
    al = [nm for j, nm in enumerate(names) if program.quantifiers[j] is Quantifier.FORALL]
    if ex:
        lines += ["EXISTS", " " + " ".join(ex)]
    if al:
        lines += ["ALL", " " + " ".join(al)]
    lines += ["ORDER", " " + " ".join(names), "END"]
    return "\n".join(lines) + "\n"


def structurally_equal(a: QuantifiedProgram, b: QuantifiedProgram) -> bool:
    """Same variables, bounds, kinds, quantifiers, sense, objective and rows."""
    return (
        a.names == b.names
        and a.objective == b.objective
        and a.quantifiers == b.quantifiers
        and a.lower == b.lower
        and a.upper == b.upper
        and a.kinds == b.kinds
        and a.sense == b.sense
        and a.exists_rows == b.exists_rows
        and a.forall_rows == b.forall_rows
    )


# ---------------------------------------------------------------------------
# Solution file
# ---------------------------------------------------------------------------


def _objective_text(value) -> str:
    if value is POS_INF:
        return "inf"
    if value is NEG_INF:
        return "-inf"
    if not is_finite(value):
        return "unknown"
    return f"{float(value):.6f}"


def _value_text(v: Fraction, integer: bool) -> str:
    if integer:
        return str(int(v))
    return f"{float(v):.6f}"


def write_solution_xml(result, problem_name: str = "problem.qlp", solution_name: Optional[str] = None) -> str:
    """Solution file for a finished solve.

    ``result`` is a ``SolveResult``.  The variable list is the principal
    variation; it is empty when no play exists.
    """
    binarized = result.binarized
    program = binarized.original
    solution_name = solution_name or problem_name + ".sol"
    status = result.status.value
    value = result.value if result.status.value != "TIMEOUT" else result.incumbent
    gap = "0.000000" if status in ("OPTIMAL", "INFEASIBLE", "UNBOUNDED-WIN") else "unknown"
    runtime = f"{result.runtime:.3f}"
    stats = result.stats
    out = [
        '<?xml version = "1.0" encoding="UTF-8" standalone="yes"?>',
        '<YasolSolution version="1">',
        " <header",
        f"   ProblemName={quoteattr(problem_name)}",
        f"   SolutionName={quoteattr(solution_name)}",
        f'   ObjectiveValue="{_objective_text(value)}"',
        f'   Runtime="{runtime}seconds"',
        f'   DecisionNodes="{stats.decisions}"',
        f'   PropagationSteps="{stats.propagations}"',
        f'   LearntConstraints="{stats.learnt}"/>',
        " <quality",
        f'   SolutionStatus="{status}"',
        f'   Gap="{gap}"/>',
    ]
    pv = result.pv if is_finite(value) else None
    if pv is None:
        out.append(" <variables>")
        out.append(" </variables>")
    else:
        out.append(" <variables>")
        for enc in binarized.encodings:
            j = enc.original
            cols = enc.columns
            index = str(cols[0]) if len(cols) == 1 else f"{cols[0]}-{cols[-1]}"
            block = program.block_of(j) + 1
            text = _value_text(pv[j], program.kinds[j] is VarKind.INTEGER)
            out.append(
                f"  <variable name={quoteattr(program.names[j])} index=\"{index}\" value=\"{text}\" block=\"{block}\"/>"
            )
        out.append(" </variables>")
    out.append("</YasolSolution>")
    return "\n".join(out) + "\n"


__all__ = [
    "DuplicateInOrder",
    "MissingSection",
    "QlpError",
    "QlpSyntaxError",
    "Token",
    "UnknownVariable",
    "parse_qlp",
    "structurally_equal",
    "tokenize",
    "write_qlp",
    "write_solution_xml",
]
