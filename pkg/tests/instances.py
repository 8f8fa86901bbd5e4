"""Random small quantified programs for cross-checking against the oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from qsolve.model import (
    InvalidProgram,
    LinearRow,
    QuantifiedProgram,
    Quantifier,
    Sense,
    VarKind,
    binarize,
    make_program,
    require_valid,
)

CLASSES = ("box", "polyhedral", "decision-dependent")


@dataclass
class Instance:
    program: QuantifiedProgram
    kind: str
    continuous: bool
    seed: int


def _row(rng: random.Random, cols: list[int], n: int, point, slack_max: int, frac: bool = False) -> LinearRow:
    k = rng.randint(1, min(len(cols), 4))
    support = rng.sample(cols, k)
    coefs: dict[int, Fraction] = {}
    for j in support:
        a = rng.choice([-3, -2, -1, 1, 2, 3])
        if frac and rng.random() < 0.3:
            a = Fraction(a, 2)
        coefs[j] = Fraction(a)
    act = sum(a * point[j] for j, a in coefs.items())
    return LinearRow.make(coefs, act + rng.randint(0, slack_max))


def random_instance(seed: int, kind: str | None = None, continuous: bool | None = None, max_bits: int = 14) -> Instance:
    """A valid program with at most ``max_bits`` binarized columns."""
    rng = random.Random(seed)
    kind = kind or rng.choice(CLASSES)
    continuous = rng.random() < 0.3 if continuous is None else continuous
    for _ in range(200):
        prog = _attempt(rng, kind, continuous)
        if prog is None:
            continue
        try:
            require_valid(prog)
        except InvalidProgram:
            continue
        if binarize(prog).program.n > max_bits:
            continue
        return Instance(prog, kind, continuous, seed)
    raise RuntimeError(f"no valid instance for seed {seed}")


def _attempt(rng: random.Random, kind: str, continuous: bool):
    n_int = rng.randint(2, 9)
    quants = [rng.choice("EA") for _ in range(n_int)]
    if kind != "box" and "A" not in quants:
        quants[rng.randrange(n_int)] = "A"
    lower, upper = [], []
    for _ in range(n_int):
        if rng.random() < 0.25:
            lo = rng.randint(-1, 1)
            lower.append(lo)
            upper.append(lo + rng.randint(1, 2))
        else:
            lower.append(0)
            upper.append(1)
    kinds = ["i"] * n_int
    if continuous:
        if quants[-1] != "E":
            quants.append("E")
            lower.append(0)
            upper.append(1)
            kinds.append("i")
        for _ in range(rng.randint(1, 2)):
            quants.append("E")
            lo = rng.choice([0, -2])
            lower.append(lo)
            upper.append(lo + rng.choice([1, 2, 4]))
            kinds.append("c")
    n = len(quants)
    point = [rng.randint(int(lower[j]), int(upper[j])) if kinds[j] == "i" else lower[j] for j in range(n)]
    cols = list(range(n))
    exists_rows = [_row(rng, cols, n, point, 4, frac=continuous) for _ in range(rng.randint(1, 4))]
    if continuous:
        cont = [j for j in range(n) if kinds[j] == "c"]
        # Make sure the continuous columns matter.
        j = rng.choice(cont)
        others = [i for i in range(n) if kinds[i] == "i"]
        i = rng.choice(others)
        coefs = {j: Fraction(rng.choice([1, 2])), i: Fraction(rng.choice([-2, -1, 1, 2]))}
        act = sum(a * point[c] for c, a in coefs.items())
        exists_rows.append(LinearRow.make(coefs, act + rng.randint(0, 1)))
    forall_rows = []
    univ = [j for j in range(n) if quants[j] == "A"]
    if kind == "polyhedral":
        forall_rows = [_row(rng, univ, n, point, 2) for _ in range(rng.randint(1, 2))]
    elif kind == "decision-dependent":
        first_univ = univ[0]
        ints = [j for j in range(n) if kinds[j] == "i"]
        early = [j for j in ints if j < first_univ or rng.random() < 0.5]
        for _ in range(rng.randint(1, 2)):
            cols_ = sorted(set(rng.sample(univ, min(len(univ), 2)) + rng.sample(early, min(len(early), 1)) if early else univ))
            forall_rows.append(_row(rng, cols_, n, point, 1))
        if not any(quants[j] == "E" for r in forall_rows for j, _ in r.coefs):
            return None
    objective = [rng.randint(-3, 3) for _ in range(n)]
    sense = Sense.MINIMIZE if rng.random() < 0.2 else Sense.MAXIMIZE
    return make_program(
        objective,
        "".join(quants),
        lower=lower,
        upper=upper,
        exists_rows=exists_rows,
        forall_rows=forall_rows,
        kinds="".join(kinds),
        sense=sense,
    )


def suite(count: int, start: int = 0) -> list[Instance]:
    return [random_instance(start + s) for s in range(count)]


__all__ = ["CLASSES", "Instance", "Quantifier", "VarKind", "random_instance", "suite"]
