"""Multilevel critical node instances.

A defender vaccinates nodes, an attacker infects nodes, the defender then
protects nodes; infection spreads along arcs into nodes that are neither
vaccinated nor protected.  The objective counts the nodes that stay healthy.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable

from .model import LinearRow, QuantifiedProgram, make_program

VARIANTS = ("P", "DD", "MultiP", "MultiDD")


@dataclass(frozen=True)
class Graph:
    n: int
    arcs: tuple[tuple[int, int], ...]  # directed, 0-based

    @property
    def edges(self) -> set[frozenset]:
        return {frozenset(a) for a in self.arcs}


def gen_graph(n: int, density: float, seed: int) -> Graph:
    """Each unordered pair is an edge with probability ``density``; both arcs emitted."""
    if n < 2:
        raise ValueError("need at least two nodes")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = random.Random(seed)
    arcs = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < density:
            arcs.append((u, v))
            arcs.append((v, u))
    return Graph(n, tuple(arcs))


def read_edge_list(text: str, n: int | None = None) -> Graph:
    """Whitespace-separated endpoints, one edge per line; nodes renumbered densely."""
    pairs = []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) < 2 or parts[0].startswith("#"):
            continue
        pairs.append((parts[0], parts[1]))
    labels = sorted({p for e in pairs for p in e}, key=lambda s: (len(s), s))
    ids = {lab: i for i, lab in enumerate(labels)}
    arcs = set()
    for a, b in pairs:
        if a != b:
            arcs.add((ids[a], ids[b]))
            arcs.add((ids[b], ids[a]))
    return Graph(max(n or 0, len(labels)), tuple(sorted(arcs)))


@dataclass(frozen=True)
class McnSpec:
    graph: Graph
    omega: int  # vaccination budget
    phi: int  # infection budget
    lam: int  # protection budget
    variant: str = "P"
    seed: int = 0

    def __post_init__(self):
        if min(self.omega, self.phi, self.lam) < 0:
            raise ValueError("budgets must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant.startswith("Multi") and self.phi < 2:
            raise ValueError("multistage variants need an infection budget of at least 2")


def _row(coefs: dict[int, int], rhs: int) -> LinearRow:
    return LinearRow.make(coefs, rhs)


def build_mcn(spec: McnSpec) -> QuantifiedProgram:
    if spec.variant.startswith("Multi"):
        return _build_multistage(spec)
    return _build_two_stage(spec)


def _build_two_stage(spec: McnSpec) -> QuantifiedProgram:
    g = spec.graph
    V = range(g.n)
    z = list(V)
    y = [g.n + v for v in V]
    x = [2 * g.n + v for v in V]
    a = [3 * g.n + v for v in V]
    names = [f"z{v + 1}" for v in V] + [f"y{v + 1}" for v in V] + [f"x{v + 1}" for v in V] + [f"a{v + 1}" for v in V]
    dd = spec.variant == "DD"

    rows = [_row({z[v]: 1 for v in V}, spec.omega), _row({x[v]: 1 for v in V}, spec.lam)]
    for v in V:
        if dd:
            rows.append(_row({a[v]: 1, y[v]: 1}, 1))
        else:
            rows.append(_row({a[v]: 1, z[v]: -1, y[v]: 1}, 1))
    for u, v in g.arcs:
        rows.append(_row({a[v]: 1, a[u]: -1, x[v]: -1, z[v]: -1}, 0))
    forall = [_row({y[v]: 1 for v in V}, spec.phi)]
    if dd:
        forall += [_row({y[v]: 1, z[v]: 1}, 1) for v in V]
    n = 4 * g.n
    return make_program(
        [0] * (3 * g.n) + [1] * g.n,
        "E" * g.n + "A" * g.n + "E" * (2 * g.n),
        lower=[0] * n,
        upper=[1] * n,
        exists_rows=rows,
        forall_rows=forall,
        kinds="i" * (3 * g.n) + "c" * g.n,
        names=names,
    )


def _build_multistage(spec: McnSpec) -> QuantifiedProgram:
    g = spec.graph
    V = range(g.n)
    T = range(spec.phi)
    names: list[str] = []
    quants: list[str] = []
    z: dict[tuple[int, int], int] = {}
    y: dict[tuple[int, int], int] = {}
    for t in T:
        for v in V:
            z[t, v] = len(names)
            names.append(f"z{t + 1}_{v + 1}")
            quants.append("E")
        for v in V:
            y[t, v] = len(names)
            names.append(f"y{t + 1}_{v + 1}")
            quants.append("A")
    x = {}
    a = {}
    for v in V:
        x[v] = len(names)
        names.append(f"x{v + 1}")
        quants.append("E")
    for v in V:
        a[v] = len(names)
        names.append(f"a{v + 1}")
        quants.append("E")
    dd = spec.variant == "MultiDD"

    rows = [_row({z[t, v]: 1 for t in T for v in V}, spec.omega)]
    for t in T:
        for v in V:
            c = {z[t, v]: 1}
            for s in range(t):
                c[y[s, v]] = 1
            rows.append(_row(c, 1))
    rows.append(_row({x[v]: 1 for v in V}, spec.lam))
    for v in V:
        if dd:
            c = {a[v]: 1}
            for t in T:
                c[y[t, v]] = 1
            rows.append(_row(c, 1))
        else:
            c = {a[v]: 1}
            for t in T:
                c[z[t, v]] = -1
                c[y[t, v]] = 1
            rows.append(_row(c, 1))
    for u, v in g.arcs:
        c = {a[v]: 1, a[u]: -1, x[v]: -1}
        for t in T:
            c[z[t, v]] = -1
        rows.append(_row(c, 0))

    forall = []
    for t in T:
        c = {y[t, v]: 1 for v in V}
        forall.append(_row(c, 1))
        forall.append(_row({k: -1 for k in c}, -1))
    for v in V:
        forall.append(_row({y[t, v]: 1 for t in T}, 1))
    if dd:
        for t in T:
            for v in V:
                c = {y[t, v]: 1}
                for s in range(t + 1):
                    c[z[s, v]] = 1
                forall.append(_row(c, 1))
    n = len(names)
    kinds = "".join("c" if nm.startswith("a") else "i" for nm in names)
    obj = [1 if nm.startswith("a") else 0 for nm in names]
    return make_program(
        obj,
        "".join(quants),
        lower=[0] * n,
        upper=[1] * n,
        exists_rows=rows,
        forall_rows=forall,
        kinds=kinds,
        names=names,
    )


# ---------------------------------------------------------------------------
# Combinatorial evaluation
# ---------------------------------------------------------------------------


def saved_nodes(graph: Graph, vaccinated: Iterable[int], attacked: Iterable[int], protected: Iterable[int]) -> int:
    """Healthy nodes after the cascade started by unvaccinated attacked nodes."""
    shield = set(vaccinated) | set(protected)
    vacc = set(vaccinated)
    infected = {v for v in attacked if v not in vacc}
    out: dict[int, list[int]] = {}
    for u, v in graph.arcs:
        out.setdefault(u, []).append(v)
    stack = list(infected)
    while stack:
        u = stack.pop()
        for v in out.get(u, ()):
            if v not in infected and v not in shield:
                infected.add(v)
                stack.append(v)
    return graph.n - len(infected)


def _subsets(items, k):
    for r in range(min(k, len(items)) + 1):
        yield from itertools.combinations(items, r)


def brute_force_value(spec: McnSpec) -> int:
    """Optimal saved-node count by direct enumeration of the three moves."""
    g = spec.graph
    V = list(range(g.n))

    def protect(vacc, attacked):
        return max(saved_nodes(g, vacc, attacked, X) for X in _subsets(V, spec.lam))

    if not spec.variant.startswith("Multi"):
        best = -1
        for Z in _subsets(V, spec.omega):
            targets = V if spec.variant == "P" else [v for v in V if v not in Z]
            worst = min(protect(Z, Y) for Y in _subsets(targets, spec.phi))
            best = max(best, worst)
        return best

    dd = spec.variant == "MultiDD"

    def stage(t, vacc, attacked, budget):
        if t == spec.phi:
            return protect(vacc, attacked)
        best = -1
        free = [v for v in V if v not in attacked]
        for Z in _subsets(free, budget):
            nv = vacc | set(Z)
            targets = [v for v in V if v not in attacked and not (dd and v in nv)]
            if not targets:
                continue
            worst = min(stage(t + 1, nv, attacked | {v}, budget - len(Z)) for v in targets)
            best = max(best, worst)
        return best

    return stage(0, frozenset(), frozenset(), spec.omega)


__all__ = [
    "Graph",
    "McnSpec",
    "VARIANTS",
    "brute_force_value",
    "build_mcn",
    "gen_graph",
    "read_edge_list",
    "saved_nodes",
]
