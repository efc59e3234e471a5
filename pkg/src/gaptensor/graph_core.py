"""Graph data model, validation, girth and the line-oriented file formats.

All numbers are :class:`fractions.Fraction`.  Edges and commodities keep the
order in which they were given; downstream code refers to them by index.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INFINITE = math.inf


class ContractViolation(ValueError):
    """An operation was called outside its precondition."""


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"{message} at line {lineno}")
        self.lineno = lineno


class Refusal(RuntimeError):
    """A size or enumeration cap was hit; the caller may raise the cap."""


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use Fraction or str")
    return Fraction(value)


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    capacity: Fraction


@dataclass(frozen=True)
class Commodity:
    source: int
    sink: int
    demand: Fraction


@dataclass(frozen=True)
class CommodityGraph:
    vertex_count: int
    edges: tuple[Edge, ...]
    commodities: tuple[Commodity, ...]

    @classmethod
    def build(cls, vertex_count: int, edges: Iterable, commodities: Iterable,
              check: bool = True) -> "CommodityGraph":
        """Build from plain ``(u, v, capacity)`` / ``(s, t, demand)`` tuples."""
        g = cls(
            vertex_count,
            tuple(Edge(int(u), int(v), to_fraction(c)) for u, v, c in edges),
            tuple(Commodity(int(s), int(t), to_fraction(d)) for s, t, d in commodities),
        )
        if check:
            problems = validate(g)
            if problems:
                raise ContractViolation("; ".join(problems))
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def k(self) -> int:
        return len(self.commodities)

    def terminals(self) -> list[int]:
        out = []
        for c in self.commodities:
            out.append(c.source)
            out.append(c.sink)
        return out

    def with_demands(self, demands: Sequence) -> "CommodityGraph":
        return CommodityGraph(
            self.vertex_count, self.edges,
            tuple(Commodity(c.source, c.sink, to_fraction(d))
                  for c, d in zip(self.commodities, demands, strict=True)))

    def pairs(self) -> list[tuple[int, int]]:
        return [(e.u, e.v) for e in self.edges]


@dataclass(frozen=True)
class DualSolution:
    """Edge weights ``w_e`` for the distance-constrained dual, plus ``sum w_e c_e``."""

    weights: tuple[Fraction, ...]
    objective: Fraction

    @classmethod
    def for_graph(cls, g: CommodityGraph, weights: Iterable) -> "DualSolution":
        w = tuple(to_fraction(x) for x in weights)
        if len(w) != g.m:
            raise ContractViolation(f"dual has {len(w)} weights, graph has {g.m} edges")
        return cls(w, sum((wi * e.capacity for wi, e in zip(w, g.edges)), Fraction(0)))

    def check_against(self, g: CommodityGraph) -> None:
        if len(self.weights) != g.m:
            raise ContractViolation(
                f"dual has {len(self.weights)} weights, graph has {g.m} edges")
        z = sum((w * e.capacity for w, e in zip(self.weights, g.edges)), Fraction(0))
        if z != self.objective:
            raise ContractViolation(f"stored objective {self.objective} != recomputed {z}")


@dataclass(frozen=True)
class OrientedGraph:
    """Each base edge ``e = (u, v)`` split into arcs ``u->v`` and ``v->u``.

    ``arc_caps[e] = (c_forward, c_backward)`` with the two summing to the edge
    capacity.  Arc ``2e`` is the forward arc of edge ``e`` and ``2e + 1`` the
    backward one.
    """

    base: CommodityGraph
    arc_caps: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if len(self.arc_caps) != self.base.m:
            raise ContractViolation("one capacity pair per base edge required")
        for i, ((cf, cb), e) in enumerate(zip(self.arc_caps, self.base.edges)):
            if cf < 0 or cb < 0:
                raise ContractViolation(f"negative arc capacity on edge {i}")
            if cf + cb != e.capacity:
                raise ContractViolation(
                    f"arc capacities on edge {i} sum to {cf + cb}, edge capacity {e.capacity}")

    @classmethod
    def half_split(cls, g: CommodityGraph) -> "OrientedGraph":
        return cls(g, tuple((e.capacity / 2, e.capacity / 2) for e in g.edges))

    @property
    def arc_count(self) -> int:
        return 2 * self.base.m

    def arc(self, p: int) -> tuple[int, int, Fraction]:
        """Return ``(tail, head, capacity)`` of arc ``p``."""
        e = self.base.edges[p // 2]
        cf, cb = self.arc_caps[p // 2]
        if p % 2 == 0:
            return e.u, e.v, cf
        return e.v, e.u, cb

    def arcs(self) -> list[tuple[int, int, Fraction]]:
        return [self.arc(p) for p in range(self.arc_count)]


def validate(g: CommodityGraph) -> list[str]:
    """Return the list of violated invariants; empty means valid."""
    problems: list[str] = []
    if g.vertex_count < 1:
        problems.append("vertex_count must be positive")
    for i, e in enumerate(g.edges):
        if not (0 <= e.u < g.vertex_count and 0 <= e.v < g.vertex_count):
            problems.append(f"edge {i}: vertex out of range")
        if e.u == e.v:
            problems.append(f"edge {i}: self-loop")
        if e.capacity <= 0:
            problems.append(f"edge {i}: nonpositive capacity")
    for i, c in enumerate(g.commodities):
        if not (0 <= c.source < g.vertex_count and 0 <= c.sink < g.vertex_count):
            problems.append(f"commodity {i}: vertex out of range")
        if c.source == c.sink:
            problems.append(f"commodity {i}: degenerate commodity")
        if c.demand <= 0:
            problems.append(f"commodity {i}: nonpositive demand")
    return problems


# ---------------------------------------------------------------- girth

def girth(vertex_count: int, edges: Sequence[tuple[int, int]], bound=None):
    """Length of the shortest cycle of an undirected multigraph.

    Parallel edges form a 2-cycle; forests give ``INFINITE``.  With ``bound``
    set, the search stops early once a cycle shorter than ``bound`` is seen
    (the result is then only known to be ``< bound``).
    """
    if any(u == v for u, v in edges):
        return 1
    adj: list[list[tuple[int, int]]] = [[] for _ in range(vertex_count)]
    seen_pairs = set()
    for idx, (u, v) in enumerate(edges):
        key = (min(u, v), max(u, v))
        if key in seen_pairs:
            return 2
        seen_pairs.add(key)
        adj[u].append((v, idx))
        adj[v].append((u, idx))

    best = INFINITE
    for root in range(vertex_count):
        if not adj[root]:
            continue
        dist = {root: 0}
        parent_edge = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            # later non-tree edges close cycles of length >= 2*dist[x]
            if 2 * dist[x] >= best:
                break
            for y, idx in adj[x]:
                if idx == parent_edge[x]:
                    continue
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent_edge[y] = idx
                    queue.append(y)
                else:
                    best = min(best, dist[x] + dist[y] + 1)
        if bound is not None and best < bound:
            return best
    return best


def graph_girth(g: CommodityGraph):
    return girth(g.vertex_count, g.pairs())


# ---------------------------------------------------------------- file I/O

def _parse_fraction(token: str, lineno: int) -> Fraction:
    try:
        if "/" in token:
            p, q = token.split("/")
            return Fraction(int(p), int(q))
        return Fraction(int(token))
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"bad rational {token!r}") from None


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"bad integer {token!r}") from None


def _lines(text):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_graph_lines(text, extra=None) -> CommodityGraph:
    n = None
    edges: list[Edge] = []
    commodities: list[Commodity] = []

    def vertex(tok, lineno):
        x = _parse_int(tok, lineno)
        if n is None:
            raise ParseError(lineno, "vertex before 'n' line")
        if not 0 <= x < n:
            raise ParseError(lineno, f"vertex {x} out of range")
        return x

    for lineno, tok in _lines(text):
        kind = tok[0]
        if kind == "n":
            if len(tok) != 2 or n is not None:
                raise ParseError(lineno, "malformed line")
            n = _parse_int(tok[1], lineno)
            if n < 1:
                raise ParseError(lineno, "vertex count must be positive")
        elif kind in ("e", "k"):
            if len(tok) != 4:
                raise ParseError(lineno, "malformed line")
            a, b = vertex(tok[1], lineno), vertex(tok[2], lineno)
            x = _parse_fraction(tok[3], lineno)
            if kind == "e":
                if a == b:
                    raise ParseError(lineno, "self-loop")
                if x <= 0:
                    raise ParseError(lineno, "nonpositive capacity")
                edges.append(Edge(a, b, x))
            else:
                if a == b:
                    raise ParseError(lineno, "degenerate commodity")
                if x <= 0:
                    raise ParseError(lineno, "nonpositive demand")
                commodities.append(Commodity(a, b, x))
        elif extra is not None and kind in extra:
            extra[kind](tok, lineno)
        else:
            raise ParseError(lineno, "malformed line")
    if n is None:
        raise ParseError(0, "missing 'n' line")
    return CommodityGraph(n, tuple(edges), tuple(commodities))


def parse_graph(text) -> CommodityGraph:
    """Parse a Graph File (bytes or str)."""
    return _parse_graph_lines(text)


def serialize_graph(g: CommodityGraph) -> str:
    out = [f"n {g.vertex_count}"]
    out += [f"e {e.u} {e.v} {format_fraction(e.capacity)}" for e in g.edges]
    out += [f"k {c.source} {c.sink} {format_fraction(c.demand)}" for c in g.commodities]
    return "\n".join(out) + "\n"


def parse_dual(text, g: CommodityGraph | None = None) -> DualSolution:
    z = None
    weights: dict[int, Fraction] = {}
    for lineno, tok in _lines(text):
        if tok[0] == "z" and len(tok) == 2:
            z = _parse_fraction(tok[1], lineno)
        elif tok[0] == "w" and len(tok) == 3:
            idx = _parse_int(tok[1], lineno)
            if idx in weights:
                raise ParseError(lineno, f"duplicate weight for edge {idx}")
            weights[idx] = _parse_fraction(tok[2], lineno)
        else:
            raise ParseError(lineno, "malformed line")
    if sorted(weights) != list(range(len(weights))):
        raise ParseError(0, "edge indices must be 0..m-1")
    w = tuple(weights[i] for i in range(len(weights)))
    if z is None:
        raise ParseError(0, "missing 'z' line")
    d = DualSolution(w, z)
    if g is not None:
        d.check_against(g)
    return d


def serialize_dual(d: DualSolution) -> str:
    out = [f"z {format_fraction(d.objective)}"]
    out += [f"w {i} {format_fraction(w)}" for i, w in enumerate(d.weights)]
    return "\n".join(out) + "\n"


def parse_oriented(text) -> OrientedGraph:
    """Graph File lines followed by ``a u v c`` arc lines, two per base edge."""
    arcs: list[tuple[int, int, Fraction, int]] = []

    def on_arc(tok, lineno):
        if len(tok) != 4:
            raise ParseError(lineno, "malformed line")
        arcs.append((_parse_int(tok[1], lineno), _parse_int(tok[2], lineno),
                     _parse_fraction(tok[3], lineno), lineno))

    g = _parse_graph_lines(text, {"a": on_arc})
    if len(arcs) != 2 * g.m:
        raise ParseError(0, f"expected {2 * g.m} arc lines, got {len(arcs)}")
    caps = []
    for i, e in enumerate(g.edges):
        (u1, v1, c1, l1), (u2, v2, c2, l2) = arcs[2 * i], arcs[2 * i + 1]
        if (u1, v1) != (e.u, e.v):
            raise ParseError(l1, f"arc does not match forward orientation of edge {i}")
        if (u2, v2) != (e.v, e.u):
            raise ParseError(l2, f"arc does not match backward orientation of edge {i}")
        if c1 < 0 or c2 < 0 or c1 + c2 != e.capacity:
            raise ParseError(l2, f"arc capacities of edge {i} must be nonnegative and sum to it")
        caps.append((c1, c2))
    return OrientedGraph(g, tuple(caps))


def serialize_oriented(og: OrientedGraph) -> str:
    out = [serialize_graph(og.base).rstrip("\n")]
    for p in range(og.arc_count):
        u, v, c = og.arc(p)
        out.append(f"a {u} {v} {format_fraction(c)}")
    return "\n".join(out) + "\n"
