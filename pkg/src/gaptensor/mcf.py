"""Maximum concurrent flow and its distance-constrained dual, exactly.

The primal is solved over a growing set of paths; the duals of the restricted
problem are an edge metric ``w`` and per-commodity targets ``y``.  A shortest
path shorter than ``y_i`` is a violated dual constraint and its path is added
as a new column.  At termination ``w`` is optimal for the full dual.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

from .graph_core import (
    INFINITE, CommodityGraph, ContractViolation, DualSolution, ParseError,
    _lines, _parse_fraction, _parse_int, format_fraction, to_fraction,
)
from .lp import Tableau


@dataclass(frozen=True)
class FlowSolution:
    """``arc_flows[i][a]`` is commodity ``i``'s flow on arc ``a`` (``2e`` forward, ``2e+1`` back)."""

    rate: Fraction
    arc_flows: tuple[tuple[Fraction, ...], ...]

    def check(self, g: CommodityGraph) -> list[str]:
        """Return violated flow invariants (conservation, demand, capacity)."""
        problems = []
        if len(self.arc_flows) != g.k:
            return ["one flow vector per commodity required"]
        for i, (flows, c) in enumerate(zip(self.arc_flows, g.commodities)):
            if len(flows) != 2 * g.m:
                problems.append(f"commodity {i}: wrong arc count")
                continue
            if any(f < 0 for f in flows):
                problems.append(f"commodity {i}: negative arc flow")
            net = [Fraction(0)] * g.vertex_count
            for e_idx, e in enumerate(g.edges):
                fwd, bwd = flows[2 * e_idx], flows[2 * e_idx + 1]
                net[e.u] += fwd - bwd
                net[e.v] += bwd - fwd
            for v in range(g.vertex_count):
                want = Fraction(0)
                if v == c.source:
                    want = self.rate * c.demand
                elif v == c.sink:
                    want = -self.rate * c.demand
                if net[v] != want:
                    problems.append(f"commodity {i}: net outflow {net[v]} at vertex {v}, expected {want}")
        for e_idx, e in enumerate(g.edges):
            load = sum((fl[2 * e_idx] + fl[2 * e_idx + 1] for fl in self.arc_flows), Fraction(0))
            if load > e.capacity:
                problems.append(f"edge {e_idx}: load {load} exceeds capacity {e.capacity}")
        return problems


@dataclass(frozen=True)
class Distances:
    """Shortest commodity distances under a metric, with ``l_max`` and ``w_min``."""

    values: tuple
    l_max: object
    w_min: object

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


# ------------------------------------------------------------ shortest paths

def _adjacency(g: CommodityGraph):
    adj = [[] for _ in range(g.vertex_count)]
    for idx, e in enumerate(g.edges):
        adj[e.u].append((e.v, idx, 0))
        adj[e.v].append((e.u, idx, 1))
    return adj


def _dijkstra(adj, int_w, source, target=None):
    """Integer-weight Dijkstra; returns (dist, parent) with parent = (prev, edge, dir)."""
    dist = {source: 0}
    parent = {source: None}
    heap = [(0, source)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == target:
            break
        for y, idx, direction in adj[x]:
            nd = d + int_w[idx]
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                parent[y] = (x, idx, direction)
                heapq.heappush(heap, (nd, y))
    return dist, parent


def _scale(weights: Sequence[Fraction]):
    denom = reduce(math.lcm, (Fraction(w).denominator for w in weights), 1)
    return [int(Fraction(w) * denom) for w in weights], denom


def shortest_pair_distances(g: CommodityGraph, w: Sequence) -> Distances:
    """Exact ``w``-shortest distance for every commodity pair.

    ``l_max`` is the largest finite distance and ``w_min`` the smallest edge
    weight.  Unreachable pairs get ``INFINITE``.
    """
    w = [to_fraction(x) for x in w]
    if len(w) != g.m:
        raise ContractViolation(f"weight vector has length {len(w)}, graph has {g.m} edges")
    if any(x < 0 for x in w):
        raise ContractViolation("negative edge weight")
    int_w, denom = _scale(w)
    adj = _adjacency(g)
    cache: dict[int, dict] = {}
    out = []
    for c in g.commodities:
        if c.source not in cache:
            cache[c.source] = _dijkstra(adj, int_w, c.source)[0]
        d = cache[c.source].get(c.sink)
        out.append(INFINITE if d is None else Fraction(d, denom))
    finite = [x for x in out if x != INFINITE]
    return Distances(tuple(out), max(finite, default=Fraction(0)), min(w, default=None))


def verify_dual(g: CommodityGraph, d: DualSolution):
    """Return ``(feasible, objective, distances)`` for a proposed dual."""
    if len(d.weights) != g.m:
        raise ContractViolation(f"dual has {len(d.weights)} weights, graph has {g.m} edges")
    objective = sum((w * e.capacity for w, e in zip(d.weights, g.edges)), Fraction(0))
    if any(w < 0 for w in d.weights):
        return False, objective, ()
    dist = shortest_pair_distances(g, d.weights)
    if any(x == INFINITE for x in dist):
        # an unreachable pair makes the distance constraint trivially hold
        return True, objective, dist.values
    total = sum((c.demand * x for c, x in zip(g.commodities, dist)), Fraction(0))
    return total >= 1, objective, dist.values


# ------------------------------------------------------------ column generation

def _hop_path(g, adj, s, t):
    prev = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if x == t:
            break
        for y, idx, direction in adj[x]:
            if y not in prev:
                prev[y] = (x, idx, direction)
                queue.append(y)
    if t not in prev:
        return None
    return _unwind(prev, t)


def _unwind(parent, t):
    path = []
    x = t
    while parent[x] is not None:
        x_prev, idx, direction = parent[x]
        path.append((idx, direction))
        x = x_prev
    path.reverse()
    return tuple(path)


@dataclass(frozen=True)
class _Solved:
    rate: Fraction
    weights: tuple[Fraction, ...]
    path_flows: tuple[tuple[tuple, Fraction], ...]   # (commodity, path, flow)


@lru_cache(maxsize=256)
def _solve(g: CommodityGraph) -> _Solved:
    adj = _adjacency(g)
    zero = Fraction(0)
    if g.k == 0:
        return _Solved(zero, (zero,) * g.m, ())
    paths: list[tuple[int, tuple]] = []
    for i, c in enumerate(g.commodities):
        p = _hop_path(g, adj, c.source, c.sink)
        if p is None:
            # some pair cannot be connected: no positive concurrent rate
            return _Solved(zero, (zero,) * g.m, ())
        paths.append((i, p))
    known = set(paths)

    def path_column(i, p):
        entries = {i: Fraction(-1)}
        for idx, _ in p:
            entries[g.k + idx] = entries.get(g.k + idx, zero) + 1
        return entries

    # rows: one per commodity (demand * rate <= routed), then one per edge
    tableau = Tableau([zero] * g.k + [e.capacity for e in g.edges])
    tableau.add_column(1, {i: c.demand for i, c in enumerate(g.commodities)})
    for i, p in paths:
        tableau.add_column(0, path_column(i, p))

    while True:
        tableau.solve()
        duals = tableau.duals()
        y = duals[:g.k]
        w = duals[g.k:]

        int_w, denom = _scale(w)
        added = False
        by_source: dict[int, tuple] = {}
        for i, c in enumerate(g.commodities):
            if c.source not in by_source:
                by_source[c.source] = _dijkstra(adj, int_w, c.source)
            dist, parent = by_source[c.source]
            if Fraction(dist[c.sink], denom) < y[i]:
                cand = (i, _unwind(parent, c.sink))
                if cand not in known:
                    known.add(cand)
                    paths.append(cand)
                    tableau.add_column(0, path_column(*cand))
                    added = True
        if not added:
            break

    res = tableau.result()
    rate = res.objective
    flows = []
    for i, c in enumerate(g.commodities):
        cols = [(col, p) for col, (pi, p) in enumerate(paths, start=1) if pi == i]
        total = sum((res.x[col] for col, _ in cols), zero)
        scale = rate * c.demand / total if total > 0 else zero
        for col, p in cols:
            if res.x[col] > 0 and scale > 0:
                flows.append((i, p, res.x[col] * scale))
    return _Solved(rate, tuple(w), tuple(flows))


def max_concurrent_flow(g: CommodityGraph) -> FlowSolution:
    solved = _solve(g)
    arc = [[Fraction(0)] * (2 * g.m) for _ in range(g.k)]
    for i, path, f in solved.path_flows:
        for idx, direction in path:
            arc[i][2 * idx + direction] += f
    return FlowSolution(solved.rate, tuple(tuple(a) for a in arc))


def optimal_dual(g: CommodityGraph) -> DualSolution:
    return DualSolution.for_graph(g, _solve(g).weights)


# ------------------------------------------------------------ flow file

def serialize_flow(g: CommodityGraph, f: FlowSolution) -> str:
    out = [f"lambda {format_fraction(f.rate)}"]
    for i, flows in enumerate(f.arc_flows):
        for a, x in enumerate(flows):
            if x:
                e = g.edges[a // 2]
                u, v = (e.u, e.v) if a % 2 == 0 else (e.v, e.u)
                out.append(f"f {i} {u} {v} {format_fraction(x)}")
    return "\n".join(out) + "\n"


def parse_flow(text, g: CommodityGraph) -> FlowSolution:
    """Parse a Flow File; repeated ``(u, v)`` lines fill parallel arcs in order."""
    rate = None
    arc = [[Fraction(0)] * (2 * g.m) for _ in range(g.k)]
    last = [-1] * g.k
    for lineno, tok in _lines(text):
        if tok[0] == "lambda" and len(tok) == 2:
            rate = _parse_fraction(tok[1], lineno)
        elif tok[0] == "f" and len(tok) == 5:
            i, u, v = (_parse_int(t, lineno) for t in tok[1:4])
            if not 0 <= i < g.k:
                raise ParseError(lineno, f"commodity {i} out of range")
            x = _parse_fraction(tok[4], lineno)
            for a in range(last[i] + 1, 2 * g.m):
                e = g.edges[a // 2]
                if ((e.u, e.v) if a % 2 == 0 else (e.v, e.u)) == (u, v):
                    arc[i][a] = x
                    last[i] = a
                    break
            else:
                raise ParseError(lineno, f"no arc {u}->{v} left for commodity {i}")
        else:
            raise ParseError(lineno, "malformed line")
    if rate is None:
        raise ParseError(0, "missing 'lambda' line")
    return FlowSolution(rate, tuple(tuple(a) for a in arc))
