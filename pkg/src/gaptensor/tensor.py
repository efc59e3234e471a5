"""The graph tensor ``T(G1', G2', B)`` and its product dual.

Every arc ``p`` of every copy of the outer graph ``G1'`` is replaced by a copy
of the inner graph ``G2'``, glued at one of its commodities.  The scaffold
``B`` decides which copy, and which commodity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cbg import ColoredBipartite, construct_cbg, verify_colored
from .graph_core import (
    Commodity, CommodityGraph, ContractViolation, DualSolution, Edge, OrientedGraph,
    girth, to_fraction,
)
from .mcf import Distances, shortest_pair_distances
from .standard_form import common_demand
from .unionfind import DisjointSet


@dataclass(frozen=True)
class TensorCertificate:
    q: int
    new_demand: Fraction | None            # common tensor demand, when there is one
    copy_maps: tuple                       # per G1 copy: {arc p: (G2 copy j, commodity k)}
    vertex_merge_map: tuple[int, ...]      # copy vertex -> tensor vertex
    inner_commodity: tuple[int, ...]       # per G1 copy i: the G2 commodity replacing its arcs
    outer_arc: tuple[int, ...]             # per G2 copy j: the G1' arc it replaces
    edge_origin: tuple[tuple[int, int, int], ...]   # tensor edge -> (j, G2' arc, G1' arc)
    commodity_origin: tuple[tuple[int, int], ...]   # tensor commodity -> (G1 copy, G1 commodity)
    dropped_edges: int                     # product edges of capacity zero, not materialised
    g1p: OrientedGraph
    g2p: OrientedGraph
    scaffold: ColoredBipartite
    girth_param_g: int | None = None

    def oriented(self, graph: CommodityGraph) -> OrientedGraph:
        """Tensor edges oriented as the inner arcs they copy (all capacity forward)."""
        return OrientedGraph(graph, tuple((e.capacity, Fraction(0)) for e in graph.edges))


class UncertifiedDual(ContractViolation):
    """The scaffold girth is too small for the product dual to be certified."""

    def __init__(self, message, dual):
        super().__init__(message)
        self.dual = dual


def orient_by_coding(g: CommodityGraph, arc_caps: Sequence) -> OrientedGraph:
    """Split each edge into two arcs; any unused capacity is added to the forward arc."""
    if len(arc_caps) != g.m:
        raise ContractViolation("one capacity pair per edge required")
    caps = []
    for i, ((cf, cb), e) in enumerate(zip(arc_caps, g.edges)):
        cf, cb = to_fraction(cf), to_fraction(cb)
        if cf < 0 or cb < 0:
            raise ContractViolation(f"edge {i}: negative arc capacity")
        if cf + cb > e.capacity:
            raise ContractViolation(f"edge {i}: arc capacities {cf} + {cb} exceed {e.capacity}")
        caps.append((e.capacity - cb, cb))
    return OrientedGraph(g, tuple(caps))


def girth_requirement(dist1: Distances, dist2: Distances) -> int:
    """``max(3, ceil(l1 * l2 / (w1 * w2)))``; the scaffold needs girth twice this."""
    w1, w2 = dist1.w_min, dist2.w_min
    if w1 is None or w2 is None or w1 <= 0 or w2 <= 0:
        raise ContractViolation("minimum dual weights must be strictly positive")
    ratio = Fraction(dist1.l_max) * Fraction(dist2.l_max) / (w1 * w2)
    return max(3, math.ceil(ratio))


def graph_tensor(g1p: OrientedGraph, g2p: OrientedGraph, b: ColoredBipartite):
    """Build ``T(G1', G2', B)``; returns ``(graph, certificate)``.

    Tensor edges are listed by G2 copy, then by G2' arc.  Tensor commodities
    are listed by G1 copy, then by G1 commodity.
    """
    g1, g2 = g1p.base, g2p.base
    m1p, k2 = g1p.arc_count, g2.k
    problems = verify_colored(b, m1p, k2, check_girth=False)
    if problems:
        raise ContractViolation("scaffold rejected: " + "; ".join(problems))
    terms = g2.terminals()
    if len(set(terms)) != len(terms):
        raise ContractViolation("terminal collision: inner graph terminals must be distinct")
    d2 = common_demand(g2)
    if d2 is None:
        raise ContractViolation("inner graph demands must be equal")
    if b.n1 % k2 or b.n2 % m1p or b.n1 // k2 != b.n2 // m1p:
        raise ContractViolation("copy ratio is not integral")
    q = b.n1 // k2

    v1, v2 = g1.vertex_count, g2.vertex_count
    offset = b.n1 * v1
    ds = DisjointSet(offset + b.n2 * v2)
    outer_arc = [None] * b.n2
    inner = [None] * b.n1
    copy_maps = [dict() for _ in range(b.n1)]
    for i, j, p, k in b.edges:
        tail, head, _ = g1p.arc(p)
        c = g2.commodities[k]
        ds.union(i * v1 + tail, offset + j * v2 + c.source)
        ds.union(offset + j * v2 + c.sink, i * v1 + head)
        outer_arc[j] = p
        inner[i] = k
        copy_maps[i][p] = (j, k)
    label, n = ds.labels()

    edges, origin = [], []
    dropped = 0
    for j in range(b.n2):
        p = outer_arc[j]
        c1 = g1p.arc(p)[2]
        for a2 in range(g2p.arc_count):
            x, y, c2 = g2p.arc(a2)
            cap = c1 * c2
            if cap == 0:
                dropped += 1
                continue
            edges.append(Edge(label[offset + j * v2 + x], label[offset + j * v2 + y], cap))
            origin.append((j, a2, p))
    commodities, c_origin = [], []
    for i in range(b.n1):
        for ci, c in enumerate(g1.commodities):
            commodities.append(Commodity(label[i * v1 + c.source], label[i * v1 + c.sink],
                                         c.demand * d2 / q))
            c_origin.append((i, ci))
    graph = CommodityGraph(n, tuple(edges), tuple(commodities))
    d1 = common_demand(g1)
    cert = TensorCertificate(
        q=q,
        new_demand=None if d1 is None else d1 * d2 / q,
        copy_maps=tuple(tuple(sorted(cm.items())) for cm in copy_maps),
        vertex_merge_map=tuple(label),
        inner_commodity=tuple(inner),
        outer_arc=tuple(outer_arc),
        edge_origin=tuple(origin),
        commodity_origin=tuple(c_origin),
        dropped_edges=dropped,
        g1p=g1p, g2p=g2p, scaffold=b,
    )
    return graph, cert


def product_weights(d1: DualSolution, d2: DualSolution, cert: TensorCertificate):
    """Weight of each tensor edge: inner edge weight times replaced outer edge weight."""
    return [d1.weights[p // 2] * d2.weights[a2 // 2] for _, a2, p in cert.edge_origin]


def tensor_dual(g1: CommodityGraph, g2: CommodityGraph, d1: DualSolution,
                d2: DualSolution, t, certify: bool = True) -> DualSolution:
    """The product dual on a built tensor ``t = (graph, certificate)``.

    Raises:
        UncertifiedDual: when ``certify`` is set and the scaffold girth is
            below twice the girth requirement; the weights are attached.
    """
    graph, cert = t
    if cert.g1p.base.m != g1.m or cert.g2p.base.m != g2.m:
        raise ContractViolation("tensor was not built from these graphs")
    dual = DualSolution.for_graph(graph, product_weights(d1, d2, cert))
    if certify:
        if any(w <= 0 for w in d1.weights) or any(w <= 0 for w in d2.weights):
            raise UncertifiedDual("input duals must be strictly positive", dual)
        need = 2 * girth_requirement(shortest_pair_distances(g1, d1.weights),
                                     shortest_pair_distances(g2, d2.weights))
        actual = girth(cert.scaffold.n1 + cert.scaffold.n2, cert.scaffold.bipartite().flat_edges(),
                       bound=need)
        if actual < need:
            raise UncertifiedDual(
                f"girth too small for certified dual: scaffold girth {actual} < {need}", dual)
    return dual


def expected_distances(cert: TensorCertificate, dist1: Sequence, dist2: Sequence) -> list:
    """``l1(pair i) * l2(inner commodity of copy y)`` for each tensor commodity."""
    return [Fraction(dist1[ci]) * Fraction(dist2[cert.inner_commodity[i]])
            for i, ci in cert.commodity_origin]


def nc_rate_lower_bound(r1, r2, eps1, eps2, q):
    """``r1 * r2 * (1 + eps1) * (1 + eps2) * q``."""
    r1, r2, eps1, eps2, q = (to_fraction(x) for x in (r1, r2, eps1, eps2, q))
    return r1 * r2 * (1 + eps1) * (1 + eps2) * q


def build_tensor(g1: CommodityGraph, g2: CommodityGraph, d1: DualSolution, d2: DualSolution,
                 g1p: OrientedGraph | None = None, g2p: OrientedGraph | None = None,
                 size_cap: int = 5000, seed: int = 0):
    """``Tensor(G1, G2, D1, D2)``: pick the scaffold from the girth requirement.

    Returns ``(graph, certificate, dual)``.  Orientations default to half/half.
    """
    g1p = g1p or OrientedGraph.half_split(g1)
    g2p = g2p or OrientedGraph.half_split(g2)
    g = girth_requirement(shortest_pair_distances(g1, d1.weights),
                          shortest_pair_distances(g2, d2.weights))
    scaffold = construct_cbg(g1p.arc_count, g2.k, g, size_cap=size_cap, seed=seed)
    graph, cert = graph_tensor(g1p, g2p, scaffold)
    cert = _with_girth(cert, g)
    dual = tensor_dual(g1, g2, d1, d2, (graph, cert))
    return graph, cert, dual


def _with_girth(cert: TensorCertificate, g: int) -> TensorCertificate:
    from dataclasses import replace
    return replace(cert, girth_param_g=g)
