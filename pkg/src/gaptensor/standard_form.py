"""Bringing a graph-dual pair into standard form.

Standard form means: every dual weight is strictly positive, all demands are
equal, and the ``2k`` terminals sit on pairwise distinct vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .graph_core import (
    Commodity, CommodityGraph, ContractViolation, DualSolution, Edge, to_fraction,
)
from .mcf import verify_dual
from .unionfind import DisjointSet


@dataclass(frozen=True)
class StandardFormCertificate:
    equal_demand: Fraction
    distinct_terminals: bool
    min_dual_weight: Fraction


def _require_feasible(g, d):
    feasible, _, _ = verify_dual(g, d)
    if not feasible:
        raise ContractViolation("input dual is not feasible")


def contract_zero_weight(g: CommodityGraph, d: DualSolution):
    """Merge the endpoints of every zero-weight edge.

    Positive-weight edges keep their weights.  Commodities whose endpoints
    merge had distance zero and are dropped.  A positive-weight edge whose
    endpoints end up merged would be a self-loop; it is dropped too, which can
    only lower the objective (optimal duals never have such edges).
    """
    _require_feasible(g, d)
    ds = DisjointSet(g.vertex_count)
    for e, w in zip(g.edges, d.weights):
        if w == 0:
            ds.union(e.u, e.v)
    label, n = ds.labels()
    edges, weights = [], []
    for e, w in zip(g.edges, d.weights):
        if w > 0 and label[e.u] != label[e.v]:
            edges.append(Edge(label[e.u], label[e.v], e.capacity))
            weights.append(w)
    commodities = tuple(
        Commodity(label[c.source], label[c.sink], c.demand)
        for c in g.commodities if label[c.source] != label[c.sink])
    h = CommodityGraph(n, tuple(edges), commodities)
    return h, DualSolution.for_graph(h, weights)


def rational_gcd(values) -> Fraction:
    values = [to_fraction(v) for v in values]
    denom = reduce(math.lcm, (v.denominator for v in values), 1)
    num = reduce(math.gcd, (v.numerator * (denom // v.denominator) for v in values), 0)
    return Fraction(num, denom)


def equalize_demands(g: CommodityGraph) -> CommodityGraph:
    """Split every commodity into ``d_i / x`` unit copies of demand ``x = gcd(d)``.

    Copies stay adjacent and in the original commodity order.
    """
    if g.k == 0:
        return g
    x = rational_gcd(c.demand for c in g.commodities)
    commodities = []
    for c in g.commodities:
        copies = c.demand / x
        assert copies.denominator == 1
        commodities.extend([Commodity(c.source, c.sink, x)] * copies.numerator)
    return CommodityGraph(g.vertex_count, g.edges, tuple(commodities))


def common_demand(g: CommodityGraph):
    demands = {c.demand for c in g.commodities}
    return demands.pop() if len(demands) == 1 else None


def alpha_extension(g: CommodityGraph, d: DualSolution, eps, alpha):
    """Move every terminal onto a fresh leaf edge.

    Each leaf has capacity ``z(D) * d * (1 + eps)`` and dual weight
    ``alpha / (2 k d (1 + eps))``; there are ``2k`` leaves, so the new
    objective is exactly ``z(D) * (1 + alpha)``.  Leaves are appended after the
    original edges, one per terminal in commodity order (source, then sink).
    """
    eps, alpha = to_fraction(eps), to_fraction(alpha)
    if not 0 < alpha < eps:
        raise ContractViolation(f"alpha must lie in (0, eps); got alpha={alpha}, eps={eps}")
    demand = common_demand(g)
    if demand is None:
        raise ContractViolation("alpha_extension needs equal demands")
    _require_feasible(g, d)
    if d.objective <= 0:
        raise ContractViolation("dual objective must be positive")
    k = g.k
    leaf_cap = d.objective * demand * (1 + eps)
    leaf_w = alpha / (2 * k * demand * (1 + eps))

    edges = list(g.edges)
    weights = list(d.weights)
    nxt = g.vertex_count
    commodities = []
    for c in g.commodities:
        s_leaf, t_leaf = nxt, nxt + 1
        nxt += 2
        edges.append(Edge(c.source, s_leaf, leaf_cap))
        edges.append(Edge(c.sink, t_leaf, leaf_cap))
        weights += [leaf_w, leaf_w]
        commodities.append(Commodity(s_leaf, t_leaf, c.demand))
    h = CommodityGraph(nxt, tuple(edges), tuple(commodities))
    return h, DualSolution.for_graph(h, weights)


def standard_form_violations(g: CommodityGraph, d: DualSolution) -> list[str]:
    problems = []
    if len(d.weights) != g.m:
        return ["dual length does not match edge count"]
    if common_demand(g) is None and g.k > 0:
        problems.append("demands not equal")
    terms = g.terminals()
    if len(set(terms)) != len(terms):
        problems.append("terminals not distinct")
    if any(w <= 0 for w in d.weights):
        problems.append("zero dual weight")
    feasible, objective, _ = verify_dual(g, d)
    if objective != d.objective:
        problems.append("stored dual objective is wrong")
    if not feasible:
        problems.append("dual infeasible")
    return problems


def is_standard_form(g: CommodityGraph, d: DualSolution):
    """Return a :class:`StandardFormCertificate`, or the list of violations."""
    problems = standard_form_violations(g, d)
    if problems:
        return problems
    return StandardFormCertificate(
        common_demand(g), True, min(d.weights, default=Fraction(0)))


def standardize(g: CommodityGraph, d: DualSolution, eps, alpha, always_extend=True):
    """Contract zero weights, equalize demands, then alpha-extend.

    With ``always_extend=False`` the extension is skipped when the pair is
    already in standard form, which makes the pipeline idempotent.
    """
    g, d = contract_zero_weight(g, d)
    g = equalize_demands(g)
    if not always_extend and not standard_form_violations(g, d):
        return g, d
    return alpha_extension(g, d, eps, alpha)
