"""Repeatedly tensoring a graph-dual pair with itself, with size bookkeeping.

The network coding gap of the input is never computed: it enters as an
asserted ``eps`` and is carried forward as a claim.  The flow-side facts
(dual objective, distances, standard form) are checked exactly at every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cbg import construct_cbg
from .graph_core import (
    CommodityGraph, ContractViolation, DualSolution, Edge, OrientedGraph, Refusal, to_fraction,
)
from .mcf import shortest_pair_distances
from .standard_form import common_demand, standard_form_violations, standardize
from .tensor import expected_distances, girth_requirement, graph_tensor, tensor_dual

DEFAULT_SIZE_CAP = 10 ** 6
DEFAULT_SCAFFOLD_CAP = 5000


@dataclass(frozen=True)
class AmplifyStep:
    iteration: int
    vertex_count: int
    edge_count: int
    commodity_count: int
    demand: Fraction
    z: Fraction
    gap_claim: Fraction          # asserted (1 + eps_i), conditional on the input gap
    girth_param: int | None      # g used to build this step (None for the base)
    w_min: Fraction
    l_max: Fraction
    n1: int | None = None
    n2: int | None = None
    q: int | None = None
    checks: dict = field(default_factory=dict)


@dataclass
class AmplifyTrace:
    steps: list[AmplifyStep]
    refusal: str | None = None
    graph: CommodityGraph | None = None
    dual: DualSolution | None = None


def _step(i, g, d, gap, girth_param, n1=None, n2=None, q=None, checks=None) -> AmplifyStep:
    dist = shortest_pair_distances(g, d.weights)
    return AmplifyStep(i, g.vertex_count, g.m, g.k, common_demand(g), d.objective, gap,
                       girth_param, dist.w_min, dist.l_max, n1, n2, q, checks or {})


def tensor_vertex_count(v: int, k: int, n1: int, n2: int) -> int:
    """Vertices of a self-tensor: outer copies plus the interiors of inner copies."""
    return n1 * v + n2 * (v - 2 * k)


def amplify_once(g: CommodityGraph, d: DualSolution, eps, size_cap: int = DEFAULT_SIZE_CAP,
                 orientation: OrientedGraph | None = None,
                 scaffold_cap: int = DEFAULT_SCAFFOLD_CAP, seed: int = 0):
    """Tensor ``(g, d)`` with itself; returns ``(graph, dual, certificate)``.

    The certificate holds the exact checks (z product, distance product,
    standard form) and the conditional gap claim ``(1 + eps)^2``.

    Raises:
        Refusal: no scaffold of the required (r, s, g) within the caps, or
            the tensor would exceed ``size_cap`` vertices.
    """
    eps = to_fraction(eps)
    problems = standard_form_violations(g, d)
    if problems:
        raise ContractViolation("input is not in standard form: " + "; ".join(problems))
    gp = orientation or OrientedGraph.half_split(g)
    dist = shortest_pair_distances(g, d.weights)
    need = girth_requirement(dist, dist)
    r, s = gp.arc_count, g.k
    per_q = tensor_vertex_count(g.vertex_count, g.k, s, r)
    cap = min(scaffold_cap, (size_cap // per_q) * (r + s))
    try:
        scaffold = construct_cbg(r, s, need, size_cap=cap, seed=seed)
    except Refusal as exc:
        raise Refusal(f"no scaffold for (r={r}, s={s}, g={need}): {exc}") from exc
    predicted = tensor_vertex_count(g.vertex_count, g.k, scaffold.n1, scaffold.n2)
    if predicted > size_cap:
        raise Refusal(f"tensor would have {predicted} vertices, cap is {size_cap} "
                      f"(r={r}, s={s}, g={need})")
    graph, cert = graph_tensor(gp, gp, scaffold)
    dual = tensor_dual(g, g, d, d, (graph, cert))
    got = shortest_pair_distances(graph, dual.weights)
    checks = {
        "z_product": dual.objective == cert.q * d.objective ** 2,
        "distance_product": list(got) == expected_distances(cert, dist, dist),
        "standard_form": not standard_form_violations(graph, dual),
        "w_square": got.w_min == dist.w_min ** 2,
        "l_square_bound": got.l_max <= dist.l_max ** 2,
    }
    certificate = {
        "q": cert.q,
        "girth_param": need,
        "n1": scaffold.n1,
        "n2": scaffold.n2,
        "gap_claim": (1 + eps) ** 2,
        "checks": checks,
    }
    return graph, dual, certificate


def iterate(g: CommodityGraph, d: DualSolution, eps, max_iters: int,
            size_cap: int = DEFAULT_SIZE_CAP, scaffold_cap: int = DEFAULT_SCAFFOLD_CAP) -> AmplifyTrace:
    """Standardize with ``1 + alpha = (1 + eps) / (1 + eps/2)``, then self-tensor repeatedly.

    Step 0 is the standardized pair with claim ``1 + eps/2``; each later step
    squares the claim.  A refusal ends the trace and is recorded in it.
    """
    eps = to_fraction(eps)
    if eps <= 0:
        raise ContractViolation("eps must be positive")
    alpha = (1 + eps) / (1 + eps / 2) - 1
    g, d = standardize(g, d, eps, alpha)
    gap = 1 + eps / 2
    trace = AmplifyTrace([_step(0, g, d, gap, None)], graph=g, dual=d)
    for i in range(1, max_iters + 1):
        try:
            g2, d2, cert = amplify_once(g, d, gap - 1, size_cap, scaffold_cap=scaffold_cap)
        except Refusal as exc:
            trace.refusal = f"iteration {i}: {exc}"
            break
        checks = dict(cert["checks"])
        checks.update(recurrence_checks(g, g2, cert["n1"]))
        g, d, gap = g2, d2, cert["gap_claim"]
        trace.steps.append(_step(i, g, d, gap, cert["girth_param"], cert["n1"], cert["n2"],
                                 cert["q"], checks))
        trace.graph, trace.dual = g, d
    return trace


# ------------------------------------------------------------ sizes

@dataclass(frozen=True)
class SizeEstimate:
    log2: float                 # log2 of the bound (may be inf)
    log2_log2: float            # log2 of that, finite far longer
    exact: int | None           # the bound itself when it is an integer of modest size


def size_estimate(c_m: int, c1, i: int, exact_bits: int = 1 << 20) -> SizeEstimate:
    """The closed-form edge bound ``(3 c_m) ** ((4 c1) ** (2 ** (i + 1)))``."""
    c1 = to_fraction(c1)
    if c_m < 1 or c1 < 2 or i < 0:
        raise ContractViolation("need c_m >= 1, c1 >= 2 and i >= 0")
    power = 2 ** (i + 1)
    log2_base = math.log2(3 * c_m)
    log2_log2 = power * math.log2(4 * c1) + (math.log2(log2_base) if log2_base > 0 else -math.inf)
    try:
        log2 = log2_base * float(4 * c1) ** power
    except OverflowError:
        log2 = math.inf
    exact = None
    if log2 <= exact_bits:
        exponent = (4 * c1) ** power
        if exponent.denominator == 1:
            exact = (3 * c_m) ** exponent.numerator
    return SizeEstimate(log2, log2_log2, exact)


def size_recurrence(m_prev: int, k_prev: int, v_prev: int, n1: int) -> dict:
    """Exact ``m_i`` and ``k_i`` and the bound on ``v_i`` for a self-tensor step."""
    if n1 % k_prev:
        raise ContractViolation("n1 must be a multiple of the commodity count")
    ratio = n1 // k_prev
    return {"m": ratio * 4 * m_prev ** 2, "k": n1 * k_prev, "v_bound": 2 * m_prev * v_prev * ratio}


def recurrence_checks(before: CommodityGraph, after: CommodityGraph, n1: int) -> dict:
    rec = size_recurrence(before.m, before.k, before.vertex_count, n1)
    return {
        "m_recurrence": after.m == rec["m"],
        "k_recurrence": after.k == rec["k"],
        "v_bound": after.vertex_count <= rec["v_bound"],
    }


# ------------------------------------------------------------ edge dominance

def _split_order(g: CommodityGraph):
    """Parent of each edge after halving the largest edge until m >= max(k, n)."""
    caps = [e.capacity for e in g.edges]
    parent = list(range(g.m))
    if not caps:
        return parent, caps
    while len(caps) < max(g.k, g.vertex_count):
        big = max(range(len(caps)), key=lambda x: (caps[x], -x))
        caps[big] /= 2
        caps.append(caps[big])
        parent.append(parent[big])
    return parent, caps


def ensure_edge_dominance(g: CommodityGraph) -> CommodityGraph:
    """Halve the largest-capacity edge (first on ties) until ``m >= max(k, n)``.

    The first half stays in place and the second is appended, so flows and
    cuts are unchanged.
    """
    parent, caps = _split_order(g)
    edges = tuple(Edge(g.edges[p].u, g.edges[p].v, c) for p, c in zip(parent, caps))
    return CommodityGraph(g.vertex_count, edges, g.commodities)


def ensure_edge_dominance_with_dual(g: CommodityGraph, d: DualSolution):
    """As :func:`ensure_edge_dominance`; split edges inherit their parent's weight."""
    parent, _ = _split_order(g)
    h = ensure_edge_dominance(g)
    return h, DualSolution.for_graph(h, [d.weights[p] for p in parent])
