"""Exact sparsest cut by enumerating every bipartition."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .graph_core import INFINITE, CommodityGraph, ContractViolation, Refusal
from .mcf import max_concurrent_flow

DEFAULT_VERTEX_CAP = 24
_CHUNK = 1 << 20


@dataclass(frozen=True)
class CutCertificate:
    side_U: tuple[int, ...]
    capacity: Fraction
    demand: Fraction
    sparsity: Fraction


def _integer_scale(values):
    denom = reduce(math.lcm, (v.denominator for v in values), 1)
    return [int(v * denom) for v in values], denom


def sparsest_cut_bruteforce(g: CommodityGraph, vertex_cap: int = DEFAULT_VERTEX_CAP) -> CutCertificate:
    """Minimise capacity/demand over all bipartitions that separate some demand.

    ``U`` always contains vertex 0; ties go to the lexicographically smallest
    sorted ``U``.
    """
    n = g.vertex_count
    if n > vertex_cap:
        raise Refusal(f"{n} vertices exceed the enumeration cap of {vertex_cap}")
    if g.k == 0 or n < 2:
        raise ContractViolation("all demands co-located: no cut separates any demand")
    caps, cap_denom = _integer_scale([e.capacity for e in g.edges])
    dems, dem_denom = _integer_scale([c.demand for c in g.commodities])
    # bit x-1 of the mask says vertex x (x >= 1) is in U; vertex 0 always is
    total = 1 << (n - 1)
    best_ratio = math.inf
    candidates = []          # (capacity, demand, mask) near the float minimum
    for start in range(0, total, _CHUNK):
        mask = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        member = [np.ones_like(mask)] + [(mask >> (x - 1)) & 1 for x in range(1, n)]
        cap = np.zeros_like(mask)
        for e, c in zip(g.edges, caps):
            cap += c * (member[e.u] ^ member[e.v])
        dem = np.zeros_like(mask)
        for com, d in zip(g.commodities, dems):
            dem += d * (member[com.source] ^ member[com.sink])
        ok = dem > 0
        if not ok.any():
            continue
        ratio = np.full(mask.shape, np.inf)
        ratio[ok] = cap[ok] / dem[ok]
        low = ratio.min()
        if low > best_ratio * (1 + 1e-9):
            continue
        if low < best_ratio:
            best_ratio = low
            candidates = [c for c in candidates if c[3] <= low * (1 + 1e-9)]
        near = np.nonzero(ratio <= low * (1 + 1e-9))[0]
        candidates += [(int(cap[i]), int(dem[i]), int(mask[i]), float(ratio[i])) for i in near]
    if not candidates:
        raise ContractViolation("all demands co-located: no cut separates any demand")
    exact = [(Fraction(c * dem_denom, d * cap_denom), m) for c, d, m, _ in candidates]
    best = min(r for r, _ in exact)
    sides = [tuple([0] + [x for x in range(1, n) if m >> (x - 1) & 1]) for r, m in exact if r == best]
    side = min(sides)
    inside = set(side)
    capacity = sum((e.capacity for e in g.edges if (e.u in inside) != (e.v in inside)), Fraction(0))
    demand = sum((c.demand for c in g.commodities if (c.source in inside) != (c.sink in inside)),
                 Fraction(0))
    return CutCertificate(side, capacity, demand, capacity / demand)


def unit_demands(g: CommodityGraph) -> CommodityGraph:
    return g.with_demands([1] * g.k)


def check_sparsity_product(g1: CommodityGraph, g2: CommodityGraph, t,
                           vertex_cap: int = DEFAULT_VERTEX_CAP):
    """``(lhs, rhs, holds)`` with every demand set to 1 first.

    ``lhs`` is the sparsity of the tensor, ``rhs`` the product of the factor
    sparsities.
    """
    graph = t[0] if isinstance(t, tuple) else t
    lhs = sparsest_cut_bruteforce(unit_demands(graph), vertex_cap).sparsity
    rhs = (sparsest_cut_bruteforce(unit_demands(g1), vertex_cap).sparsity
           * sparsest_cut_bruteforce(unit_demands(g2), vertex_cap).sparsity)
    return lhs, rhs, lhs >= rhs


def sandwich_report(g: CommodityGraph, vertex_cap: int = DEFAULT_VERTEX_CAP):
    """``(lambda, sparsity, sparsity / lambda)``; the ratio is 1 when both are 0."""
    rate = max_concurrent_flow(g).rate
    sparsity = sparsest_cut_bruteforce(g, vertex_cap).sparsity
    if rate > sparsity:
        raise RuntimeError(f"flow {rate} exceeds sparsity {sparsity}")
    if rate == 0:
        ratio = Fraction(1) if sparsity == 0 else INFINITE
    else:
        ratio = sparsity / rate
    return rate, sparsity, ratio
