"""Small instances used by the tests, the CLI and the demo."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .graph_core import CommodityGraph
from .netcode import NCSolution


def single_edge() -> CommodityGraph:
    return CommodityGraph.build(2, [(0, 1, 1)], [(0, 1, 1)])


def four_cycle() -> CommodityGraph:
    """Unit 4-cycle with the two crossing unit demands."""
    return CommodityGraph.build(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)],
                                [(0, 2, 1), (1, 3, 1)])


def okamura_seymour() -> CommodityGraph:
    """K_{2,3} with unit edges and four unit demands; max flow 3/4, sparsity 1."""
    edges = [(u, v, 1) for u in (0, 1) for v in (2, 3, 4)]
    return CommodityGraph.build(5, edges, [(0, 1, 1), (2, 3, 1), (3, 4, 1), (2, 4, 1)])


def butterfly() -> CommodityGraph:
    """Sources 0, 1; bottleneck 2 -> 3; sinks 4 (for 0) and 5 (for 1); side edges cross."""
    edges = [(0, 2, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (3, 5, 1), (0, 5, 1), (1, 4, 1)]
    return CommodityGraph.build(6, edges, [(0, 4, 1), (1, 5, 1)])


def butterfly_xor() -> NCSolution:
    """One bit per source; the bottleneck carries their XOR; every edge is used forward only."""
    x = np.array([0, 0, 1, 1], dtype=np.int64)
    y = np.array([0, 1, 0, 1], dtype=np.int64)
    zero = np.zeros(4, dtype=np.int64)
    forward = [x, y, x ^ y, x ^ y, x ^ y, x, y]
    tables = []
    for t in forward:
        tables += [t, zero]
    alphabets = [2, 1] * len(forward)
    return NCSolution((2, 2), tuple(alphabets + [2, 2]), tuple(tables + [x, y]), Fraction(1))


FIXTURES = {
    "single-edge": single_edge,
    "c4": four_cycle,
    "okamura-seymour": okamura_seymour,
    "butterfly": butterfly,
}
