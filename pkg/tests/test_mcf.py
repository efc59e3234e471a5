import random
from fractions import Fraction

import pytest

from gaptensor.fixtures import four_cycle, okamura_seymour, single_edge
from gaptensor.graph_core import INFINITE, CommodityGraph, ContractViolation, DualSolution, ParseError
from gaptensor.mcf import (
    FlowSolution, max_concurrent_flow, optimal_dual, parse_flow, serialize_flow,
    shortest_pair_distances, verify_dual,
)
from oracles import all_pairs_floyd, mcf_float, random_instance


@pytest.mark.parametrize("make, rate", [
    (single_edge, 1), (four_cycle, 1), (okamura_seymour, Fraction(3, 4)),
])
def test_fixture_rates(make, rate):
    g = make()
    f = max_concurrent_flow(g)
    assert f.rate == rate
    assert f.check(g) == []
    assert optimal_dual(g).objective == rate


def test_single_edge_dual():
    d = optimal_dual(single_edge())
    assert d.weights == (1,) and d.objective == 1


def test_c4_quarter_metric():
    g = four_cycle()
    d = DualSolution.for_graph(g, [Fraction(1, 4)] * 4)
    feasible, z, dist = verify_dual(g, d)
    assert feasible and z == 1 and list(dist) == [Fraction(1, 2)] * 2
    s = shortest_pair_distances(g, d.weights)
    assert s.l_max == Fraction(1, 2) and s.w_min == Fraction(1, 4)


def test_scaled_down_metric_is_infeasible():
    g = single_edge()
    feasible, z, dist = verify_dual(g, DualSolution.for_graph(g, [Fraction(1, 2)]))
    assert not feasible and z == Fraction(1, 2)


def test_distance_contracts():
    g = four_cycle()
    with pytest.raises(ContractViolation):
        shortest_pair_distances(g, [1, 1, 1])
    with pytest.raises(ContractViolation):
        shortest_pair_distances(g, [1, 1, 1, -1])


def test_disconnected_pair_gives_zero_rate_and_infinite_distance():
    g = CommodityGraph.build(4, [(0, 1, 1), (2, 3, 1)], [(0, 3, 1)])
    assert max_concurrent_flow(g).rate == 0
    assert shortest_pair_distances(g, [1, 1])[0] == INFINITE


def test_flow_round_trip_with_parallel_edges():
    g = CommodityGraph.build(2, [(0, 1, 1), (0, 1, 2)], [(0, 1, 1)])
    f = max_concurrent_flow(g)
    assert f.rate == 3
    assert parse_flow(serialize_flow(g, f), g) == f
    with pytest.raises(ParseError):
        parse_flow("lambda 1\nf 0 0 1 1\nf 0 0 1 1\nf 0 0 1 1\n", g)


def test_flow_check_catches_overload():
    g = single_edge()
    bad = FlowSolution(Fraction(2), ((Fraction(2), Fraction(0)),))
    assert any("exceeds capacity" in p for p in bad.check(g))


def test_distances_match_floyd():
    rng = random.Random(7)
    for _ in range(30):
        g = random_instance(rng)
        w = [Fraction(rng.randint(0, 5), rng.randint(1, 4)) for _ in range(g.m)]
        table = all_pairs_floyd(g.vertex_count, g.pairs(), w)
        got = shortest_pair_distances(g, w)
        assert list(got) == [table[c.source][c.sink] for c in g.commodities]


def test_random_instances_duality_and_oracle():
    rng = random.Random(11)
    for _ in range(30):
        g = random_instance(rng)
        f = max_concurrent_flow(g)
        d = optimal_dual(g)
        assert f.check(g) == []
        assert d.objective == f.rate
        feasible, z, _ = verify_dual(g, d)
        assert feasible and z == f.rate
        assert abs(float(f.rate) - mcf_float(g)) < 1e-7
