import random
from fractions import Fraction

import pytest

from gaptensor.fixtures import four_cycle, okamura_seymour, single_edge
from gaptensor.graph_core import CommodityGraph, ContractViolation, DualSolution
from gaptensor.mcf import optimal_dual, shortest_pair_distances, verify_dual
from gaptensor.standard_form import (
    StandardFormCertificate, alpha_extension, contract_zero_weight, equalize_demands,
    is_standard_form, rational_gcd, standardize,
)
from oracles import random_instance


def test_contract_path():
    g = CommodityGraph.build(3, [(0, 1, 1), (1, 2, 1)], [(0, 2, 1)])
    d = DualSolution.for_graph(g, [0, 1])
    h, e = contract_zero_weight(g, d)
    assert (h.vertex_count, h.m) == (2, 1)
    assert e.weights == (1,)
    assert list(shortest_pair_distances(h, e.weights)) == [1]


def test_contract_drops_collapsed_commodity():
    g = CommodityGraph.build(3, [(0, 1, 1), (1, 2, 1)], [(0, 1, 1), (0, 2, 1)])
    d = DualSolution.for_graph(g, [0, 1])
    h, _ = contract_zero_weight(g, d)
    assert h.k == 1


def test_contract_requires_feasible_dual():
    g = single_edge()
    with pytest.raises(ContractViolation):
        contract_zero_weight(g, DualSolution.for_graph(g, [Fraction(1, 2)]))


def test_contract_preserves_objective_and_feasibility_on_optimal_duals():
    rng = random.Random(3)
    for _ in range(25):
        g = random_instance(rng)
        d = optimal_dual(g)
        if d.objective == 0:
            continue
        h, e = contract_zero_weight(g, d)
        assert e.objective == d.objective
        assert verify_dual(h, e)[0]
        assert all(w > 0 for w in e.weights)


def test_gcd_and_equalize():
    assert rational_gcd([Fraction(1, 2), Fraction(3, 4)]) == Fraction(1, 4)
    g = CommodityGraph.build(2, [(0, 1, 1)], [(0, 1, Fraction(1, 2)), (1, 0, Fraction(3, 4))])
    h = equalize_demands(g)
    assert [c.demand for c in h.commodities] == [Fraction(1, 4)] * 5
    assert [(c.source, c.sink) for c in h.commodities] == [(0, 1)] * 2 + [(1, 0)] * 3


def test_alpha_extension_single_edge():
    g = single_edge()
    d = optimal_dual(g)
    h, e = alpha_extension(g, d, 1, Fraction(1, 2))
    assert (h.vertex_count, h.m) == (4, 3)
    assert [x.capacity for x in h.edges[1:]] == [2, 2]
    assert e.weights[1:] == (Fraction(1, 8), Fraction(1, 8))
    assert e.objective == Fraction(3, 2)
    assert isinstance(is_standard_form(h, e), StandardFormCertificate)


def test_alpha_extension_objective_identity():
    for make in (single_edge, four_cycle, okamura_seymour):
        g = make()
        g, d = contract_zero_weight(g, optimal_dual(g))
        g = equalize_demands(g)
        for eps, alpha in [(1, Fraction(1, 2)), (Fraction(1, 3), Fraction(1, 7))]:
            h, e = alpha_extension(g, d, eps, alpha)
            assert e.objective == d.objective * (1 + alpha)
            assert verify_dual(h, e)[0]


def test_alpha_extension_contracts():
    g = single_edge()
    d = optimal_dual(g)
    with pytest.raises(ContractViolation):
        alpha_extension(g, d, Fraction(1, 2), Fraction(1, 2))
    uneven = CommodityGraph.build(2, [(0, 1, 1)], [(0, 1, 1), (0, 1, 2)])
    with pytest.raises(ContractViolation):
        alpha_extension(uneven, optimal_dual(uneven), 1, Fraction(1, 2))


def test_violations_listed():
    g = CommodityGraph.build(3, [(0, 1, 1), (1, 2, 1)], [(0, 1, 1), (1, 2, 2)])
    problems = is_standard_form(g, DualSolution.for_graph(g, [0, 1]))
    assert "demands not equal" in problems
    assert "terminals not distinct" in problems
    assert "zero dual weight" in problems


def test_standardize_idempotent_without_forced_extension():
    g, d = standardize(four_cycle(), optimal_dual(four_cycle()), 1, Fraction(1, 2))
    again = standardize(g, d, 1, Fraction(1, 2), always_extend=False)
    assert again == (g, d)
