import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gaptensor.fixtures import four_cycle, single_edge
from gaptensor.graph_core import (
    INFINITE, CommodityGraph, ContractViolation, DualSolution, OrientedGraph, ParseError,
    girth, parse_dual, parse_graph, parse_oriented, serialize_dual, serialize_graph,
    serialize_oriented, to_fraction, validate,
)
from oracles import girth_by_cycle_enumeration, girth_by_edge_deletion


def test_parse_single_edge():
    g = parse_graph("n 2\ne 0 1 1\nk 0 1 1\n")
    assert (g.vertex_count, g.m, g.k) == (2, 1, 1)
    assert g.edges[0].capacity == 1


def test_parse_rationals_comments_and_order():
    g = parse_graph("# header\nn 3\ne 0 1 3/2  # first\ne 1 2 2\nk 2 0 1/3\nk 0 1 5\n")
    assert [e.capacity for e in g.edges] == [Fraction(3, 2), Fraction(2)]
    assert [(c.source, c.sink, c.demand) for c in g.commodities] == [(2, 0, Fraction(1, 3)), (0, 1, 5)]


def test_c4_fixture_is_valid():
    g = four_cycle()
    assert (g.m, g.k) == (4, 2)
    assert validate(g) == []


@pytest.mark.parametrize("text, line, words", [
    ("n 2\ne 0 0 1\n", 2, "self-loop"),
    ("n 2\ne 0 1 0\n", 2, "nonpositive capacity"),
    ("n 2\ne 0 1 -1\n", 2, "nonpositive capacity"),
    ("n 2\ne 0 5 1\n", 2, "out of range"),
    ("n 2\ne 0 1 1\nk 1 1 1\n", 3, "degenerate"),
    ("n 2\ne 0 1 1\nk 0 1 0\n", 3, "nonpositive demand"),
    ("n 2\nx 0 1\n", 2, "malformed"),
    ("n 2\ne 0 1 1/0\n", 2, "bad rational"),
    ("n 2\ne 0 1\n", 2, "malformed"),
])
def test_parse_errors_name_the_line(text, line, words):
    with pytest.raises(ParseError) as info:
        parse_graph(text)
    assert info.value.lineno == line
    assert words in str(info.value)
    assert f"line {line}" in str(info.value)


def test_missing_n_line():
    with pytest.raises(ParseError):
        parse_graph("e 0 1 1\n")


def test_validate_reports_every_problem():
    g = CommodityGraph.build(3, [(0, 0, 1), (0, 1, -2)], [(1, 1, 1)], check=False)
    problems = validate(g)
    assert "edge 0: self-loop" in problems
    assert "edge 1: nonpositive capacity" in problems
    assert "commodity 0: degenerate commodity" in problems
    with pytest.raises(ContractViolation):
        CommodityGraph.build(3, [(0, 0, 1)], [])


def test_floats_rejected():
    with pytest.raises(TypeError):
        to_fraction(0.5)


def test_graph_round_trip():
    g = four_cycle().with_demands([Fraction(2, 3), 5])
    assert parse_graph(serialize_graph(g)) == g
    assert parse_graph(serialize_graph(g).encode()) == g


def test_dual_round_trip_and_check():
    g = four_cycle()
    d = DualSolution.for_graph(g, [Fraction(1, 4)] * 4)
    assert d.objective == 1
    assert parse_dual(serialize_dual(d), g) == d
    with pytest.raises(ContractViolation):
        parse_dual("z 2\nw 0 1/4\nw 1 1/4\nw 2 1/4\nw 3 1/4\n", g)
    with pytest.raises(ContractViolation):
        parse_dual("z 1\nw 0 1\n", g)
    with pytest.raises(ParseError):
        parse_dual("z 1\nw 0 1\nw 0 1\n")


def test_oriented_round_trip_and_errors():
    og = OrientedGraph(single_edge(), ((Fraction(1, 3), Fraction(2, 3)),))
    assert parse_oriented(serialize_oriented(og)) == og
    assert og.arc(0) == (0, 1, Fraction(1, 3))
    assert og.arc(1) == (1, 0, Fraction(2, 3))
    with pytest.raises(ParseError):
        parse_oriented("n 2\ne 0 1 1\na 0 1 1/2\na 1 0 1/3\n")
    with pytest.raises(ParseError):
        parse_oriented("n 2\ne 0 1 1\na 1 0 1/2\na 0 1 1/2\n")
    with pytest.raises(ContractViolation):
        OrientedGraph(single_edge(), ((Fraction(2), Fraction(-1)),))


@pytest.mark.parametrize("n, edges, expected", [
    (2, [(0, 1)], INFINITE),
    (2, [(0, 1), (1, 0)], 2),
    (1, [(0, 0)], 1),
    (3, [(0, 1), (1, 2), (2, 0)], 3),
    (4, [(0, 1), (1, 2), (2, 3), (3, 0)], 4),
    (5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)], 3),
    (0, [], INFINITE),
])
def test_girth_examples(n, edges, expected):
    assert girth(n, edges) == expected


def test_girth_petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    assert girth(10, outer + spokes + inner) == 5


@st.composite
def small_multigraphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    return n, draw(st.lists(pairs, max_size=12))


@settings(max_examples=150, deadline=None)
@given(small_multigraphs())
def test_girth_matches_oracles(graph):
    n, edges = graph
    got = girth(n, edges)
    assert got == girth_by_edge_deletion(n, edges)
    assert got == girth_by_cycle_enumeration(n, edges)


@settings(max_examples=60, deadline=None)
@given(small_multigraphs(), st.integers(1, 8))
def test_girth_bound_is_sound(graph, bound):
    n, edges = graph
    exact = girth(n, edges)
    early = girth(n, edges, bound=bound)
    assert early >= exact
    if exact < bound:
        assert early < bound
    else:
        assert early == exact


def test_girth_infinite_is_math_inf():
    assert girth(3, [(0, 1), (1, 2)]) == math.inf
