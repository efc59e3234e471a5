import pytest

from gaptensor.cbg import (
    Bipartite, ColoredBipartite, biregular_high_girth, color_lift, complete_scaffold,
    construct_cbg, moore_lower_bound, parse_cbg, serialize_cbg, verify_colored,
)
from gaptensor.graph_core import INFINITE, ParseError, Refusal
from oracles import girth_by_edge_deletion


def test_k23_base_lift():
    base = biregular_high_girth(3, 2, 2)
    assert (base.n1, base.n2) == (2, 3)
    assert base.girth() == 4
    b = color_lift(base, 3, 2)
    assert (b.n1, b.n2, b.d1, b.d2) == (12, 18, 3, 2)
    assert b.girth() >= 4
    assert verify_colored(b, 3, 2) == []


def test_intermediate_stage_only_lacks_a_colors():
    mid = color_lift(biregular_high_girth(3, 2, 2), 3, 2, intermediate=True)
    assert (mid.n1, mid.n2) == (4, 6)
    problems = verify_colored(mid, 3, 2, check_girth=False)
    assert problems and all(p.startswith("property (3)") for p in problems)


@pytest.mark.parametrize("r, s, g", [
    (1, 1, 3), (1, 3, 4), (3, 1, 4), (2, 2, 5), (2, 3, 3), (3, 2, 4), (3, 3, 3), (3, 3, 4),
    (4, 3, 3), (3, 4, 4), (8, 2, 4),
])
def test_biregular_degrees_and_girth(r, s, g):
    b = biregular_high_girth(r, s, g)
    left, right = b.degrees()
    assert set(left) == {r} and set(right) == {s}
    assert b.girth() >= 2 * g
    assert b.n1 + b.n2 >= moore_lower_bound(r, s, g) or min(r, s) == 1


def test_biregular_simple():
    b = biregular_high_girth(3, 3, 3)
    assert len(set(b.edges)) == len(b.edges)


def test_refusal_past_moore_bound():
    with pytest.raises(Refusal) as info:
        biregular_high_girth(6, 6, 8, size_cap=1000)
    assert "construction failed at cap" in str(info.value)


def test_moore_bound_small():
    # (2, 2) with girth >= 2g is at least the 2g-cycle
    assert moore_lower_bound(2, 2, 5) == 10
    assert moore_lower_bound(3, 3, 3) == 14      # Heawood graph


@pytest.mark.parametrize("r, s, g", [(2, 3, 3), (3, 2, 4), (2, 2, 4), (3, 3, 3)])
def test_lift_girth_against_oracle(r, s, g):
    base = biregular_high_girth(r, s, g)
    lifted = color_lift(base, r, s)
    flat = lifted.bipartite().flat_edges()
    assert len(flat) <= 400
    got = girth_by_edge_deletion(lifted.n1 + lifted.n2, flat)
    assert got == lifted.girth()
    assert got >= base.girth()
    assert verify_colored(lifted, r, s) == []


def test_complete_scaffold_is_valid():
    for r, s in [(1, 1), (2, 1), (8, 2), (3, 3)]:
        b = complete_scaffold(r, s)
        assert verify_colored(b, r, s) == []
        assert (b.n1, b.n2) == (s, r)
    assert complete_scaffold(8, 2).girth() == 4
    assert complete_scaffold(1, 3).girth() == INFINITE


def test_construct_for_c4_tensor():
    b = construct_cbg(8, 2, 4)
    assert verify_colored(b, 8, 2) == []
    assert b.girth() >= 8
    assert b.n1 % 2 == 0 and b.n2 % 8 == 0 and b.n1 // 2 == b.n2 // 8


def test_verify_flags_each_property():
    good = complete_scaffold(2, 2)
    edges = list(good.edges)
    u, v, a, bc = edges[0]
    edges[0] = (u, v, a, 1 - bc)
    bad = ColoredBipartite(good.n1, good.n2, 2, 2, tuple(edges), 4)
    problems = verify_colored(bad, 2, 2)
    assert any(p.startswith("property (2)") for p in problems)
    assert any(p.startswith("property (5)") for p in problems)
    assert verify_colored(good, 3, 2)       # wrong degrees


def test_declared_girth_checked():
    b = complete_scaffold(2, 2)
    lying = ColoredBipartite(b.n1, b.n2, b.d1, b.d2, b.edges, 6)
    assert any("girth" in p for p in verify_colored(lying, 2, 2))


def test_cbg_round_trip():
    b = construct_cbg(3, 2, 2)
    assert parse_cbg(serialize_cbg(b)) == b
    star = complete_scaffold(3, 1)
    assert parse_cbg(serialize_cbg(star)) == star
    with pytest.raises(ParseError):
        parse_cbg("e 0 0 0 0\n")
    with pytest.raises(ParseError):
        parse_cbg("p cbg 1 1 1 1 inf\ne 0 3 0 0\n")


def test_lift_rejects_irregular_input():
    with pytest.raises(ValueError):
        color_lift(Bipartite(2, 1, ((0, 0),)), 1, 2)


def test_seed_changes_nothing_for_special_cases_and_is_deterministic():
    assert construct_cbg(3, 3, 4, seed=3) == construct_cbg(3, 3, 4, seed=3)
