import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from gaptensor.cbg import complete_scaffold
from gaptensor.fixtures import butterfly, butterfly_xor, four_cycle, okamura_seymour, single_edge
from gaptensor.graph_core import ContractViolation, ParseError, Refusal
from gaptensor.mcf import FlowSolution, max_concurrent_flow
from gaptensor.netcode import (
    NCSolution, compose_nc, entropy_of_arc, entropy_of_table, orientation_from_nc, parse_nc,
    routing_as_nc, serialize_nc, verify_nc,
)
from gaptensor.tensor import graph_tensor, orient_by_coding
from oracles import entropy_float, random_instance


def test_single_bit_over_single_edge():
    g = single_edge()
    m = np.array([0, 1])
    n = NCSolution((2,), (2, 1, 2), (m, np.zeros(2, dtype=np.int64), m))
    report = verify_nc(g, n)
    assert report.valid and report.rate == 1


def test_butterfly_xor():
    report = verify_nc(butterfly(), butterfly_xor())
    assert report.valid and report.rate == 1
    assert report.violations == ()


def test_butterfly_causality_mutation():
    base = butterfly_xor()
    tables = list(base.coding_tables)
    tables[0] = tables[2]           # source 0's out-arc now carries the other source's bit
    report = verify_nc(butterfly(), NCSolution(base.message_sizes, base.arc_alphabets, tuple(tables)))
    assert not report.valid and not report.causal
    assert any(v.startswith("causality: arc 0") for v in report.violations)


def test_wrong_delivery_is_a_correctness_failure():
    base = butterfly_xor()
    tables = list(base.coding_tables)
    tables[-1], tables[-2] = tables[-2], tables[-1]
    report = verify_nc(butterfly(), NCSolution(base.message_sizes, base.arc_alphabets, tuple(tables)))
    assert not report.correct


def test_capacity_violation_detected():
    g = single_edge()
    m = np.arange(4)
    n = NCSolution((4,), (4, 1, 4), (m, np.zeros(4, dtype=np.int64), m))
    report = verify_nc(g, n)
    assert not report.capacity_ok and report.rate == 2
    ok = NCSolution((4,), (4, 1, 4), (m, np.zeros(4, dtype=np.int64), m), Fraction(2))
    assert verify_nc(g, ok).valid and verify_nc(g, ok).rate == 1


def test_misaligned_solution_rejected():
    with pytest.raises(ContractViolation):
        verify_nc(four_cycle(), butterfly_xor())


def test_message_cap_refuses():
    n = NCSolution((2, 2), butterfly_xor().arc_alphabets, butterfly_xor().coding_tables)
    with pytest.raises(Refusal):
        verify_nc(butterfly(), n, message_cap=3)


def test_table_must_be_total_and_in_alphabet():
    with pytest.raises(ContractViolation):
        NCSolution((2,), (2, 1, 2), (np.array([0]), np.zeros(2), np.array([0, 1])))
    with pytest.raises(ContractViolation):
        NCSolution((2,), (1, 1, 2), (np.array([0, 1]), np.zeros(2, dtype=np.int64), np.array([0, 1])))


def test_entropies():
    assert entropy_of_table(np.zeros(4, dtype=np.int64)) == 0
    assert entropy_of_table(np.array([0, 1])) == 1
    x, y = np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1])
    assert entropy_of_table(x ^ y) == 1
    assert entropy_of_table(np.array([0, 0, 1, 2])) == Fraction(3, 2)
    third = entropy_of_table(np.array([0, 1, 2]))
    assert isinstance(third, float) and abs(third - entropy_float([0, 1, 2])) < 1e-12


def test_entropy_bounded_by_alphabet():
    rng = random.Random(5)
    for _ in range(50):
        size, alpha = rng.randint(1, 40), rng.randint(1, 9)
        values = [rng.randrange(alpha) for _ in range(size)]
        h = entropy_of_table(np.array(values))
        assert float(h) <= np.log2(alpha) + 1e-12
        assert abs(float(h) - entropy_float(values)) < 1e-9


def test_routing_examples():
    g = single_edge()
    n = routing_as_nc(g, max_concurrent_flow(g), 1)
    assert verify_nc(g, n).valid and verify_nc(g, n).rate == 1
    c4 = four_cycle()
    n = routing_as_nc(c4, max_concurrent_flow(c4), 2)
    assert n.message_sizes == (4, 4) and n.scale_b == 2
    assert verify_nc(c4, n).valid and verify_nc(c4, n).rate == 1


def test_routing_zero_flow():
    g = single_edge()
    zero = FlowSolution(Fraction(0), ((Fraction(0), Fraction(0)),))
    n = routing_as_nc(g, zero, 3)
    report = verify_nc(g, n)
    assert n.message_sizes == (1,) and report.valid and report.rate == 0


def test_routing_always_verifies():
    rng = random.Random(9)
    for _ in range(25):
        g = random_instance(rng, n_max=7, m_max=9, k_max=3)
        f = max_concurrent_flow(g)
        for precision in (1, 2, 3):
            try:
                n = routing_as_nc(g, f, precision)
            except Refusal:
                continue
            report = verify_nc(g, n)
            assert report.valid, report.violations
            assert report.rate <= f.rate


def test_routing_rate_approaches_flow():
    g = okamura_seymour()
    f = max_concurrent_flow(g)
    rates = [verify_nc(g, routing_as_nc(g, f, p)).rate for p in (1, 2, 4)]
    assert rates == sorted(rates) and rates[-1] == Fraction(1, 2)


def test_nc_file_round_trip():
    g = butterfly()
    n = butterfly_xor()
    back = parse_nc(serialize_nc(g, n), g)
    assert back.message_sizes == n.message_sizes and back.arc_alphabets == n.arc_alphabets
    assert all(np.array_equal(a, b) for a, b in zip(back.coding_tables, n.coding_tables))
    with pytest.raises(ParseError):
        parse_nc(serialize_nc(g, n).replace("arc 0 2 2", "arc 2 0 2"), g)


def _compose(g, p1, p2, scaffold):
    f = max_concurrent_flow(g)
    n1, n2 = routing_as_nc(g, f, p1), routing_as_nc(g, f, p2)
    g1p = orient_by_coding(g, orientation_from_nc(g, n1))
    g2p = orient_by_coding(g, orientation_from_nc(g, n2))
    t = graph_tensor(g1p, g2p, scaffold)
    n = compose_nc(n1, n2, scaffold, t)
    return verify_nc(g, n1).rate, verify_nc(g, n2).rate, t, verify_nc(t[0], n)


def test_compose_single_edge():
    r1, r2, t, report = _compose(single_edge(), 1, 1, complete_scaffold(2, 1))
    assert report.valid and report.rate == r1 * r2 * t[1].q == 1


def test_compose_c4():
    r1, r2, t, report = _compose(four_cycle(), 4, 4, complete_scaffold(8, 2))
    assert report.valid and report.rate == r1 * r2 * t[1].q == 1


@pytest.mark.parametrize("p1, p2", list(itertools.product((1, 2), (2, 4))))
def test_compose_always_verifies(p1, p2):
    _, _, _, report = _compose(four_cycle(), p1, p2, complete_scaffold(8, 2))
    assert report.valid


def test_compose_alphabet_mismatch():
    g = four_cycle()
    f = max_concurrent_flow(g)
    n1, n2 = routing_as_nc(g, f, 4), routing_as_nc(g, f, 1)
    og = orient_by_coding(g, orientation_from_nc(g, n1))
    b = complete_scaffold(8, 2)
    with pytest.raises(ContractViolation) as info:
        compose_nc(n1, n2, b, graph_tensor(og, og, b))
    assert "alphabet mismatch" in str(info.value)


def test_arc_entropy_matches_orientation():
    g = four_cycle()
    n = routing_as_nc(g, max_concurrent_flow(g), 2)
    caps = orientation_from_nc(g, n)
    assert all(entropy_of_arc(n, 2 * e) / n.scale_b == caps[e][0] for e in range(g.m))
