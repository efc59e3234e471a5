"""Single-letter network coding solutions: verification, routing witnesses, composition.

Messages are independent and uniform.  A global message is an index into
``M = M(0) x ... x M(k-1)`` in mixed radix, commodity 0 most significant.
Arc ``2e`` is edge ``e`` forward, ``2e+1`` backward, and arc ``2m + i`` is the
sink edge of commodity ``i``.  Source edges are implicit: the source edge of
commodity ``i`` carries the projection onto ``M(i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph_core import (
    CommodityGraph, ContractViolation, OrientedGraph, ParseError, Refusal,
    _lines, _parse_fraction, _parse_int, format_fraction, to_fraction,
)
from .mcf import FlowSolution

DEFAULT_MESSAGE_CAP = 2 ** 16


@dataclass(frozen=True, eq=False)
class NCSolution:
    message_sizes: tuple[int, ...]
    arc_alphabets: tuple[int, ...]          # 2m graph arcs, then k sink edges
    coding_tables: tuple[np.ndarray, ...]   # one table of length |M| per arc
    scale_b: Fraction = Fraction(1)

    def __post_init__(self):
        if any(s < 1 for s in self.message_sizes):
            raise ContractViolation("message sizes must be at least 1")
        if any(a < 1 for a in self.arc_alphabets):
            raise ContractViolation("alphabet sizes must be at least 1")
        if len(self.coding_tables) != len(self.arc_alphabets):
            raise ContractViolation("one coding table per arc required")
        if self.scale_b <= 0:
            raise ContractViolation("scale b must be positive")
        size = self.space_size
        for a, (t, alpha) in enumerate(zip(self.coding_tables, self.arc_alphabets)):
            if t.shape != (size,):
                raise ContractViolation(f"arc {a}: table is not total over M")
            if size and (t.min() < 0 or t.max() >= alpha):
                raise ContractViolation(f"arc {a}: symbol outside alphabet of size {alpha}")

    @property
    def k(self) -> int:
        return len(self.message_sizes)

    @property
    def space_size(self) -> int:
        return math.prod(self.message_sizes)

    def message(self, i: int) -> np.ndarray:
        """The projection ``M -> M(i)`` as a table."""
        return _projection(self.message_sizes, i)


@dataclass(frozen=True)
class NCReport:
    valid: bool
    rate: object
    correct: bool
    causal: bool
    capacity_ok: bool
    respects_orientation: bool
    violations: tuple[str, ...]
    witness_order: tuple[int, ...]
    entropies: tuple


def _projection(sizes: Sequence[int], i: int) -> np.ndarray:
    stride = math.prod(sizes[i + 1:])
    return (np.arange(math.prod(sizes), dtype=np.int64) // stride) % sizes[i]


def _check_space(sizes, cap):
    size = math.prod(sizes)
    if size > cap:
        raise Refusal(f"message space of size {size} exceeds cap {cap}")


# ------------------------------------------------------------ entropy

def entropy_of_table(table: np.ndarray):
    """Entropy in bits of ``table(M)`` for uniform ``M``.

    Exact (a Fraction) when every symbol probability is a power of two,
    otherwise a float.
    """
    if table.size == 0:
        return Fraction(0)
    _, counts = np.unique(table, return_counts=True)
    total = int(table.size)
    exact = Fraction(0)
    for c in counts.tolist():
        ratio = Fraction(total, c)
        if ratio.denominator != 1 or ratio.numerator & (ratio.numerator - 1):
            p = counts / total
            return float(-(p * np.log2(p)).sum())
        exact += Fraction(c, total) * (ratio.numerator.bit_length() - 1)
    return exact


def entropy_of_arc(n: NCSolution, arc: int):
    return entropy_of_table(n.coding_tables[arc])


def _log2_size(s: int):
    return Fraction(s.bit_length() - 1) if s & (s - 1) == 0 else math.log2(s)


# ------------------------------------------------------------ verification

def _dense_key(tables: Sequence[np.ndarray], size: int) -> np.ndarray:
    key = np.zeros(size, dtype=np.int64)
    for t in tables:
        key = np.unique(key * (int(t.max()) + 1) + t, return_inverse=True)[1].reshape(-1)
    return key


def _is_function_of(table: np.ndarray, key: np.ndarray) -> bool:
    groups = np.unique(key).size
    pairs = np.unique(key * (int(table.max()) + 1) + table).size
    return pairs == groups


def verify_nc(g, n: NCSolution, message_cap: int = DEFAULT_MESSAGE_CAP,
              orientation: OrientedGraph | None = None) -> NCReport:
    """Check correctness, causality and the capacity condition of ``n`` on ``g``.

    ``g`` is a CommodityGraph or an OrientedGraph.  The rate is
    ``min_i H(S(i)) / (d_i b)``.  ``respects_orientation`` additionally
    compares each arc's entropy with its oriented capacity times ``b``.
    """
    if isinstance(g, OrientedGraph):
        orientation = orientation or g
        g = g.base
    if n.k != g.k or len(n.arc_alphabets) != 2 * g.m + g.k:
        raise ContractViolation(
            f"solution has {len(n.arc_alphabets)} arcs and {n.k} messages; "
            f"graph needs {2 * g.m + g.k} arcs and {g.k} messages")
    _check_space(n.message_sizes, message_cap)
    size = n.space_size
    violations = []
    messages = [n.message(i) for i in range(g.k)]

    correct = True
    for i in range(g.k):
        if not np.array_equal(n.coding_tables[2 * g.m + i], messages[i]):
            correct = False
            violations.append(f"correctness: sink of commodity {i} does not receive its message")

    # arcs grouped by tail; sink edges leave their commodity's sink vertex
    out_arcs = [[] for _ in range(g.vertex_count)]
    for e_idx, e in enumerate(g.edges):
        out_arcs[e.u].append(2 * e_idx)
        out_arcs[e.v].append(2 * e_idx + 1)
    for i, c in enumerate(g.commodities):
        out_arcs[c.sink].append(2 * g.m + i)
    in_tables = [[] for _ in range(g.vertex_count)]
    for i, c in enumerate(g.commodities):
        in_tables[c.source].append(messages[i])

    def head(a):
        if a >= 2 * g.m:
            return None
        e = g.edges[a // 2]
        return e.v if a % 2 == 0 else e.u

    admitted = [False] * len(n.arc_alphabets)
    order = []
    dirty = set(range(g.vertex_count))
    while dirty:
        v = min(dirty)
        dirty.discard(v)
        pending = [a for a in out_arcs[v] if not admitted[a]]
        if not pending:
            continue
        key = _dense_key(in_tables[v], size)
        for a in pending:
            if _is_function_of(n.coding_tables[a], key):
                admitted[a] = True
                order.append(a)
                h = head(a)
                if h is not None:
                    in_tables[h].append(n.coding_tables[a])
                    dirty.add(h)
    causal = all(admitted)
    for a, ok in enumerate(admitted):
        if not ok:
            violations.append(f"causality: arc {a} is not computable at its tail")

    entropies = tuple(entropy_of_arc(n, a) for a in range(len(n.arc_alphabets)))
    b = n.scale_b
    capacity_ok = True
    for e_idx, e in enumerate(g.edges):
        load = entropies[2 * e_idx] + entropies[2 * e_idx + 1]
        if _exceeds(load, e.capacity * b):
            capacity_ok = False
            violations.append(f"capacity: edge {e_idx} carries {load} bits, allows {e.capacity * b}")
    respects = True
    if orientation is not None:
        for a in range(2 * g.m):
            if _exceeds(entropies[a], orientation.arc(a)[2] * b):
                respects = False
    rate = min((_log2_size(s) / (c.demand * b) for s, c in zip(n.message_sizes, g.commodities)),
               default=Fraction(0))
    valid = correct and causal and capacity_ok
    return NCReport(valid, rate, correct, causal, capacity_ok, respects,
                    tuple(violations), tuple(order), entropies)


def _exceeds(load, bound) -> bool:
    if isinstance(load, Fraction):
        return load > bound
    return load > float(bound) + 1e-9


# ------------------------------------------------------------ routing witnesses

def _path_decomposition(g: CommodityGraph, flows: Sequence[Fraction], source: int, sink: int):
    """Split an arc flow into ``(arc list, amount)`` source-sink paths; cycles are dropped."""
    rest = list(flows)
    out_arcs = [[] for _ in range(g.vertex_count)]
    for e_idx, e in enumerate(g.edges):
        out_arcs[e.u].append((2 * e_idx, e.v))
        out_arcs[e.v].append((2 * e_idx + 1, e.u))
    paths = []
    while True:
        prev = {source: None}
        stack = [source]
        while stack and sink not in prev:
            x = stack.pop()
            for a, y in out_arcs[x]:
                if rest[a] > 0 and y not in prev:
                    prev[y] = (x, a)
                    stack.append(y)
        if sink not in prev:
            return paths
        arcs, x = [], sink
        while prev[x] is not None:
            x, a = prev[x]
            arcs.append(a)
        arcs.reverse()
        amount = min(rest[a] for a in arcs)
        for a in arcs:
            rest[a] -= amount
        paths.append((tuple(arcs), amount))


def routing_as_nc(g: CommodityGraph, f: FlowSolution, precision: int,
                  message_cap: int = DEFAULT_MESSAGE_CAP) -> NCSolution:
    """Forward one-bit fragments along a path decomposition of ``f``.

    A path with flow ``x`` gets ``floor(x * precision)`` fragments and
    ``b = precision``, so the rate is at least ``lambda - paths / (d * precision)``.
    """
    if precision < 1:
        raise ContractViolation("precision must be a positive integer")
    problems = f.check(g)
    if problems:
        raise ContractViolation("flow is not feasible: " + "; ".join(problems))
    bits_on_arc = [[] for _ in range(2 * g.m)]     # (commodity, bit index)
    bits = []
    for i, c in enumerate(g.commodities):
        slots = [[arcs, math.floor(amount * precision)]
                 for arcs, amount in _path_decomposition(g, f.arc_flows[i], c.source, c.sink)]
        # deal bits to paths round-robin, so low-order bits spread over all paths
        count = 0
        while any(s[1] for s in slots):
            for s in slots:
                if s[1]:
                    s[1] -= 1
                    for a in s[0]:
                        bits_on_arc[a].append((i, count))
                    count += 1
        bits.append(count)
    sizes = tuple(2 ** x for x in bits)
    _check_space(sizes, message_cap)
    messages = [_projection(sizes, i) for i in range(g.k)]
    alphabets, tables = [], []
    for carried in bits_on_arc:
        table = np.zeros(math.prod(sizes), dtype=np.int64)
        for i, bit in carried:
            table = (table << 1) | ((messages[i] >> bit) & 1)
        alphabets.append(2 ** len(carried))
        tables.append(table)
    alphabets += list(sizes)
    tables += messages
    return NCSolution(sizes, tuple(alphabets), tuple(tables), Fraction(precision))


def orientation_from_nc(g: CommodityGraph, n: NCSolution) -> list[tuple]:
    """Arc capacities ``H(arc) / b``, ready for ``orient_by_coding``; exact entropies only."""
    caps = []
    for e_idx in range(g.m):
        pair = []
        for a in (2 * e_idx, 2 * e_idx + 1):
            h = entropy_of_arc(n, a)
            if not isinstance(h, Fraction):
                raise ContractViolation(f"arc {a}: entropy is not exact")
            pair.append(h / n.scale_b)
        caps.append(tuple(pair))
    return caps


# ------------------------------------------------------------ composition

def compose_nc(n1: NCSolution, n2: NCSolution, b, t,
               message_cap: int = DEFAULT_MESSAGE_CAP) -> NCSolution:
    """Run ``n2`` in every inner copy, feeding it the symbols ``n1`` puts on the replaced arc.

    ``t = (graph, certificate)`` from ``graph_tensor``.  An outer symbol is
    used directly as the inner message index, so inner messages beyond the
    outer alphabet are padding that never occurs.  The scale ``b`` of the
    result is the smallest that meets every tensor edge capacity.
    """
    graph, cert = t
    if b is not cert.scaffold and b != cert.scaffold:
        raise ContractViolation("scaffold does not match the tensor")
    g1, g2 = cert.g1p.base, cert.g2p.base
    if n1.k != g1.k or len(n1.arc_alphabets) != 2 * g1.m + g1.k:
        raise ContractViolation("outer solution does not match the outer graph")
    if n2.k != g2.k or len(n2.arc_alphabets) != 2 * g2.m + g2.k:
        raise ContractViolation("inner solution does not match the inner graph")
    for i, j, p, k in b.edges:
        if n2.message_sizes[k] < n1.arc_alphabets[p]:
            raise ContractViolation(
                f"alphabet mismatch: inner message {k} has {n2.message_sizes[k]} values, "
                f"outer arc {p} uses {n1.arc_alphabets[p]}")

    sizes = tuple(n1.message_sizes[c] for _, c in cert.commodity_origin)
    _check_space(sizes, message_cap)
    size = math.prod(sizes)
    index = np.arange(size, dtype=np.int64)
    block = math.prod(n1.message_sizes)
    copies = b.n1

    def outer_message(i):
        return (index // block ** (copies - 1 - i)) % block

    symbols = {}
    for i, j, p, k in b.edges:
        symbols[(j, k)] = n1.coding_tables[p][outer_message(i)]
    strides = [math.prod(n2.message_sizes[k + 1:]) for k in range(g2.k)]
    inner_index = []
    for j in range(b.n2):
        mu = np.zeros(size, dtype=np.int64)
        for k in range(g2.k):
            mu += symbols[(j, k)] * strides[k]
        inner_index.append(mu)

    alphabets, tables = [], []
    kept = set()
    for j, a2, p in cert.edge_origin:
        kept.add((j, a2))
        alphabets += [n2.arc_alphabets[a2], 1]
        tables += [n2.coding_tables[a2][inner_index[j]], np.zeros(size, dtype=np.int64)]
    for j in range(b.n2):
        for a2 in range(2 * g2.m):
            if (j, a2) not in kept:
                if np.unique(n2.coding_tables[a2][inner_index[j]]).size > 1:
                    raise ContractViolation(
                        f"copy {j}, inner arc {a2}: zero-capacity product edge carries data")
    messages = [_projection(sizes, x) for x in range(len(sizes))]
    alphabets += list(sizes)
    tables += messages

    scale = Fraction(0)
    for e_idx, e in enumerate(graph.edges):
        h = entropy_of_table(tables[2 * e_idx])
        if not isinstance(h, Fraction):
            h = Fraction(h).limit_denominator(10 ** 12)
        scale = max(scale, h / e.capacity)
    return NCSolution(sizes, tuple(alphabets), tuple(tables), scale or Fraction(1))


# ------------------------------------------------------------ file format

def serialize_nc(g: CommodityGraph, n: NCSolution) -> str:
    out = [f"m {i} {s}" for i, s in enumerate(n.message_sizes)]
    for a in range(2 * g.m):
        e = g.edges[a // 2]
        u, v = (e.u, e.v) if a % 2 == 0 else (e.v, e.u)
        out.append(f"arc {u} {v} {n.arc_alphabets[a]}")
    for i in range(g.k):
        out.append(f"sink {i} {n.arc_alphabets[2 * g.m + i]}")
    out.append(f"b {format_fraction(n.scale_b)}")
    for a, table in enumerate(n.coding_tables):
        out.append(f"tab {a} " + " ".join(map(str, table.tolist())))
    return "\n".join(out) + "\n"


def parse_nc(text, g: CommodityGraph) -> NCSolution:
    """Parse an NC Solution File; its ``arc`` lines must list ``g``'s arcs in order."""
    sizes, arcs, sinks, tabs = {}, [], {}, {}
    scale = Fraction(1)
    for lineno, tok in _lines(text):
        head = tok[0]
        if head == "m" and len(tok) == 3:
            sizes[_parse_int(tok[1], lineno)] = _parse_int(tok[2], lineno)
        elif head == "arc" and len(tok) == 4:
            u, v, alpha = (_parse_int(x, lineno) for x in tok[1:])
            a = len(arcs)
            if a >= 2 * g.m:
                raise ParseError(lineno, "more arcs than the graph has")
            e = g.edges[a // 2]
            if (u, v) != ((e.u, e.v) if a % 2 == 0 else (e.v, e.u)):
                raise ParseError(lineno, f"arc {a} should be listed as {e.u if a % 2 == 0 else e.v}"
                                         f" {e.v if a % 2 == 0 else e.u}")
            arcs.append(alpha)
        elif head == "sink" and len(tok) == 3:
            sinks[_parse_int(tok[1], lineno)] = _parse_int(tok[2], lineno)
        elif head == "b" and len(tok) == 2:
            scale = _parse_fraction(tok[1], lineno)
        elif head == "tab" and len(tok) >= 2:
            tabs[_parse_int(tok[1], lineno)] = np.array(
                [_parse_int(x, lineno) for x in tok[2:]], dtype=np.int64)
        else:
            raise ParseError(lineno, "malformed line")
    if sorted(sizes) != list(range(g.k)) or sorted(sinks) != list(range(g.k)):
        raise ParseError(0, "one 'm' and one 'sink' line per commodity required")
    if len(arcs) != 2 * g.m:
        raise ParseError(0, f"expected {2 * g.m} arc lines, found {len(arcs)}")
    alphabets = arcs + [sinks[i] for i in range(g.k)]
    if sorted(tabs) != list(range(len(alphabets))):
        raise ParseError(0, "one 'tab' line per arc and sink required")
    return NCSolution(tuple(sizes[i] for i in range(g.k)), tuple(alphabets),
                      tuple(tabs[a] for a in range(len(alphabets))), to_fraction(scale))
