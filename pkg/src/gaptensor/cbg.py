"""High-girth biregular bipartite graphs and their colored lifts.

A colored bipartite scaffold tells the tensor which copy of the outer graph
has which arc replaced by which commodity of which copy of the inner graph.
Left vertices have degree ``r`` and carry ``a`` colors in ``range(r)``; right
vertices have degree ``s`` and carry ``b`` colors in ``range(s)``.  Colors
are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .graph_core import (
    INFINITE, ContractViolation, ParseError, Refusal, _lines, _parse_int, girth,
)


@dataclass(frozen=True)
class Bipartite:
    n1: int
    n2: int
    edges: tuple[tuple[int, int], ...]      # (left, right)

    def flat_edges(self):
        return [(u, self.n1 + v) for u, v in self.edges]

    def girth(self):
        return girth(self.n1 + self.n2, self.flat_edges())

    def degrees(self):
        left = [0] * self.n1
        right = [0] * self.n2
        for u, v in self.edges:
            left[u] += 1
            right[v] += 1
        return left, right


@dataclass(frozen=True)
class ColoredBipartite:
    n1: int
    n2: int
    d1: int
    d2: int
    edges: tuple[tuple[int, int, int, int], ...]     # (left, right, a, b)
    declared_girth: object

    def bipartite(self) -> Bipartite:
        return Bipartite(self.n1, self.n2, tuple((u, v) for u, v, _, _ in self.edges))

    def girth(self):
        return self.bipartite().girth()


def moore_lower_bound(r: int, s: int, g: int) -> int:
    """Vertices an ``(r, s)``-biregular graph of girth ``>= 2g`` must have.

    Within distance ``g - 1`` of any edge the graph is a tree.
    """
    total = 2
    for first, second in ((r, s), (s, r)):
        layer = 1
        for depth in range(1, g):
            layer *= (first if depth % 2 == 1 else second) - 1
            total += layer
            if total > 10 ** 18:
                return total
    return total


# ------------------------------------------------------------ constructions

def _complete(n_left, n_right):
    return tuple((u, v) for u in range(n_left) for v in range(n_right))


def _subdivision(n, graph_edges, edges_on_left):
    """Incidence graph of a simple graph: one side its vertices, the other its edges."""
    out = []
    for idx, (x, y) in enumerate(graph_edges):
        if edges_on_left:
            out += [(idx, x), (idx, y)]
        else:
            out += [(x, idx), (y, idx)]
    if edges_on_left:
        return Bipartite(len(graph_edges), n, tuple(out))
    return Bipartite(n, len(graph_edges), tuple(sorted(out)))


def _regular_small_girth(d, g):
    """A ``d``-regular simple graph of girth at least ``g`` for ``g <= 4``."""
    if g <= 3:
        n = d + 1
        return n, list(itertools.combinations(range(n), 2))
    return 2 * d, [(x, d + y) for x in range(d) for y in range(d)]


def _special_case(r, s, g):
    if r == 1:
        return Bipartite(s, 1, tuple((u, 0) for u in range(s)))
    if s == 1:
        return Bipartite(1, r, tuple((0, v) for v in range(r)))
    if g <= 2:
        return Bipartite(s, r, _complete(s, r))
    if r == 2 and s == 2:
        edges = []
        for i in range(g):
            edges += [(i, i), (i, (i + 1) % g)]
        return Bipartite(g, g, tuple(edges))
    if s == 2 and g <= 4:
        n, ge = _regular_small_girth(r, g)
        return _subdivision(n, ge, edges_on_left=False)
    if r == 2 and g <= 4:
        n, ge = _regular_small_girth(s, g)
        return _subdivision(n, ge, edges_on_left=True)
    return None


def _greedy(n1, n2, r, s, g, order, budget, max_branch=3):
    """Depth-first edge insertion keeping every cycle at length >= 2g."""
    adj = [[] for _ in range(n1 + n2)]
    left_deg = [0] * n1
    right_deg = [0] * n2
    limit = 2 * g - 2
    edges: list[tuple[int, int]] = []
    total = n1 * r

    rank = {v: i for i, v in enumerate(order)}

    def candidates(u):
        # full BFS: farther right vertices are tried first (progressive edge growth)
        dist = {u: 0}
        frontier = [u]
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y not in dist:
                        dist[y] = depth
                        nxt.append(y)
            frontier = nxt
        out = []
        for v in order:
            d = dist.get(n1 + v)
            if right_deg[v] >= s or (d is not None and d <= limit):
                continue
            out.append(v)
        # unreachable first, then farthest, then least used
        out.sort(key=lambda v: (-dist.get(n1 + v, n1 + n2 + 1), right_deg[v], rank[v]))
        return out[:max_branch]

    stack = []
    steps = 0
    while len(edges) < total:
        u = next(x for x in range(n1) if left_deg[x] < r)
        stack.append((u, candidates(u), 0))
        while True:
            steps += 1
            if steps > budget or not stack:
                return None
            u, cands, pos = stack[-1]
            if pos < len(cands):
                v = cands[pos]
                stack[-1] = (u, cands, pos + 1)
                edges.append((u, v))
                adj[u].append(n1 + v)
                adj[n1 + v].append(u)
                left_deg[u] += 1
                right_deg[v] += 1
                break
            stack.pop()
            if not edges:
                return None
            pu, pv = edges.pop()
            adj[pu].pop()
            adj[n1 + pv].pop()
            left_deg[pu] -= 1
            right_deg[pv] -= 1
    return Bipartite(n1, n2, tuple(sorted(edges)))


def biregular_high_girth(r: int, s: int, g: int, size_cap: int = 5000,
                         seed: int = 0, budget: int | None = None) -> Bipartite:
    """An ``(r, s)``-biregular bipartite graph with girth at least ``2g``.

    Left vertices have degree ``r``, right vertices degree ``s``, and the
    total vertex count stays within ``size_cap``.  Small cases use explicit
    constructions; otherwise a deterministic depth-first search with a
    backtracking budget is tried at growing sizes.

    Raises:
        Refusal: if nothing is found within ``size_cap`` vertices.
    """
    if r < 1 or s < 1:
        raise ContractViolation("degrees must be positive")
    lower = moore_lower_bound(r, s, g) if r > 1 and s > 1 else 0
    if lower > size_cap:
        raise Refusal(f"construction failed at cap: (r={r}, s={s}, g={g}) needs at least "
                      f"{lower} vertices, cap is {size_cap}")
    b = _special_case(r, s, g)
    if b is not None:
        if b.n1 + b.n2 > size_cap:
            raise Refusal(f"construction failed at cap: (r={r}, s={s}, g={g}) needs "
                          f"{b.n1 + b.n2} vertices, cap is {size_cap}")
        return b

    unit = math.gcd(r, s)
    step1, step2 = s // unit, r // unit
    t = max(1, math.ceil(lower / (step1 + step2)))
    while (step1 + step2) * t <= size_cap:
        n1, n2 = step1 * t, step2 * t
        steps = budget if budget is not None else 4 * n1 * r + 500
        for attempt in range(3):
            order = list(range(n2))
            if attempt or seed:
                random.Random(seed * 1009 + attempt).shuffle(order)
            b = _greedy(n1, n2, r, s, g, order, steps)
            if b is not None:
                return b
        t = max(t + 1, int(t * 1.4))
    raise Refusal(f"construction failed at cap: no (r={r}, s={s}) graph of girth >= {2 * g} "
                  f"within {size_cap} vertices")


# ------------------------------------------------------------ coloring

def _cyclic_lift(n_left, n_right, edges, copies):
    """One lifting stage.

    Takes ``copies`` copies of the graph.  The edges at each right vertex are
    numbered ``i = 0..copies-1`` in input order; the copy ``j`` of a right
    vertex is joined through its ``i``-th edge to the left endpoint in copy
    ``(j + i) mod copies``, and that copy index becomes the edge's color.
    """
    at_right = [[] for _ in range(n_right)]
    for idx, (_, v, _) in enumerate(edges):
        at_right[v].append(idx)
    if any(len(x) != copies for x in at_right):
        raise ContractViolation("input is not biregular")
    out = []
    for j in range(copies):
        for v in range(n_right):
            for i, idx in enumerate(at_right[v]):
                u, _, payload = edges[idx]
                c = (j + i) % copies
                out.append((c * n_left + u, j * n_right + v, payload, c))
    return out


def color_lift(b: Bipartite, r: int, s: int, intermediate: bool = False) -> ColoredBipartite:
    """Two-stage colored lift of an ``(r, s)``-biregular graph.

    Stage one takes ``s`` copies and assigns ``b`` colors; stage two takes
    ``r`` copies of the result (with the sides' roles swapped) and assigns
    ``a`` colors.  With ``intermediate=True`` only stage one is returned
    (its ``a`` colors are all 0).
    """
    left, right = b.degrees()
    if any(x != r for x in left) or any(x != s for x in right):
        raise ContractViolation(f"input is not ({r}, {s})-biregular")
    base_girth = b.girth()

    stage1 = _cyclic_lift(b.n1, b.n2, [(u, v, None) for u, v in b.edges], s)
    h1, h2 = s * b.n1, s * b.n2
    if intermediate:
        return ColoredBipartite(h1, h2, r, s, tuple((u, v, 0, c) for u, v, _, c in stage1),
                                base_girth)
    swapped = [(v, u, bc) for u, v, _, bc in stage1]
    stage2 = _cyclic_lift(h2, h1, swapped, r)
    edges = tuple((u, v, a, bc) for v, u, bc, a in stage2)
    return ColoredBipartite(r * h1, r * h2, r, s, edges, base_girth)


def complete_scaffold(r: int, s: int) -> ColoredBipartite:
    """The smallest valid scaffold: ``K_{s,r}`` with edge ``(b, a)`` colored ``(a, b)``.

    Its girth is only 4, so it is useful for cheap tensors and for showing why
    the dual needs high girth, not for certified duals.
    """
    edges = tuple((bc, a, a, bc) for bc in range(s) for a in range(r))
    g = INFINITE if r == 1 or s == 1 else 4
    return ColoredBipartite(s, r, r, s, edges, g)


def verify_colored(b: ColoredBipartite, m1: int, k2: int, check_girth: bool = True) -> list[str]:
    """Check the five scaffold properties for degrees ``m1`` (left) and ``k2`` (right)."""
    problems = []
    if b.n1 * b.d1 != b.n2 * b.d2:
        problems.append("property (1): n1*d1 != n2*d2")
    if (b.d1, b.d2) != (m1, k2):
        problems.append(f"property (1): degrees ({b.d1}, {b.d2}) != ({m1}, {k2})")
    left_a = [set() for _ in range(b.n1)]
    left_b = [set() for _ in range(b.n1)]
    right_a = [set() for _ in range(b.n2)]
    right_b = [set() for _ in range(b.n2)]
    left_deg = [0] * b.n1
    right_deg = [0] * b.n2
    for u, v, a, bc in b.edges:
        if not (0 <= u < b.n1 and 0 <= v < b.n2):
            problems.append("property (1): edge endpoint out of range")
            return problems
        if not (0 <= a < m1 and 0 <= bc < k2):
            problems.append(f"property (1): color ({a}, {bc}) outside [{m1}]x[{k2}]")
        left_deg[u] += 1
        right_deg[v] += 1
        left_a[u].add(a)
        left_b[u].add(bc)
        right_a[v].add(a)
        right_b[v].add(bc)
    if any(x != m1 for x in left_deg) or any(x != k2 for x in right_deg):
        problems.append("property (1): not biregular with the required degrees")
    if check_girth:
        actual = b.girth()
        if actual < b.declared_girth:
            problems.append(f"property (1): girth {actual} below declared {b.declared_girth}")
    full_b, full_a = set(range(k2)), set(range(m1))
    if any(x != full_b for x in right_b):
        problems.append("property (2): a right vertex misses some b color")
    if any(x != full_a for x in left_a):
        problems.append("property (3): a left vertex misses some a color")
    if any(len(x) != 1 for x in right_a):
        problems.append("property (4): a right vertex sees more than one a color")
    if any(len(x) != 1 for x in left_b):
        problems.append("property (5): a left vertex sees more than one b color")
    return problems


def construct_cbg(r: int, s: int, g: int, size_cap: int = 5000, seed: int = 0) -> ColoredBipartite:
    """Colored scaffold with degrees ``(r, s)`` and girth at least ``2g``."""
    base = biregular_high_girth(r, s, g, size_cap, seed)
    return color_lift(base, r, s)


# ------------------------------------------------------------ file format

def _girth_token(x):
    return "inf" if x == INFINITE else str(x)


def serialize_cbg(b: ColoredBipartite) -> str:
    out = [f"p cbg {b.n1} {b.n2} {b.d1} {b.d2} {_girth_token(b.declared_girth)}"]
    out += [f"e {u} {v} {a} {bc}" for u, v, a, bc in b.edges]
    return "\n".join(out) + "\n"


def parse_cbg(text) -> ColoredBipartite:
    header = None
    edges = []
    for lineno, tok in _lines(text):
        if tok[0] == "p" and len(tok) == 7 and tok[1] == "cbg" and header is None:
            n1, n2, d1, d2 = (_parse_int(t, lineno) for t in tok[2:6])
            gt = INFINITE if tok[6] == "inf" else _parse_int(tok[6], lineno)
            header = (n1, n2, d1, d2, gt)
        elif tok[0] == "e" and len(tok) == 5 and header is not None:
            u, v, a, bc = (_parse_int(t, lineno) for t in tok[1:])
            if not (0 <= u < header[0] and 0 <= v < header[1]):
                raise ParseError(lineno, "vertex out of range")
            edges.append((u, v, a, bc))
        else:
            raise ParseError(lineno, "malformed line")
    if header is None:
        raise ParseError(0, "missing 'p cbg' header")
    return ColoredBipartite(*header[:4], tuple(edges), header[4])
