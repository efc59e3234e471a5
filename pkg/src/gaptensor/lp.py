"""Exact simplex over the rationals.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``, so the slack basis
is feasible and no phase one is needed.  Pivots use the largest reduced cost;
after a run of degenerate pivots the rule falls back to Bland's, which cannot
cycle.  Columns may be added after a solve and the tableau re-optimised from
the current basis (used by column generation).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

DEGENERATE_RUN = 20


class Unbounded(ArithmeticError):
    pass


@dataclass
class LPResult:
    objective: Fraction
    x: list[Fraction]
    y: list[Fraction]      # one dual value per row, y >= 0, A^T y >= c
    pivots: int


class Tableau:
    """Sparse full tableau.  Structural columns are 0, 1, ...; slack ``i`` is ``-(i + 1)``."""

    def __init__(self, b: Sequence):
        self.rhs = [Fraction(x) for x in b]
        if any(x < 0 for x in self.rhs):
            raise ValueError("right-hand side must be nonnegative")
        m = len(self.rhs)
        self.rows: list[dict[int, Fraction]] = [{-(i + 1): Fraction(1)} for i in range(m)]
        self.basis = [-(i + 1) for i in range(m)]
        # reduced costs c_j - z_j for maximisation
        self.cost: dict[int, Fraction] = {}
        self.objective = Fraction(0)
        self.columns = 0
        self.pivots = 0

    def duals(self) -> list[Fraction]:
        zero = Fraction(0)
        return [-self.cost.get(-(i + 1), zero) for i in range(len(self.rows))]

    def add_column(self, c, entries: dict[int, Fraction]) -> int:
        """Append a column with objective ``c`` and constraint entries ``{row: a}``."""
        j = self.columns
        self.columns += 1
        zero = Fraction(0)
        for row in self.rows:
            v = sum((row.get(-(r + 1), zero) * a for r, a in entries.items()), zero)
            if v:
                row[j] = v
        y = self.duals()
        reduced = Fraction(c) - sum((y[r] * a for r, a in entries.items()), zero)
        if reduced:
            self.cost[j] = reduced
        return j

    def _entering(self, bland: bool):
        positive = [(j, cj) for j, cj in self.cost.items() if cj > 0]
        if not positive:
            return None
        if bland:
            return min(j for j, _ in positive)
        return max(positive, key=lambda t: (t[1], -t[0]))[0]

    def solve(self) -> None:
        zero = Fraction(0)
        rows, rhs, basis, cost = self.rows, self.rhs, self.basis, self.cost
        degenerate = 0
        while True:
            entering = self._entering(degenerate >= DEGENERATE_RUN)
            if entering is None:
                return
            leave = None
            best_ratio = None
            for i, row in enumerate(rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    ratio = rhs[i] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and basis[i] < basis[leave])):
                        best_ratio, leave = ratio, i
            if leave is None:
                raise Unbounded(f"column {entering} is unbounded")
            degenerate = degenerate + 1 if best_ratio == 0 else 0

            prow = rows[leave]
            piv = prow[entering]
            if piv != 1:
                inv = 1 / piv
                for j in prow:
                    prow[j] *= inv
                rhs[leave] *= inv
            for i, row in enumerate(rows):
                if i == leave:
                    continue
                f = row.get(entering)
                if f is None:
                    continue
                for j, a in prow.items():
                    v = row.get(j, zero) - f * a
                    if v:
                        row[j] = v
                    else:
                        row.pop(j, None)
                rhs[i] -= f * rhs[leave]
            f = cost[entering]
            for j, a in prow.items():
                v = cost.get(j, zero) - f * a
                if v:
                    cost[j] = v
                else:
                    cost.pop(j, None)
            self.objective += f * rhs[leave]
            basis[leave] = entering
            self.pivots += 1

    def result(self) -> LPResult:
        x = [Fraction(0)] * self.columns
        for i, j in enumerate(self.basis):
            if j >= 0:
                x[j] = self.rhs[i]
        return LPResult(self.objective, x, self.duals(), self.pivots)


def solve_max(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    t = Tableau(b)
    for j, cj in enumerate(c):
        t.add_column(cj, {i: Fraction(A[i][j]) for i in range(len(A)) if A[i][j] != 0})
    t.solve()
    return t.result()
