"""Exact rational simplex for small LPs of the form ``max c.x  s.t.  A x <= b, x >= 0``.

Right-hand sides must be non-negative so the origin is a feasible starting
basis; that covers every LP the share oracles build. Pivoting follows Bland's
rule, which rules out cycling on degenerate vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class UnboundedLP(ArithmeticError):
    pass


@dataclass(frozen=True)
class LPSolution:
    x: tuple[Fraction, ...]
    objective: Fraction
    pivots: int


def maximize(
    c: Sequence, A: Sequence[Sequence], b: Sequence, max_pivots: int = 100_000
) -> LPSolution:
    n_vars = len(c)
    n_rows = len(A)
    if len(b) != n_rows:
        raise ValueError("A and b have different row counts")
    if any(len(row) != n_vars for row in A):
        raise ValueError("every row of A needs one coefficient per variable")
    if any(Fraction(v) < 0 for v in b):
        raise ValueError("right-hand sides must be non-negative")

    # tableau rows: [A | I | b]; objective row holds reduced costs -c
    width = n_vars + n_rows + 1
    rows = []
    for r in range(n_rows):
        row = [Fraction(v) for v in A[r]] + [Fraction(0)] * n_rows + [Fraction(b[r])]
        row[n_vars + r] = Fraction(1)
        rows.append(row)
    obj = [-Fraction(v) for v in c] + [Fraction(0)] * (n_rows + 1)
    basis = [n_vars + r for r in range(n_rows)]

    pivots = 0
    while True:
        entering = next((j for j in range(width - 1) if obj[j] < 0), None)
        if entering is None:
            break
        best_ratio = None
        leaving = None
        for r in range(n_rows):
            a = rows[r][entering]
            if a > 0:
                ratio = rows[r][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[leaving])
                ):
                    best_ratio, leaving = ratio, r
        if leaving is None:
            raise UnboundedLP(f"objective unbounded along variable {entering}")

        pivot_row = rows[leaving]
        p = pivot_row[entering]
        if p != 1:
            pivot_row = [v / p for v in pivot_row]
            rows[leaving] = pivot_row
        nz = [j for j, v in enumerate(pivot_row) if v != 0]
        for r in range(n_rows):
            if r == leaving:
                continue
            f = rows[r][entering]
            if f != 0:
                row = rows[r]
                for j in nz:
                    row[j] -= f * pivot_row[j]
        f = obj[entering]
        for j in nz:
            obj[j] -= f * pivot_row[j]
        basis[leaving] = entering

        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit reached")

    x = [Fraction(0)] * n_vars
    for r, var in enumerate(basis):
        if var < n_vars:
            x[var] = rows[r][-1]
    return LPSolution(tuple(x), obj[-1], pivots)
