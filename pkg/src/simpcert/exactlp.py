"""Exact feasibility of {A x = b, x >= 0} over the rationals.

Phase-one simplex on a dense Fraction tableau with Bland's rule, so the
result is deterministic and free of rounding. Infeasibility comes with a
Farkas vector y such that y.A >= 0 componentwise and y.b < 0, which anyone
can re-check with integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence


@dataclass
class LPResult:
    feasible: bool
    x: Optional[list] = None
    farkas: Optional[list] = None


def _as_fractions(A, b):
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    if any(len(row) != len(A[0]) for row in A):
        raise ValueError("ragged constraint matrix")
    if len(A) != len(b):
        raise ValueError("row count of A and length of b differ")
    return A, b


def check_solution(A, b, x) -> bool:
    A, b = _as_fractions(A, b)
    if any(v < 0 for v in x):
        return False
    return all(sum(a * v for a, v in zip(row, x)) == bi for row, bi in zip(A, b))


def check_farkas(A, b, y) -> bool:
    A, b = _as_fractions(A, b)
    y = [Fraction(v) for v in y]
    n = len(A[0]) if A else 0
    for j in range(n):
        if sum(y[i] * A[i][j] for i in range(len(A))) < 0:
            return False
    return sum(yi * bi for yi, bi in zip(y, b)) < 0


def _solve_square(M, rhs):
    """Solve M z = rhs exactly (M square, nonsingular)."""
    n = len(M)
    aug = [list(M[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * c for a, c in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def feasibility(A: Sequence[Sequence], b: Sequence) -> LPResult:
    A, b = _as_fractions(A, b)
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return LPResult(True, x=[Fraction(0)] * n)
    # rows negated so that b >= 0; remember signs for the certificate
    sign = [(-1 if bi < 0 else 1) for bi in b]
    rows = [[s * v for v in row] + [Fraction(int(i == r)) for i in range(m)] + [s * bi]
            for r, (row, bi, s) in enumerate(zip(A, b, sign))]
    total = n + m
    basis = [n + r for r in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    # reduced-cost row for minimising the artificial sum
    red = [cost[j] - sum(rows[r][j] for r in range(m)) for j in range(total)]

    while True:
        enter = next((j for j in range(total) if red[j] < 0), None)
        if enter is None:
            break
        best = None
        for r in range(m):
            a = rows[r][enter]
            if a > 0:
                ratio = rows[r][-1] / a
                key = (ratio, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            raise AssertionError("phase-one objective is bounded below; unbounded ray impossible")
        r = best[1]
        p = rows[r][enter]
        rows[r] = [v / p for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [a - f * c for a, c in zip(rows[i], rows[r])]
        f = red[enter]
        red = [a - f * c for a, c in zip(red, rows[r][:total])]
        basis[r] = enter

    value = sum(cost[basis[r]] * rows[r][-1] for r in range(m))
    if value == 0:
        x = [Fraction(0)] * n
        for r in range(m):
            if basis[r] < n:
                x[basis[r]] = rows[r][-1]
        return LPResult(True, x=x)
    # multipliers y with y.B = c_B for the signed system; z = -y is a Farkas vector
    signed = [[s * v for v in row] + [Fraction(int(i == r)) for i in range(m)] for r, (row, s) in enumerate(zip(A, sign))]
    Bt = [[signed[i][basis[j]] for i in range(m)] for j in range(m)]
    y = _solve_square(Bt, [cost[j] for j in basis])
    farkas = [-yi * s for yi, s in zip(y, sign)]
    if not check_farkas(A, b, farkas):
        raise AssertionError("internal error: Farkas certificate failed re-check")
    return LPResult(False, farkas=farkas)
