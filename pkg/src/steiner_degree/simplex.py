"""Dense two-phase simplex over exact rationals with Bland's rule.

Slow but exact and deterministic; used on small models to certify the
floating-point solver.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class LpInfeasible(RuntimeError):
    pass


class LpUnbounded(RuntimeError):
    pass


@dataclass
class ExactSolution:
    x: list[Fraction]
    objective: Fraction


def _pivot(T: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    pr = T[row]
    pv = pr[col]
    if pv != 1:
        T[row] = pr = [a / pv for a in pr]
    for i, r in enumerate(T):
        if i != row and r[col] != 0:
            f = r[col]
            T[i] = [a - f * b for a, b in zip(r, pr)]
    basis[row] = col


def _run(T, basis, ncols: int) -> None:
    """Minimise the objective stored in the last row (reduced costs)."""
    while True:
        col = next((j for j in range(ncols) if T[-1][j] < 0), None)
        if col is None:
            return
        best = None
        for i in range(len(T) - 1):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise LpUnbounded("objective unbounded")
        _pivot(T, basis, best[1], col)


def solve_standard(c: Sequence, A: Sequence[Sequence], b: Sequence) -> ExactSolution:
    """min c.x subject to A x = b, x >= 0 (exact arithmetic)."""
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    m, n = len(A), len(c)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase 1: artificials n..n+m-1
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    last = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n + m + 1):
            if j < n or j == n + m:
                last[j] -= T[i][j]
    T.append(last)
    _run(T, basis, n + m)
    if T[-1][-1] != 0:
        raise LpInfeasible("infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is not None:
                _pivot(T, basis, i, col)
    keep = [i for i in range(m) if basis[i] < n]
    T = [T[i][:n] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    # phase 2
    last = c[:] + [Fraction(0)]
    for i, bi in enumerate(basis):
        f = last[bi]
        if f != 0:
            last = [a - f * t for a, t in zip(last, T[i])]
    T.append(last)
    _run(T, basis, n)
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        x[bi] = T[i][-1]
    return ExactSolution(x, sum((ci * xi for ci, xi in zip(c, x)), Fraction(0)))


def solve_general(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), upper=None) -> ExactSolution:
    """min c.x s.t. A_ub x <= b_ub, A_eq x = b_eq, 0 <= x <= upper (None = no cap)."""
    n = len(c)
    upper = [None] * n if upper is None else list(upper)
    capped = [j for j in range(n) if upper[j] is not None]
    n_slack = len(A_ub) + len(capped)
    rows, rhs = [], []
    s = n
    total = n + n_slack
    for row, bi in zip(A_ub, b_ub):
        r = list(row) + [0] * n_slack
        r[s] = 1
        s += 1
        rows.append(r)
        rhs.append(bi)
    for j in capped:
        r = [0] * total
        r[j] = 1
        r[s] = 1
        s += 1
        rows.append(r)
        rhs.append(upper[j])
    for row, bi in zip(A_eq, b_eq):
        rows.append(list(row) + [0] * n_slack)
        rhs.append(bi)
    sol = solve_standard(list(c) + [0] * n_slack, rows, rhs)
    return ExactSolution(sol.x[:n], sol.objective)
