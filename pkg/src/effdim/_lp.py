"""Exact linear programming over rationals.

A small two-phase primal simplex with Bland's rule, used to compute the
max-metric distance between affine hulls.  Everything is Fraction
arithmetic; Bland's rule guarantees termination, and the problems fed in
here are tiny (a handful of points in dimension at most a few dozen).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _pivot(T: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for r in range(len(T)):
        if r != row and T[r][col] != 0:
            f = T[r][col]
            T[r] = [a - f * b for a, b in zip(T[r], T[row])]
    basis[row] = col


def _run(T: list[list[Fraction]], basis: list[int], ncols: int) -> None:
    """Pivot until the objective row has no negative reduced cost.

    Only columns below ncols may enter.  Bland's rule: smallest entering
    index, and on ratio ties the smallest basis index leaves.
    """
    obj = len(T) - 1
    rhs = len(T[0]) - 1
    while True:
        col = next((j for j in range(ncols) if T[obj][j] < 0), None)
        if col is None:
            return
        best = None
        for r in range(obj):
            if T[r][col] > 0:
                ratio = T[r][rhs] / T[r][col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            raise ValueError("linear program is unbounded")
        _pivot(T, basis, best[1], col)


def solve_min(
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
) -> tuple[Fraction, list[Fraction]]:
    """Minimize c.x subject to A x = b, x >= 0; returns (value, x).

    Raises ValueError when infeasible or unbounded.
    """
    m, n = len(A), len(c)
    rows = [[Fraction(v) for v in row] for row in A]
    rhs = [Fraction(v) for v in b]
    for r in range(m):
        if rhs[r] < 0:
            rows[r] = [-v for v in rows[r]]
            rhs[r] = -rhs[r]
    # phase 1: artificial basis, minimize the artificial total
    T = [rows[r] + [Fraction(int(i == r)) for i in range(m)] + [rhs[r]] for r in range(m)]
    obj = [Fraction(0)] * (n + m + 1)
    for r in range(m):
        obj = [o - v for o, v in zip(obj, T[r])]
    for j in range(n, n + m):
        obj[j] = Fraction(0)
    T.append(obj)
    basis = list(range(n, n + m))
    _run(T, basis, n)
    if T[-1][-1] != 0:
        raise ValueError("linear program is infeasible")
    # drive leftover artificials out, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                continue
            _pivot(T, basis, r, col)
        keep.append(r)
    T = [T[r] for r in keep] + [T[-1]]
    basis = [basis[r] for r in keep]
    # phase 2: real objective, expressed through the current basis
    obj = [Fraction(v) for v in c] + [Fraction(0)] * (m + 1)
    for r in range(len(basis)):
        if obj[basis[r]] != 0:
            f = obj[basis[r]]
            obj = [o - f * v for o, v in zip(obj, T[r])]
    T[-1] = obj
    _run(T, basis, n)
    x = [Fraction(0)] * n
    for r, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[r][-1]
    value = sum(ci * xi for ci, xi in zip(c, x))
    return value, x


def affine_gap(
    pts_a: Sequence[Sequence[Fraction]],
    pts_b: Sequence[Sequence[Fraction]],
) -> Fraction:
    """Exact max-metric distance between the affine hulls of two point sets."""
    if not pts_a or not pts_b:
        raise ValueError("affine hulls need at least one point each")
    dim = len(pts_a[0])
    a0 = [Fraction(v) for v in pts_a[0]]
    b0 = [Fraction(v) for v in pts_b[0]]
    dirs_a = [[Fraction(p[d]) - a0[d] for d in range(dim)] for p in pts_a[1:]]
    dirs_b = [[Fraction(p[d]) - b0[d] for d in range(dim)] for p in pts_b[1:]]
    p, q = len(dirs_a), len(dirs_b)
    # variables: t+, t-, s+, s-, tau, u (dim), v (dim)
    n = 2 * p + 2 * q + 1 + 2 * dim
    tau = 2 * p + 2 * q
    A: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for d in range(dim):
        row = [Fraction(0)] * n
        for i, vec in enumerate(dirs_a):
            row[i] = vec[d]
            row[p + i] = -vec[d]
        for j, vec in enumerate(dirs_b):
            row[2 * p + j] = -vec[d]
            row[2 * p + q + j] = vec[d]
        row[tau] = Fraction(-1)
        row[tau + 1 + d] = Fraction(1)
        A.append(row)
        rhs.append(b0[d] - a0[d])
        neg = [-v for v in row]
        neg[tau] = Fraction(-1)
        neg[tau + 1 + d] = Fraction(0)
        neg[tau + 1 + dim + d] = Fraction(1)
        A.append(neg)
        rhs.append(a0[d] - b0[d])
    c = [Fraction(0)] * n
    c[tau] = Fraction(1)
    value, _ = solve_min(A, rhs, c)
    return value
