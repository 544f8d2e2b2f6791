"""Exact primal simplex (Bland's rule) for ``max cost.x : A x = b, x >= 0``.

Feasibility (phase one) only touches the constraint data and runs eagerly.
Optimisation (phase two) is a generator: it never reads the cost entries,
it yields the reduced costs as a batch of forms and receives their signs.
This makes the routine linear in the objective, so it can be driven by a
numeric answerer or by the parametric machinery in :mod:`blockip.lagrangian`.
"""
from __future__ import annotations

from dataclasses import dataclass

from .exactnum import ONE, ZERO, Affine, lex_sign, rat


class LPInfeasible(Exception):
    pass


class LPUnbounded(Exception):
    pass


@dataclass
class Tableau:
    rows: list
    rhs: list
    basis: list
    n: int

    def copy(self) -> "Tableau":
        return Tableau([list(r) for r in self.rows], list(self.rhs), list(self.basis), self.n)

    def solution(self) -> list:
        x = [ZERO] * self.n
        for i, j in enumerate(self.basis):
            x[j] = self.rhs[i]
        return x


def _pivot(rows, rhs, basis, i, j):
    prow = rows[i]
    p = prow[j]
    if p != 1:
        inv = ONE / p
        prow = [v * inv for v in prow]
        rows[i] = prow
        rhs[i] = rhs[i] * inv
    nz = [k for k, v in enumerate(prow) if v]
    for k, row in enumerate(rows):
        if k == i:
            continue
        f = row[j]
        if f:
            for c in nz:
                row[c] -= f * prow[c]
            rhs[k] -= f * rhs[i]
    basis[i] = j


def _ratio_row(rows, rhs, basis, j):
    best = None
    for i, row in enumerate(rows):
        a = row[j]
        if a > 0:
            key = (rhs[i] / a, basis[i])
            if best is None or key < best[0]:
                best = (key, i)
    return None if best is None else best[1]


def phase_one(A, b, n: int) -> Tableau:
    """Find a basic feasible solution of ``A x = b, x >= 0`` (rows may be redundant)."""
    m = len(A)
    rows, rhs = [], []
    for i in range(m):
        row = [rat(v) for v in A[i]]
        bi = rat(b[i])
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
        rows.append(row + [ONE if k == i else ZERO for k in range(m)])
        rhs.append(bi)
    basis = [n + i for i in range(m)]
    total = n + m
    # maximise -sum(artificials); reduced cost of column j is sum_i rows[i][j] for non-artificials
    while True:
        basic = set(basis)
        entering = None
        for j in range(total):
            if j in basic:
                continue
            red = sum((rows[i][j] for i in range(m) if basis[i] >= n), ZERO)
            if j >= n:
                red -= ONE
            if red > 0:
                entering = j
                break
        if entering is None:
            break
        i = _ratio_row(rows, rhs, basis, entering)
        if i is None:  # cannot happen for a bounded phase-one objective
            raise LPUnbounded("phase one")
        _pivot(rows, rhs, basis, i, entering)
    if any(rhs[i] != 0 for i in range(m) if basis[i] >= n):
        raise LPInfeasible()
    keep = []
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if rows[i][j] != 0), None)
            if j is None:
                continue  # redundant row
            _pivot(rows, rhs, basis, i, j)
        keep.append(i)
    rows = [rows[i][:n] for i in keep]
    rhs = [rhs[i] for i in keep]
    basis = [basis[i] for i in keep]
    return Tableau(rows, rhs, basis, n)


def maximize(start: Tableau, cost):
    """Phase two from a feasible tableau; a generator that queries reduced-cost signs.

    Yields lists of forms; expects the list of their signs back.  Returns the
    final :class:`Tableau` (its basic solution is an optimal vertex).
    """
    tab = start.copy()
    rows, rhs, basis, n = tab.rows, tab.rhs, tab.basis, tab.n
    cost = list(cost)
    while True:
        basic = set(basis)
        cand = [j for j in range(n) if j not in basic]
        if not cand:
            return tab
        reduced = []
        for j in cand:
            red = cost[j]
            for i, bj in enumerate(basis):
                a = rows[i][j]
                if a:
                    red = red - cost[bj] * a
            reduced.append(red)
        signs = yield reduced
        entering = next((j for j, s in zip(cand, signs) if s > 0), None)
        if entering is None:
            return tab
        i = _ratio_row(rows, rhs, basis, entering)
        if i is None:
            raise LPUnbounded()
        _pivot(rows, rhs, basis, i, entering)


def run_local(gen):
    """Drive a query generator whose forms are all variable-free."""
    try:
        batch = next(gen)
        while True:
            batch = gen.send([lex_sign(Affine.constant(q)) for q in batch])
    except StopIteration as stop:
        return stop.value


def solve_numeric(A, b, cost, n: int):
    """Exact LP optimum ``(value, x)`` for numeric data; raises on infeasible/unbounded."""
    tab = phase_one(A, b, n)
    final = run_local(maximize(tab, [Affine.constant(rat(c)) for c in cost]))
    x = final.solution()
    return sum((rat(c) * v for c, v in zip(cost, x)), ZERO), x
