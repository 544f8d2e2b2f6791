"""Block-level optimizers over ``Q = {x : B x = b, 0 <= x <= u}``.

The LP and integer-hull optimizers are linear algorithms in their objective
(generators in the protocol of :mod:`blockip.oracle`): they receive the
objective as a list of forms and only ever ask for signs of forms.  Points are
returned as tuples of ``mpq``.  The fixed right-hand-side block IP used by the
rounding dynamic program is numeric.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .exactnum import ONE, ZERO, Affine, rat
from .simplex import LPInfeasible, maximize, phase_one

ENUM_CAP = 10**6


class BlockInfeasible(Exception):
    pass


class CapExceeded(Exception):
    pass


@dataclass(frozen=True)
class BlockProblem:
    """One block: variables ``x`` with ``B x = b``, ``0 <= x <= u``, linking rows ``A``, objective ``c``."""

    A: tuple
    B: tuple
    b: tuple
    u: tuple
    c: tuple

    @property
    def t(self) -> int:
        return len(self.u)

    @property
    def s(self) -> int:
        return len(self.B)

    @property
    def delta(self) -> int:
        return max((abs(v) for row in self.A + self.B for v in row), default=0)

    def is_feasible_point(self, x: Sequence) -> bool:
        if len(x) != self.t:
            return False
        if any(v < 0 or v > ub for v, ub in zip(x, self.u)):
            return False
        return all(sum((a * v for a, v in zip(row, x)), ZERO) == bi for row, bi in zip(self.B, self.b))

    def linking(self, x: Sequence) -> tuple:
        return tuple(sum((a * v for a, v in zip(row, x)), ZERO) for row in self.A)

    def value(self, x: Sequence):
        return sum((ci * v for ci, v in zip(self.c, x)), ZERO)


def is_integral(x: Sequence) -> bool:
    return all(rat(v).denominator == 1 for v in x)


def _objective_form(obj: Sequence, direction: Sequence):
    form = ZERO
    for o, d in zip(obj, direction):
        if d:
            form = o * d + form
    return form


# ---------------------------------------------------------------------------
# LP optimizers (linear in the objective)
# ---------------------------------------------------------------------------

def interval_solve_lp(objective: Sequence, A: Sequence, b: Sequence, u):
    """Scalar block ``max c x : A x = b, 0 <= x <= u`` (A is a column of s integers)."""
    col = [rat(a) for a in A]
    rhs = [rat(v) for v in b]
    u = rat(u)
    nz = next((k for k, a in enumerate(col) if a != 0), None)
    if nz is not None:
        x = rhs[nz] / col[nz]
        if any(a * x != bk for a, bk in zip(col, rhs)) or not (0 <= x <= u):
            raise BlockInfeasible()
        return (x,)
    if any(bk != 0 for bk in rhs):
        raise BlockInfeasible()
    (s,) = yield [objective[0]]
    return (u,) if s >= 0 else (ZERO,)


@lru_cache(maxsize=4096)
def _box_phase_one(B: tuple, b: tuple, u: tuple):
    t = len(u)
    rows = [list(row) + [0] * t for row in B]
    rhs = list(b)
    for k in range(t):
        rows.append([1 if j == k or j == t + k else 0 for j in range(2 * t)])
        rhs.append(u[k])
    try:
        return phase_one(rows, rhs, 2 * t)
    except LPInfeasible:
        return None


def simplex_lp(objective: Sequence, B: Sequence, b: Sequence, u: Sequence):
    """Optimal vertex of ``max c x : B x = b, 0 <= x <= u`` by Bland's simplex on the slack form."""
    B, b, u = _key(B), tuple(b), tuple(u)
    start = _box_phase_one(B, b, u)
    if start is None:
        raise BlockInfeasible()
    t = len(u)
    cost = list(objective) + [ZERO] * t
    final = yield from maximize(start, cost)
    return tuple(final.solution()[:t])


# ---------------------------------------------------------------------------
# integer points and the integer hull
# ---------------------------------------------------------------------------

def _key(M) -> tuple:
    return tuple(tuple(row) for row in M)


@lru_cache(maxsize=4096)
def _enumerate(B: tuple, b: tuple, u: tuple) -> tuple:
    out = []
    for x in itertools.product(*(range(int(ub) + 1) for ub in u)):
        if all(sum(a * v for a, v in zip(row, x)) == bi for row, bi in zip(B, b)):
            out.append(tuple(rat(v) for v in x))
    return tuple(out)


def enumerate_block_integers(B: Sequence, b: Sequence, u: Sequence, cap: int = ENUM_CAP) -> list:
    """All integer points of the block in lexicographic order."""
    size = 1
    for ub in u:
        size *= int(ub) + 1
    if size > cap:
        raise CapExceeded(f"block box has {size} points > cap {cap}")
    return list(_enumerate(_key(B), tuple(int(v) for v in b), tuple(int(v) for v in u)))


def in_convex_hull(p: Sequence, points: Sequence) -> bool:
    """Exact membership of ``p`` in conv(points)."""
    if not points:
        return False
    dim = len(p)
    rows = [[q[k] for q in points] for k in range(dim)] + [[1] * len(points)]
    try:
        phase_one(rows, list(p) + [1], len(points))
    except LPInfeasible:
        return False
    return True


def hull_vertices(points: Sequence) -> list:
    """Vertices of conv(points), in the input (lexicographic) order."""
    pts = list(points)
    if len(pts) <= 2:
        return pts
    return [p for k, p in enumerate(pts) if not in_convex_hull(p, pts[:k] + pts[k + 1:])]


@lru_cache(maxsize=4096)
def _hull_cached(B: tuple, b: tuple, u: tuple) -> tuple:
    return tuple(hull_vertices(_enumerate(B, b, u)))


def block_hull_vertices(B: Sequence, b: Sequence, u: Sequence, cap: int = ENUM_CAP) -> list:
    enumerate_block_integers(B, b, u, cap)
    return list(_hull_cached(_key(B), tuple(int(v) for v in b), tuple(int(v) for v in u)))


def tournament(objective: Sequence, candidates: Sequence):
    """Knockout maximisation over lexicographically sorted candidates; ties keep the larger point."""
    alive = list(candidates)
    if not alive:
        raise BlockInfeasible()
    while len(alive) > 1:
        pairs = [(alive[k], alive[k + 1]) for k in range(0, len(alive) - 1, 2)]
        forms = [_objective_form(objective, [x - y for x, y in zip(p, q)]) for p, q in pairs]
        signs = yield forms
        nxt = []
        for (p, q), s in zip(pairs, signs):
            nxt.append(p if s > 0 else q if s < 0 else max(p, q))
        if len(alive) % 2:
            nxt.append(alive[-1])
        alive = nxt
    return alive[0]


def block_hull_optimize(objective: Sequence, B: Sequence, b: Sequence, u: Sequence,
                        cap: int = ENUM_CAP):
    """Maximise over the integer hull of the block (returns a hull vertex)."""
    cands = block_hull_vertices(B, b, u, cap)
    if not cands:
        raise BlockInfeasible()
    return (yield from tournament(objective, cands))


# ---------------------------------------------------------------------------
# fixed right-hand side block IP
# ---------------------------------------------------------------------------

def _better(val, point, best):
    return best is None or val > best[0] or (val == best[0] and point > best[1])


def block_ip_fixed_rhs(c: Sequence, A: Sequence, d: Sequence, B: Sequence, b: Sequence,
                       u: Sequence, engine: str = "bruteforce", cap: int = ENUM_CAP,
                       window: int | None = None):
    """Best integer point with ``A x = d`` in the block, or None when there is none.

    Ties are broken towards the lexicographically larger point.  The
    ``prefix-dp`` engine scans variables left to right keeping partial sums of
    the stacked ``[A; B]`` columns; with ``window`` set, partial sums farther
    than ``window`` (sup norm) from the proportional point on the segment to
    ``[d; b]`` are dropped.
    """
    c = [rat(v) for v in c]
    d = tuple(rat(v) for v in d)
    if engine == "bruteforce":
        best = None
        for p in enumerate_block_integers(B, b, u, cap):
            if tuple(sum((a * v for a, v in zip(row, p)), ZERO) for row in A) != d:
                continue
            val = sum((ci * v for ci, v in zip(c, p)), ZERO)
            if _better(val, p, best):
                best = (val, p)
        return None if best is None else best[1]
    if engine != "prefix-dp":
        raise ValueError(f"unknown block engine {engine!r}")
    rows = [list(row) for row in A] + [list(row) for row in B]
    target = d + tuple(rat(v) for v in b)
    t = len(u)
    states = {tuple(ZERO for _ in rows): (ZERO, ())}
    work = 0
    for j in range(t):
        nxt: dict = {}
        col = [row[j] for row in rows]
        frac = rat(j + 1) / t
        for st, (val, prefix) in states.items():
            for v in range(int(u[j]) + 1):
                ns = tuple(s + a * v for s, a in zip(st, col))
                if window is not None and any(abs(x - frac * y) > window for x, y in zip(ns, target)):
                    continue
                nv = val + c[j] * v
                np_ = prefix + (rat(v),)
                cur = nxt.get(ns)
                if cur is None or nv > cur[0] or (nv == cur[0] and np_ > cur[1]):
                    nxt[ns] = (nv, np_)
                work += 1
                if work > cap:
                    raise CapExceeded("prefix-dp work exceeds cap")
        states = nxt
    hit = states.get(target)
    return None if hit is None else hit[1]


def block_ip_table(c: Sequence, A: Sequence, B: Sequence, b: Sequence, u: Sequence,
                   engine: str = "bruteforce", cap: int = ENUM_CAP) -> dict:
    """Map every reachable linking vector ``A x`` to the best integer point attaining it.

    Values are ``(objective, point)``; ties go to the lexicographically larger point.
    """
    c = [rat(v) for v in c]
    table: dict = {}
    if engine == "bruteforce":
        for p in enumerate_block_integers(B, b, u, cap):
            d = tuple(sum((a * v for a, v in zip(row, p)), ZERO) for row in A)
            val = sum((ci * v for ci, v in zip(c, p)), ZERO)
            cur = table.get(d)
            if cur is None or val > cur[0] or (val == cur[0] and p > cur[1]):
                table[d] = (val, p)
        return table
    if engine != "prefix-dp":
        raise ValueError(f"unknown block engine {engine!r}")
    r = len(A)
    rows = [list(row) for row in A] + [list(row) for row in B]
    states = {tuple(ZERO for _ in rows): (ZERO, ())}
    work = 0
    for j in range(len(u)):
        nxt: dict = {}
        col = [row[j] for row in rows]
        for st, (val, prefix) in states.items():
            for v in range(int(u[j]) + 1):
                ns = tuple(x + a * v for x, a in zip(st, col))
                nv = val + c[j] * v
                np_ = prefix + (rat(v),)
                cur = nxt.get(ns)
                if cur is None or nv > cur[0] or (nv == cur[0] and np_ > cur[1]):
                    nxt[ns] = (nv, np_)
                work += 1
                if work > cap:
                    raise CapExceeded("prefix-dp work exceeds cap")
        states = nxt
    target = tuple(rat(v) for v in b)
    for st, (val, p) in states.items():
        if st[r:] == target:
            table[st[:r]] = (val, p)
    return table


# ---------------------------------------------------------------------------
# optimizer factories used by the Lagrangian machinery
# ---------------------------------------------------------------------------

def lp_optimizer(block: BlockProblem):
    """Factory: objective forms -> generator optimizing over the block polytope."""
    if block.t == 1:
        col = [row[0] for row in block.B]
        return lambda obj: interval_solve_lp(obj, col, block.b, block.u[0])
    return lambda obj: simplex_lp(obj, block.B, block.b, block.u)


def hull_optimizer(block: BlockProblem, cap: int = ENUM_CAP):
    """Factory: objective forms -> generator optimizing over the block's integer hull."""
    return lambda obj: block_hull_optimize(obj, block.B, block.b, block.u, cap)


def empty_point_optimizer(obj):
    return ()
    yield  # pragma: no cover
