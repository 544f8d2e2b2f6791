"""Exhaustive reference solvers used to check the parametric machinery.

Nothing here is clever: the integer optimum comes from a dynamic program over
blocks keyed by the partial linking sum (equivalent to scanning the product
of per-block integer points), the strengthened relaxation is an explicit LP
over convex weights on each block's hull vertices, and the standard
relaxation is the monolithic LP in slack form.  All of it is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

from .blocks import ENUM_CAP, CapExceeded, block_hull_vertices, enumerate_block_integers
from .exactnum import ZERO, rat
from .simplex import LPInfeasible, solve_numeric


@dataclass
class BruteResult:
    ip: object
    ip_witness: list | None
    lp_standard: object
    lp_standard_witness: list | None
    lp_strengthened: object
    lp_strengthened_witness: list | None


def _block_points(inst, cap):
    return [enumerate_block_integers(blk.B, blk.b, blk.u, cap) for blk in inst.blocks]


def _sum(a, b):
    return tuple(x + y for x, y in zip(a, b))


def best_integer(inst, cap: int = ENUM_CAP, penalty=None, combine=None):
    """Integer optimum by a left-to-right DP over blocks.

    Without ``penalty`` ties go to the lexicographically largest solution.
    With ``penalty(i, point)`` (a nonnegative rational per block) the DP
    returns, among optimal solutions, one minimising the penalties combined
    with ``combine`` (``sum`` by default, e.g. ``max`` for a sup norm).
    Returns ``(value, solution)`` or ``(None, None)``.
    """
    pts = _block_points(inst, cap)
    combine = combine or (lambda a, b: a + b)
    states = {tuple(ZERO for _ in range(inst.r)): (ZERO, ZERO, ())}
    work = 0
    for i, blk in enumerate(inst.blocks):
        nxt = {}
        contrib = [(blk.linking(p), blk.value(p), p) for p in pts[i]]
        for key, (val, pen, sol) in states.items():
            for lk, pv, p in contrib:
                nk = _sum(key, lk)
                cand_pen = combine(pen, penalty(i, p)) if penalty else ZERO
                cand = (val + pv, -cand_pen, sol + (p,))
                cur = nxt.get(nk)
                if cur is None or (cand[0], cand[1], cand[2]) > (cur[0], -cur[1], cur[2]):
                    nxt[nk] = (cand[0], cand_pen, cand[2])
                work += 1
                if work > cap * 10:
                    raise CapExceeded("integer enumeration exceeds cap")
        states = nxt
    hit = states.get(tuple(rat(v) for v in inst.b0))
    if hit is None:
        return None, None
    return hit[0], list(hit[2])


def nearest_optimal(inst, x, norm: str = "l1", cap: int = ENUM_CAP):
    """An optimal integer solution closest to ``x`` and its distance (``l1`` or ``linf``)."""
    x = [tuple(rat(v) for v in xi) for xi in x]
    if norm == "l1":
        pen = lambda i, p: sum((abs(a - b) for a, b in zip(p, x[i])), ZERO)
        value, z = best_integer(inst, cap, pen)
        dist = None if z is None else sum((pen(i, zi) for i, zi in enumerate(z)), ZERO)
    elif norm == "linf":
        pen = lambda i, p: max((abs(a - b) for a, b in zip(p, x[i])), default=ZERO)
        value, z = best_integer(inst, cap, pen, combine=max)
        dist = None if z is None else max((pen(i, zi) for i, zi in enumerate(z)), default=ZERO)
    else:
        raise ValueError(f"unknown norm {norm!r}")
    return value, z, dist


def ip_product_scan(inst, cap: int = ENUM_CAP):
    """Integer optimum by scanning the full product of block point sets (small cases only)."""
    import itertools

    pts = _block_points(inst, cap)
    size = 1
    for p in pts:
        size *= len(p)
    if size > cap:
        raise CapExceeded("product too large")
    b0 = tuple(rat(v) for v in inst.b0)
    best = None
    for combo in itertools.product(*pts):
        if inst.linking(combo) != b0:
            continue
        val = inst.value(combo)
        if best is None or val > best[0]:
            best = (val, list(combo))
    return (None, None) if best is None else best


def lp_standard(inst):
    """Monolithic LP: variables per block plus box slacks."""
    cols = []
    offset = 0
    for blk in inst.blocks:
        cols.append(offset)
        offset += blk.t
    nx = offset
    n = 2 * nx
    rows, rhs = [], []
    for j in range(inst.r):
        row = [ZERO] * n
        for blk, off in zip(inst.blocks, cols):
            for k, a in enumerate(blk.A[j]):
                row[off + k] = rat(a)
        rows.append(row)
        rhs.append(rat(inst.b0[j]))
    for blk, off in zip(inst.blocks, cols):
        for brow, bv in zip(blk.B, blk.b):
            row = [ZERO] * n
            for k, a in enumerate(brow):
                row[off + k] = rat(a)
            rows.append(row)
            rhs.append(rat(bv))
        for k, ub in enumerate(blk.u):
            row = [ZERO] * n
            row[off + k] = rat(1)
            row[nx + off + k] = rat(1)
            rows.append(row)
            rhs.append(rat(ub))
    cost = [ZERO] * n
    for blk, off in zip(inst.blocks, cols):
        for k, cv in enumerate(blk.c):
            cost[off + k] = rat(cv)
    if not rows:
        return ZERO, [() for _ in inst.blocks]
    try:
        value, sol = solve_numeric(rows, rhs, cost, n)
    except LPInfeasible:
        return None, None
    return value, [tuple(sol[off:off + blk.t]) for blk, off in zip(inst.blocks, cols)]


def lp_strengthened(inst, cap: int = ENUM_CAP):
    """LP over the product of block integer hulls with the linking rows."""
    hulls = [block_hull_vertices(blk.B, blk.b, blk.u, cap) for blk in inst.blocks]
    if any(not h for h in hulls):
        return None, None
    var = [(i, p) for i, h in enumerate(hulls) for p in h]
    n = len(var)
    rows, rhs = [], []
    for j in range(inst.r):
        rows.append([inst.blocks[i].linking(p)[j] for i, p in var])
        rhs.append(rat(inst.b0[j]))
    for i in range(inst.n):
        rows.append([rat(1) if vi == i else ZERO for vi, _ in var])
        rhs.append(rat(1))
    cost = [inst.blocks[i].value(p) for i, p in var]
    if not rows:
        return ZERO, []
    try:
        value, mu = solve_numeric(rows, rhs, cost, n)
    except LPInfeasible:
        return None, None
    x = [[ZERO] * blk.t for blk in inst.blocks]
    for (i, p), w in zip(var, mu):
        if w:
            x[i] = [a + w * b for a, b in zip(x[i], p)]
    return value, [tuple(v) for v in x]


def verify_bruteforce(inst, cap: int = ENUM_CAP) -> BruteResult:
    ip, z = best_integer(inst, cap)
    std, xs = lp_standard(inst)
    stg, xg = lp_strengthened(inst, cap)
    return BruteResult(ip, z, std, xs, stg, xg)
