"""Round a vertex of the strengthened relaxation to an integer optimum.

Blocks are the leaves of a complete binary tree (padded with empty blocks).
Every node keeps a table from candidate linking vectors ``d`` (integer points
within sup-distance ``rho`` of the node's LP contribution ``sum A_i x_i``) to
the best objective of an integer assignment of its blocks hitting ``d``.
The root reads off ``b0``.  Tables are stored sparsely: only reachable ``d``
appear, so astronomically large formula radii are harmless at small scale.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .blocks import ENUM_CAP, block_ip_table
from .bruteforce import nearest_optimal
from .exactnum import ZERO, rat
from .oracle import Counters


class RadiusTooSmall(Exception):
    pass


class DPInfeasible(Exception):
    pass


@dataclass
class RoundResult:
    z: list
    value: object
    radius: int


def candidate_set(center, rho: int) -> list:
    """Integer vectors within sup-distance ``rho`` of ``center``, lexicographic."""
    ranges = [range(math.ceil(rat(c) - rho), math.floor(rat(c) + rho) + 1) for c in center]
    return [tuple(v) for v in itertools.product(*ranges)]


def _within(d, center, rho) -> bool:
    return all(abs(a - c) <= rho for a, c in zip(d, center))


def _leaf_job(args):
    c, A, B, b, u, engine, cap = args
    return block_ip_table(c, A, B, b, u, engine, cap)


def _tree_nodes(n_pad: int):
    """Yield levels bottom-up as lists of (first, last) block intervals."""
    width = 1
    while width <= n_pad:
        yield [(j * width, (j + 1) * width) for j in range(n_pad // width)]
        width *= 2


def dp_round(inst, x, rho, engine: str = "bruteforce", cap: int = ENUM_CAP,
             counters: Counters | None = None, workers: int = 1) -> RoundResult:
    """Best integer solution whose partial linking sums stay within ``rho`` of those of ``x``."""
    r = inst.r
    n = inst.n
    n_pad = 1
    while n_pad < n:
        n_pad *= 2
    rho = rat(rho)
    contrib = [tuple(rat(v) for v in blk.linking(xi)) for blk, xi in zip(inst.blocks, x)]
    contrib += [tuple(ZERO for _ in range(r))] * (n_pad - n)

    jobs = [(blk.c, blk.A, blk.B, blk.b, blk.u, engine, cap) for blk in inst.blocks]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_leaf_job, jobs))
    else:
        raw = [_leaf_job(j) for j in jobs]
    empty = {tuple(ZERO for _ in range(r)): (ZERO, ())}
    raw += [empty] * (n_pad - n)

    # a window holding no integer vector at all cannot be fixed by the DP
    for i, ctr in enumerate(contrib[:n]):
        if any(math.ceil(c - rho) > math.floor(c + rho) for c in ctr):
            raise RadiusTooSmall(f"radius {rho} leaves no integer candidate for block {i}")

    # level 0 tables: d -> (value, point)
    centers = contrib
    tables = []
    for i in range(n_pad):
        tab = {d: (val, p) for d, (val, p) in sorted(raw[i].items()) if _within(d, centers[i], rho)}
        tables.append(tab)
    levels = [tables]
    level_centers = [centers]
    total_states = sum(len(t) for t in tables)
    while len(tables) > 1:
        nxt, nxt_c = [], []
        for j in range(0, len(tables), 2):
            left, right = tables[j], tables[j + 1]
            center = tuple(a + b for a, b in zip(centers[j], centers[j + 1]))
            tab: dict = {}
            for dl in sorted(left):
                vl = left[dl][0]
                for dr in sorted(right):
                    d = tuple(a + b for a, b in zip(dl, dr))
                    if not _within(d, center, rho):
                        continue
                    val = vl + right[dr][0]
                    cur = tab.get(d)
                    if cur is None or val > cur[0]:
                        tab[d] = (val, (dl, dr))
            nxt.append(tab)
            nxt_c.append(center)
        tables, centers = nxt, nxt_c
        levels.append(tables)
        level_centers.append(centers)
        total_states += sum(len(t) for t in tables)
    if counters is not None:
        counters.dp_states += total_states
        counters.parallel_rounds += len(levels)

    target = tuple(rat(v) for v in inst.b0)
    if not _within(target, centers[0], rho):
        raise RadiusTooSmall(f"b0 lies outside the root window of radius {rho}")
    root = tables[0].get(target)
    if root is None:
        raise DPInfeasible("no integer solution inside the proximity window")

    # backtrack
    wanted = [target]
    for lvl in range(len(levels) - 1, 0, -1):
        nxt_w = []
        for k, d in enumerate(wanted):
            dl, dr = levels[lvl][k][d][1]
            nxt_w += [dl, dr]
        wanted = nxt_w
    z = [levels[0][i][d][1] for i, d in enumerate(wanted)][:n]
    return RoundResult(z=z, value=root[0], radius=rho)


def needed_radius(inst, x, z) -> object:
    """Largest sup-norm gap between partial linking sums of ``x`` and ``z`` over all tree nodes."""
    n = inst.n
    n_pad = 1
    while n_pad < n:
        n_pad *= 2
    gaps = [tuple(a - b for a, b in zip(blk.linking(xi), blk.linking(zi)))
            for blk, xi, zi in zip(inst.blocks, x, z)]
    gaps += [tuple(ZERO for _ in range(inst.r))] * (n_pad - n)
    need = ZERO
    for level in _tree_nodes(n_pad):
        for lo, hi in level:
            acc = [ZERO] * inst.r
            for g in gaps[lo:hi]:
                acc = [a + b for a, b in zip(acc, g)]
            need = max([need] + [abs(v) for v in acc])
    return need


def validate_radius(inst, x, rho, cap: int = ENUM_CAP) -> tuple[bool, int]:
    """``(ok, needed)`` for the nearest (l1) optimal integer solution."""
    _, z, _ = nearest_optimal(inst, x, "l1", cap)
    if z is None:
        raise DPInfeasible("instance has no integer solution")
    needed = math.ceil(needed_radius(inst, x, z))
    return rat(rho) >= needed, needed
