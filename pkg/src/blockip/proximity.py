"""Graver-norm and proximity bounds, plus brute-force measurements that check them.

The closed forms used here are explicit instantiations:

* base Graver bound for an ``s x t`` block with entries at most ``delta``:
  ``(2 s delta + 1)^s``;
* stacking ``r`` rows on top of blocks with bound ``G``:
  ``G (2 r G delta + 1)^r``;
* treedepth ``d``: ``(3 delta)^(2^d - 1)``;
* LP-to-IP distance (l1) for the strengthened relaxation:
  ``P = r^3 G + (2 r delta G + 1)^(r + 4)``, linking window ``rho = delta P``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bruteforce import nearest_optimal
from .blocks import ENUM_CAP

SAFETY = 2


def graver_bound_base(s: int, delta: int) -> int:
    return (2 * s * delta + 1) ** s


def graver_bound_compose(G: int, r: int, delta: int) -> int:
    return G * (2 * r * G * delta + 1) ** r


def graver_bound_treedepth(d: int, delta: int) -> int:
    return (3 * delta) ** (2 ** d - 1)


@dataclass(frozen=True)
class ProximityRadius:
    P: int
    rho: int
    source: str = "formula"

    def window(self, safety: int = SAFETY) -> int:
        """Radius handed to the rounding DP (box slacks can double l1 distances)."""
        return safety * self.rho


def proximity_bound(r: int, delta: int, G: int) -> ProximityRadius:
    if r == 0:
        return ProximityRadius(0, 0)
    P = r ** 3 * G + (2 * r * delta * G + 1) ** (r + 4)
    return ProximityRadius(P, delta * P)


def instance_bounds(inst) -> dict:
    """All formula values for an instance (G from the block rows)."""
    delta = max(inst.delta, 1)
    G = graver_bound_base(inst.s, delta)
    prox = proximity_bound(inst.r, delta, G)
    return {"G": G, "P": prox.P, "rho": prox.rho, "window": prox.window()}


def measure_proximity(inst, x, cap: int = ENUM_CAP):
    """``(distance, z)``: the l1 distance from ``x`` to the nearest optimal integer solution."""
    _, z, dist = nearest_optimal(inst, x, "l1", cap)
    return dist, z


def graver_basis_bruteforce(M, box: int) -> list:
    """Conformally minimal nonzero integer kernel vectors of ``M`` with entries in ``[-box, box]``.

    Exact only when ``box`` exceeds the largest Graver entry; used to check
    the base bound on tiny matrices.
    """
    t = len(M[0])
    kernel = []
    for v in itertools.product(range(-box, box + 1), repeat=t):
        if any(v) and all(sum(a * x for a, x in zip(row, v)) == 0 for row in M):
            kernel.append(v)

    def below(y, v):
        return y != v and all(a * b >= 0 and abs(a) <= abs(b) for a, b in zip(y, v))

    return [v for v in kernel if not any(below(y, v) for y in kernel)]
