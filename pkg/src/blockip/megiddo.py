"""Multidimensional search: locate a hidden point against many hyperplanes.

``resolve_all`` determines, for every hyperplane ``a . lam = f``, the sign of
``a . lam_bar - f`` for a point ``lam_bar`` that is only reachable through
``point_cmp(a, f)``, a generator returning that sign for arbitrary ``a, f``.
Each stage settles at least half of the remaining hyperplanes with a number of
``point_cmp`` calls that depends on the dimension only, so the total grows
logarithmically in the number of hyperplanes.

Offsets may be rationals or :class:`~blockip.exactnum.Affine` forms; forms
are compared through :func:`~blockip.oracle.ask`, so the search itself is a
linear algorithm in the offsets.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Sequence

from .exactnum import ONE, ZERO, Affine, rat, sign
from .oracle import ask, sort_forms

M_DIRECT = 4


class Orientation(IntEnum):
    BELOW = -1
    ON = 0
    ABOVE = 1


class PreconditionViolation(ValueError):
    pass


@dataclass(frozen=True)
class Hyperplane:
    normal: tuple
    offset: object
    id: object = None


@dataclass
class SearchStats:
    queries: int = 0
    stages: int = 0


def _sgn(value):
    if isinstance(value, Affine):
        return (yield from ask(value))
    return sign(value)
    yield  # pragma: no cover - marks this function as a generator


def combine_sign(terms) -> int | None:
    """Sign of ``sum p_k * v_k`` given only ``(sign p_k, sign v_k)`` pairs; None if undetermined."""
    seen = {cs * vs for cs, vs in terms} - {0}
    if not seen:
        return 0
    if len(seen) == 1:
        return seen.pop()
    return None


def derive_pair_hyperplanes(hi: Hyperplane, hj: Hyperplane) -> tuple[Hyperplane, Hyperplane]:
    """Eliminate coordinate 1 (first result) and coordinate 2 (second result) from a pair.

    Requires ``hi.normal[0] <= 0 < hj.normal[0]`` and positive second coordinates.
    """
    ai, aj = hi.normal, hj.normal
    if not (ai[0] <= 0 < aj[0] and ai[1] > 0 and aj[1] > 0):
        raise PreconditionViolation("pair needs a_i1 <= 0 < a_j1 and a_i2, a_j2 > 0")
    fi, fj = hi.offset, hj.offset
    n1 = tuple(aj[0] * x - ai[0] * y for x, y in zip(ai, aj))
    f1 = fi * aj[0] - fj * ai[0]
    n2 = tuple(aj[1] * x - ai[1] * y for x, y in zip(ai, aj))
    f2 = fi * aj[1] - fj * ai[1]
    return Hyperplane(n1, f1, ("first", hi.id, hj.id)), Hyperplane(n2, f2, ("second", hi.id, hj.id))


def pair_orientations(ai: Sequence, aj: Sequence, s1: int, s2: int) -> tuple[int | None, int | None]:
    """Signs for the original pair implied by the signs on the two derived hyperplanes.

    With ``mu = ai2*aj1 - ai1*aj2 > 0`` one has
    ``mu*(ai.l - fi) = ai2*s1 - ai1*s2`` and ``mu*(aj.l - fj) = aj2*s1 - aj1*s2``.
    """
    mu = ai[1] * aj[0] - ai[0] * aj[1]
    if mu <= 0:
        raise PreconditionViolation("degenerate pair")
    si = combine_sign([(sign(ai[1]), s1), (sign(-ai[0]), s2)])
    sj = combine_sign([(sign(aj[1]), s1), (sign(-aj[0]), s2)])
    return si, sj


def _lift_drop_first(M):
    return lambda b: (M * b[0], b[0]) + tuple(b[1:])


def _lift_drop_second(b):
    return (b[0], ZERO) + tuple(b[1:])


def resolve_stage(planes: Sequence[tuple], r: int, point_cmp: Callable):
    """Generator: signs for at least half of ``planes`` (list of ``(normal, offset)``).

    Returns a dict from plane index to sign of ``normal . lam_bar - offset``.
    """
    n = len(planes)
    need = (n + 1) // 2
    res: dict[int, int] = {}
    for i, (a, f) in enumerate(planes):
        if all(v == 0 for v in a):
            res[i] = -(yield from _sgn(f))
    if r == 1:
        active = [i for i in range(n) if i not in res]
        if not active:
            return res
        tau = {i: planes[i][1] * (ONE / planes[i][0][0]) for i in active}
        if all(not isinstance(v, Affine) for v in tau.values()):
            order = sorted(active, key=lambda i: tau[i])
        else:
            order = yield from sort_forms(active, lambda i: tau[i])
        median = tau[order[(len(order) - 1) // 2]]
        rel = {}
        for i in active:
            rel[i] = yield from _sgn(tau[i] - median)
        s = yield from point_cmp((ONE,), median)
        for i in active:
            c = rel[i]
            if s == 0:
                t = -c
            elif s > 0 and c <= 0:
                t = 1
            elif s < 0 and c >= 0:
                t = -1
            else:
                continue
            res[i] = sign(planes[i][0][0]) * t
        return res

    while len(res) < need:
        before = len(res)
        active = [i for i in range(n) if i not in res]
        flat = [i for i in active if planes[i][0][1] == 0]
        steep = [i for i in active if planes[i][0][1] != 0]
        norm: dict[int, tuple] = {}
        pairs: list[tuple[int, int]] = []
        lonely_zero: list[int] = []
        median = ZERO
        if steep:
            ratios = sorted((planes[i][0][0] / planes[i][0][1], i) for i in steep)
            median = ratios[(len(ratios) - 1) // 2][0]
            neg, zer, pos = [], [], []
            for i in steep:
                a, f = planes[i]
                g = 1 if a[1] > 0 else -1
                ap = [v * g for v in a]
                ap[0] = ap[0] - median * ap[1]
                norm[i] = (g, tuple(ap), f * g)
                (neg if ap[0] < 0 else zer if ap[0] == 0 else pos).append(i)
            left = neg + zer
            pairs = list(zip(left, pos))
            paired = {i for i, _ in pairs}
            lonely_zero = [i for i in zer if i not in paired]

        derived = {}
        set1, tags1 = [], []
        for i in lonely_zero:
            _, ap, fp = norm[i]
            set1.append((ap[1:], fp))
            tags1.append(("zero", i))
        for i, j in pairs:
            h1, h2 = derive_pair_hyperplanes(Hyperplane(norm[i][1], norm[i][2], i),
                                             Hyperplane(norm[j][1], norm[j][2], j))
            derived[(i, j)] = (h1, h2)
            set1.append((h1.normal[1:], h1.offset))
            tags1.append(("pair", i, j))
        got1 = {}
        if set1:
            lift = _lift_drop_first(median)
            sub = yield from resolve_stage(set1, r - 1, lambda b, f, lift=lift: point_cmp(lift(b), f))
            for k, s in sub.items():
                got1[tags1[k]] = s
        for tag, s in got1.items():
            if tag[0] == "zero":
                res[tag[1]] = norm[tag[1]][0] * s

        set2, tags2 = [], []
        for i in flat:
            a, f = planes[i]
            set2.append(((a[0],) + tuple(a[2:]), f))
            tags2.append(("flat", i))
        for i, j in pairs:
            if ("pair", i, j) in got1:
                h2 = derived[(i, j)][1]
                set2.append(((h2.normal[0],) + tuple(h2.normal[2:]), h2.offset))
                tags2.append(("pair", i, j))
        if set2:
            sub = yield from resolve_stage(set2, r - 1,
                                           lambda b, f: point_cmp(_lift_drop_second(b), f))
            for k, s in sub.items():
                tag = tags2[k]
                if tag[0] == "flat":
                    res[tag[1]] = s
                    continue
                _, i, j = tag
                si, sj = pair_orientations(norm[i][1], norm[j][1], got1[tag], s)
                if si is not None:
                    res[i] = norm[i][0] * si
                if sj is not None:
                    res[j] = norm[j][0] * sj
        if len(res) == before:
            raise RuntimeError("multidimensional search stage made no progress")
    return res


def resolve_all(hyperplanes: Sequence[Hyperplane], r: int, point_cmp: Callable,
                m_direct: int = M_DIRECT, stats: SearchStats | None = None):
    """Generator: map hyperplane id -> :class:`Orientation` relative to the hidden point."""
    if stats is None:
        stats = SearchStats()

    def counted(a, f):
        stats.queries += 1
        return (yield from point_cmp(tuple(a), f))

    planes = [(tuple(rat(v) for v in h.normal), h.offset) for h in hyperplanes]
    for a, _ in planes:
        if len(a) != r:
            raise ValueError("hyperplane dimension mismatch")
    out: dict[int, int] = {}
    unresolved = list(range(len(planes)))
    while unresolved:
        if len(unresolved) <= m_direct:
            for i in unresolved:
                a, f = planes[i]
                if all(v == 0 for v in a):
                    out[i] = -(yield from _sgn(f))
                else:
                    out[i] = yield from counted(a, f)
            break
        stats.stages += 1
        got = yield from resolve_stage([planes[i] for i in unresolved], r, counted)
        for local, s in got.items():
            out[unresolved[local]] = s
        unresolved = [i for i in unresolved if i not in out]
    return {hyperplanes[i].id if hyperplanes[i].id is not None else i: Orientation(out[i])
            for i in range(len(planes))}


def numeric_point_cmp(point: Sequence):
    """``point_cmp`` for a known rational point (tests and benchmarks)."""
    point = tuple(rat(v) for v in point)

    def cmp(a, f):
        val = sum((x * y for x, y in zip(a, point)), ZERO)
        s = yield from _sgn(val - f if not isinstance(f, Affine) else f * -1 + val)
        return s

    return cmp


def random_hyperplanes(r: int, m: int, seed: int):
    """Random integer hyperplanes and a hidden rational point, reproducible from ``seed``."""
    import random

    rng = random.Random(seed)
    hs = []
    while len(hs) < m:
        a = tuple(rng.randint(-20, 20) for _ in range(r))
        if not any(a):
            continue
        hs.append(Hyperplane(a, rat(rng.randint(-1000, 1000)), len(hs)))
    point = tuple(rat(rng.randint(-100, 100)) / rng.randint(1, 7) for _ in range(r))
    return hs, point


def bench(r: int, m: int, seed: int, m_direct: int = M_DIRECT) -> dict:
    """Locate a hidden point against ``m`` random hyperplanes; report query count and correctness."""
    from .simplex import run_local

    hs, point = random_hyperplanes(r, m, seed)
    stats = SearchStats()
    got = run_local(resolve_all(hs, r, numeric_point_cmp(point), m_direct, stats))
    correct = all(
        int(got[h.id]) == sign(sum((a * p for a, p in zip(h.normal, point)), ZERO) - h.offset)
        for h in hs)
    return {"queries": stats.queries, "rounds": stats.stages, "correct": correct}
