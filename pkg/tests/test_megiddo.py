import random

import pytest

from blockip.exactnum import ONE, ZERO, Affine, rat, sign
from blockip.megiddo import (Hyperplane, Orientation, PreconditionViolation, SearchStats, bench,
                             combine_sign, derive_pair_hyperplanes, numeric_point_cmp,
                             pair_orientations, random_hyperplanes, resolve_all, resolve_stage)
from blockip.simplex import run_local

A, O, B = Orientation.ABOVE, Orientation.ON, Orientation.BELOW


def direct(h, point):
    return sign(sum((rat(a) * p for a, p in zip(h.normal, point)), ZERO) - h.offset)


def locate(hs, r, point, stats=None):
    return run_local(resolve_all(hs, r, numeric_point_cmp(point), stats=stats))


def test_three_planes_on_a_line():
    hs = [Hyperplane((1,), rat(v), v) for v in (1, 2, 3)]
    assert locate(hs, 1, (rat(2),)) == {1: A, 2: O, 3: B}


def test_eight_planes_query_bound():
    hs = [Hyperplane((1,), rat(v), v) for v in range(1, 9)]
    stats = SearchStats()
    got = locate(hs, 1, (rat("9/2"),), stats)
    assert [got[v] for v in range(1, 9)] == [A] * 4 + [B] * 4
    # each point query is one three-way comparison against the hidden point
    assert stats.queries <= 2 * 3 + 2


def test_sixteen_planes_in_the_plane():
    rng = random.Random(5)
    hs = []
    while len(hs) < 16:
        a = (rng.randint(-5, 5), rng.randint(-5, 5))
        if any(a):
            hs.append(Hyperplane(a, rat(rng.randint(-9, 9)), len(hs)))
    point = (rat("1/3"), rat(-2))
    got = locate(hs, 2, point)
    assert all(int(got[h.id]) == direct(h, point) for h in hs)


def test_stage_on_a_line_resolves_half_with_one_call():
    calls = []
    inner = numeric_point_cmp((rat("5/2"),))

    def cmp(a, f):
        calls.append((a, f))
        return (yield from inner(a, f))

    planes = [((ONE,), rat(v)) for v in (1, 2, 3, 4)]
    got = run_local(resolve_stage(planes, 1, cmp))
    assert len(got) >= 2 and len(calls) == 1
    for i, s in got.items():
        assert s == sign(rat("5/2") - planes[i][1])


def test_axis_planes():
    hs = [Hyperplane((1, 0), ZERO, "x0"), Hyperplane((1, 0), ONE, "x1"),
          Hyperplane((0, 1), ZERO, "y0"), Hyperplane((0, 1), ONE, "y1")]
    got = locate(hs, 2, (rat("1/2"), rat("1/2")), )
    assert got == {"x0": A, "x1": B, "y0": A, "y1": B}
    got = run_local(resolve_stage([(h.normal, h.offset) for h in hs], 2,
                                  numeric_point_cmp((rat("1/2"), rat("1/2")))))
    assert got and all(s == (1 if k % 2 == 0 else -1) for k, s in got.items())


def test_pair_from_the_figure():
    hi = Hyperplane((-1, 1), ZERO, "i")
    hj = Hyperplane((1, 1), rat(2), "j")
    h1, h2 = derive_pair_hyperplanes(hi, hj)
    assert h1.normal == (0, 2) and h1.offset == 2            # lambda_2 = 1
    assert h2.normal == (-2, 0) and h2.offset == -2          # lambda_1 = 1, written with normal -2
    point = (rat(2), rat("3/2"))
    s1, s2 = direct(h1, point), direct(h2, point)
    assert (s1, -s2) == (1, 1)
    si, sj = pair_orientations(hi.normal, hj.normal, s1, s2)
    assert sj == 1 == direct(hj, point)
    assert si is None


def test_derived_plane_formula():
    h1, _ = derive_pair_hyperplanes(Hyperplane((-1, 1), ZERO), Hyperplane((2, 1), rat(3)))
    assert h1.normal == (0, 3) and h1.offset == 3


def test_pair_precondition():
    with pytest.raises(PreconditionViolation):
        derive_pair_hyperplanes(Hyperplane((0, 1), ZERO), Hyperplane((0, 2), ZERO))


def test_combine_sign():
    assert combine_sign([(1, 1), (1, 0)]) == 1
    assert combine_sign([(1, 1), (-1, 1)]) is None
    assert combine_sign([(0, 1), (1, 0)]) == 0


def test_zero_normal_and_symbolic_offsets():
    hs = [Hyperplane((0,), rat(-1), "z"), Hyperplane((1,), Affine.var("f"), "f")]
    # the symbolic offset is compared through the outer protocol
    gen = resolve_all(hs, 1, numeric_point_cmp((rat(0),)))
    batch = next(gen)
    assert all(q.terms for q in batch)
    with pytest.raises(StopIteration) as stop:
        while True:
            batch = gen.send([-1] * len(batch))   # "f" is above zero
    assert stop.value.value == {"z": A, "f": B}


@pytest.mark.parametrize("r", [1, 2, 3])
def test_random_orientations_match_direct(r):
    for seed in range(6):
        hs, point = random_hyperplanes(r, 40, seed)
        got = locate(hs, r, point)
        assert all(int(got[h.id]) == direct(h, point) for h in hs)


def test_duplicates_and_degenerate_planes():
    hs = [Hyperplane((2, 2), rat(2), 0), Hyperplane((1, 1), rat(1), 1), Hyperplane((1, 1), rat(1), 2),
          Hyperplane((0, 3), rat(3), 3), Hyperplane((-1, -1), rat(-1), 4)]
    hs += [Hyperplane((k, 1), rat(k), 10 + k) for k in range(-3, 4)]
    point = (rat("1/2"), rat("1/2"))
    got = locate(hs, 2, point)
    assert all(int(got[h.id]) == direct(h, point) for h in hs)


def test_bench_frozen():
    out = bench(2, 64, 0)
    assert out["correct"]
    assert out == bench(2, 64, 0)
