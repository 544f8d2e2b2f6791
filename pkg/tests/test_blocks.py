import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockip.blocks import (BlockInfeasible, BlockProblem, CapExceeded, block_hull_optimize,
                            block_hull_vertices, block_ip_fixed_rhs, block_ip_table,
                            enumerate_block_integers, in_convex_hull, interval_solve_lp,
                            simplex_lp, tournament)
from blockip.exactnum import ZERO, rat
from blockip.oracle import Counters, drive, numeric_answerer
from blockip.simplex import LPInfeasible, run_local, solve_numeric

C = [rat("21/10"), rat("29/10")]


def run(gen):
    return run_local(gen)


def test_interval_examples():
    assert run(interval_solve_lp([rat(1)], [2], [6], 5)) == (3,)
    cnt = Counters()
    from blockip.exactnum import Affine
    x = drive(interval_solve_lp([Affine.var("c")], [0], [0], 7), numeric_answerer({"c": rat(-1)}), cnt)
    assert x == (0,) and cnt.objective_queries == 1
    with pytest.raises(BlockInfeasible):
        run(interval_solve_lp([rat(1)], [1, 1], [2, 3], 9))
    with pytest.raises(BlockInfeasible):
        run(interval_solve_lp([rat(1)], [2], [12], 5))


def test_simplex_examples():
    assert run(simplex_lp([rat(1), rat(2)], [], [], [1, 1])) == (1, 1)
    x = run(simplex_lp([rat(2), rat(3)], [[2, 3]], [3], [5, 5]))
    assert x in {(rat("3/2"), 0), (0, 1)}
    assert 2 * x[0] + 3 * x[1] == 3
    # deterministic tie break
    assert run(simplex_lp([rat(2), rat(3)], [[2, 3]], [3], [5, 5])) == x
    with pytest.raises(BlockInfeasible):
        run(simplex_lp([rat(1), rat(1)], [[1, 1]], [5], [1, 1]))


def test_enumeration_examples():
    assert enumerate_block_integers([[2, 3]], [3], [5, 5]) == [(0, 1)]
    assert enumerate_block_integers([[2, 3]], [18], [9, 6]) == [(0, 6), (3, 4), (6, 2), (9, 0)]
    assert enumerate_block_integers([[2, 3]], [1], [5, 5]) == []
    with pytest.raises(CapExceeded):
        enumerate_block_integers([], [], [9, 9, 9], cap=100)


def test_hull_optimize_examples():
    assert run(block_hull_optimize(C, [[2, 3]], [18], [9, 6])) == (9, 0)
    # the middle points are not hull vertices
    assert block_hull_vertices([[2, 3]], [18], [9, 6]) == [(0, 6), (9, 0)]
    # c = 0: lexicographically largest vertex wins the ties
    assert run(block_hull_optimize([ZERO, ZERO], [[2, 3]], [18], [9, 6])) == (9, 0)
    # a single candidate needs no comparison
    gen = block_hull_optimize(C, [[2, 3]], [3], [5, 5])
    with pytest.raises(StopIteration) as stop:
        next(gen)
    assert stop.value.value == (0, 1)


def test_tournament_query_count():
    pts = [(k,) for k in range(7)]
    cnt = Counters()
    from blockip.exactnum import Affine
    best = drive(tournament([Affine.var("c")], pts), numeric_answerer({"c": rat(-2)}), cnt)
    assert best == (0,)
    assert cnt.objective_queries == len(pts) - 1


def test_fixed_rhs_examples():
    p = block_ip_fixed_rhs(C, [[1, 1]], [8], [[2, 3]], [18], [9, 6])
    assert p == (6, 2)
    assert C[0] * p[0] + C[1] * p[1] == rat("92/5")
    assert block_ip_fixed_rhs(C, [[1, 1]], [100], [[2, 3]], [18], [9, 6]) is None
    assert block_ip_fixed_rhs([rat(1)], [[1]], [2], [], [], [3]) == (2,)


def test_in_convex_hull():
    sq = [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert in_convex_hull((1, 1), sq)
    assert not in_convex_hull((3, 1), sq)
    assert not in_convex_hull((0, 0), [])


# (t, B, A, u, c, planted x)
blocks = st.integers(1, 3).flatmap(lambda t: st.tuples(
        st.just(t),
        st.lists(st.lists(st.integers(-2, 2), min_size=t, max_size=t), min_size=0, max_size=2),
        st.lists(st.lists(st.integers(-2, 2), min_size=t, max_size=t), min_size=1, max_size=2),
        st.lists(st.integers(0, 3), min_size=t, max_size=t),
        st.lists(st.integers(-4, 4), min_size=t, max_size=t),
        st.lists(st.integers(0, 3), min_size=t, max_size=t),
    ))


def _planted(data):
    t, B, A, u, c, x = data
    x = [min(v, ub) for v, ub in zip(x, u)]
    b = [sum(a * v for a, v in zip(row, x)) for row in B]
    return t, A, B, b, u, [rat(v) for v in c]


@given(blocks)
@settings(max_examples=80, deadline=None)
def test_prefix_dp_matches_bruteforce(data):
    t, A, B, b, u, c = _planted(data)
    assert block_ip_table(c, A, B, b, u, "prefix-dp") == block_ip_table(c, A, B, b, u, "bruteforce")
    for d in itertools.product(range(-3, 4), repeat=len(A)):
        assert block_ip_fixed_rhs(c, A, d, B, b, u, "prefix-dp") == \
            block_ip_fixed_rhs(c, A, d, B, b, u, "bruteforce")


@given(blocks)
@settings(max_examples=60, deadline=None)
def test_hull_optimum_equals_integer_optimum(data):
    _, _, B, b, u, c = _planted(data)
    pts = enumerate_block_integers(B, b, u)
    best = max(sum(ci * v for ci, v in zip(c, p)) for p in pts)
    x = run(block_hull_optimize(c, B, b, u))
    assert sum(ci * v for ci, v in zip(c, x)) == best
    assert x in block_hull_vertices(B, b, u)


@given(blocks)
@settings(max_examples=60, deadline=None)
def test_simplex_matches_scipy(data):
    linprog = pytest.importorskip("scipy.optimize").linprog
    t, _, B, b, u, c = _planted(data)
    x = run(simplex_lp(c, B, b, u))
    ours = float(sum(ci * v for ci, v in zip(c, x)))
    res = linprog([-float(v) for v in c], A_eq=B or None, b_eq=b or None,
                  bounds=list(zip([0] * t, u)), method="highs")
    assert res.status == 0
    assert abs(ours - (-res.fun)) <= 1e-9 * max(1.0, abs(ours))
    assert all(sum(a * v for a, v in zip(row, x)) == bi for row, bi in zip(B, b))
    assert all(0 <= v <= ub for v, ub in zip(x, u))


def test_exact_simplex_infeasible():
    with pytest.raises(LPInfeasible):
        solve_numeric([[1, 1]], [-1], [1, 1], 2)


def test_block_problem_helpers():
    blk = BlockProblem(A=((1, 1),), B=((2, 3),), b=(18,), u=(9, 6), c=tuple(C))
    assert (blk.t, blk.s, blk.delta) == (2, 1, 3)
    assert blk.is_feasible_point((6, 2)) and not blk.is_feasible_point((1, 1))
    assert blk.linking((6, 2)) == (8,)
