import itertools

import pytest

from blockip.blocks import BlockProblem
from blockip.exactnum import rat
from blockip.instance import LinkedInstance, gen_prop1
from blockip.bruteforce import nearest_optimal
from blockip.lagrangian import solve_lp
from blockip.proximity import (graver_basis_bruteforce, graver_bound_base, graver_bound_compose,
                               graver_bound_treedepth, instance_bounds, measure_proximity,
                               proximity_bound)


def test_base_bound():
    assert graver_bound_base(1, 1) == 3
    assert graver_bound_base(0, 5) == 1
    assert graver_bound_base(2, 1) == 25


def test_compose_bound():
    assert graver_bound_compose(1, 1, 1) == 3
    assert graver_bound_compose(3, 1, 1) == 21
    assert graver_bound_compose(7, 1, 0) == 7


def test_treedepth_bound():
    assert graver_bound_treedepth(1, 1) == 3
    assert graver_bound_treedepth(2, 1) == 27
    assert graver_bound_treedepth(1, 2) == 6


def test_proximity_bound():
    assert proximity_bound(1, 1, 1).P == 244
    assert proximity_bound(1, 1, 3).P == 16810
    assert proximity_bound(0, 4, 9).P == 0
    pr = proximity_bound(2, 2, 5)
    assert pr.rho == 2 * pr.P and pr.window() == 2 * pr.rho


def test_bounds_are_monotone():
    for s, d in itertools.product(range(3), range(1, 4)):
        assert graver_bound_base(s + 1, d) >= graver_bound_base(s, d)
        assert graver_bound_base(s, d + 1) >= graver_bound_base(s, d)
    for r, d, G in itertools.product(range(1, 3), range(1, 3), range(1, 4)):
        P = proximity_bound(r, d, G).P
        assert proximity_bound(r + 1, d, G).P >= P
        assert proximity_bound(r, d + 1, G).P >= P
        assert proximity_bound(r, d, G + 1).P >= P


@pytest.mark.parametrize("s", [1, 2])
def test_base_bound_soundness_by_enumeration(s):
    bound = graver_bound_base(s, 1)
    for flat in itertools.product((-1, 0, 1), repeat=3 * s):
        M = [flat[3 * k:3 * k + 3] for k in range(s)]
        for g in graver_basis_bruteforce(M, 3):
            assert sum(abs(v) for v in g) <= bound


def test_graver_basis_small_example():
    assert sorted(graver_basis_bruteforce([[1, 1]], 2)) == [(-1, 1), (1, -1)]


def test_measure_far_family():
    inst = gen_prop1(3)
    dist, z = measure_proximity(inst, solve_lp(inst, "strengthened").x)
    assert dist == 0 and z == [(0, 1), (0, 1), (6, 2)]
    std = solve_lp(inst, "standard").x
    _, z, linf = nearest_optimal(inst, std, "linf")
    assert abs(std[-1][1] - z[-1][1]) == 2


def test_measure_integral_lp():
    blk = BlockProblem(A=((1,),), B=(), b=(), u=(3,), c=(rat(1),))
    inst = LinkedInstance(r=1, b0=(4,), blocks=[blk, blk])
    dist, _ = measure_proximity(inst, solve_lp(inst, "standard").x)
    assert dist == 0


def test_instance_bounds_far_family():
    b = instance_bounds(gen_prop1(3))
    assert b["G"] == graver_bound_base(1, 3) == 7
    assert b["P"] == proximity_bound(1, 3, 7).P
    assert b["window"] == 2 * 3 * b["P"]
