import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockip.blocks import interval_solve_lp
from blockip.exactnum import Affine, EpsId, rat
from blockip.oracle import (Counters, answer_numeric, ask, drive, numeric_answerer, sort_forms,
                            translate_inner_query)

LAM = ("lam", 0)


def test_answer_numeric_examples():
    c1, c2 = Affine.var("c1"), Affine.var("c2")
    assert answer_numeric(c1 * 2 - 3, {"c1": rat(2)}) == 1
    assert answer_numeric(c1 - c2, {"c1": rat(7), "c2": rat(7)}) == 0
    lam = Affine.var("l1") - 1 - Affine.infinitesimal(EpsId(1))
    assert answer_numeric(lam, {"l1": rat(1)}) == -1


def test_unbound_variable_is_reported():
    with pytest.raises(KeyError):
        answer_numeric(Affine.var("missing"), {})


def test_translate_single_coordinate():
    # cbar <= 3 with c = 5, A column 2: 5 - 2 lam - 3 = 2 - 2 lam, i.e. lam >= 1 flips the sign
    q = translate_inner_query(Affine.var("cb0") - 3, ["cb0"], [[2]], [5], [LAM])
    assert q == Affine.var(LAM, -2) + 2


def test_translate_zero_query():
    q = translate_inner_query(Affine.constant(0) - 4, ["cb0"], [[2]], [5], [LAM])
    assert not q.terms
    assert answer_numeric(q, {}) == -1


def test_translate_lambda_cancels():
    # u = (1, 1), c = (1, 2), A row (1, -1): the lambda terms cancel, leaving the constant 3
    q = translate_inner_query(Affine.var("a") + Affine.var("b"), ["a", "b"], [[1, -1]], [1, 2], [LAM])
    assert not q.terms
    for lam in (-1, 0, 2):
        assert answer_numeric(q, {LAM: rat(lam)}) == 1


@given(st.lists(st.integers(-4, 4), min_size=2, max_size=2),
       st.lists(st.integers(-4, 4), min_size=2, max_size=2),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4),
       st.integers(-6, 6),
       st.lists(st.integers(-5, 5), min_size=2, max_size=2))
def test_translation_is_sound(u, c, A_flat, beta, lam):
    A = [A_flat[:2], A_flat[2:]]
    keys = ["x0", "x1"]
    lam_keys = [("lam", 0), ("lam", 1)]
    q = Affine.var("x0", u[0]) + Affine.var("x1", u[1]) - beta
    outer = translate_inner_query(q, keys, A, c, lam_keys)
    cbar = [rat(c[k]) - sum(rat(A[j][k]) * lam[j] for j in range(2)) for k in range(2)]
    inner = answer_numeric(q, {"x0": cbar[0], "x1": cbar[1]})
    assert answer_numeric(outer, {lam_keys[0]: rat(lam[0]), lam_keys[1]: rat(lam[1])}) == inner


def _no_queries():
    return "done"
    yield  # pragma: no cover


def test_drive_zero_queries():
    cnt = Counters()
    assert drive(_no_queries(), lambda q: 0, cnt) == "done"
    assert cnt.objective_queries == 0


def test_drive_sorting_is_a_linear_algorithm():
    values = {0: rat(4), 1: rat(-1), 2: rat("7/2"), 3: rat(0)}
    keys = {i: Affine.var(("c", i)) for i in values}
    cnt = Counters()
    order = drive(sort_forms(list(values), lambda i: keys[i]),
                  numeric_answerer({("c", i): v for i, v in values.items()}), cnt)
    assert order == [1, 3, 2, 0]
    assert cnt.objective_queries >= 3


def test_drive_interval_solver_negative_cost():
    cnt = Counters()
    x = drive(interval_solve_lp([Affine.var("c")], [0], [0], 7), numeric_answerer({"c": rat(-1)}), cnt)
    assert x == (0,)
    assert cnt.objective_queries == 1


def test_ask_resolves_ties_by_eps_locally():
    form = Affine.var("c") + Affine.infinitesimal(EpsId(3), -1)
    assert drive(ask(form), numeric_answerer({"c": rat(0)})) == -1
    assert drive(ask(form), numeric_answerer({"c": rat(1)})) == 1
    # an eps-only form never leaves the generator
    assert drive(ask(Affine.infinitesimal(EpsId(0))), lambda q: pytest.fail("asked")) == 1


def test_counters_merge_and_json():
    a, b = Counters(total_ops=2), Counters(total_ops=3, dp_states=1)
    a.merge(b)
    assert a.total_ops == 5 and a.dp_states == 1
    assert '"dp_states": 1' in a.to_json()
