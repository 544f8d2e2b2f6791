"""Lagrangian decomposition of the linking rows, solved as a parametric search.

The dual ``min_lam L(lam)`` with
``L(lam) = sum_i max{(c_i - A_i^T lam) x_i : x_i in Q_i} + lam . b0`` is minimised
without ever evaluating it at a known optimum.  ``solve_restricted_dual``
runs the block optimizers at the unknown minimiser ``lam*`` of ``L`` over an
affine subspace; every comparison that depends on ``lam*`` is a hyperplane
query, resolved in batches by the multidimensional search, whose point
queries are answered by three restricted solves one dimension lower (on the
hyperplane and on its two infinitesimal translates).

All block points collected along the way form a vertex pool.  The master LP
over that pool recovers a primal optimum, and ``crossover_to_vertex`` turns
it into one where at most ``r`` blocks sit strictly inside their polytope.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .blocks import BlockInfeasible, hull_optimizer, lp_optimizer
from .exactnum import (ONE, ZERO, Affine, EpsId, EpsValue, gauss_particular_solution, lex_sign,
                       nullspace_vector, rat, solve_left)
from .megiddo import Hyperplane, SearchStats, resolve_all
from .oracle import Counters, ask
from .simplex import LPInfeasible, maximize, phase_one, solve_numeric


class Unbounded(Exception):
    """The (restricted) dual is unbounded below, i.e. the primal is infeasible."""


class Infeasible(Exception):
    pass


class EmptyBlock(Infeasible):
    pass


class MasterInfeasible(Exception):
    pass


class ConvexityViolation(AssertionError):
    pass


@dataclass
class DualResult:
    lam: list
    value: object
    points: tuple
    vertices: set = field(default_factory=set)


@dataclass
class VertexSolution:
    x: list
    value: object
    support: list
    dual_value: object = None
    lam: list | None = None

    @property
    def fractional_blocks(self) -> list:
        return [i for i, s in enumerate(self.support) if len(s) > 1]


# ---------------------------------------------------------------------------
# problem description shared by all nested runs
# ---------------------------------------------------------------------------

_tags = itertools.count()


class EpsAllocator:
    """Hands out infinitesimals; a later id is infinitesimally smaller than every earlier one."""

    def __init__(self):
        self._next = 0

    def fresh(self) -> EpsId:
        e = EpsId(self._next)
        self._next += 1
        return e


# one allocator for the process, so nested problems never reuse an id
_EPS = EpsAllocator()


class DualProblem:
    """Blocks with optimizer factories, linking rows and (possibly symbolic) costs."""

    def __init__(self, optimizers: Sequence[Callable], A: Sequence, c: Sequence, b0: Sequence,
                 counters: Counters | None = None, eps: EpsAllocator | None = None):
        self.optimizers = list(optimizers)
        self.A = [[list(map(rat, row)) for row in Ai] for Ai in A]
        self.c = [list(ci) for ci in c]
        self.b0 = [rat(v) for v in b0]
        self.r = len(self.b0)
        self.n = len(self.optimizers)
        self.counters = counters if counters is not None else Counters()
        self.eps = eps if eps is not None else _EPS
        tag = next(_tags)
        self.lam_keys = [("lam", tag, j) for j in range(self.r)]
        self._lam_set = frozenset(self.lam_keys)

    def linking(self, points) -> list:
        g = [ZERO] * self.r
        for Ai, x in zip(self.A, points):
            for j, row in enumerate(Ai):
                g[j] += sum((a * v for a, v in zip(row, x) if a), ZERO)
        return g

    def cost(self, points):
        total = ZERO
        for ci, x in zip(self.c, points):
            for cv, v in zip(ci, x):
                if v:
                    total = cv * v + total
        return total

    def block_objectives(self, lam) -> list:
        """``c_i - A_i^T lam`` per block; ``lam`` is a list of values/forms or None for symbolic."""
        out = []
        for Ai, ci in zip(self.A, self.c):
            obj = []
            for k, cv in enumerate(ci):
                form = cv if isinstance(cv, Affine) else Affine.constant(cv)
                for j in range(self.r):
                    a = Ai[j][k]
                    if not a:
                        continue
                    if lam is None:
                        form = form - Affine.var(self.lam_keys[j], a)
                    else:
                        form = form - lam[j] * a
                obj.append(form)
            out.append(obj)
        return out


def batch_ask(forms):
    """Generator: signs of many forms, sending every variable-bearing one outward in one batch."""
    forms = [f if isinstance(f, Affine) else Affine.constant(f) for f in forms]
    out = [0] * len(forms)
    outward = []
    for i, f in enumerate(forms):
        if f.terms:
            outward.append(i)
        else:
            out[i] = lex_sign(f)
    if outward:
        signs = yield [forms[i].without_eps() for i in outward]
        for i, s in zip(outward, signs):
            out[i] = s if s else lex_sign(EpsValue(ZERO, forms[i].eps))
    return out


def evaluate_L(problem: DualProblem, objectives: Sequence, resolve: Callable):
    """Generator: run every block optimizer in lock step, resolving each round's forms together.

    Returns the list of block points.
    """
    gens = [opt(obj) for opt, obj in zip(problem.optimizers, objectives)]
    points = [None] * len(gens)
    pending = {}

    def step(i, value=None, first=False):
        try:
            pending[i] = next(gens[i]) if first else gens[i].send(value)
        except StopIteration as stop:
            points[i] = tuple(stop.value)
        except (BlockInfeasible, Infeasible) as exc:
            raise EmptyBlock(f"block {i} is empty") from exc

    for i in range(len(gens)):
        step(i, first=True)
    cnt = problem.counters
    while pending:
        order = sorted(pending)
        forms, cuts = [], []
        for i in order:
            cuts.append((len(forms), len(forms) + len(pending[i])))
            forms.extend(pending[i])
        cnt.parallel_rounds += 1
        cnt.block_steps += len(order)
        cnt.objective_queries += len(forms)
        cnt.total_ops += len(order) + len(forms)
        signs = yield from resolve(forms)
        pending = {}
        for i, (lo, hi) in zip(order, cuts):
            step(i, list(signs[lo:hi]))
    return points


# ---------------------------------------------------------------------------
# restricted dual
# ---------------------------------------------------------------------------

def _normalize(a, f):
    g = abs(next(v for v in a if v))
    if g != 1:
        inv = ONE / g
        a = tuple(v * inv for v in a)
        f = f * inv
    return a, f


def _fkey(f):
    if isinstance(f, Affine):
        return f.const if not f.terms and not f.eps else f.key()
    return rat(f)


class _Run:
    def __init__(self, problem: DualProblem, D: list, rhs: list):
        self.p = problem
        self.D = D
        self.rhs = rhs
        self.U: list = []
        self.urhs: list = []
        self.cache: dict = {}
        self.pool: set = set()

    def rows(self):
        return self.D + self.U, self.rhs + self.urhs

    def point_cmp(self, a, f):
        """Generator: sign of ``a . lam* - f`` for the unknown restricted minimiser."""
        a = tuple(rat(v) for v in a)
        if not any(a):
            s = yield from ask(-Affine.constant(f) if not isinstance(f, Affine) else -f)
            return s
        a, f = _normalize(a, f)
        key = (a, _fkey(f))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        p = self.p
        p.counters.lambda_queries += 1
        p.counters.total_ops += 1
        rows, rhs = self.rows()
        y = solve_left(rows, a, p.r)
        if y is not None:
            val = -f
            for yi, bi in zip(y, rhs):
                if yi:
                    val = bi * yi + val
            s = yield from ask(val)
        else:
            eps = Affine.infinitesimal(p.eps.fresh())
            vals = []
            for shift in (-1, 0, 1):
                res = yield from solve_restricted_dual(p, rows + [list(a)], rhs + [f + eps * shift])
                self.pool |= res.vertices
                vals.append(res.value)
            vL, v0, vR = vals
            sL = yield from ask(_as_form(vL) - v0)
            sR = yield from ask(_as_form(vR) - v0)
            if sL >= 0 and sR >= 0:
                s = 0
                self.U.append(list(a))
                self.urhs.append(f)
            elif sL < 0 and sR < 0:
                raise ConvexityViolation("restricted dual values are not convex along a line")
            else:
                s = -1 if sL < 0 else 1
        self.cache[key] = s
        return s

    def resolve(self, forms):
        """Generator: signs of block queries that may involve ``lam*``."""
        p = self.p
        kinds = []
        consts = []
        planes: dict = {}
        for form in forms:
            if not isinstance(form, Affine):
                form = Affine.constant(form)
            picked, rest = form.split(p._lam_set)
            if not picked:
                kinds.append(("c", len(consts)))
                consts.append(rest)
                continue
            a, f = _normalize(tuple(picked.get(k, ZERO) for k in p.lam_keys), -rest)
            key = (a, _fkey(f))
            planes.setdefault(key, (a, f))
            kinds.append(("h", key))
        csigns = yield from batch_ask(consts) if consts else []
        todo = [key for key in planes if key not in self.cache]
        if todo:
            hs = [Hyperplane(planes[k][0], planes[k][1], k) for k in todo]
            got = yield from resolve_all(hs, p.r, self.point_cmp, stats=SearchStats())
            for k, o in got.items():
                self.cache[k] = int(o)
        return [csigns[k[1]] if k[0] == "c" else self.cache[k[1]] for k in kinds]


def _as_form(v):
    return v if isinstance(v, Affine) else Affine.constant(v)


def recover_lambda(D: list, d: list, U: list, u: list, g: Sequence, r: int):
    """Multipliers for the final subspace, or None when ``g`` leaves its row space (unbounded)."""
    rows, rhs = D + U, d + u
    if solve_left(rows, g, r) is None:
        return None
    sol = gauss_particular_solution(rows, rhs, r)
    return sol.x


def solve_restricted_dual(problem: DualProblem, D: list | None = None, rhs: list | None = None):
    """Generator: minimise ``L`` over ``{lam : D lam = rhs}``; returns a :class:`DualResult`.

    Raises :class:`Unbounded` when the restricted dual has no minimum.
    """
    p = problem
    D = [list(row) for row in (D or [])]
    rhs = list(rhs or [])
    run = _Run(p, D, rhs)
    if len(D) == p.r:
        lam = gauss_particular_solution(D, rhs, p.r).x if p.r else []
        points = yield from evaluate_L(p, p.block_objectives(lam), batch_ask)
        g = [gi - bi for gi, bi in zip(p.linking(points), p.b0)]
        value = _as_form(p.cost(points))
        for lj, gj in zip(lam, g):
            if gj:
                value = value - lj * gj
    else:
        points = yield from evaluate_L(p, p.block_objectives(None), run.resolve)
        g = [gi - bi for gi, bi in zip(p.linking(points), p.b0)]
        rows, rr = run.rows()
        y = solve_left(rows, g, p.r)
        if y is None:
            raise Unbounded()
        lam = gauss_particular_solution(rows, rr, p.r).x
        value = _as_form(p.cost(points))
        for yi, bi in zip(y, rr):
            if yi:
                value = value - bi * yi
    run.pool.add(tuple(points))
    return DualResult(lam=lam, value=value, points=tuple(points), vertices=run.pool)


def dual_value_at(problem: DualProblem, lam: Sequence) -> DualResult:
    """``L(lam)`` and the block maximisers at a known multiplier vector."""
    r = problem.r
    eye = [[ONE if j == k else ZERO for k in range(r)] for j in range(r)]
    return run_local(solve_restricted_dual(problem, eye, [rat(v) for v in lam]))


def point_query(problem: DualProblem, a: Sequence, f, D: list | None = None,
                rhs: list | None = None) -> int:
    """Sign of ``a . lam* - f`` for the minimiser ``lam*`` of ``L`` over ``{D lam = rhs}``."""
    run = _Run(problem, [list(row) for row in (D or [])], list(rhs or []))
    return run_local(run.point_cmp(a, rat(f)))


# ---------------------------------------------------------------------------
# master LP and crossover
# ---------------------------------------------------------------------------

def _master_system(problem: DualProblem, pool: Sequence):
    cols = [problem.linking(v) for v in pool]
    rows = [[col[j] for col in cols] for j in range(problem.r)] + [[ONE] * len(pool)]
    return rows, list(problem.b0) + [ONE]


def _combine(pool, mu, n):
    x = []
    support = []
    for i in range(n):
        acc = None
        sup: dict = {}
        for v, w in zip(pool, mu):
            if not w:
                continue
            pt = v[i]
            sup[pt] = sup.get(pt, ZERO) + w
            scaled = [w * e for e in pt]
            acc = scaled if acc is None else [a + s for a, s in zip(acc, scaled)]
        x.append(tuple(acc) if acc is not None else ())
        support.append(sup)
    return x, support


def solve_master_lp(problem: DualProblem, pool: Sequence):
    """Exact master LP over the pooled block-product points (numeric costs).

    Returns ``(mu, x, value, support)`` with per-block support weights.
    """
    pool = sorted(pool)
    if not pool:
        raise MasterInfeasible("empty vertex pool")
    rows, rhs = _master_system(problem, pool)
    cost = [problem.cost(v) for v in pool]
    try:
        value, mu = solve_numeric(rows, rhs, cost, len(pool))
    except LPInfeasible:
        raise MasterInfeasible("linking rows not met by the vertex pool") from None
    x, support = _combine(pool, mu, problem.n)
    return mu, x, value, support


def master_lp_symbolic(problem: DualProblem, pool: Sequence):
    """Generator version of the master LP for symbolic costs; returns the combined block vector."""
    pool = sorted(pool)
    rows, rhs = _master_system(problem, pool)
    try:
        start = phase_one(rows, rhs, len(pool))
    except LPInfeasible:
        raise MasterInfeasible("linking rows not met by the vertex pool") from None
    cost = [_as_form(problem.cost(v)) for v in pool]
    final = yield from _drive_batches(maximize(start, cost))
    mu = final.solution()
    return _combine(pool, mu, problem.n)[0]


def _drive_batches(gen):
    """Re-emit a solver's batches through :func:`batch_ask` (eps handled locally)."""
    try:
        batch = next(gen)
        while True:
            signs = yield from batch_ask(batch)
            batch = gen.send(signs)
    except StopIteration as stop:
        return stop.value


def crossover_to_vertex(x: list, support: list, c: Sequence, A: Sequence):
    """Reduce to at most ``r`` blocks with more than one support point, keeping the objective.

    ``support[i]`` maps block points to convex weights with ``x[i] = sum w p``.
    All support points must be maximisers of the same Lagrangian objective
    (true for master LP optima), so every move is objective-neutral.
    """
    support = [dict(s) for s in support]
    x = [list(v) for v in x]
    r = len(A[0]) if A else 0
    c = [[rat(v) for v in ci] for ci in c]
    while True:
        multi = [i for i, s in enumerate(support) if len(s) > 1]
        if len(multi) <= r:
            break
        chosen = multi[:r + 1]
        moves = []
        for i in chosen:
            u, w = sorted(support[i])[:2]
            moves.append((i, u, w, [a - b for a, b in zip(u, w)]))
        M = [[sum((a * v for a, v in zip(A[i][j], d)), ZERO) for (i, _, _, d) in moves]
             for j in range(r)]
        theta = nullspace_vector(M, r + 1) if r else [ONE]
        step = None
        for (i, u, w, _), th in zip(moves, theta):
            if th > 0:
                lim = support[i][w] / th
            elif th < 0:
                lim = support[i][u] / -th
            else:
                continue
            if step is None or lim < step:
                step = lim
        delta = sum((th * sum((cv * dv for cv, dv in zip(c[i], d)), ZERO)
                     for (i, _, _, d), th in zip(moves, theta)), ZERO)
        if delta != 0:
            raise AssertionError("crossover step changes the objective")
        for (i, u, w, d), th in zip(moves, theta):
            if not th:
                continue
            support[i][u] += th * step
            support[i][w] -= th * step
            x[i] = [xv + th * step * dv for xv, dv in zip(x[i], d)]
            for pt in (u, w):
                if support[i][pt] == 0:
                    del support[i][pt]
    return [tuple(v) for v in x], support


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def run_local(gen):
    """Drive a generator whose outward queries must all be variable-free."""
    try:
        batch = next(gen)
        while True:
            out = []
            for q in batch:
                q = _as_form(q)
                if q.terms:
                    raise AssertionError(f"unexpected symbolic query {q!r}")
                out.append(lex_sign(q))
            batch = gen.send(out)
    except StopIteration as stop:
        return stop.value


def _problem_for(instance, relaxation: str, counters: Counters | None, cap: int):
    if relaxation == "standard":
        opts = [lp_optimizer(blk) for blk in instance.blocks]
    elif relaxation == "strengthened":
        opts = [hull_optimizer(blk, cap) for blk in instance.blocks]
    else:
        raise ValueError(f"unknown relaxation {relaxation!r}")
    return DualProblem(opts, [blk.A for blk in instance.blocks],
                       [blk.c for blk in instance.blocks], instance.b0, counters)


def solve_lp(instance, relaxation: str = "standard", counters: Counters | None = None,
             cap: int = 10**6, optimizers: Sequence | None = None) -> VertexSolution:
    """Optimal vertex solution of the standard or strengthened relaxation, exactly.

    Raises :class:`Infeasible` when the relaxation has no feasible point.
    """
    if optimizers is not None:
        problem = DualProblem(optimizers, [blk.A for blk in instance.blocks],
                              [blk.c for blk in instance.blocks], instance.b0, counters)
    else:
        problem = _problem_for(instance, relaxation, counters, cap)
    try:
        dual = run_local(solve_restricted_dual(problem))
    except Unbounded:
        raise Infeasible("linking rows cannot be met") from None
    problem.counters.vertices_collected += len(dual.vertices)
    dual_value = dual.value.const if isinstance(dual.value, Affine) else rat(dual.value)
    _, x, value, support = solve_master_lp(problem, dual.vertices)
    if value != dual_value:
        raise AssertionError(f"duality gap: dual {dual_value} vs master {value}")
    x, support = crossover_to_vertex(x, support, problem.c, problem.A)
    primal = problem.cost(x)
    if primal != value:
        raise AssertionError("crossover changed the objective")
    if problem.linking(x) != problem.b0:
        raise AssertionError("crossover broke the linking rows")
    return VertexSolution(x=x, value=value, support=support, dual_value=dual_value, lam=dual.lam)


def lagrangian_block_optimizer(optimizers: Sequence, A: Sequence, sizes: Sequence, b0: Sequence,
                               counters: Counters | None = None):
    """Factory turning a block-structured LP into a block optimizer for an enclosing level.

    The returned callable takes objective forms (one per variable, blocks
    concatenated) and yields a generator that returns an optimal point of
    the nested LP, flattened.
    """
    def factory(objective):
        objective = list(objective)
        c, pos = [], 0
        for sz in sizes:
            c.append(objective[pos:pos + sz])
            pos += sz
        problem = DualProblem(optimizers, A, c, b0, counters)
        return _nested(problem)

    return factory


def _nested(problem: DualProblem):
    try:
        dual = yield from solve_restricted_dual(problem)
    except Unbounded:
        raise Infeasible("nested linking rows cannot be met") from None
    problem.counters.vertices_collected += len(dual.vertices)
    x = yield from master_lp_symbolic(problem, dual.vertices)
    return tuple(v for xi in x for v in xi)
