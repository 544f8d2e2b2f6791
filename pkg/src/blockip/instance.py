"""Instance model, JSON format and generators for block-structured programs.

An instance is ``max sum_i c_i x_i`` subject to ``sum_i A_i x_i = b0`` and,
per block, ``B_i x_i = b_i``, ``0 <= x_i <= u_i``.  The JSON layout::

    {"r": 1, "b0": [-6], "eps_obj": "1/10",
     "blocks": [{"t": 2, "A": [[1, 1]], "B": [[2, 3]], "b": [3], "u": [9, 18],
                 "c": ["21/10", "29/10"]}, ...],
     "tree": {...}}

Rationals are written as ``"p"`` or ``"p/q"`` strings.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .blocks import BlockProblem
from .exactnum import format_rat, rat


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class LinkedInstance:
    r: int
    b0: tuple
    blocks: list
    eps_obj: object = None
    tree: dict | None = None

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def delta(self) -> int:
        return max((blk.delta for blk in self.blocks), default=0)

    @property
    def s(self) -> int:
        return max((blk.s for blk in self.blocks), default=0)

    def value(self, x) -> object:
        return sum((blk.value(xi) for blk, xi in zip(self.blocks, x)), rat(0))

    def linking(self, x) -> tuple:
        acc = [rat(0)] * self.r
        for blk, xi in zip(self.blocks, x):
            for j, v in enumerate(blk.linking(xi)):
                acc[j] += v
        return tuple(acc)

    def is_feasible(self, x) -> bool:
        if len(x) != self.n:
            return False
        if not all(blk.is_feasible_point(xi) for blk, xi in zip(self.blocks, x)):
            return False
        return self.linking(x) == tuple(rat(v) for v in self.b0)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {value!r}")
    return value


def _int_list(value, path, length=None):
    if not isinstance(value, list):
        raise SchemaError(path, "expected a list")
    if length is not None and len(value) != length:
        raise SchemaError(path, f"expected {length} entries, got {len(value)}")
    return tuple(_int(v, f"{path}[{k}]") for k, v in enumerate(value))


def _matrix(value, path, rows, cols):
    if not isinstance(value, list):
        raise SchemaError(path, "expected a list of rows")
    if rows is not None and len(value) != rows:
        raise SchemaError(path, f"expected {rows} rows, got {len(value)}")
    return tuple(_int_list(row, f"{path}[{k}]", cols) for k, row in enumerate(value))


def _rational(value, path):
    if isinstance(value, bool) or isinstance(value, float):
        raise SchemaError(path, f"expected an integer or 'p/q' string, got {value!r}")
    try:
        return rat(value)
    except (ValueError, TypeError) as exc:
        raise SchemaError(path, str(exc)) from None


def instance_from_dict(doc) -> LinkedInstance:
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    for key in ("r", "b0", "blocks"):
        if key not in doc:
            raise SchemaError(f"$.{key}", "missing")
    r = _int(doc["r"], "$.r")
    if r < 0:
        raise SchemaError("$.r", "must be nonnegative")
    b0 = _int_list(doc["b0"], "$.b0", r)
    if not isinstance(doc["blocks"], list):
        raise SchemaError("$.blocks", "expected a list")
    blocks = []
    for i, bd in enumerate(doc["blocks"]):
        p = f"$.blocks[{i}]"
        if not isinstance(bd, dict):
            raise SchemaError(p, "expected an object")
        for key in ("t", "A", "B", "b", "u", "c"):
            if key not in bd:
                raise SchemaError(f"{p}.{key}", "missing")
        t = _int(bd["t"], f"{p}.t")
        if t < 0:
            raise SchemaError(f"{p}.t", "must be nonnegative")
        if not isinstance(bd["u"], list) or len(bd["u"]) != t:
            raise SchemaError(f"{p}.u", f"expected {t} finite bounds")
        u = []
        for k, v in enumerate(bd["u"]):
            if isinstance(v, str) or isinstance(v, float):
                raise SchemaError(f"{p}.u[{k}]", f"bounds must be finite integers, got {v!r}")
            u.append(_int(v, f"{p}.u[{k}]"))
            if u[-1] < 0:
                raise SchemaError(f"{p}.u[{k}]", "must be nonnegative")
        A = _matrix(bd["A"], f"{p}.A", r, t)
        B = _matrix(bd["B"], f"{p}.B", None, t)
        b = _int_list(bd["b"], f"{p}.b", len(B))
        if not isinstance(bd["c"], list) or len(bd["c"]) != t:
            raise SchemaError(f"{p}.c", f"expected {t} entries")
        c = tuple(_rational(v, f"{p}.c[{k}]") for k, v in enumerate(bd["c"]))
        blocks.append(BlockProblem(A=A, B=B, b=b, u=tuple(u), c=c))
    eps = doc.get("eps_obj")
    if eps is not None:
        eps = _rational(eps, "$.eps_obj")
    tree = doc.get("tree")
    if tree is not None and not isinstance(tree, dict):
        raise SchemaError("$.tree", "expected an object")
    return LinkedInstance(r=r, b0=b0, blocks=blocks, eps_obj=eps, tree=tree)


def parse_instance(text: str) -> LinkedInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def instance_to_dict(inst: LinkedInstance) -> dict:
    doc = {"r": inst.r, "b0": [int(v) for v in inst.b0]}
    if inst.eps_obj is not None:
        doc["eps_obj"] = format_rat(inst.eps_obj)
    doc["blocks"] = [
        {
            "t": blk.t,
            "A": [list(map(int, row)) for row in blk.A],
            "B": [list(map(int, row)) for row in blk.B],
            "b": [int(v) for v in blk.b],
            "u": [int(v) for v in blk.u],
            "c": [format_rat(v) for v in blk.c],
        }
        for blk in inst.blocks
    ]
    if inst.tree is not None:
        doc["tree"] = inst.tree
    return doc


def serialize_instance(inst: LinkedInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_prop1(n: int, eps_obj="1/10") -> LinkedInstance:
    """The family where the standard LP optimum sits far from every integer optimum.

    Blocks ``1..n-1``: ``2 x1 + 3 x2 = 3``; block ``n``: ``2 x1 + 3 x2 = 6n``;
    objective ``(2 + eps) x1 + (3 - eps) x2``; one linking row
    ``sum_{i<n} (x1 + x2) - (x1 + x2)^(n) = 3(n-1)/2 - 3n``.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be odd and at least 3")
    eps = rat(eps_obj)
    c = (2 + eps, 3 - eps)
    u = (3 * n, 6 * n)
    blocks = [BlockProblem(A=((1, 1),), B=((2, 3),), b=(3,), u=u, c=c) for _ in range(n - 1)]
    blocks.append(BlockProblem(A=((-1, -1),), B=((2, 3),), b=(6 * n,), u=u, c=c))
    rhs = 3 * (n - 1) // 2 - 3 * n
    return LinkedInstance(r=1, b0=(rhs,), blocks=blocks, eps_obj=eps)


def prop1_integer_optimum(n: int) -> list:
    """The closed-form integer optimum of :func:`gen_prop1`."""
    big = (rat(3 * n - 3 * (n - 1) // 2), rat(n - 1))
    return [(rat(0), rat(1))] * (n - 1) + [big]


def gen_random(seed: int, n: int, t: int, s: int, r: int, delta: int, u_max: int,
               c_max: int = 5) -> LinkedInstance:
    """Random instance with a planted integer solution (so every block and the IP are feasible)."""
    rng = random.Random(seed)

    def entry():
        return rng.randint(-delta, delta)

    blocks = []
    planted = []
    for _ in range(n):
        u = tuple(rng.randint(0, u_max) for _ in range(t))
        x = tuple(rng.randint(0, ub) for ub in u)
        A = tuple(tuple(entry() for _ in range(t)) for _ in range(r))
        B = tuple(tuple(entry() for _ in range(t)) for _ in range(s))
        b = tuple(sum(a * v for a, v in zip(row, x)) for row in B)
        c = tuple(rat(rng.randint(-c_max, c_max)) for _ in range(t))
        blocks.append(BlockProblem(A=A, B=B, b=b, u=u, c=c))
        planted.append(x)
    b0 = tuple(sum(sum(a * v for a, v in zip(blk.A[j], x)) for blk, x in zip(blocks, planted))
               for j in range(r))
    return LinkedInstance(r=r, b0=b0, blocks=blocks)


@dataclass(frozen=True)
class SweepDims:
    n: int
    t: int
    s: int
    r: int
    delta: int
    u_max: int


def sweep_dims(seed: int) -> SweepDims:
    """Dimensions of sweep instance ``seed`` (n <= 6, t <= 3, s <= 2, r <= 2, delta <= 2, u <= 3)."""
    rng = random.Random(10_007 * seed + 1)
    return SweepDims(n=rng.randint(1, 6), t=rng.randint(1, 3), s=rng.randint(0, 2),
                     r=rng.randint(0, 2), delta=rng.randint(1, 2), u_max=rng.randint(1, 3))


def sweep_instance(seed: int) -> LinkedInstance:
    d = sweep_dims(seed)
    return gen_random(seed, d.n, d.t, d.s, d.r, d.delta, d.u_max)
