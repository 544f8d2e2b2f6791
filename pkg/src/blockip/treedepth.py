"""Nested block structure: blocks whose own rows split again into linking rows and sub-blocks.

A block may carry a tree node describing its inner structure::

    {"rows": [0],                       # rows of the block's B that link its children
     "children": [{"columns": [0, 1]},  # leaf: plain sub-block on these columns
                  {"columns": [2, 3]}]}

A child may itself be ``{"rows": [...], "children": [...]}`` (its columns are
the union of its children's).  Every other row of ``B`` must touch the
columns of exactly one child.  For the LP, a nested block is optimized by a
Lagrangian solver of its own, so one level of linking rows is peeled off per
depth.  Integer hulls and the rounding DP treat nested blocks as ordinary
blocks.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .blocks import BlockProblem, lp_optimizer
from .exactnum import rat
from .instance import LinkedInstance
from .lagrangian import lagrangian_block_optimizer
from .proximity import graver_bound_compose, graver_bound_treedepth


class StructureError(ValueError):
    pass


@dataclass
class Assembly:
    instance: LinkedInstance
    lp_optimizers: list
    depth: int
    graver_levels: list

    @property
    def graver_treedepth(self) -> int:
        return graver_bound_treedepth(max(self.depth, 1), max(self.instance.delta, 1))


def _columns(node) -> list:
    if "columns" in node and "children" not in node:
        return list(node["columns"])
    return [c for ch in node.get("children", []) for c in _columns(ch)]


def _node_depth(node) -> int:
    if "children" not in node:
        return 0
    return 1 + max((_node_depth(ch) for ch in node["children"]), default=0)


def _split_block(blk: BlockProblem, node: dict, path: str):
    """Child blocks of ``blk`` (on re-indexed columns) and the permutation used."""
    t = blk.t
    link_rows = list(node.get("rows", []))
    if any(not 0 <= j < blk.s for j in link_rows) or len(set(link_rows)) != len(link_rows):
        raise StructureError(f"{path}: bad linking row indices {link_rows}")
    children = node.get("children", [])
    col_sets = [_columns(ch) for ch in children]
    flat = [c for cs in col_sets for c in cs]
    if sorted(flat) != list(range(t)):
        raise StructureError(f"{path}: children columns do not partition 0..{t - 1}")
    owner = {c: k for k, cs in enumerate(col_sets) for c in cs}
    rows_of = [[] for _ in children]
    for j in range(blk.s):
        if j in link_rows:
            continue
        touched = {owner[c] for c, a in enumerate(blk.B[j]) if a}
        if len(touched) > 1:
            raise StructureError(f"{path}: row {j} spans several children")
        rows_of[touched.pop() if touched else 0].append(j)
    subs = []
    for k, (ch, cs) in enumerate(zip(children, col_sets)):
        pick = lambda row, cs=cs: tuple(row[c] for c in cs)
        sub = BlockProblem(
            A=tuple(pick(blk.B[j]) for j in link_rows),
            B=tuple(pick(blk.B[j]) for j in rows_of[k]),
            b=tuple(blk.b[j] for j in rows_of[k]),
            u=tuple(blk.u[c] for c in cs),
            c=tuple(blk.c[c] for c in cs),
        )
        subs.append((sub, ch, cs))
    b_link = tuple(blk.b[j] for j in link_rows)
    return subs, b_link, flat


def _optimizer_for(blk: BlockProblem, node, path: str, counters=None):
    if node is None or "children" not in node:
        if node is not None and sorted(node.get("columns", range(blk.t))) != list(range(blk.t)):
            raise StructureError(f"{path}: leaf columns do not cover the block")
        return lp_optimizer(blk)
    subs, b_link, order = _split_block(blk, node, path)
    child_opts = [_optimizer_for(sub, ch if "children" in ch else None, f"{path}.children[{k}]",
                                 counters)
                  for k, (sub, ch, _) in enumerate(subs)]
    inner = lagrangian_block_optimizer(child_opts, [s.A for s, _, _ in subs],
                                       [s.t for s, _, _ in subs], b_link, counters)
    inverse = [0] * len(order)
    for pos, col in enumerate(order):
        inverse[col] = pos

    def factory(objective):
        objective = list(objective)
        return _reorder(inner([objective[c] for c in order]), inverse)

    return factory


def _reorder(gen, inverse):
    point = yield from gen
    return tuple(point[inverse[c]] for c in range(len(inverse)))


def assemble_treedepth(inst: LinkedInstance, counters=None) -> Assembly:
    """Per-block LP optimizers following the instance's tree (plain blocks when absent)."""
    tree = inst.tree or {}
    nodes = tree.get("blocks", [None] * inst.n)
    if len(nodes) != inst.n:
        raise StructureError("tree.blocks must list one entry (or null) per block")
    opts = []
    depth = 1 if inst.r else 0
    for i, (blk, node) in enumerate(zip(inst.blocks, nodes)):
        opts.append(_optimizer_for(blk, node, f"tree.blocks[{i}]", counters))
        if node is not None:
            depth = max(depth, 1 + _node_depth(node))
    delta = max(inst.delta, 1)
    levels = [graver_bound_treedepth(1, delta)]
    for _ in range(1, max(depth, 1)):
        levels.append(graver_bound_compose(levels[-1], 1, delta))
    return Assembly(instance=inst, lp_optimizers=opts, depth=depth, graver_levels=levels)


def gen_treedepth(seed: int, max_vars: int = 8, u_max: int = 2) -> LinkedInstance:
    """Random depth-2 instance with unit entries and a planted integer solution.

    One root linking row over two blocks; each block has one inner linking
    row over two leaf sub-blocks carrying one row each.
    """
    rng = random.Random(seed)
    blocks, nodes, planted = [], [], []
    budget = max_vars
    for _ in range(2):
        sizes = [rng.randint(1, 2), rng.randint(1, 2)]
        while sum(sizes) > budget // 2:
            sizes[sizes.index(max(sizes))] -= 1
        t = sum(sizes)
        u = tuple(rng.randint(1, u_max) for _ in range(t))
        x = tuple(rng.randint(0, ub) for ub in u)
        inner = tuple(rng.choice((-1, 0, 1)) for _ in range(t))
        rows = [inner]
        cols, start = [], 0
        for sz in sizes:
            cols.append(list(range(start, start + sz)))
            rows.append(tuple(rng.choice((-1, 0, 1)) if start <= c < start + sz else 0
                              for c in range(t)))
            start += sz
        B = tuple(rows)
        b = tuple(sum(a * v for a, v in zip(row, x)) for row in B)
        A = (tuple(rng.choice((-1, 0, 1)) for _ in range(t)),)
        c = tuple(rat(rng.randint(-3, 3)) for _ in range(t))
        blocks.append(BlockProblem(A=A, B=B, b=b, u=u, c=c))
        nodes.append({"rows": [0], "children": [{"columns": cs} for cs in cols]})
        planted.append(x)
    b0 = (sum(sum(a * v for a, v in zip(blk.A[0], x)) for blk, x in zip(blocks, planted)),)
    return LinkedInstance(r=1, b0=b0, blocks=blocks, tree={"blocks": nodes})
