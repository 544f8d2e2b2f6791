"""End-to-end solve: strengthened LP vertex, then proximity-window rounding."""
from __future__ import annotations

import json
from dataclasses import dataclass

from .blocks import ENUM_CAP
from .exactnum import format_rat
from .lagrangian import VertexSolution, solve_lp
from .oracle import Counters
from .proximity import instance_bounds
from .rounding import dp_round
from .treedepth import assemble_treedepth

STAT_KEYS = ("total_ops", "lambda_queries", "objective_queries", "parallel_rounds",
             "block_steps", "vertices_collected", "dp_states")


@dataclass
class IPResult:
    value: object
    z: list
    radius: object
    lp: VertexSolution


def solve_relaxation(inst, relaxation: str, counters: Counters | None = None,
                     cap: int = ENUM_CAP) -> VertexSolution:
    """``solve_lp`` that honours a nested (treedepth) structure for the standard relaxation."""
    if inst.tree and relaxation == "standard":
        asm = assemble_treedepth(inst, counters)
        return solve_lp(inst, relaxation, counters, cap, optimizers=asm.lp_optimizers)
    return solve_lp(inst, relaxation, counters, cap)


def resolve_radius(inst, radius) -> int:
    if radius in (None, "auto"):
        return instance_bounds(inst)["window"]
    radius = int(radius)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return radius


def solve_ip(inst, radius="auto", engine: str = "bruteforce", cap: int = ENUM_CAP,
             counters: Counters | None = None, workers: int = 1) -> IPResult:
    """Integer optimum: strengthened LP vertex, crossover, then the rounding DP."""
    counters = counters if counters is not None else Counters()
    lp = solve_lp(inst, "strengthened", counters, cap)
    rho = resolve_radius(inst, radius)
    res = dp_round(inst, lp.x, rho, engine, cap, counters, workers)
    return IPResult(value=res.value, z=res.z, radius=rho, lp=lp)


def report_stats(counters: Counters, context: dict | None = None) -> str:
    """Flat JSON with the fixed counter keys (plus optional context fields)."""
    data = {k: getattr(counters, k) for k in STAT_KEYS}
    if context:
        for k, v in context.items():
            data.setdefault(k, v)
    return json.dumps(data, sort_keys=True)


def point_json(x) -> list:
    return [[format_rat(v) for v in xi] for xi in x]
