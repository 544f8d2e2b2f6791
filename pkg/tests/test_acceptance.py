"""The ten acceptance criteria, each checked exactly and reported as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py``; the lines are repeated in the
terminal summary under "acceptance criteria".
"""
import json
import time

import pytest

from blockip.blocks import block_hull_vertices, in_convex_hull
from blockip.bruteforce import verify_bruteforce
from blockip.exactnum import format_rat, rat
from blockip.instance import gen_prop1, prop1_integer_optimum, sweep_instance
from blockip.lagrangian import solve_lp
from blockip.oracle import Counters
from blockip.pipeline import point_json, solve_ip, solve_relaxation
from blockip.proximity import graver_bound_base, measure_proximity, proximity_bound
from blockip.report import growth_check, megiddo_runs
from blockip.rounding import validate_radius
from blockip.treedepth import gen_treedepth

from conftest import record

SEEDS = range(200)


def _sweep_case(seed, workers=1):
    inst = sweep_instance(seed)
    ref = verify_bruteforce(inst)
    std = solve_lp(inst, "standard")
    stg = solve_lp(inst, "strengthened")
    _, need = validate_radius(inst, stg.x, 0)
    ip = solve_ip(inst, need, workers=workers)
    return {"seed": seed, "inst": inst, "ref": ref, "std": std, "stg": stg, "need": need, "ip": ip}


def _output_text(case) -> str:
    """Everything criteria 1-2 print for one instance."""
    return json.dumps({
        "seed": case["seed"],
        "lp_standard": format_rat(case["std"].value), "x_standard": point_json(case["std"].x),
        "lp_strengthened": format_rat(case["stg"].value), "x_strengthened": point_json(case["stg"].x),
        "ip": format_rat(case["ip"].value), "z": point_json(case["ip"].z),
        "radius": str(case["ip"].radius),
    }, sort_keys=True)


@pytest.fixture(scope="module")
def sweep():
    start = time.perf_counter()
    cases = [_sweep_case(s) for s in SEEDS]
    return cases, time.perf_counter() - start


def test_criterion_01_lp_oracle(sweep):
    cases, secs = sweep
    bad = [c["seed"] for c in cases
           if c["std"].value != c["ref"].lp_standard or c["stg"].value != c["ref"].lp_strengthened]
    ok = not bad and secs <= 600
    record(1, ok, f"LP values equal brute force on {len(cases) - len(bad)}/{len(cases)} "
                  f"instances ({secs:.1f}s for the sweep)")
    assert ok, bad


def test_criterion_02_ip_oracle(sweep):
    cases, _ = sweep
    bad = [c["seed"] for c in cases
           if c["ip"].value != c["ref"].ip or not c["inst"].is_feasible(c["ip"].z)]
    worst = max(c["need"] for c in cases)
    record(2, not bad, f"IP values equal brute force on {len(cases) - len(bad)}/{len(cases)} "
                       f"instances, z feasible; validated radii <= {worst}")
    assert not bad, bad


def test_criterion_03_proximity(sweep):
    cases, _ = sweep
    bad, worst = [], 0
    for c in cases:
        inst = c["inst"]
        delta = max(inst.delta, 1)
        P = proximity_bound(inst.r, delta, graver_bound_base(inst.s, delta)).P
        dist, _ = measure_proximity(inst, c["stg"].x)
        worst = max(worst, dist)
        if dist > P:
            bad.append(c["seed"])
    record(3, not bad, f"{len(bad)} violations of the proximity bound; "
                       f"largest measured l1 distance {format_rat(worst)}")
    assert not bad, bad


def test_criterion_04_far_from_integral_family():
    rows, ok = [], True
    for n in (3, 5, 9):
        inst = gen_prop1(n, "1/10")
        ref = verify_bruteforce(inst)
        std = solve_lp(inst, "standard")
        stg = solve_lp(inst, "strengthened")
        coord2 = abs(std.x[-1][1] - ref.ip_witness[-1][1])
        good = (coord2 == n - 1 and stg.value == ref.ip and ref.ip_witness == prop1_integer_optimum(n))
        ok &= good
        rows.append(f"n={n}: dist={format_rat(coord2)} gap={format_rat(stg.value - ref.ip)}")
    record(4, ok, "; ".join(rows))
    assert ok


def test_criterion_05_strong_duality(sweep):
    cases, _ = sweep
    bad = []
    for c in cases:
        inst = c["inst"]
        for sol in (c["std"], c["stg"]):
            if not (sol.dual_value == sol.value == inst.value(sol.x)):
                bad.append(c["seed"])
    for n in (3, 5, 9):
        for rel in ("standard", "strengthened"):
            sol = solve_lp(gen_prop1(n), rel)
            if not sol.dual_value == sol.value == gen_prop1(n).value(sol.x):
                bad.append(("far family", n, rel))
    record(5, not bad, f"dual = master = primal on {2 * len(cases) + 6} LP solves, "
                       f"{len(bad)} mismatches")
    assert not bad, bad


@pytest.mark.slow
def test_criterion_06_search_growth():
    start = time.perf_counter()
    runs = megiddo_runs((1, 2, 3), range(6, 13), range(20), workers=4)
    secs = time.perf_counter() - start
    correct = all(row["correct"] for row in runs)
    checks = [growth_check(runs, r) for r in (1, 2, 3)]
    ok = correct and all(ch["ok"] for ch in checks) and secs <= 300
    parts = [f"r={ch['r']}: C={ch['C']} worst mean increment={ch['worst']:.2f}"
             f" {'ok' if ch['ok'] else 'EXCEEDS'}" for ch in checks]
    record(6, ok, f"orientations {'all correct' if correct else 'WRONG'}; " + "; ".join(parts)
           + f" ({secs:.0f}s)")
    assert correct
    assert ok, checks


def _in_relaxation(blk, xi, relaxation):
    if relaxation == "standard":
        return blk.is_feasible_point(xi)
    return in_convex_hull(xi, block_hull_vertices(blk.B, blk.b, blk.u))


def test_criterion_07_crossover(sweep):
    cases, _ = sweep
    bad = []
    for c in cases:
        inst = c["inst"]
        for rel in ("standard", "strengthened"):
            sol = c["std"] if rel == "standard" else c["stg"]
            feasible = (inst.linking(sol.x) == tuple(rat(v) for v in inst.b0)
                        and all(_in_relaxation(b, x, rel) for b, x in zip(inst.blocks, sol.x)))
            if len(sol.fractional_blocks) > inst.r or inst.value(sol.x) != sol.value or not feasible:
                bad.append((c["seed"], rel))
    record(7, not bad, f"<= r non-vertex blocks, same objective, exact feasibility on "
                       f"{2 * len(cases) - len(bad)}/{2 * len(cases)} solutions")
    assert not bad, bad


def test_criterion_08_bounds_cli(capsys):
    from blockip.cli import main

    assert main(["bounds", "--r", "1", "--s", "0", "--delta", "1", "--G", "1", "--treedepth", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    got = (data["graver_compose"], data["graver_treedepth"], data["proximity_P"])
    ok = got == (3, 27, 244)
    record(8, ok, f"compose(1,1,1)={got[0]} treedepth(2,1)={got[1]} proximity(1,1,1).P={got[2]}")
    assert ok


def test_criterion_09_determinism(sweep):
    cases, _ = sweep
    serial = [_output_text(c) for c in cases]
    parallel = [_output_text(_sweep_case(s, workers=4)) for s in SEEDS]
    diff = [s for s, a, b in zip(SEEDS, serial, parallel) if a != b]
    record(9, not diff, f"criteria 1-2 outputs identical for workers 1 and 4 on "
                        f"{len(SEEDS) - len(diff)}/{len(SEEDS)} instances")
    assert not diff, diff


def test_criterion_10_treedepth():
    bad = []
    for seed in range(20):
        inst = gen_treedepth(seed)
        ref = verify_bruteforce(inst)
        cnt = Counters()
        lp = solve_relaxation(inst, "standard", cnt)
        stg = solve_lp(inst, "strengthened")
        _, need = validate_radius(inst, stg.x, 0)
        ip = solve_ip(inst, need)
        if (lp.value != ref.lp_standard or stg.value != ref.lp_strengthened
                or ip.value != ref.ip or not inst.is_feasible(ip.z)):
            bad.append(seed)
    record(10, not bad, f"nested LP and IP equal brute force on {20 - len(bad)}/20 depth-2 instances")
    assert not bad, bad
