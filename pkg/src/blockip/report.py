"""Experiment tables and figures: search query growth and the far-from-integral family.

Tables are lists of dicts; ``write_csv`` writes them and ``plot_*`` renders
PNG files with matplotlib (Agg backend, no display needed).
"""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from statistics import mean

from .bruteforce import nearest_optimal, verify_bruteforce
from .exactnum import format_rat
from .instance import gen_prop1, prop1_integer_optimum
from .lagrangian import solve_lp
from .megiddo import bench


def _bench_task(args):
    r, m, seed = args
    out = bench(r, m, seed)
    return {"r": r, "m": m, "seed": seed, "queries": out["queries"], "correct": out["correct"]}


def megiddo_runs(rs, exps, seeds, workers: int = 1) -> list:
    tasks = [(r, 2 ** e, s) for r in rs for e in exps for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_bench_task, tasks, chunksize=4))
    return [_bench_task(t) for t in tasks]


def megiddo_summary(runs: list) -> list:
    groups: dict = {}
    for row in runs:
        groups.setdefault((row["r"], row["m"]), []).append(row)
    out = []
    for (r, m), rows in sorted(groups.items()):
        qs = [row["queries"] for row in rows]
        out.append({"r": r, "m": m, "mean_queries": round(mean(qs), 3), "max_queries": max(qs),
                    "all_correct": all(row["correct"] for row in rows)})
    return out


def growth_check(runs: list, r: int) -> dict:
    """Log-additive growth test for one dimension.

    ``C`` is the largest per-seed increment from ``m = 64`` to ``m = 128``;
    each later doubling must raise the mean query count by at most ``C``.
    """
    by_m: dict = {}
    for row in runs:
        if row["r"] == r:
            by_m.setdefault(row["m"], {})[row["seed"]] = row["queries"]
    ms = sorted(by_m)
    base, nxt = by_m[64], by_m[128]
    C = max(nxt[s] - base[s] for s in base)
    incs = []
    for m in ms:
        if 2 * m in by_m:
            incs.append((m, mean(by_m[2 * m].values()) - mean(by_m[m].values())))
    worst = max(v for _, v in incs)
    return {"r": r, "C": C, "increments": incs, "worst": worst, "ok": worst <= C}


def prop1_rows(ns=(3, 5, 9), eps="1/10") -> list:
    rows = []
    for n in ns:
        inst = gen_prop1(n, eps)
        ref = verify_bruteforce(inst)
        std = solve_lp(inst, "standard")
        stg = solve_lp(inst, "strengthened")
        z = prop1_integer_optimum(n)
        _, _, linf = nearest_optimal(inst, std.x, "linf")
        coord2 = abs(std.x[-1][1] - ref.ip_witness[-1][1])
        rows.append({
            "n": n,
            "lp_standard": format_rat(std.value),
            "lp_strengthened": format_rat(stg.value),
            "ip": format_rat(ref.ip),
            "ip_matches_closed_form": ref.ip_witness == z,
            "block_n_coord2_distance": format_rat(coord2),
            "linf_distance": format_rat(linf),
            "strengthened_gap": format_rat(stg.value - ref.ip),
        })
    return rows


def to_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def write_csv(rows: list, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(to_csv(rows))


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_megiddo(summary: list, path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for r in sorted({row["r"] for row in summary}):
        pts = [(row["m"], row["mean_queries"]) for row in summary if row["r"] == r]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"r = {r}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("hyperplanes m")
    ax.set_ylabel("mean point queries")
    ax.set_title("Multidimensional search: queries vs m")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_prop1(rows: list, path: str) -> None:
    from .exactnum import rat

    plt = _pyplot()
    ns = [row["n"] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, [float(rat(row["block_n_coord2_distance"])) for row in rows], marker="o",
            label="standard LP, block n coord 2")
    ax.plot(ns, [float(rat(row["linf_distance"])) for row in rows], marker="s",
            label="standard LP, sup norm")
    ax.plot(ns, [float(rat(row["strengthened_gap"])) for row in rows], marker="^",
            label="strengthened LP - IP value")
    ax.set_xlabel("blocks n")
    ax.set_ylabel("distance / gap")
    ax.set_title("Standard vs strengthened relaxation")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def make_report(out_dir: str, seeds=range(5), max_exp: int = 10, rs=(1, 2, 3),
                ns=(3, 5, 9), workers: int = 1) -> dict:
    """Write CSV tables and PNG figures into ``out_dir``; return the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    runs = megiddo_runs(rs, range(6, max_exp + 1), list(seeds), workers)
    summary = megiddo_summary(runs)
    prop = prop1_rows(ns)
    paths = {
        "megiddo_runs": os.path.join(out_dir, "megiddo_runs.csv"),
        "megiddo_summary": os.path.join(out_dir, "megiddo_summary.csv"),
        "megiddo_plot": os.path.join(out_dir, "megiddo_queries.png"),
        "far_table": os.path.join(out_dir, "far_family.csv"),
        "far_plot": os.path.join(out_dir, "far_family.png"),
    }
    write_csv(runs, paths["megiddo_runs"])
    write_csv(summary, paths["megiddo_summary"])
    plot_megiddo(summary, paths["megiddo_plot"])
    write_csv(prop, paths["far_table"])
    plot_prop1(prop, paths["far_plot"])
    return {"paths": paths, "summary": summary, "far_family": prop}
