"""Command line front end.

Exit codes: 0 ok, 2 infeasible, 3 enumeration cap or radius too small, 4 bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .blocks import ENUM_CAP, CapExceeded
from .bruteforce import verify_bruteforce
from .exactnum import format_rat
from .instance import (SchemaError, gen_prop1, gen_random, parse_instance, serialize_instance,
                       sweep_dims)
from .lagrangian import Infeasible
from .oracle import Counters
from .pipeline import point_json, report_stats, solve_ip, solve_relaxation
from .proximity import (graver_bound_base, graver_bound_compose, graver_bound_treedepth,
                        proximity_bound)
from .rounding import DPInfeasible, RadiusTooSmall
from .treedepth import StructureError, gen_treedepth

EXIT_OK, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_SCHEMA = 0, 2, 3, 4


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _fmt(v):
    return None if v is None else format_rat(v)


def cmd_solve_lp(args):
    inst = parse_instance(_read(args.instance))
    counters = Counters()
    sol = solve_relaxation(inst, args.relaxation, counters, args.enum_cap)
    out = {"value": format_rat(sol.value), "x": point_json(sol.x),
           "fractional_blocks": sol.fractional_blocks}
    if args.stats:
        out["counters"] = json.loads(report_stats(counters))
    _emit(out)


def cmd_solve_ip(args):
    inst = parse_instance(_read(args.instance))
    counters = Counters()
    res = solve_ip(inst, args.radius, args.block_engine, args.enum_cap, counters, args.workers)
    out = {"value": format_rat(res.value), "z": point_json(res.z), "radius_used": str(res.radius)}
    if args.stats:
        out["counters"] = json.loads(report_stats(counters))
    _emit(out)


def cmd_verify(args):
    inst = parse_instance(_read(args.instance))
    ref = verify_bruteforce(inst, args.enum_cap)
    _emit({"ip": _fmt(ref.ip), "lp_standard": _fmt(ref.lp_standard),
           "lp_strengthened": _fmt(ref.lp_strengthened),
           "ip_witness": None if ref.ip_witness is None else point_json(ref.ip_witness)})


def cmd_bounds(args):
    G = args.G if args.G is not None else graver_bound_base(args.s, args.delta)
    prox = proximity_bound(args.r, args.delta, G)
    out = {
        "graver_base": graver_bound_base(args.s, args.delta),
        "G": G,
        "graver_compose": graver_bound_compose(G, args.r, args.delta),
        "proximity_P": prox.P,
        "proximity_rho": prox.rho,
        "dp_window": prox.window(),
    }
    if args.treedepth is not None:
        out["graver_treedepth"] = graver_bound_treedepth(args.treedepth, args.delta)
    _emit(out)


def cmd_gen_prop1(args):
    sys.stdout.write(serialize_instance(gen_prop1(args.n, args.eps)))


def cmd_gen_random(args):
    d = sweep_dims(args.seed)
    pick = lambda v, default: default if v is None else v
    inst = gen_random(args.seed, pick(args.n, d.n), pick(args.t, d.t), pick(args.s, d.s),
                      pick(args.r, d.r), pick(args.delta, d.delta), pick(args.u_max, d.u_max))
    sys.stdout.write(serialize_instance(inst))


def cmd_gen_treedepth(args):
    sys.stdout.write(serialize_instance(gen_treedepth(args.seed)))


def cmd_megiddo_bench(args):
    from .megiddo import bench

    out = bench(args.r, args.m, args.seed)
    if args.plot:
        from .report import megiddo_runs, megiddo_summary, plot_megiddo, to_csv, write_csv

        os.makedirs(args.plot, exist_ok=True)
        top = max(6, args.m.bit_length() - 1)
        runs = megiddo_runs([args.r], range(2, top + 1), [args.seed], args.workers)
        summary = megiddo_summary(runs)
        write_csv(summary, os.path.join(args.plot, "megiddo_bench.csv"))
        plot_megiddo(summary, os.path.join(args.plot, "megiddo_bench.png"))
        sys.stderr.write(to_csv(summary))
    _emit(out)


def cmd_report(args):
    from .report import make_report, to_csv

    res = make_report(args.out, seeds=range(args.seeds), max_exp=args.max_exp,
                      workers=args.workers)
    sys.stdout.write(to_csv(res["summary"]))
    sys.stdout.write("\n")
    sys.stdout.write(to_csv(res["far_family"]))
    for name, path in sorted(res["paths"].items()):
        sys.stderr.write(f"wrote {name}: {path}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--stats", action="store_true", help="include operation counters")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--enum-cap", type=int, default=ENUM_CAP, help="enumeration cap")
    common.add_argument("--radius", default="auto", help="rounding radius: auto or an integer")
    common.add_argument("--block-engine", choices=("bruteforce", "prefix-dp"),
                        default="bruteforce")

    p = argparse.ArgumentParser(prog="blockip", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-lp", parents=[common], help="solve an LP relaxation")
    s.add_argument("instance")
    s.add_argument("--relaxation", choices=("standard", "strengthened"), default="standard")
    s.set_defaults(func=cmd_solve_lp)

    s = sub.add_parser("solve-ip", parents=[common], help="solve the integer program")
    s.add_argument("instance")
    s.set_defaults(func=cmd_solve_ip)

    s = sub.add_parser("verify", parents=[common], help="brute-force reference values")
    s.add_argument("instance")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bounds", parents=[common], help="print Graver and proximity bounds")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--s", type=int, default=0)
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--G", type=int, default=None, help="use this Graver bound instead of the base one")
    s.add_argument("--treedepth", type=int, default=None)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("gen-prop1", parents=[common], help="emit the far-from-integral family")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--eps", default="1/10")
    s.set_defaults(func=cmd_gen_prop1)

    s = sub.add_parser("gen-random", parents=[common], help="emit a random planted instance")
    s.add_argument("--seed", type=int, required=True)
    for name in ("n", "t", "s", "r", "delta", "u-max"):
        s.add_argument(f"--{name}", type=int, default=None)
    s.set_defaults(func=cmd_gen_random)

    s = sub.add_parser("gen-treedepth", parents=[common], help="emit a random depth-2 instance")
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_gen_treedepth)

    s = sub.add_parser("megiddo-bench", parents=[common], help="hidden-point search benchmark")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--plot", default=None, metavar="DIR",
                   help="also write a CSV and PNG of queries vs m into DIR")
    s.set_defaults(func=cmd_megiddo_bench)

    s = sub.add_parser("report", parents=[common], help="write CSV tables and PNG figures")
    s.add_argument("--out", required=True, metavar="DIR")
    s.add_argument("--seeds", type=int, default=5)
    s.add_argument("--max-exp", type=int, default=10)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (SchemaError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (Infeasible, DPInfeasible) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CapExceeded, RadiusTooSmall) as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
