"""Command-line front end.

Subcommands: bounds, region, sweep, oracle, simulate, gnuplot. All numeric
file output (CSV, JSON) carries 17 significant digits; console summaries
round to 6. Exit codes: 0 success, 1 internal self-check failure, 2 usage or
precondition error, 3 I/O error, 4 feedback-budget violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .converse import build_max_off_report
from .infotheory import ChannelSpec, FeedbackBudget, binary_entropy, outer_bound_params
from .regions import (
    SWEEP_CSV_HEADER,
    corner_points,
    global_feedback_region,
    no_feedback_region,
    outer_region,
    symmetric_sum_rate,
    sweep,
)
from .simulator import (
    BudgetViolation,
    run_distortion_converse_sweep,
    run_point_a_demo,
    run_two_phase_scheme,
)

SIM_CSV_HEADER = (
    "strategy,cfb,delta,n,trials,mean_distortion,d_star,throughput_sum,feedback_bits_per_use,seed"
)

EXIT_SELF_CHECK = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_BUDGET = 4


def _json17(obj) -> str:
    """JSON with floats at 17 significant digits, stable key order."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json17(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json17(v)}" for k, v in obj.items()) + "}"
    return _json17(float(obj))


def _csv_field(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _append_sim_csv(path: str, row: dict) -> None:
    need_header = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8") as out:
        if need_header:
            out.write(SIM_CSV_HEADER + "\n")
        out.write(",".join(_csv_field(row.get(k)) for k in SIM_CSV_HEADER.split(",")) + "\n")


def _region_by_kind(kind: str, spec: ChannelSpec, budget: FeedbackBudget):
    if kind == "outer":
        return outer_region(spec, budget)
    if kind == "global":
        return global_feedback_region(spec)
    return no_feedback_region(spec)


def cmd_bounds(args) -> int:
    spec = ChannelSpec(args.delta)
    budget = FeedbackBudget(args.cfb)
    params = outer_bound_params(spec, budget)
    region = outer_region(spec, budget)
    corners = corner_points(region)
    sum_rate = symmetric_sum_rate(region)
    if args.json:
        payload = {
            "delta": spec.delta,
            "cfb": budget.cfb,
            "d_star": params.d_star,
            "gamma_out": params.gamma_out,
            "beta_out": params.beta_out,
            "sum_rate": sum_rate,
            "region": region.to_json_dict(),
        }
        print(_json17(payload))
    else:
        print(f"delta            = {spec.delta:.6g}")
        print(f"cfb              = {budget.cfb:.6g}")
        print(f"H(delta)         = {binary_entropy(spec.delta):.6g}")
        print(f"D*               = {params.d_star:.6g}")
        print(f"gamma_out        = {params.gamma_out:.6g}")
        print(f"beta_out         = {params.beta_out:.6g}")
        for a, b, c in region.halfplanes:
            print(f"half-plane       : {a:.6g} R_F + {b:.6g} R_N <= {c:.6g}")
        for p in corners:
            print(f"corner           : ({p.r_f:.6g}, {p.r_n:.6g})")
        print(f"symmetric sum rate = {sum_rate:.6g}")
    return 0


def cmd_region(args) -> int:
    spec = ChannelSpec(args.delta)
    budget = FeedbackBudget(args.cfb)
    region = _region_by_kind(args.kind, spec, budget)
    if args.json:
        print(_json17(region.to_json_dict()))
    else:
        print(f"label: {region.label}")
        for a, b, c in region.halfplanes:
            print(f"half-plane: {a:.6g} R_F + {b:.6g} R_N <= {c:.6g}")
        for p in corner_points(region):
            print(f"corner    : ({p.r_f:.6g}, {p.r_n:.6g})")
    return 0


def cmd_sweep(args) -> int:
    spec = ChannelSpec(args.delta)
    curve = sweep(spec, args.cfb_min, args.cfb_max, args.steps)
    with open(args.out, "w", encoding="utf-8") as out:
        curve.write_csv(out)
    print(f"point A: C_FB = H(delta) = {curve.point_a_cfb:.17g}", file=sys.stderr)
    if curve.point_a_index is not None:
        print(
            f"point A first reached at row {curve.point_a_index} "
            f"(cfb = {curve.rows[curve.point_a_index].cfb:.17g})",
            file=sys.stderr,
        )
    return 0


def cmd_oracle(args) -> int:
    spec = ChannelSpec(args.delta)
    report = build_max_off_report(spec, args.dfb)
    print(_json17(report.to_json_dict()))
    try:
        report.self_check()
    except RuntimeError as exc:
        print(f"self-check failed: {exc}", file=sys.stderr)
        return EXIT_SELF_CHECK
    return 0


def cmd_simulate(args) -> int:
    if args.sim_command == "scheme":
        report = run_two_phase_scheme(ChannelSpec(args.delta), args.payload, args.seed)
        print(_json17(report.to_json_dict()))
        csv_row = {
            "strategy": "scheme",
            "cfb": None,
            "delta": args.delta,
            "n": report.slots_used,
            "trials": 1,
            "mean_distortion": None,
            "d_star": None,
            "throughput_sum": report.throughput_sum,
            "feedback_bits_per_use": report.feedback_bits / report.slots_used,
            "seed": args.seed,
        }
    elif args.sim_command == "pointa":
        report = run_point_a_demo(ChannelSpec(args.delta), args.payload, args.block, args.seed)
        print(_json17(report.to_json_dict()))
        csv_row = {
            "strategy": f"pointa:{args.block}",
            "cfb": None,
            "delta": args.delta,
            "n": report.slots_used,
            "trials": 1,
            "mean_distortion": None,
            "d_star": None,
            "throughput_sum": report.throughput_sum,
            "feedback_bits_per_use": report.feedback_bits / report.slots_used,
            "seed": args.seed,
        }
    else:
        spec = ChannelSpec(args.delta, block_len=args.n)
        budget = FeedbackBudget(args.cfb)
        rows = run_distortion_converse_sweep(
            spec, budget, [args.strategy], args.trials, args.seed, enforce_budget=True
        )
        row = rows[0]
        payload = {
            "strategy": row.strategy,
            "delta": args.delta,
            "cfb": args.cfb,
            "n": row.n,
            "trials": row.trials,
            "seed": args.seed,
            "mean_distortion": row.mean_distortion,
            "d_star": row.d_star,
            "std_error": row.std_error,
            "feedback_rate": row.feedback_rate,
            "over_budget": row.over_budget,
            "mode": "partial",
        }
        print(_json17(payload))
        csv_row = {
            "strategy": row.strategy,
            "cfb": args.cfb,
            "delta": args.delta,
            "n": row.n,
            "trials": row.trials,
            "mean_distortion": row.mean_distortion,
            "d_star": row.d_star,
            "throughput_sum": None,
            "feedback_bits_per_use": row.feedback_rate,
            "seed": args.seed,
        }
    if args.csv:
        _append_sim_csv(args.csv, csv_row)
    return 0


def cmd_gnuplot(args) -> int:
    if not os.path.exists(args.csv):
        print(f"sweep CSV not found: {args.csv}", file=sys.stderr)
        return EXIT_IO
    with open(args.csv, encoding="utf-8") as f:
        lines = [ln for ln in f.read().splitlines() if ln.strip()]
    if not lines or lines[0] != SWEEP_CSV_HEADER:
        print(f"{args.csv} does not carry the sweep CSV header", file=sys.stderr)
        return EXIT_IO
    if len(lines) < 2:
        print(f"{args.csv} has no data rows", file=sys.stderr)
        return EXIT_IO
    point_a = binary_entropy(args.delta)
    out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
    rel = os.path.relpath(os.path.abspath(args.csv), start=out_dir)
    script = "\n".join(
        [
            f"# sum-rate curves vs feedback capacity (delta = {args.delta:.17g})",
            "set datafile separator ','",
            "set xlabel 'feedback capacity C_FB (bits per channel use)'",
            "set ylabel 'symmetric sum rate (bits per channel use)'",
            "set key bottom right",
            f"set arrow from {point_a:.17g},graph 0 to {point_a:.17g},graph 1 nohead dashtype 2",
            f"set label 'A' at {point_a:.17g},graph 0.95 offset character 0.5,0",
            f"plot '{rel}' using 1:5 with lines lw 2 title 'outer bound', \\",
            f"     '{rel}' using 1:6 with lines title 'global feedback', \\",
            f"     '{rel}' using 1:7 with lines title 'no feedback', \\",
            f"     '{rel}' using 1:8 with lines title 'partial CSI'",
            "",
        ]
    )
    with open(args.out, "w", encoding="utf-8") as out:
        out.write(script)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rlfb",
        description="Outer bounds, converse oracles, and simulations for the "
        "two-user erasure broadcast channel with one-sided rate-limited feedback.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="distortion parameters, region, and sum rate")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--cfb", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("region", help="emit one rate region")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--cfb", type=float, default=0.0)
    p.add_argument("--kind", choices=["outer", "global", "nofb"], default="outer")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("sweep", help="sum-rate curve over a cfb grid, as CSV")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--cfb-min", type=float, required=True)
    p.add_argument("--cfb-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="converse correlation oracles")
    oracle_sub = p.add_subparsers(dest="oracle_command", required=True)
    q = oracle_sub.add_parser("maxoff", help="closed form, construction, and LP bound")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--dfb", type=float, required=True)
    q.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo runs")
    sim_sub = p.add_subparsers(dest="sim_command", required=True)

    q = sim_sub.add_parser("scheme", help="genie-aided two-phase XOR scheme")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--payload", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--csv")
    q.set_defaults(func=cmd_simulate)

    q = sim_sub.add_parser("pointa", help="scheme with block-compressed feedback")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--payload", type=int, required=True)
    q.add_argument("--block", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--csv")
    q.set_defaults(func=cmd_simulate)

    q = sim_sub.add_parser("distortion", help="empirical distortion of a feedback strategy")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--cfb", type=float, required=True)
    q.add_argument("--strategy", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--csv")
    q.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gnuplot", help="plot script for a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_gnuplot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RuntimeError as exc:
        print(f"internal self-check failure: {exc}", file=sys.stderr)
        return EXIT_SELF_CHECK


if __name__ == "__main__":
    sys.exit(main())
