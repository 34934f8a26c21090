"""Command-line interface.

Four subcommands, all emitting CSV on stdout.  Reals are rendered with
the shortest form that round-trips losslessly through float64 (up to 17
significant digits):

* ``formulas``  -- closed-form 1-D walk quantities
* ``oracle``    -- exact small-instance expectations as fractions
* ``simulate``  -- Monte Carlo sweeps on the comb
* ``fit``       -- scaling verdict over a simulate CSV

Exit codes: 0 success (for ``fit``: law supported), 1 fit verdict
negative, 2 usage or malformed input, 3 resource exhaustion.

Identical arguments produce byte-identical output; wall-clock timing is
only filled in under ``--timing`` (otherwise the runtime column is 0) so
that the determinism contract covers the whole file.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from fractions import Fraction

from . import analysis, oracle, walk1d
from .errors import CapacityError, SizeLimitError
from .estimator import Estimate, ExperimentConfig, run_summaries
from .simulator import StopRule

EXIT_OK = 0
EXIT_VERDICT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

_SIM_COLUMNS = [
    "mode", "n", "replicates", "seed",
    "mean_V", "stderr_V", "mean_a", "stderr_a",
    "mean_c", "stderr_c", "mean_d", "stderr_d",
    "far_sites_mean", "runtime_seconds",
]
_DIAG_COLUMNS = [
    "close_sites_mean", "intermediate_sites_mean", "intermediate_final_tooth_mean",
]


def _fmt(x: float) -> str:
    # repr is the shortest representation (<= 17 significant digits) that
    # round-trips losslessly through float64
    return repr(float(x))


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _cmd_formulas(args, out) -> int:
    w = _writer(out)
    w.writerow(["quantity", "n", "i_or_j", "value"])
    try:
        for n, i in args.p or []:
            w.writerow(["p", n, i, _fmt(walk1d.p_exact(n, i))])
        for n in args.visits_origin or []:
            w.writerow(["A", n, "", _fmt(walk1d.expected_visits_origin(n))])
        for n in args.range_dp or []:
            w.writerow(["B", n, "", _fmt(walk1d.expected_range_dp(n))])
        for j in args.ruin or []:
            w.writerow(["r", "", j, _fmt(walk1d.ruin_probability(j))])
    except (SizeLimitError, ValueError) as exc:
        return _usage_error(str(exc))
    return EXIT_OK


def _cmd_oracle(args, out) -> int:
    w = _writer(out)
    w.writerow(["n", "exact_fraction", "decimal"])
    try:
        if args.steps is not None:
            value = oracle.exact_expected_visited(args.steps)
            n = args.steps
        else:
            value = oracle.exact_expected_visited_W(args.vertical).value
            n = args.vertical
    except (SizeLimitError, ValueError) as exc:
        return _usage_error(str(exc))
    frac = Fraction(value)
    w.writerow([n, f"{frac.numerator}/{frac.denominator}", _fmt(float(frac))])
    return EXIT_OK


def _cmd_simulate(args, out) -> int:
    try:
        n_values = [int(part) for part in args.n.split(",") if part]
        if not n_values or any(n < 1 for n in n_values):
            raise ValueError("--n needs a comma list of positive integers")
        if args.reps < 1:
            raise ValueError("--reps must be >= 1")
        mode = args.mode
    except ValueError as exc:
        return _usage_error(str(exc))

    columns = list(_SIM_COLUMNS)
    if args.diagnostics:
        columns[-1:-1] = _DIAG_COLUMNS
    stats = ["visited_sites", "horizontal_moves", "backbone_sites",
             "backbone_entries", "far_sites"]
    if args.diagnostics:
        stats += ["close_sites", "intermediate_sites", "intermediate_final_tooth"]

    w = _writer(out)
    w.writerow(columns)
    rows_human = []
    for n in n_values:
        rule = (StopRule.after_steps(n) if mode == "steps"
                else StopRule.after_vertical_moves(n))
        cfg = ExperimentConfig(master_seed=args.seed, replicates=args.reps, rule=rule)
        t0 = time.perf_counter()
        try:
            res = run_summaries(cfg, stats, threads=args.threads)
        except (CapacityError, MemoryError) as exc:
            print(f"error: resource exhaustion: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        elapsed = time.perf_counter() - t0 if args.timing else 0.0
        row = [mode, n, args.reps, args.seed,
               _fmt(res["visited_sites"].mean), _fmt(res["visited_sites"].stderr),
               _fmt(res["horizontal_moves"].mean), _fmt(res["horizontal_moves"].stderr),
               _fmt(res["backbone_sites"].mean), _fmt(res["backbone_sites"].stderr),
               _fmt(res["backbone_entries"].mean), _fmt(res["backbone_entries"].stderr),
               _fmt(res["far_sites"].mean)]
        if args.diagnostics:
            row += [_fmt(res["close_sites"].mean),
                    _fmt(res["intermediate_sites"].mean),
                    _fmt(res["intermediate_final_tooth"].mean)]
        row.append(_fmt(elapsed))
        w.writerow(row)
        rows_human.append((n, res["visited_sites"]))
    if args.human:
        for n, est in rows_human:
            out.write(f"# n={n}: mean visited sites {est.mean:.6g} "
                      f"+- {est.stderr:.3g} over {est.replicates} replicates\n")
    return EXIT_OK


def _cmd_fit(args, out) -> int:
    try:
        with open(args.input, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        return _usage_error(f"cannot read {args.input}: {exc}")
    required = {"mode", "n", "replicates", "mean_V", "stderr_V"}
    if not rows or not required.issubset(rows[0].keys()):
        return _usage_error("input is not a simulate CSV (missing columns)")

    by_mode: dict[str, list[dict]] = {}
    for r in rows:
        by_mode.setdefault(r["mode"], []).append(r)
    mode, mode_rows = max(by_mode.items(), key=lambda kv: len(kv[1]))
    if len(mode_rows) < 3:
        return _usage_error("need at least 3 rows of the same mode")

    try:
        points = []
        seen = set()
        for r in sorted(mode_rows, key=lambda r: int(r["n"])):
            n = int(r["n"])
            if n in seen:
                raise ValueError(f"duplicate sweep point n={n}")
            seen.add(n)
            mean = float(r["mean_V"])
            stderr = float(r["stderr_V"])
            reps = int(r["replicates"])
            points.append(analysis.SweepPoint(
                n, Estimate(mean, stderr, reps, mean, mean)))
        fit = analysis.build_fit(points)
        report = analysis.hypothesis_report(fit)
    except (ValueError, KeyError) as exc:
        return _usage_error(f"malformed input: {exc}")

    w = _writer(out)
    w.writerow(["metric", "value"])
    w.writerow(["mode", mode])
    w.writerow(["points", len(points)])
    w.writerow(["slope_min", _fmt(report.slope_min)])
    w.writerow(["slope_max", _fmt(report.slope_max)])
    w.writerow(["slopes_above_floor", str(report.slopes_above_floor).lower()])
    w.writerow(["slopes_below_threshold", str(report.slopes_below_threshold).lower()])
    w.writerow(["ratio75_decreasing", str(report.ratio75_decreasing).lower()])
    w.writerow(["ratio_stability_factor", _fmt(report.ratio_stability_factor)])
    w.writerow(["ratios_stable", str(report.ratios_stable).lower()])
    w.writerow(["ratio_last", _fmt(report.ratio_last)])
    w.writerow(["supported", str(report.supported).lower()])

    out.write("# verdict: law mean ~ K sqrt(n) log n "
              f"{'SUPPORTED' if report.supported else 'NOT SUPPORTED'}\n")
    out.write(f"# local log-log slopes in [{report.slope_min:.4f}, "
              f"{report.slope_max:.4f}] (need all in "
              f"({analysis.SLOPE_FLOOR:.2f}, {analysis.SLOPE_REJECT_THRESHOLD:.2f}))\n")
    out.write(f"# mean/n^0.75 strictly decreasing: "
              f"{'yes' if report.ratio75_decreasing else 'no'}\n")
    out.write(f"# mean/(sqrt(n) log n) spread over top two decades: "
              f"{report.ratio_stability_factor:.4f} (need < "
              f"{analysis.RATIO_STABILITY_FACTOR})\n")
    out.write(f"# ratio at largest n: {report.ratio_last:.5f}; "
              f"limiting constant 1/(2 sqrt(2 pi)) = {analysis.TARGET_CONSTANT:.5f}\n")
    return EXIT_OK if report.supported else EXIT_VERDICT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combrange",
        description="Random-walk range on the two-dimensional comb: "
                    "formulas, exact oracles, Monte Carlo sweeps, scaling fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_form = sub.add_parser("formulas", help="closed-form 1-D walk quantities")
    p_form.add_argument("--p", nargs=2, type=int, action="append",
                        metavar=("N", "I"), help="point probability p_{n,i}")
    p_form.add_argument("--visits-origin", type=int, action="append", metavar="N",
                        help="expected visits to the origin in n steps")
    p_form.add_argument("--range-dp", type=int, action="append", metavar="N",
                        help="exact expected range of an n-step walk (DP)")
    p_form.add_argument("--ruin", type=int, action="append", metavar="J",
                        help="probability of reaching j before returning to 0")

    p_oracle = sub.add_parser("oracle", help="exact small-instance expectations")
    group = p_oracle.add_mutually_exclusive_group(required=True)
    group.add_argument("--steps", type=int, metavar="N",
                       help="expected visited sites after n steps (n <= 14)")
    group.add_argument("--vertical", type=int, metavar="N",
                       help="expected visited sites after n vertical moves (n <= 6)")

    p_sim = sub.add_parser("simulate", help="Monte Carlo sweeps on the comb")
    p_sim.add_argument("--n", required=True,
                       help="comma list of horizons, e.g. 10000,100000")
    p_sim.add_argument("--reps", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--mode", choices=("steps", "vertical"), required=True)
    p_sim.add_argument("--diagnostics", action="store_true",
                       help="add site-class diagnostic columns")
    p_sim.add_argument("--threads", type=int, default=None,
                       help="worker cap (default: COMB_RANGE_THREADS or all cores); "
                            "results do not depend on it")
    p_sim.add_argument("--timing", action="store_true",
                       help="fill runtime_seconds (breaks byte-identical reruns)")
    p_sim.add_argument("--human", action="store_true",
                       help="append a human-readable summary block")

    p_fit = sub.add_parser("fit", help="scaling verdict over a simulate CSV")
    p_fit.add_argument("--input", required=True, metavar="FILE")

    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "formulas":
        return _cmd_formulas(args, out)
    if args.command == "oracle":
        return _cmd_oracle(args, out)
    if args.command == "simulate":
        return _cmd_simulate(args, out)
    if args.command == "fit":
        return _cmd_fit(args, out)
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
