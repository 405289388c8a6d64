"""Command-line entry point: ``mmse-disturbance {curve,figure,verify,optimize,bounds}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path


from . import bounds, figures, verify
from .bounds import DivergentGap, Scenario, UnconstrainedScenario
from .curves import NORMALIZATIONS, CurveSeries, SpecError, parse_grid, parse_input, to_csv, write_csv
from .design import InfeasibleDesign, NoCrossing, intersect_power_bound
from .metrics import cov_sq_curve, mi_curve, mmse_curve
from .optimizer import MAX_MI, MAX_MMSE, InfeasibleStart, SearchConfig, local_search, result_text, sweep_and_compare
from .quadrature import DEFAULT_ORDER, build_grid

OUT_DIR_ENV = "MMSE_DISTURBANCE_OUT"
EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INFEASIBLE = 0, 2, 3, 4


def _add_scenario(p: argparse.ArgumentParser, snr0=None, beta=None):
    p.add_argument("--snr0", type=float, default=snr0)
    p.add_argument("--beta", type=float, default=beta)


def _add_global(p: argparse.ArgumentParser, suppress: bool):
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p.add_argument("--quad-order", type=int, default=d(DEFAULT_ORDER), help="Gauss-Hermite order")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--out-dir", default=d(os.environ.get(OUT_DIR_ENV, "out")),
                   help=f"output directory (default: ${OUT_DIR_ENV} or ./out)")
    p.add_argument("--tolerance-scale", type=float, default=d(1.0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmse-disturbance", description=__doc__)
    _add_global(parser, suppress=False)
    # global flags are also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _add_global(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("curve", help="sweep one metric of one input and print CSV")
    p.add_argument("--metric", choices=("mmse", "mi", "cov2"), required=True)
    p.add_argument("--input", required=True, help="gaussian:<v>, pam:<N>, xa:<a>, reference name or file")
    p.add_argument("--grid", default="log:0.01:100:61", help="log:<lo>:<hi>:<n> or lin:<lo>:<hi>:<n>")
    p.add_argument("--norm", choices=NORMALIZATIONS, default="none")
    p.add_argument("--output", help="write CSV here instead of stdout")

    p = add("figure", help="write one CSV per curve of a figure")
    p.add_argument("name", choices=sorted(figures.FIGURES))
    _add_scenario(p)
    p.add_argument("--grid", help="override the snr grid")

    p = add("verify", help="run invariant suites")
    p.add_argument("suite", nargs="?", default="all", choices=verify.SUITES + ("all",))

    p = add("optimize", help="local search for a discrete input")
    p.add_argument("--config", help="JSON file with SearchConfig fields (flags override)")
    p.add_argument("--N", type=int)
    p.add_argument("--objective", choices=(MAX_MMSE, MAX_MI))
    p.add_argument("--snr-eval", type=float)
    _add_scenario(p)
    p.add_argument("--restarts", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--grid", default="log:0.01:100:61", help="snr grid for comparison curves")

    p = add("bounds", help="print closed-form bounds at one operating point")
    _add_scenario(p, snr0=5.0, beta=0.01)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--snr", type=float, required=True)
    return parser


def _cmd_curve(args, grid) -> int:
    x = parse_input(args.input)
    snrs = parse_grid(args.grid)
    if args.metric == "cov2":
        values = cov_sq_curve(x, snrs, grid)
    elif args.metric == "mi":
        values = mi_curve(x, snrs, grid)
    else:
        values = mmse_curve(x, snrs, grid)
    series = CurveSeries(f"{args.metric}_{args.input}", snrs, values, args.norm)
    if args.output:
        skipped = write_csv(series, Path(args.output))
    else:
        text, skipped = to_csv(series)
        sys.stdout.write(text)
    if skipped:
        print(f"warning: {skipped} row(s) left without a normalized value (dof at snr=0)", file=sys.stderr)
    return EXIT_OK


def _cmd_figure(args, grid) -> int:
    snrs = parse_grid(args.grid) if args.grid else None
    curves = figures.build_figure(args.name, snrs, args.snr0, args.beta, grid)
    target = Path(args.out_dir) / args.name
    for label, series in curves.items():
        write_csv(series, target / f"{label}.csv")
    print(f"wrote {len(curves)} curves to {target}")
    return EXIT_OK


def _cmd_verify(args, grid) -> int:
    results = verify.run(args.suite, grid, args.tolerance_scale)
    print(verify.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _search_config(args) -> SearchConfig:
    raw = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
    flags = {"N": args.N, "objective": args.objective, "snr_eval": args.snr_eval, "restarts": args.restarts,
             "delta": args.delta, "snr0": args.snr0, "beta": args.beta}
    raw.update({k: v for k, v in flags.items() if v is not None})
    missing = [k for k in ("N", "objective", "snr_eval", "snr0", "beta") if k not in raw]
    if missing:
        raise SpecError(",".join(missing), "optimize needs these settings")
    scenario = Scenario(float(raw.pop("snr0")), float(raw.pop("beta")), int(raw.pop("n", 1)))
    raw.setdefault("seed", args.seed)
    return SearchConfig(scenario=scenario, **raw)


def _cmd_optimize(args, grid) -> int:
    cfg = _search_config(args)
    result = local_search(cfg, grid)
    target = Path(args.out_dir) / "optimize"
    target.mkdir(parents=True, exist_ok=True)
    (target / "result.txt").write_text(result_text(result, cfg.seed))
    if result.feasible:
        for label, series in sweep_and_compare(result, parse_grid(args.grid), cfg.scenario, grid).items():
            write_csv(series, target / f"{label}.csv")
    print(f"objective={result.objective_value:.12g} slack={result.constraint_slack:.6g} "
          f"feasible={result.feasible} iterations={result.iterations}")
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _cmd_bounds(args, grid) -> int:
    s = Scenario(args.snr0, args.beta, args.n)
    rows = [
        ("mmse_cap", s.mmse_cap()),
        ("m_inf", bounds.m_inf(s, args.snr)),
        ("c_inf", bounds.c_inf(s, args.snr)),
        ("scpp_envelope", bounds.scpp_envelope(s, args.snr).value),
        ("lmmse", bounds.lmmse_bound(args.snr)),
    ]
    if args.snr <= s.snr0:
        rows.append(("d_bound", bounds.d_bound(s, args.snr).value))
        rows.append(("d_bound_power", bounds.d_bound(s, args.snr, with_power=True).value))
    snr_l, width = bounds.width_report(s)
    rows += [("snr_L", snr_l), ("width", width)]
    try:
        rows.append(("snr_L_power", intersect_power_bound(s)))
    except (NoCrossing, ValueError) as exc:
        print(f"snr_L_power: unavailable ({exc})", file=sys.stderr)
    rows.append(("c_n_upper", bounds.c_n_upper(s, args.snr)))
    rep = bounds.gap_report(s, args.snr)
    rows += [("gap_regime", rep.regime), ("gap_nats", rep.gap_nats), ("mixed_delta", rep.delta_mix), ("mixed_N", rep.N)]
    for key, val in rows:
        print(f"{key}={val:.12g}" if isinstance(val, float) else f"{key}={val}")
    return EXIT_OK


_COMMANDS = {
    "curve": _cmd_curve,
    "figure": _cmd_figure,
    "verify": _cmd_verify,
    "optimize": _cmd_optimize,
    "bounds": _cmd_bounds,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        grid = build_grid(args.quad_order)
        return _COMMANDS[args.command](args, grid)
    except SpecError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleStart, InfeasibleDesign, UnconstrainedScenario, DivergentGap) as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, TypeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
