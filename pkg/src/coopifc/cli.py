"""Command-line front end.

Subcommands: ``eval-bounds``, ``gdof-sweep``, ``reproduce-fig`` and ``ksum``.
Exit codes: 0 success, 2 usage or validation error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import gdof
from .bounds import BoundId, InputCovariance, eval_bound
from .fileio import (
    InputError,
    channel_from_dict,
    load_json,
    parse_matrix,
    render_svg,
    symmetric_from_dict,
)
from .gaussinfo import DegenerateDistributionError
from .ksum import consistency_check, eval_terms, generate_terms, has_active_destinations, oob_budget
from .model import ModeTag, cooperation_mode, validate_channel
from .optimize import OptimizerConfig, mode_problem, sum_rate_upper

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE = 0, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing helpers

def parse_grid(spec: str) -> list:
    """``A:B:STEP`` -> inclusive grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"parse error: grid must be A:B:STEP, got {spec!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"parse error: grid must be A:B:STEP, got {spec!r}") from None
    if not all(math.isfinite(v) for v in (a, b, step)):
        raise UsageError("parse error: grid values must be finite")
    if b <= a or step <= 0:
        raise UsageError("grid not increasing")
    if a < 0:
        raise UsageError("grid values must be nonnegative")
    return gdof.figure_grid(a, b, step)


def parse_int_list(spec: str, what: str) -> tuple:
    try:
        return tuple(int(s) for s in spec.replace(" ", "").split(",") if s)
    except ValueError:
        raise UsageError(f"parse error: {what} must be comma-separated integers") from None


def _mode(name):
    try:
        return ModeTag.parse(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args) -> OptimizerConfig:
    d = {}
    if args.config:
        d.update(load_json(args.config))
    if args.restarts is not None:
        d["restarts"] = args.restarts
    if args.seed is not None:
        d["seed"] = args.seed
    d.setdefault("seed", 0)
    try:
        return OptimizerConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"optimizer config: {exc}") from None


def _write(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def run_eval_bounds(args) -> int:
    if bool(args.channel) == bool(args.sym):
        raise UsageError("give exactly one of --channel or --sym")
    cfg = _config(args)
    bounds = None
    if args.bounds:
        try:
            bounds = [BoundId.parse(b) for b in args.bounds.split(",") if b.strip()]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    report = {"config": cfg.as_dict()}
    if args.channel:
        ch, Q = channel_from_dict(load_json(args.channel))
        issues = validate_channel(ch)
        if Q is not None:
            issues += InputCovariance(Q).validate(ch)
        if ch.K != 2:
            issues.append("eval-bounds needs a 2-pair channel (K=2)")
        if issues:
            raise UsageError("\n".join(issues))
        budgets = None
        snr = None
    else:
        sym, mode_name, beta = symmetric_from_dict(load_json(args.sym))
        mode_name = args.mode or mode_name or "no-coop"
        beta = args.beta if args.beta is not None else beta
        mode = cooperation_mode(_mode(mode_name), beta)
        try:
            ch, budgets, cfg = mode_problem(sym, mode, cfg)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        Q = None
        snr = sym.snr
        report["symmetric"] = {**sym.as_dict(), "mode": mode.tag.value, "beta": beta}
        report["config"] = cfg.as_dict()
    result = sum_rate_upper(ch, cfg, budgets, bounds)
    report["bounds"] = [r.as_dict() for r in result.reports.values()]
    report["sum_rate"] = {
        "headline_bits": result.headline_bits,
        "binding": result.binding,
        "candidates": result.candidates,
    }
    if snr is not None:
        report["sum_rate"]["normalized"] = result.headline_bits / math.log2(1 + snr)
    if Q is not None:
        report["at_input"] = [eval_bound(ch, Q, b).as_dict() for b in (bounds or list(BoundId))]
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def _curve_svg(curves, title) -> str:
    series = {c.mode.tag.value: ([p.alpha for p in c.points], [p.two_d for p in c.points])
              for c in curves}
    return render_svg(series, title=title, xlabel="alpha", ylabel="2d")


def run_gdof_sweep(args) -> int:
    if not args.mode:
        raise UsageError("--mode is required")
    grid = parse_grid(args.grid)
    beta = 0.0 if args.beta is None else args.beta
    if not beta >= 0:
        raise UsageError("beta must be nonnegative")
    curve = gdof.sweep(cooperation_mode(_mode(args.mode), beta), beta, grid)
    fmt = args.format or "csv"
    if fmt == "csv":
        text = gdof.format_csv(gdof.curve_rows(curve))
    elif fmt == "json":
        text = json.dumps(gdof.curve_rows(curve), indent=2) + "\n"
    else:
        text = _curve_svg([curve], f"{curve.mode.tag.value}, beta={beta:g}")
    _write(text, args.out)
    return EXIT_OK


def reproduce_fig(which: int) -> list:
    """The six figure curves for ``which`` in {2, 3}."""
    if which not in gdof.FIGURE_BETA:
        raise UsageError("--which must be 2 or 3")
    beta = gdof.FIGURE_BETA[which]
    grid = gdof.figure_grid()
    return [gdof.sweep(cooperation_mode(tag, beta), beta, grid) for tag in gdof.FIGURE_MODES]


def run_reproduce_fig(args) -> int:
    curves = reproduce_fig(args.which)
    out = args.out or f"fig{args.which}"
    os.makedirs(out, exist_ok=True)
    written = []
    for c in curves:
        path = os.path.join(out, f"fig{args.which}_{c.mode.tag.value}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(gdof.format_csv(gdof.curve_rows(c)))
        written.append(path)
    path = os.path.join(out, f"fig{args.which}.svg")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_curve_svg(curves, f"Symmetric GDoF, beta={gdof.FIGURE_BETA[args.which]:g}"))
    written.append(path)
    sys.stdout.write("\n".join(written) + "\n")
    return EXIT_OK


def run_ksum(args) -> int:
    if args.K is None or not args.subset:
        raise UsageError("--K and --subset are required")
    subset = parse_int_list(args.subset, "--subset")
    order = parse_int_list(args.order, "--order") if args.order else subset
    if sorted(order) != sorted(subset):
        raise UsageError("--order must be a permutation of --subset")
    ch = Q = None
    if args.channel:
        ch, Q = channel_from_dict(load_json(args.channel))
        if args.cov:
            Q = parse_matrix(load_json(args.cov).get("Q"), "Q")
        issues = validate_channel(ch)
        if ch.K != args.K:
            issues.append(f"channel has K={ch.K}, --K is {args.K}")
        if Q is None:
            Q = np.diag(ch.P).astype(complex)
        issues += InputCovariance(Q).validate(ch)
        if issues:
            raise UsageError("\n".join(issues))
    try:
        spec = generate_terms(args.K, order,
                              has_active_destinations(ch) if ch is not None else False)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        d = spec.as_dict()
        if ch is not None:
            d["value_bits"] = eval_terms(ch, Q, spec)
            d["oob_budget_bits"] = oob_budget(ch, spec)
            d["consistency"] = consistency_check(ch, Q, spec)
        _write(json.dumps(d, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [spec.render()]
    if ch is not None:
        if spec.destination_inputs:
            lines.append("# destination inputs added to the conditioning sets")
        lines.append(f"value_bits = {eval_terms(ch, Q, spec):.12g}")
        lines.append(f"oob_budget_bits = {oob_budget(ch, spec):.12g}")
        lines.append(f"consistency = {consistency_check(ch, Q, spec):.3e}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coopifc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output path (default: standard output)")

    e = sub.add_parser("eval-bounds", help="maximize the outer bounds for a channel")
    e.add_argument("--channel", help="channel JSON file")
    e.add_argument("--sym", help="symmetric-parameter JSON file")
    e.add_argument("--mode", help="cooperation mode for --sym")
    e.add_argument("--beta", type=float)
    e.add_argument("--bounds", help="comma-separated bound ids")
    e.add_argument("--restarts", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--config", help="optimizer config JSON file")
    common(e)
    e.set_defaults(func=run_eval_bounds)

    g = sub.add_parser("gdof-sweep", help="closed-form GDoF over an alpha grid")
    g.add_argument("--mode")
    g.add_argument("--beta", type=float)
    g.add_argument("--grid", default="0:3:0.005", help="A:B:STEP, inclusive")
    g.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    common(g)
    g.set_defaults(func=run_gdof_sweep)

    f = sub.add_parser("reproduce-fig", help="write the figure CSVs and SVG")
    f.add_argument("--which", type=int, choices=(2, 3), required=True)
    f.add_argument("--out", help="output directory (default: figN)")
    f.set_defaults(func=run_reproduce_fig)

    k = sub.add_parser("ksum", help="partial-sum-rate term chain")
    k.add_argument("--K", type=int)
    k.add_argument("--subset")
    k.add_argument("--order")
    k.add_argument("--channel", help="channel JSON file (enables evaluation)")
    k.add_argument("--cov", help="JSON file with an input covariance 'Q'")
    k.add_argument("--format", choices=("text", "json"), default="text")
    common(k)
    k.set_defaults(func=run_ksum)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InputError) as exc:
        for line in str(exc).splitlines():
            print(f"coopifc: {line}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateDistributionError as exc:
        print(f"coopifc: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
