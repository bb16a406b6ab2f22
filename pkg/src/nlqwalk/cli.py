"""``nlqwalk`` command line: simulate, sweep, bound, transfer.

Exit codes: 0 success, 1 numerical/runtime failure, 2 usage or validation
error. Any option can also come from a JSON file given with ``--config``
(keys are option names with ``-`` replaced by ``_``); explicit flags win.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import AverageConfig, SweepSpec, default_jobs, estimate_transition, sweep_g
from .bounds import required_g, trap_roots
from .dynamics import IntegratorConfig, Method, WalkParams, WalkState, evolve
from .errors import IntegrationError, NLQWalkError, NonFiniteError
from .graph import parse_lattice
from .io import load_schedule, series_to_dict, write_series, write_series_csv, write_sweep
from .transfer import PST_TIME_P3, run_schedule, timed_transfer


class UsageError(Exception):
    pass


def _integrator_args(p):
    g = p.add_argument_group("integrator")
    g.add_argument("--method", choices=[m.value for m in Method], default=Method.ADAPTIVE_DOP853.value)
    g.add_argument("--rtol", type=float, default=1e-10)
    g.add_argument("--atol", type=float, default=1e-12)
    g.add_argument("--max-step", type=float, default=0.01)
    g.add_argument("--sample-dt", type=float, default=0.1)


def _output_args(p):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="nlqwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="evolve a localized walker and write the observable series")
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--graph", help="path:N or cycle:N")
    p.add_argument("--start", type=int, help="initial vertex")
    p.add_argument("--g", type=float, default=0.0, help="nonlinearity coefficient")
    p.add_argument("--t", type=float, help="final time")
    _integrator_args(p)
    _output_args(p)

    p = sub.add_parser("sweep", help="time-averaged trapping probability over a range of g")
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--graph")
    p.add_argument("--start", type=int)
    p.add_argument("--g-range", help="min:max:step (inclusive)")
    p.add_argument("--g-list", help="comma-separated g values")
    p.add_argument("--T", type=float, default=300.0, dest="T")
    p.add_argument("--M", type=int, default=400, dest="M")
    p.add_argument("--full", action="store_true", help="full-size run: T=300, M=400, g in 0:8:0.25")
    p.add_argument("--jobs", type=int, help="parallel workers (default: $NLQWALK_JOBS or CPU count)")
    p.add_argument("--threshold", type=float, default=0.5)
    _integrator_args(p)
    _output_args(p)

    p = sub.add_parser("bound", help="analytic trapping bound")
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--deg", type=int, help="degree of the initial vertex")
    p.add_argument("--g", type=float, help="nonlinearity; report the guaranteed p_plus")
    p.add_argument("--target", type=float, help="trapping probability; report the required |g|")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("transfer", help="trap / transfer / trap protocol")
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--graph", default="path:3")
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--target", type=int, default=2)
    p.add_argument("--g-trap", type=float, default=40.0)
    p.add_argument("--hold-in", type=float, default=5.0)
    p.add_argument("--transfer-time", type=float, default=PST_TIME_P3)
    p.add_argument("--hold-out", type=float, default=4.78)
    p.add_argument("--schedule", help="JSON array of {t_start, t_end, g}; overrides the protocol flags")
    p.add_argument("--report", help="report JSON path (default: stdout)")
    _integrator_args(p)
    p.set_defaults(sample_dt=0.01)
    _output_args(p)
    parser.subcommands = sub.choices
    return parser


def _apply_config(parser, argv):
    """Re-parse ``argv`` with defaults taken from ``--config``, if present."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config file must hold a JSON object")
    sub = parser.subcommands[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {k.replace("-", "_"): v for k, v in cfg.items()}
    unknown = set(defaults) - known
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _integrator(args):
    return IntegratorConfig(
        method=args.method, rel_tol=args.rtol, abs_tol=args.atol,
        max_step=args.max_step, sample_dt=args.sample_dt,
    )


def _check_writable(*paths):
    for p in paths:
        if p is None:
            continue
        parent = Path(p).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise UsageError(f"cannot write to {p}")


def _emit_json(doc, path):
    text = json.dumps(doc, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_series(series, args, config):
    if args.out:
        write_series(series, args.out, args.format, config)
    elif args.format == "json":
        sys.stdout.write(json.dumps(series_to_dict(series, config)) + "\n")
    else:
        write_series_csv(series, sys.stdout)


def parse_g_range(text):
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--g-range must be min:max:step, got {text!r}") from None
    if not step > 0:
        raise UsageError("--g-range step must be positive")
    if hi < lo:
        return []
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def cmd_simulate(args):
    if args.graph is None:
        raise UsageError("--graph is required")
    if args.start is None:
        raise UsageError("--start is required")
    if args.t is None:
        raise UsageError("--t is required")
    lat = parse_lattice(args.graph)
    if not (0 <= args.start < lat.n):
        raise UsageError(f"--start {args.start} out of range for {lat}")
    _check_writable(args.out)
    cfg = _integrator(args)
    params = WalkParams(args.g)
    series = evolve(lat, params, WalkState.localized(lat.n, args.start), args.t, cfg)
    config = {
        "command": "simulate", "graph": lat.label(), "start": args.start,
        "g": args.g, "gamma": params.gamma, "t_end": args.t, "integrator": cfg.to_dict(),
    }
    _emit_series(series, args, config)
    return 0


def cmd_sweep(args):
    if args.graph is None or args.start is None:
        raise UsageError("--graph and --start are required")
    if args.full:
        args.T, args.M = 300.0, 400
        if args.g_range is None and args.g_list is None:
            args.g_range = "0:8:0.25"
    if (args.g_range is None) == (args.g_list is None):
        raise UsageError("give exactly one of --g-range or --g-list")
    if args.g_range is not None:
        g_values = parse_g_range(args.g_range)
    else:
        try:
            g_values = [float(x) for x in args.g_list.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad --g-list {args.g_list!r}") from None
    if not g_values:
        raise UsageError("empty list of g values")
    lat = parse_lattice(args.graph)
    avg = AverageConfig(args.T, args.M)
    spec = SweepSpec(tuple(g_values), lat, args.start, avg)
    _check_writable(args.out)
    jobs = args.jobs if args.jobs is not None else default_jobs()
    cfg = _integrator(args)

    points = sweep_g(spec, cfg, jobs=jobs)
    crossing = estimate_transition(points, args.threshold)
    config = {
        "command": "sweep", "graph": lat.label(), "start": args.start,
        "g_values": list(spec.g_values), "T": avg.total_time, "M": avg.samples,
        "average": avg.to_dict(), "integrator": cfg.to_dict(),
        "threshold": args.threshold, "transition_estimate": crossing,
        "transition_method": "linear interpolation of first upward threshold crossing",
    }
    if args.out:
        write_sweep(points, args.out, args.format, config)
    elif args.format == "json":
        sys.stdout.write(json.dumps({"config": config, "rows": [[p.g, p.p_bar] for p in points]}) + "\n")
    else:
        sys.stdout.write("g,p_bar\n")
        for p in points:
            sys.stdout.write(f"{p.g!r},{p.p_bar!r}\n")
    print(f"# T={avg.total_time!r} M={avg.samples} transition={crossing}", file=sys.stderr)
    failed = [p for p in points if p.error]
    for p in failed:
        print(f"error: {p.error}", file=sys.stderr)
    return 1 if failed else 0


def bound_report(deg, g=None, target=None):
    if (g is None) == (target is None):
        raise UsageError("give exactly one of --g or --target")
    if target is not None:
        g_needed = required_g(deg, target)
        res = trap_roots(deg, g_needed)
        doc = res.to_dict()
        doc["p_target"] = target
        doc["g_required"] = g_needed
        return doc
    return trap_roots(deg, abs(g)).to_dict()


def cmd_bound(args):
    if args.deg is None:
        raise UsageError("--deg is required")
    _check_writable(args.out)
    _emit_json(bound_report(args.deg, args.g, args.target), args.out)
    return 0


def cmd_transfer(args):
    lat = parse_lattice(args.graph)
    _check_writable(args.out, args.report)
    cfg = _integrator(args)
    if args.schedule:
        schedule = load_schedule(args.schedule)
        for v in (args.source, args.target):
            if not (0 <= v < lat.n):
                raise UsageError(f"vertex {v} out of range for {lat}")
        series = run_schedule(lat, schedule, WalkState.localized(lat.n, args.source), cfg)
        segs = []
        for s in schedule.segments:
            m = (series.times >= s.t_start - 1e-9) & (series.times <= s.t_end + 1e-9)
            segs.append({
                "t_start": s.t_start, "t_end": s.t_end, "g": s.g,
                "min_p_source": float(series.probs[m, args.source].min()),
                "min_p_target": float(series.probs[m, args.target].min()),
                "p_target_end": float(series.probs[m, args.target][-1]),
            })
        report = {"source": args.source, "target": args.target, "segments": segs}
    else:
        rep = timed_transfer(
            lat, args.source, args.target, args.hold_in, args.transfer_time,
            args.hold_out, args.g_trap, cfg,
        )
        series = rep.series
        report = rep.to_dict()
    config = {
        "command": "transfer", "graph": lat.label(), "source": args.source,
        "target": args.target, "schedule": series.meta["schedule"],
        "integrator": cfg.to_dict(),
    }
    report["config"] = config
    if args.out:
        write_series(series, args.out, args.format, config)
    _emit_json(report, args.report)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "bound": cmd_bound,
    "transfer": cmd_transfer,
}


def main(argv=None):
    parser = build_parser()
    args = _apply_config(parser, argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.subcommands[args.command].print_usage(sys.stderr)
        print(f"nlqwalk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, NonFiniteError, ArithmeticError) as exc:
        print(f"nlqwalk {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (NLQWalkError, ValueError, IndexError) as exc:
        print(f"nlqwalk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"nlqwalk {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
