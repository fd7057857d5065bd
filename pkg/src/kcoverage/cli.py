"""Command-line front end.

    kcoverage run CONFIG [--out trace.csv] [--messages log.csv]
    kcoverage compare EXPERIMENT [--workers N]
    kcoverage plot CSV... --columns theta_p1,theta_p3 --out chart.svg
    kcoverage verify [--quick]
    kcoverage preset figure5 [--seeds 1,2,3] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 I/O error, 1 failed verification.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import sys
from pathlib import Path

from .engine import Simulator
from .errors import ConfigurationError, TraceParseError
from .harness.configfile import apply_overrides, config_from_parser, load_config, new_parser
from .harness.experiment import ExperimentSpec, default_output_dir, run_experiment, run_figure5
from .harness.svg import plot_traces
from .harness.traces import write_message_log, write_trace_csv

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3

_OVERRIDE_FLAGS = {"seed": "seed", "k": "k", "loss": "loss_probability", "scheduler": "scheduler",
                   "p_sleep": "p_sleep", "max_periods": "max_periods"}


def parse_seeds(text: str) -> tuple:
    """``1,2,5`` or ``1-20``."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ConfigurationError("no seeds given")
    return tuple(seeds)


def _overrides(args) -> dict:
    out = {}
    for flag, key in _OVERRIDE_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            out[key] = value
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _add_override_flags(p):
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--loss", type=float, help="message loss probability")
    p.add_argument("--scheduler", choices=["cgs", "centralized", "random", "always_on"])
    p.add_argument("--p-sleep", dest="p_sleep", type=float)
    p.add_argument("--max-periods", dest="max_periods", type=int)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")


def cmd_run(args) -> int:
    cfg = apply_overrides(load_config(args.config), _overrides(args))
    sim = Simulator(cfg)
    trace = sim.run()
    out = Path(args.out) if args.out else default_output_dir() / f"{Path(args.config).stem}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trace_csv(trace, out)
    if args.messages:
        write_message_log(sim.message_log, args.messages)
    print(out)
    return EXIT_OK


def load_experiment(path, overrides=None) -> ExperimentSpec:
    parser = new_parser()
    try:
        if not parser.read(path, encoding="utf-8"):
            raise ConfigurationError(f"cannot read experiment file {path}")
    except configparser.Error as exc:
        raise ConfigurationError(str(exc)) from None
    base = apply_overrides(config_from_parser(parser), overrides or {})
    if not parser.has_section("experiment"):
        raise ConfigurationError("experiment file needs an [experiment] section")
    sec = parser["experiment"]
    schedulers = tuple(s.strip() for s in sec.get("schedulers", "").split(",") if s.strip())
    seeds = parse_seeds(sec.get("seeds", ""))
    lambdas = tuple(float(x) for x in sec.get("lambdas", "0.99, 0.9").split(","))
    output = Path(sec["output_dir"]) if "output_dir" in sec else default_output_dir()
    return ExperimentSpec(base, schedulers, seeds, output, lambdas,
                          sec.getboolean("message_logs", fallback=False))


def cmd_compare(args) -> int:
    spec = load_experiment(args.experiment, _overrides(args))
    if args.out:
        spec = ExperimentSpec(spec.base, spec.schedulers, spec.seeds, Path(args.out), spec.lambdas,
                              spec.message_logs)
    result = run_experiment(spec, workers=args.workers)
    print(result["summary"])
    return EXIT_OK


def cmd_plot(args) -> int:
    columns = [c.strip() for c in args.columns.split(",") if c.strip()]
    plot_traces(args.csv, columns, args.out, layout=args.layout)
    print(args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run_all
    results = run_all(quick=args.quick)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


def cmd_preset(args) -> int:
    if args.name != "figure5":
        raise ConfigurationError(f"unknown preset {args.name!r}")
    seeds = parse_seeds(args.seeds) if args.seeds else ((args.seed,) if args.seed is not None else (1,))
    overrides = _overrides(args)
    overrides.pop("seed", None)
    from .harness.configfile import coerce
    typed = {k: coerce(k, str(v)) for k, v in overrides.items()}
    result = run_figure5(seeds, args.out, workers=args.workers, **typed)
    for key in ("summary", "lifetimes", "figure5", "figure6"):
        print(result[key])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kcoverage", description="k-coverage sleep scheduling simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one configuration and write its trace CSV")
    r.add_argument("config")
    r.add_argument("--out")
    r.add_argument("--messages", help="also write the CGS message log")
    _add_override_flags(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run an experiment file (schedulers x seeds)")
    c.add_argument("experiment")
    c.add_argument("--out")
    c.add_argument("--workers", type=int, default=1)
    _add_override_flags(c)
    c.set_defaults(func=cmd_compare)

    pl = sub.add_parser("plot", help="render trace CSVs as an SVG line chart")
    pl.add_argument("csv", nargs="+")
    pl.add_argument("--columns", default="theta_p1,theta_p2,theta_p3")
    pl.add_argument("--layout", choices=["overlay", "panels"], default="overlay")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)

    v = sub.add_parser("verify", help="run the randomized property and oracle suites")
    v.add_argument("--quick", action="store_true")
    v.set_defaults(func=cmd_verify)

    ps = sub.add_parser("preset", help="canned experiments")
    ps.add_argument("name", choices=["figure5"])
    ps.add_argument("--seeds", help="e.g. 1-20 or 1,2,3")
    ps.add_argument("--out")
    ps.add_argument("--workers", type=int, default=1)
    _add_override_flags(ps)
    ps.set_defaults(func=cmd_preset)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, TraceParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
