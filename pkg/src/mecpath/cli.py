"""Command-line entry point: ``mecpath run|sweep|path``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import report
from .controller import Mode
from .path_geometry import builtin_path
from .scenario import OutputOptions, Scenario, ScenarioError, load, parse_path
from .simulation import ScenarioConfig, Status, run, sweep

EXIT_OK = 0
EXIT_DIVERGED = 2
EXIT_SINGULAR = 3
EXIT_TIMED_OUT = 4
EXIT_CONFIG = 64
EXIT_NO_INPUT = 66
EXIT_IO = 74

STATUS_EXIT = {
    Status.COMPLETED: EXIT_OK,
    Status.DIVERGED: EXIT_DIVERGED,
    Status.SINGULAR: EXIT_SINGULAR,
    Status.TIMED_OUT: EXIT_TIMED_OUT,
}

DEFAULT_C_VALUES = (100.0, 150.0, 200.0, 250.0, 300.0, 400.0)


class _InputError(Exception):
    """A scenario or path file could not be read."""


def _c_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("the C list is empty")
    return values


def _read_path(source: str):
    if source.strip().lower().removeprefix("path") in ("1", "2"):
        return builtin_path(source)
    p = Path(source)
    if not p.suffix and not p.exists():
        raise ScenarioError(f"unknown path {source!r}; expected 1, 2 or a JSON file")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise _InputError(f"cannot read path file {source}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise ScenarioError(f"{source}: invalid JSON ({exc})") from None
    # accept either a bare path section or a whole scenario with one
    if isinstance(doc, dict) and "path" in doc and "segments" not in doc and "builtin" not in doc:
        doc = doc["path"]
    return parse_path(doc)


def _scenario(args) -> Scenario:
    if args.scenario:
        try:
            sc = load(args.scenario)
        except OSError as exc:
            raise _InputError(f"cannot read scenario {args.scenario}: {exc.strerror or exc}") from None
    else:
        sc = Scenario(ScenarioConfig())
    cfg, out = sc.config, sc.output
    try:
        if args.path is not None:
            cfg = replace(cfg, path=_read_path(args.path))
        if args.mode is not None:
            cfg = cfg.with_mode(Mode(args.mode))
        if args.dt is not None:
            cfg = replace(cfg, dt=args.dt)
        if args.skip is not None:
            cfg = replace(cfg, skip_arclength=args.skip)
        if getattr(args, "c", None) is not None:
            cfg = cfg.with_resistance(args.c)
        if args.svg:
            out = replace(out, svg=True)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    return Scenario(cfg, OutputOptions(out.svg, out.decimate))


def cmd_run(args) -> int:
    sc = _scenario(args)
    result = run(sc.config)
    report.write_run(result, sc, Path(args.out))
    err = result.max_error
    shown = "n/a" if err is None else err if isinstance(err, str) else f"{err:.4g} m"
    print(f"{result.status.value}: max_error {shown}, max_error_raw {result.max_error_raw:.4g} m, "
          f"s_r {result.final_s_r:.2f}/{sc.config.path.length:g} m")
    return STATUS_EXIT[result.status]


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    values = args.c_values or list(DEFAULT_C_VALUES)
    conv = Mode(args.conventional) if args.conventional else None
    res = sweep(sc.config, values, conventional=conv)
    report.write_sweep(res, Path(args.out),
                       title=f"Maximum following error under parameter mismatch ({sc.config.path.name})",
                       svg=sc.output.svg)
    sys.stdout.write(report.sweep_markdown(res))
    return EXIT_OK


def cmd_path(args) -> int:
    path = _read_path(args.path or "1")
    if not args.ds > 0:
        raise ScenarioError(f"ds must be positive, got {args.ds}")
    files = report.write_path(path, args.ds, Path(args.out), svg=args.svg)
    print(f"{path.name}: length {path.length:g} m -> {files[0]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mecpath",
        description="Path-following simulation with a model error compensator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("scenario", nargs="?", help="scenario JSON file (defaults if omitted)")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--svg", action="store_true", help="also write SVG plots")
        p.add_argument("--path", help="1, 2 or a JSON file holding a path section")

    def sim(p):
        p.add_argument("--mode", choices=[m.value for m in Mode])
        p.add_argument("--dt", type=float, help="integration step [s]")
        p.add_argument("--skip", type=float, help="error-metric onset arc length [m]")

    p_run = sub.add_parser("run", help="simulate one scenario")
    common(p_run)
    sim(p_run)
    p_run.add_argument("--c", type=float, help="true steering resistance C of the plant [1/m]")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="conventional vs MEC over a list of plant C values")
    common(p_sweep)
    sim(p_sweep)
    p_sweep.add_argument("--c-values", type=_c_list, help="comma list, default 100,150,200,250,300,400")
    p_sweep.add_argument("--conventional", choices=[Mode.FEEDFORWARD.value, Mode.DIRECT.value],
                         help="mode used for the conventional column")
    p_sweep.set_defaults(func=cmd_sweep)

    p_path = sub.add_parser("path", help="write a reconstructed target path")
    common(p_path, scenario=False)
    p_path.add_argument("--ds", type=float, default=0.01, help="arc-length spacing [m]")
    p_path.set_defaults(func=cmd_path)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"mecpath: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _InputError as exc:
        print(f"mecpath: {exc}", file=sys.stderr)
        return EXIT_NO_INPUT
    except OSError as exc:
        target = exc.filename or args.out
        print(f"mecpath: cannot write output {target}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
