"""Command line: ``heisenspec run|validate <config>`` and ``heisenspec list``.

Failures print one line to stderr of the form

    heisenspec: error=<tag> exit=<code> reason=<text>

and exit with the code listed in EXIT_CODES.
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import Config, ConfigError, parse_config
from .experiments import EXPERIMENTS, read_params, run_experiment
from .group import SupportOverflowError
from .nonlocal_ import ResolutionError, StabilityError

EXIT_CODES = {
    "ok": 0,
    "checks_failed": 1,
    "usage": 2,
    "invalid_parameters": 3,
    "unknown_experiment": 4,
    "resolution": 5,
    "support_overflow": 6,
    "stability": 7,
    "runtime": 8,
}

# experiments whose lattices can be built and checked without running
_LATTICE_EXPERIMENTS = ("dirichlet-decay", "neumann-mass", "eigen")
_EPS_EXPERIMENTS = ("consistency", "eps-convergence")


class CliError(Exception):
    def __init__(self, tag, reason):
        super().__init__(reason)
        self.tag = tag
        self.reason = reason


def _fail(tag, reason):
    text = " ".join(str(reason).split())
    print(f"heisenspec: error={tag} exit={EXIT_CODES[tag]} reason={text}", file=sys.stderr)
    return EXIT_CODES[tag]


def _load(path):
    try:
        raw = parse_config(path)
    except FileNotFoundError:
        raise CliError("invalid_parameters", f"config file not found: {path}")
    except ConfigError as exc:
        raise CliError("invalid_parameters", str(exc))
    cfg = Config(raw)
    name = cfg.str("experiment")
    if name is None:
        raise CliError("invalid_parameters", "missing key: experiment")
    if name not in EXPERIMENTS:
        raise CliError("unknown_experiment", f"unknown experiment {name!r}")
    return name, cfg


def _prepare(path):
    """Parse, read every parameter, reject unknown keys and check lattice resolution."""
    name, cfg = _load(path)
    try:
        params = read_params(name, cfg)
        cfg.int("run.workers", 1)
        unknown = cfg.unknown_keys()
        if unknown:
            raise ConfigError("unknown key(s): " + ", ".join(unknown))
        _preflight(name, params)
    except ConfigError as exc:
        raise CliError("invalid_parameters", str(exc))
    except (ValueError, RuntimeError) as exc:
        _reraise(exc)
    return name, cfg, params


def _preflight(name, params):
    from . import experiments

    if name in _LATTICE_EXPERIMENTS:
        experiments._kernel_and_lattice(params)
    elif name in _EPS_EXPERIMENTS:
        experiments._validate_eps_lattices(params)


def _reraise(exc):
    if isinstance(exc, ResolutionError):
        raise CliError("resolution", str(exc))
    if isinstance(exc, SupportOverflowError):
        raise CliError("support_overflow", str(exc))
    if isinstance(exc, StabilityError):
        raise CliError("stability", str(exc))
    if isinstance(exc, ConfigError):
        raise CliError("invalid_parameters", str(exc))
    if isinstance(exc, ValueError):
        raise CliError("invalid_parameters", str(exc))
    raise CliError("runtime", f"{type(exc).__name__}: {exc}")


def _output_dir(name):
    root = Path(os.environ.get("HEISENSPEC_OUT", "outputs"))
    stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    base = root / name / stamp
    out, i = base, 1
    while out.exists():
        out = base.with_name(f"{stamp}-{i}")
        i += 1
    out.mkdir(parents=True)
    return out


def _echo(cfg: Config, name):
    lines = [f"# heisenspec {__version__}", f"experiment = {name}"]
    for key in sorted(cfg.used):
        if key == "experiment":
            continue
        value = cfg.used[key]
        if isinstance(value, (list, tuple)):
            value = " ".join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _summary(result, elapsed):
    lines = [f"experiment = {result.name}", f"status = {'PASS' if result.passed else 'FAIL'}",
             f"runtime_seconds = {elapsed:.1f}"]
    for series, key, value in result.rows:
        if series == "fitted_slope" or series == "fitted_order":
            lines.append(f"{series}.{key} = {value!r}")
    for key in sorted(result.notes):
        lines.append(f"note.{key} = {result.notes[key]!r}")
    for c in result.checks:
        lines.append(f"check.{c.name} = {'PASS' if c.passed else 'FAIL'} value={c.value!r} "
                     f"target={c.target}")
    return "\n".join(lines) + "\n"


def cmd_run(path):
    name, cfg, _ = _prepare(path)
    start = time.perf_counter()
    try:
        result = run_experiment(name, cfg)
    except CliError:
        raise
    except Exception as exc:  # mapped to an exit code below
        _reraise(exc)
    elapsed = time.perf_counter() - start
    out = _output_dir(name)
    (out / "inputs.echo").write_text(_echo(cfg, name))
    result.to_csv(out / "results.csv")
    (out / "summary.txt").write_text(_summary(result, elapsed))
    print(out)
    if not result.passed:
        failed = ",".join(c.name for c in result.checks if not c.passed)
        raise CliError("checks_failed", f"failed checks: {failed}; see {out / 'summary.txt'}")
    return 0


def cmd_validate(path):
    name, cfg, _ = _prepare(path)
    print(f"ok experiment={name}")
    return 0


def cmd_list():
    for name, (_, _, description) in EXPERIMENTS.items():
        print(f"{name}\t{description}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="heisenspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")
    p_run = sub.add_parser("run", help="run the experiment described by a config file")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="check a config file without running it")
    p_val.add_argument("config")
    sub.add_parser("list", help="list experiment names")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            return 0
        return _fail("usage", "invalid command line")
    if args.command is None:
        parser.print_usage(sys.stderr)
        return _fail("usage", "missing command")
    try:
        if args.command == "list":
            return cmd_list()
        if args.command == "validate":
            return cmd_validate(args.config)
        return cmd_run(args.config)
    except CliError as exc:
        return _fail(exc.tag, exc.reason)


if __name__ == "__main__":
    sys.exit(main())
