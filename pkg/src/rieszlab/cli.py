"""Command-line front end: ``rieszlab {apply,verify,simulate,charfun}``.

Every command reads an optional JSON config (``--config``) whose keys match
the long flag names (dashes or underscores); explicit flags override it.
Outputs are CSV and JSON only.  Exit codes: 0 success, 1 a check failed,
2 invalid configuration, 3 numeric precondition violated.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import process
from .errors import (
    ConfigError,
    DecayError,
    DomainTagError,
    EmptyWindow,
    GridIncompatible,
    HypothesisError,
    PoleError,
    RangeError,
    SingularPoint,
    SpecError,
    UnsupportedOrder,
)
from .numerics import Grid, SampledField, read_field_csv, write_field_csv
from .operators import (
    PotentialSpec,
    adjoint_integrable_potential,
    fractional_laplacian,
    integrable_potential_spatial,
    riesz_potential_fourier,
)
from .verification import SUITES, TestFunction, check_composition, default_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

CONFIG_ERRORS = (ConfigError, SpecError, HypothesisError, PoleError, UnsupportedOrder, RangeError)
NUMERIC_ERRORS = (DecayError, SingularPoint, GridIncompatible, EmptyWindow, DomainTagError)

APPLY_OPERATORS = ("frac_laplacian", "riesz", "integrable_riesz", "adjoint")
NAMED_INPUTS = ("gaussian", "shifted_gaussian", "compact_bump", "bump_psi", "moment_cancelled")

# defaults for every command; a config file or a flag replaces them
DEFAULTS: dict[str, Any] = {
    "out": None,
    "seed": 0,
    "threads": None,
    "op": "integrable_riesz",
    "gamma": 0.5,
    "p": 1.0,
    "d": 1,
    "L": 20.0,
    "n": 4096,
    "input": "gaussian",
    "suite": ["all"],
    "gamma1": None,
    "gamma2": None,
    "lam": 1.0,
    "box": 20.0,
    "amplitude": "deterministic",
    "amplitude_params": None,
    "t": [0.5, 1.0, 2.0],
    "n_samples": 10000,
    "y0": None,
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _p_value(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for all subcommands; unset flags stay ``None`` so config values survive."""
    parser = argparse.ArgumentParser(prog="rieszlab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with parameter values")
    common.add_argument("--out", help="output directory (default: $RIESZLAB_OUT or the working directory)")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed for every random stream")
    common.add_argument("--threads", type=int, help="worker threads (default: available cores)")
    common.add_argument("--gamma", type=float)
    common.add_argument("--p", type=_p_value, help="integrability exponent; 'inf' allowed")
    common.add_argument("--d", type=int, choices=(1, 2))
    common.add_argument("--L", type=float, help="grid half-width")
    common.add_argument("--n", type=int, help="grid points per axis")

    sub = parser.add_subparsers(dest="command", required=True)
    apply_p = sub.add_parser("apply", parents=[common], help="apply an operator to a field")
    apply_p.add_argument("--op", choices=APPLY_OPERATORS)
    apply_p.add_argument("--input", help=f"named test function {NAMED_INPUTS} or a field CSV path")

    verify_p = sub.add_parser("verify", parents=[common], help="run verification suites")
    verify_p.add_argument("--suite", type=lambda s: [v for v in s.split(",") if v], help="comma-separated suite names")
    verify_p.add_argument("--gamma1", type=float)
    verify_p.add_argument("--gamma2", type=float)

    for name, helptext in (("simulate", "draw a Poisson realization and render the process"),
                           ("charfun", "compare closed-form and Monte-Carlo characteristic functionals")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--lam", type=float, help="impulse intensity")
        sp.add_argument("--box", type=float, help="half-width B of the impulse box")
        sp.add_argument("--amplitude", help="deterministic, gaussian, laplace or uniform")
        sp.add_argument("--amplitude-params", type=_float_list, help="comma-separated amplitude parameters")
        if name == "charfun":
            sp.add_argument("--t", type=_float_list, help="comma-separated t values")
            sp.add_argument("--n-samples", type=int)
            sp.add_argument("--y0", type=_float_list, help="pointwise evaluation point (omit for the test functional)")
            sp.add_argument("--input", help="named test function for the functional")
    return parser


def resolve_config(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, the JSON config file and explicit flags (in that order)."""
    cfg = dict(DEFAULTS)
    if args.command == "charfun":
        cfg["input"] = "compact_bump"
        cfg["L"], cfg["n"] = 32.0, 4096
    if getattr(args, "config", None) is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {args.config}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = value
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            cfg[key] = value
    if cfg["out"] is None:
        cfg["out"] = os.environ.get("RIESZLAB_OUT", ".")
    if cfg["threads"] is None:
        cfg["threads"] = os.cpu_count() or 1
    if isinstance(cfg["p"], str):
        cfg["p"] = _p_value(cfg["p"])
    if isinstance(cfg["suite"], str):
        cfg["suite"] = [s for s in cfg["suite"].split(",") if s]
    for key in ("t", "y0", "amplitude_params"):
        if isinstance(cfg[key], (int, float)):
            cfg[key] = [float(cfg[key])]
    if not 0 <= int(cfg["seed"]) < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if int(cfg["threads"]) < 1:
        raise ConfigError("threads must be at least 1")
    return cfg


def _grid(cfg: dict[str, Any]) -> Grid:
    return Grid(int(cfg["d"]), float(cfg["L"]), int(cfg["n"]))


def _spec(cfg: dict[str, Any]) -> PotentialSpec:
    return PotentialSpec(float(cfg["gamma"]), float(cfg["p"]), int(cfg["d"]))


def _test_function(name: str, d: int) -> TestFunction:
    if name == "bump_psi":
        return TestFunction.bump_psi((0,) * d)
    if name == "moment_cancelled":
        return TestFunction.moment_cancelled(0)
    return getattr(TestFunction, name)()


def _input_field(cfg: dict[str, Any], grid: Grid) -> SampledField:
    source = str(cfg["input"])
    if source in NAMED_INPUTS:
        return _test_function(source, grid.d).sample(grid)
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"input {source!r} is neither a named test function {NAMED_INPUTS} nor an existing file")
    try:
        return read_field_csv(path)
    except (OSError, ValueError, KeyError, IndexError) as exc:
        raise ConfigError(f"cannot read field CSV {source}: {exc}") from exc


def _out_dir(cfg: dict[str, Any]) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _amplitude(cfg: dict[str, Any]) -> process.AmplitudeDist:
    kind = str(cfg["amplitude"])
    params = cfg["amplitude_params"]
    if params is None:
        params = (0.0, 1.0) if kind == "uniform" else (1.0,)
    return process.AmplitudeDist(kind, tuple(params))


def _poisson(cfg: dict[str, Any]) -> process.PoissonConfig:
    return process.PoissonConfig(float(cfg["lam"]), float(cfg["box"]), _amplitude(cfg), int(cfg["seed"]), int(cfg["d"]))


def cmd_apply(cfg: dict[str, Any]) -> int:
    """Write ``field.csv`` and ``diagnostics.json`` for the chosen operator."""
    op = cfg["op"]
    if op not in APPLY_OPERATORS:
        raise ConfigError(f"unknown operator {op!r}; choose from {APPLY_OPERATORS}")
    grid = _grid(cfg)
    if op in ("integrable_riesz", "adjoint"):
        spec = _spec(cfg)
    f = _input_field(cfg, grid)
    gamma = float(cfg["gamma"])
    if op == "frac_laplacian":
        out, diag = fractional_laplacian(f, gamma), {"path": "fourier"}
    elif op == "riesz":
        out, diag = riesz_potential_fourier(f, gamma), {"path": "fourier"}
    else:
        run = integrable_potential_spatial if op == "integrable_riesz" else adjoint_integrable_potential
        res = run(f, spec)
        out, diag = res.field, json.loads(res.diagnostics_json())
    dest = _out_dir(cfg)
    write_field_csv(out, dest / "field.csv")
    diag.update({"op": op, "gamma": gamma, "p": cfg["p"], "d": grid.d, "L": grid.L, "n": grid.n})
    (dest / "diagnostics.json").write_text(json.dumps(diag, indent=2, default=str) + "\n")
    return EXIT_OK


def cmd_verify(cfg: dict[str, Any]) -> int:
    """Print one JSON line per check report; also write them to ``reports.jsonl``."""
    names = list(cfg["suite"])
    if not names:
        raise ConfigError("empty suite selection")
    unknown = [s for s in names if s != "all" and s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)} or 'all'")
    custom = cfg["gamma1"] is not None or cfg["gamma2"] is not None
    if custom:
        if names != ["composition"]:
            raise ConfigError("--gamma1/--gamma2 apply to the composition suite only")
        if cfg["gamma1"] is None or cfg["gamma2"] is None:
            raise ConfigError("--gamma1 and --gamma2 must be given together")
        grid = Grid(1, 20.0, 2048)
        reports = [check_composition(float(cfg["gamma1"]), float(cfg["gamma2"]), 1, TestFunction.gaussian(), grid)]
    else:
        reports = default_suite(names)
    lines = [r.to_json() for r in reports]
    (_out_dir(cfg) / "reports.jsonl").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_simulate(cfg: dict[str, Any]) -> int:
    """Write ``realization.csv``, the rendered ``field.csv`` and ``diagnostics.json``."""
    pc = _poisson(cfg)
    spec = _spec(cfg)
    if spec.p != 1.0:
        raise SpecError(f"the Poisson process uses p = 1, got p = {spec.p:g}")
    grid = _grid(cfg)
    r = process.sample_realization(pc)
    rendered = process.render_field(r, spec, grid)
    dest = _out_dir(cfg)
    process.write_realization_csv(r, dest / "realization.csv")
    write_field_csv(rendered.field, dest / "field.csv")
    diag = json.loads(rendered.diagnostics_json())
    diag.update({"seed": pc.seed, "lambda": pc.lam, "box": pc.box, "expected_count": pc.expected_count})
    (dest / "diagnostics.json").write_text(json.dumps(diag, indent=2, default=str) + "\n")
    return EXIT_OK


def cmd_charfun(cfg: dict[str, Any]) -> int:
    """One JSON row per ``t``; exit 1 when any row disagrees beyond three standard errors."""
    pc = _poisson(cfg)
    spec = _spec(cfg)
    n_samples = int(cfg["n_samples"])
    if n_samples < process.MIN_SAMPLES:
        raise ConfigError(f"n_samples must be at least {process.MIN_SAMPLES}, got {n_samples}")
    ts = [float(t) for t in cfg["t"]]
    if not ts:
        raise ConfigError("no t values given")
    threads = int(cfg["threads"])
    if cfg["y0"] is not None:
        y0 = list(cfg["y0"])
        samples = process.pointwise_samples(y0, spec, pc, n_samples, threads)
        closed = [process.pointwise_charfun(y0, spec, t, pc) for t in ts]
    else:
        grid = _grid(cfg)
        f = _input_field(cfg, grid)
        res = integrable_potential_spatial(f, spec) if spec.p == 1.0 else None
        samples = process.functional_samples(f, spec, pc, n_samples, threads, res)
        closed = [process.charfun_closed_form(f, spec, t, pc, res) for t in ts]
    rows = []
    for t, c in zip(ts, closed):
        est = process.estimate_charfun(samples, t)
        agree = abs(c - est.value) <= 3.0 * est.stderr
        rows.append({
            "t": t,
            "closed_re": c.real,
            "closed_im": c.imag,
            "mc_re": est.value.real,
            "mc_im": est.value.imag,
            "stderr": est.stderr,
            "agree": bool(agree),
        })
    lines = [json.dumps(row) for row in rows]
    (_out_dir(cfg) / "charfun.jsonl").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return EXIT_OK if all(row["agree"] for row in rows) else EXIT_CHECK_FAILED


COMMANDS = {"apply": cmd_apply, "verify": cmd_verify, "simulate": cmd_simulate, "charfun": cmd_charfun}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
