"""Command line interface."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import spin_algebra as sa
from ._logging import configure_logging
from .config import RunConfig, load_config
from .core import (
    SWEEP_AXES,
    run_coeffs,
    run_evolve,
    run_oracle_compare,
    run_spectrum,
    run_sweep,
)
from .errors import ConfigError, NumericalError, QsrError
from .event_router import EventRouter
from .output import OutputDirectory, write_json
from .renderers import RichRenderer
from .reporting import error_record
from .schema import schema_json

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _ = common.add_argument("--config", type=Path, help="Flat dotted-key TOML config file.")
    _ = common.add_argument("--out", help="Output directory (overrides output.directory).")
    _ = common.add_argument(
        "--format",
        dest="formats",
        help="Comma separated artifact formats: csv, json, svg.",
    )
    _ = common.add_argument(
        "--threads",
        type=int,
        default=1,
        help="Worker threads for independent coupling or sweep jobs.",
    )
    _ = common.add_argument("--seed", type=int, help="Seed recorded in the report provenance.")
    _ = common.add_argument(
        "--set",
        dest="assignments",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one config key, e.g. --set bath.n_modes=100. Repeatable.",
    )
    _ = common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase log verbosity (-v info, -vv debug).",
    )
    _ = common.add_argument(
        "--no-progress",
        action="store_true",
        help="Do not draw progress bars on stderr.",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsrelax",
        description=(
            "Markov approximation of a spin-1/2 coupled to the quantized field,"
            + " checked against a truncated Fock-space model."
        ),
    )
    common = _common_options()
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    _ = sub.add_parser(
        "coeffs", parents=[common], help="Golden-rule coefficients d_m and kernel diagnostics."
    )

    spectrum = sub.add_parser(
        "spectrum", parents=[common], help="Eigensystem of L and CP certificates."
    )
    _ = spectrum.add_argument(
        "--synthetic-d",
        metavar="RE1,IM1,RE0,IM0,REM1,IMM1",
        help="Use these coefficients instead of computing them (testing aid).",
    )

    evolve = sub.add_parser("evolve", parents=[common], help="Trajectories of e^{tg²L}γ_t.")
    initial = evolve.add_mutually_exclusive_group()
    _ = initial.add_argument(
        "--state", choices=sa.NAMED_STATES, help="Named initial state (default: up)."
    )
    _ = initial.add_argument(
        "--spinor", metavar="A0R,A0I,A1R,A1I", help="Explicit unit spinor."
    )
    _ = evolve.add_argument("--observable", choices=("bloch", "ladder"), default="bloch")

    _ = sub.add_parser(
        "oracle-compare",
        parents=[common],
        help="Sup-norm error against the truncated Fock-space model.",
    )

    sweep = sub.add_parser("sweep", parents=[common], help="Convergence sweep along one axis.")
    _ = sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    _ = sweep.add_argument("--values", required=True, help="Comma separated axis values.")
    _ = sweep.add_argument(
        "--oracle",
        action="store_true",
        help="Also measure E(g) at each point (always on for excitation_cap).",
    )

    _ = sub.add_parser("schema", help="Print the JSON schema of the reports and exit.")
    return parser


def _floats(text: str, *, what: str, count: int | None = None) -> list[float]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    try:
        values = [float(s) for s in items]
    except ValueError as exc:
        raise ConfigError(f"{what}: expected comma separated numbers, got {text!r}") from exc
    if count is not None and len(values) != count:
        raise ConfigError(f"{what}: expected {count} numbers, got {len(values)}")
    return values


def _pairs_to_complex(values: Sequence[float]) -> list[complex]:
    return [complex(values[k], values[k + 1]) for k in range(0, len(values), 2)]


def _overrides(args: argparse.Namespace) -> dict[str, object]:
    overrides: dict[str, object] = {}
    for assignment in args.assignments:
        key, sep, value = str(assignment).partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects KEY=VALUE, got {assignment!r}")
        overrides[key.strip()] = value.strip()
    if args.out is not None:
        overrides["output.directory"] = args.out
    if args.formats is not None:
        overrides["output.formats"] = args.formats
    if args.seed is not None:
        overrides["seed"] = args.seed
    return overrides


def _initial_state(args: argparse.Namespace) -> sa.Spinor:
    if args.spinor is None:
        return sa.named_state(args.state or "up")
    a0r, a0i, a1r, a1i = _floats(args.spinor, what="--spinor", count=4)
    try:
        return sa.normalized_spinor([complex(a0r, a0i), complex(a1r, a1i)], atol=1e-9)
    except ValueError as exc:
        raise ConfigError(f"--spinor: {exc}", kind="invalid state") from exc


def _renderer(args: argparse.Namespace) -> RichRenderer | None:
    if args.no_progress or not sys.stderr.isatty():
        return None
    return RichRenderer()


def _dispatch(
    args: argparse.Namespace, config: RunConfig, out: OutputDirectory
) -> dict[str, Any]:
    threads = max(1, int(args.threads))
    if args.command == "coeffs":
        return run_coeffs(config, out).to_dict()
    if args.command == "spectrum":
        synthetic = None
        if args.synthetic_d is not None:
            values = _floats(args.synthetic_d, what="--synthetic-d", count=6)
            synthetic = _pairs_to_complex(values)
        return run_spectrum(config, out, synthetic).to_dict()
    if args.command == "evolve":
        return run_evolve(config, out, _initial_state(args), args.observable).to_dict()
    values = _floats(args.values, what="--values") if args.command == "sweep" else []
    router = EventRouter()
    renderer = _renderer(args)
    if renderer is not None:
        router.subscribe(renderer)
    try:
        if args.command == "oracle-compare":
            return run_oracle_compare(config, out, threads=threads, emit=router.emit).to_dict()
        report = run_sweep(
            config,
            out,
            args.axis,
            values,
            oracle=args.oracle,
            threads=threads,
            emit=router.emit,
        )
        return report.to_dict()
    finally:
        if renderer is not None:
            renderer.close()


def _fail(exc: QsrError, command: str, directory: Path | None) -> int:
    record = error_record(exc, command)
    print(json.dumps(record, sort_keys=True))
    logger.error("%s: %s", exc.kind, exc.message or exc)
    if directory is not None:
        try:
            write_json(directory / "error.json", record)
        except OSError as io_exc:
            logger.warning("could not write error record: %s", io_exc)
    return exc.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "schema":
        print(schema_json())
        return 0

    _ = configure_logging(args.verbose)
    directory = Path(args.out) if args.out is not None else None
    try:
        config = load_config(args.config, overrides=_overrides(args))
        directory = Path(config.output.directory)
        out = OutputDirectory(directory, config.output.formats)
        summary = _dispatch(args, config, out)
    except QsrError as exc:
        return _fail(exc, args.command, directory)
    except (ValueError, ArithmeticError) as exc:
        # Input errors are converted to ConfigError where they are parsed.
        failure = NumericalError(str(exc), kind="computation error")
        return _fail(failure, args.command, directory)

    print(json.dumps(summary, sort_keys=True))
    return 0
