"""
Command-line front end.

Subcommands
-----------
run            One protocol run; prints the walkthrough and verdict.
attack         A passive or active attack; prints recovered vs actual secret.
sweep          A Monte Carlo or exhaustive campaign; writes text and CSV.
verify-state   Rebuilds the carrier state and checks its structure.

Exit codes: 0 success, 1 verify-state failure, 2 usage error, 3 run aborted.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from qpclab import __version__
from qpclab.analysis.experiments import exhaustive_correctness, monte_carlo
from qpclab.analysis.oracles import amplitude_census
from qpclab.analysis.results import ExperimentKind, ExperimentReport, ExperimentSpec
from qpclab.attacks.active import active_attack
from qpclab.attacks.passive import run_passive_attack
from qpclab.errors import ConfigurationError
from qpclab.primitives.encoding import SecretInput, bell_code_bits, parse_pairs
from qpclab.primitives.factories import (
    UPSILON_AMPLITUDE,
    UPSILON_NEGATIVE_KETS,
    UPSILON_POSITIVE_KETS,
    build_upsilon,
)
from qpclab.primitives.keys import Party
from qpclab.primitives.quantum import bell_measure_pair, z_measure_pair
from qpclab.protocol.channel import EveModel, InterceptResend, NoEve
from qpclab.protocol.results import ProtocolConfig, Variant
from qpclab.protocol.run import run_protocol
from qpclab.serialization import dumps, report_csv, write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_ABORTED = 3

BOOLEAN_KEYS = {"exhaustive"}
PARTIES = {"alice": Party.ALICE, "bob": Party.BOB}
AMPLITUDE_TOLERANCE = 1e-12


class UsageError(Exception):
    """A flag combination the parser cannot reject on its own."""


def _secret(value: int | None, bits: int, name: str) -> SecretInput:
    if value is None:
        raise UsageError(f"--{name} is required")
    try:
        return SecretInput(value, bits)
    except ValueError as error:
        raise UsageError(f"--{name}: {error}") from error


def _variant(args: argparse.Namespace) -> Variant:
    try:
        return Variant(args.variant)
    except ValueError as error:
        raise UsageError(f"--variant must be original or fixed, not {args.variant!r}") from error


def _protocol_config(args: argparse.Namespace) -> ProtocolConfig:
    try:
        return ProtocolConfig(
            variant=_variant(args),
            n_bits=args.bits,
            decoy_count=args.decoys,
            threshold=args.threshold,
            seed=args.seed,
            max_attempts=args.max_attempts,
        )
    except (TypeError, ValueError) as error:
        raise UsageError(str(error)) from error


def _eve(args: argparse.Namespace) -> EveModel | None:
    if args.eve is None:
        return None
    if args.eve == "none":
        return NoEve()
    if args.eve == "intercept-resend":
        names = [name.strip().lower() for name in args.eve_links.split(",") if name.strip()]
        if not names or any(name not in PARTIES for name in names):
            raise UsageError(f"--eve-links must name alice and/or bob, not {args.eve_links!r}")
        links = [PARTIES[name] for name in names]
        return InterceptResend(links)

    raise UsageError(f"--eve must be none or intercept-resend, not {args.eve!r}")


def _emit(args: argparse.Namespace, suffix: str, text: str) -> None:
    if args.output is None:
        return
    path = Path(f"{args.output}{suffix}")
    write_text(path, text)
    logger.info("wrote %s", path)


def cmd_run(args: argparse.Namespace) -> int:
    """Run the protocol once. Exit 3 if the run aborted."""
    config = _protocol_config(args)
    x = _secret(args.x, config.n_bits, "x")
    y = _secret(args.y, config.n_bits, "y")
    transcript = run_protocol(x, y, config, eve=_eve(args))

    print(transcript)
    _emit(args, "", dumps(transcript))
    return EXIT_ABORTED if transcript.verdict.is_aborted else EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    """Run an attack. The attack's success is data; the exit code is 0."""
    config = _protocol_config(args)
    x = _secret(args.x, config.n_bits, "x")
    y = _secret(args.y, config.n_bits, "y")

    if args.kind == "passive":
        transcript, reports = run_passive_attack(x, y, config)
    elif args.kind == "active":
        transcript, report = active_attack(x, y, config, PARTIES[args.attacker])
        reports = [report]
    else:
        raise UsageError(f"--kind must be passive or active, not {args.kind!r}")

    for report in reports:
        print(report)
    _emit(args, "", dumps(reports, extra={"transcript": transcript.to_dict()}))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Run a campaign and write its text and CSV reports."""
    try:
        kind = ExperimentKind(args.kind)
    except ValueError as error:
        raise UsageError(f"unknown sweep kind {args.kind!r}") from error
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")

    report: ExperimentReport
    if args.exhaustive:
        if kind is not ExperimentKind.CORRECTNESS:
            raise UsageError("--exhaustive applies to the correctness sweep only")
        try:
            report = exhaustive_correctness(
                args.bits, _variant(args), range(args.seed, args.seed + args.trials)
            )
        except ValueError as error:
            raise UsageError(str(error)) from error
    else:
        try:
            differences = tuple(parse_pairs(d) for d in args.difference) or None
            spec = ExperimentSpec(
                kind,
                n_bits=args.bits,
                trials=args.trials,
                seed=args.seed,
                variant=_variant(args),
                eve=_eve(args),
                decoy_count=args.decoys,
                threshold=args.threshold,
                differences=differences,
                x=args.x or 0,
                y=args.y or 0,
                attacker=PARTIES[args.attacker],
            )
        except (TypeError, ValueError) as error:
            raise UsageError(str(error)) from error
        report = monte_carlo(spec)

    text, table = dumps(report), report_csv(report)
    if args.output is None:
        if args.format == "csv":
            sys.stdout.write(table)
        else:
            print(report)
        return EXIT_OK

    print(report)
    if args.format in ("text", "both"):
        _emit(args, ".txt", text)
    if args.format in ("csv", "both"):
        _emit(args, ".csv", table)
    return EXIT_OK


def cmd_verify_state(args: argparse.Namespace) -> int:
    """
    Check the carrier state: amplitude census, sign pattern and the Bell
    correlation of sampled measurement rounds. Exit 1 on any failure.
    """
    state = build_upsilon()
    census = amplitude_census(state)
    print(
        f"{census['nonzero']} nonzero, {census['positive']} positive, "
        f"{census['negative']} negative"
    )
    print(f"max |amplitude error| = {census['max_error']:.3e}")

    negatives = {
        format(i, "06b") for i, a in enumerate(state.amplitudes) if a.real < -AMPLITUDE_TOLERANCE
    }
    ok = (
        (census["nonzero"], census["positive"], census["negative"]) == (32, 20, 12)
        and census["max_error"] <= AMPLITUDE_TOLERANCE
        and negatives == set(UPSILON_NEGATIVE_KETS)
    )
    if negatives != set(UPSILON_NEGATIVE_KETS):
        print(f"negative kets differ: {sorted(negatives ^ set(UPSILON_NEGATIVE_KETS))}")
    if not ok:
        expected = np.zeros_like(state.amplitudes)
        expected[[int(k, 2) for k in UPSILON_POSITIVE_KETS]] = UPSILON_AMPLITUDE
        expected[[int(k, 2) for k in UPSILON_NEGATIVE_KETS]] = -UPSILON_AMPLITUDE
        worst = int(np.argmax(np.abs(state.amplitudes - expected)))
        value = state.amplitudes[worst]
        print(
            f"worst amplitude |{worst:06b}> = {value.real:+.6f}{value.imag:+.6f}j "
            f"(expected {expected[worst].real:+.6f})"
        )

    rng = np.random.default_rng(args.seed)
    violations = 0
    for sample in range(args.samples):
        m_a, collapsed = z_measure_pair(state, 0, 1, rng)
        m_b, collapsed = z_measure_pair(collapsed, 2, 3, rng)
        m_c, _ = bell_measure_pair(collapsed, 4, 5, rng)
        if (m_a ^ m_b ^ bell_code_bits(m_c)).value != 0:
            violations += 1
            print(f"sample {sample}: M_A={m_a} M_B={m_b} M_C={m_c}")

    print(f"Bell-correlation violations = {violations} / {args.samples}")
    return EXIT_OK if ok and violations == 0 else EXIT_VERIFY_FAILED


def _add_protocol_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x", type=int, help="Alice's secret")
    parser.add_argument("--y", type=int, help="Bob's secret")
    parser.add_argument("--bits", type=int, default=4, help="bit length N of both secrets")
    parser.add_argument("--variant", default="original", help="original or fixed")
    parser.add_argument("--decoys", type=int, help="decoys per sequence (default 2*ceil(N/2))")
    parser.add_argument("--threshold", type=float, default=0.0, help="tolerated decoy error rate")
    parser.add_argument("--max-attempts", type=int, default=1, help="restarts after a failed check")
    parser.add_argument("--seed", type=int, help="random seed (required)")
    parser.add_argument("--output", help="where to write the canonical document(s)")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value file of flag defaults")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for progress, -vv for per-run detail"
    )


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    """The top-level parser and its subcommand parsers, keyed by name."""
    parser = argparse.ArgumentParser(
        prog="qpclab",
        description="Simulate, attack and audit a quantum private comparison protocol.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="run the protocol once")
    _add_protocol_flags(run)
    run.add_argument("--eve", help="none or intercept-resend")
    run.add_argument("--eve-links", default="alice", help="links Eve sits on, e.g. alice,bob")
    run.set_defaults(handler=cmd_run)

    attack = subparsers.add_parser("attack", help="run a passive or active attack")
    _add_protocol_flags(attack)
    attack.add_argument("--kind", default="passive", help="passive or active")
    attack.add_argument("--attacker", choices=sorted(PARTIES), default="bob")
    attack.set_defaults(handler=cmd_attack)

    sweep = subparsers.add_parser("sweep", help="run an experiment campaign")
    _add_protocol_flags(sweep)
    sweep.add_argument("--kind", default="correctness", help=", ".join(str(k) for k in ExperimentKind))
    sweep.add_argument("--trials", type=int, default=1000, help="trials (seeds with --exhaustive)")
    sweep.add_argument("--exhaustive", action="store_true", help="every (X, Y) pair instead of sampling")
    sweep.add_argument("--eve", help="none or intercept-resend")
    sweep.add_argument("--eve-links", default="alice", help="links Eve sits on, e.g. alice,bob")
    sweep.add_argument("--attacker", choices=sorted(PARTIES), default="bob")
    sweep.add_argument(
        "--difference", action="append", default=[], help="difference pattern such as 11,01 (repeatable)"
    )
    sweep.add_argument("--format", choices=("text", "csv", "both"), default="both")
    sweep.set_defaults(handler=cmd_sweep)

    verify = subparsers.add_parser("verify-state", help="check the six-qubit carrier state")
    verify.add_argument("--samples", type=int, default=10_000, help="measurement rounds to sample")
    verify.add_argument("--seed", type=int, default=0, help="random seed")
    verify.set_defaults(handler=cmd_verify_state)

    for sub in (run, attack, sweep, verify):
        _add_common_flags(sub)

    return parser, {"run": run, "attack": attack, "sweep": sweep, "verify-state": verify}


def read_config(path: str | Path) -> dict[str, str]:
    """
    Read a flat key = value file. Keys may use dashes or underscores;
    '#' starts a comment.

    Raises
    ------
    UsageError
        If the file cannot be read or parsed.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        text = Path(path).read_text(encoding="utf-8")
        parser.read_string("[qpclab]\n" + text)
    except (OSError, configparser.Error) as error:
        raise UsageError(f"cannot read config {path}: {error}") from error

    return {key.replace("-", "_"): value for key, value in parser["qpclab"].items()}


def _apply_config(subparser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    known = vars(subparser.parse_args([]))
    defaults: dict[str, Any] = {}
    for key, value in values.items():
        if key not in known or key in ("config", "handler"):
            raise UsageError(f"unknown config key {key!r}")
        if key in BOOLEAN_KEYS:
            defaults[key] = value.strip().lower() in ("1", "true", "yes", "on")
        elif key == "difference":
            defaults[key] = [part.strip() for part in value.split(";") if part.strip()]
        else:
            defaults[key] = value
    subparser.set_defaults(**defaults)


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """
    Parse the command line, with values from --config as defaults that
    explicit flags override.
    """
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        subparser = subparsers[args.command]
        try:
            _apply_config(subparser, read_config(args.config))
        except UsageError as error:
            subparser.error(str(error))
        args = parser.parse_args(argv)

    if args.command != "verify-state" and args.seed is None:
        subparsers[args.command].error("--seed is required (flag or config file)")

    args.usage_error = subparsers[args.command].error
    return args


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the qpclab command. Returns the exit code."""
    args = parse_args(argv)
    configure_logging(args.verbose)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (UsageError, ConfigurationError) as error:
        args.usage_error(str(error))
        return EXIT_USAGE
