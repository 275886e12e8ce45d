#!/usr/bin/env python3
"""Command-line interface for frame-bound evolution-time estimation."""

import argparse
import math
import sys
from typing import Dict, List, Optional

from loguru import logger

from framebound.config import DEFAULT_LOG_LEVEL, DEFAULT_SEED, DEFAULT_THREADS
from framebound.errors import NumericalError, ScenarioError
from framebound.models import PureState, SweepGrid
from framebound.quantum import bloch_state
from framebound.runner import run_compare, run_epsilon_study, run_tomography_demo
from framebound.scenarios import build_scenario, load_scenario_file, parse_pauli, presets

EXIT_OK = 0
EXIT_SCENARIO_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

DESCRIPTION = (
    "Estimate quantum evolution times from the rotating-frame transcendental equation "
    "and compare them with the Anandan-Aharonov bound and norm-based estimates."
)


def _build_parser() -> argparse.ArgumentParser:
    parser: argparse.ArgumentParser = argparse.ArgumentParser(prog="framebound", description=DESCRIPTION)
    parser.add_argument(
        "--log-level",
        default=DEFAULT_LOG_LEVEL,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help=f"Logging level (default: {DEFAULT_LOG_LEVEL})",
    )
    parser.add_argument(
        "--show-help",
        action="store_true",
        help="Display this help message and exit",
    )
    commands = parser.add_subparsers(dest="command")

    cmp = commands.add_parser("compare", help="Compare estimators against the actual time over a fidelity grid")
    cmp.add_argument("--scenario", help=f"Preset name, one of: {', '.join(sorted(presets()))}")
    cmp.add_argument("--config", help="Scenario file with key = value lines (overrides the preset)")
    cmp.add_argument("--fidelity-grid", help="Fidelity targets as lo:hi:count or a comma-separated list")
    cmp.add_argument("--sweep-n-phase", type=int, help="Sweep points per relative phase")
    cmp.add_argument("--sweep-n-angle", type=int, help="Sweep points per hyperspherical angle")
    cmp.add_argument("--oversample", type=int, help="Time-scan points per shortest frame period")
    cmp.add_argument("--refine", type=int, help="Local refinement points per side around the coarse minimum")
    cmp.add_argument("--horizon", type=float, help="Time horizon in seconds")
    cmp.add_argument("--oracle", choices=["exact", "rk4"], help="Actual-time oracle (default: exact)")
    cmp.add_argument("--strict-hs", action="store_true", help="Use the literal sum of squared singular values")
    cmp.add_argument("--out", help="Output CSV path (default: standard output)")
    cmp.add_argument("--threads", type=int, help=f"Rows evaluated in parallel (default: {DEFAULT_THREADS})")

    eps = commands.add_parser("epsilon", help="Epsilon-family convergence study for a time-independent H")
    eps.add_argument("--hamiltonian", default="sz+sx", help="Pauli sum, e.g. 'sz+sx' (default: sz+sx)")
    eps.add_argument("--state", default="up", choices=["up", "down"], help="Initial basis state (default: up)")
    eps.add_argument("--theta", type=float, help="Bloch polar angle in degrees (overrides --state)")
    eps.add_argument("--phi", type=float, default=0.0, help="Bloch azimuth in degrees")
    eps.add_argument("--fidelity", type=float, default=0.75, help="Target fidelity (default: 0.75)")
    eps.add_argument(
        "--epsilons",
        default="0.2,0.1,0.05,0.025",
        help="Comma-separated frame parameters (default: 0.2,0.1,0.05,0.025)",
    )
    eps.add_argument("--method", default="frame-fidelity", choices=["frame-fidelity", "sweep"])
    eps.add_argument("--sweep-n-phase", type=int, default=SweepGrid().n_phase, help="Sweep points per phase")
    eps.add_argument("--out", help="Output CSV path (default: standard output)")
    eps.add_argument("--threads", type=int, default=DEFAULT_THREADS, help="Sweep threads")

    tomo = commands.add_parser("tomography", help="Magnetization readout and density-matrix reconstruction demo")
    tomo.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"Random seed (default: {DEFAULT_SEED})")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    return _build_parser().parse_args(argv)


def help() -> None:
    """Display help message for the user."""
    _build_parser().print_help()


def setup_logging(log_level: str) -> None:
    """
    Configure loguru logger with specified level.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    logger.remove()  # Remove default handler
    logger.add(
        sys.stderr,
        format=(
            "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
            "<level>{level: <8}</level> | "
            "<yellow>{extra[scenario]}</yellow> | "
            "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
            "<level>{message}</level>"
        ),
        level=log_level.upper(),
        colorize=True,
    )
    logger.configure(extra={"scenario": "main"})


def scenario_overrides(args: argparse.Namespace) -> Dict[str, str]:
    """
    Merge preset, scenario file and flags into one key = value mapping (later sources win).

    Args:
        args: Parsed compare arguments

    Returns:
        Overrides for scenarios.build_scenario
    """
    overrides: Dict[str, str] = {}
    if args.scenario:
        overrides["scenario"] = args.scenario
    if args.config:
        overrides.update(load_scenario_file(args.config))
    flags = {
        "fidelity_grid": args.fidelity_grid,
        "n_phase": args.sweep_n_phase,
        "n_angle": args.sweep_n_angle,
        "oversample": args.oversample,
        "refine": args.refine,
        "horizon": args.horizon,
        "oracle": args.oracle,
        "out": args.out,
        "threads": args.threads,
    }
    overrides.update({key: str(value) for key, value in flags.items() if value is not None})
    if args.strict_hs:
        overrides["strict_literal_hs"] = "true"
    return overrides


def _run_epsilon(args: argparse.Namespace) -> None:
    hamiltonian = parse_pauli(args.hamiltonian)
    if args.theta is not None:
        psi0 = bloch_state(math.radians(args.theta), math.radians(args.phi))
    else:
        psi0 = PureState.basis(2, 0 if args.state == "up" else 1)
    try:
        epsilons = [float(v) for v in args.epsilons.split(",") if v.strip()]
    except ValueError as e:
        raise ScenarioError(f"invalid epsilon list {args.epsilons!r}") from e
    if not 0.0 <= args.fidelity <= 1.0:
        raise ScenarioError(f"fidelity must lie in [0, 1], got {args.fidelity}")
    if any(not 0.0 < eps <= 1.0 for eps in epsilons):
        raise ScenarioError(f"epsilons must lie in (0, 1]: {epsilons}")
    try:
        sweep = SweepGrid(n_phase=args.sweep_n_phase)
    except ValueError as e:
        raise ScenarioError(str(e)) from e
    run_epsilon_study(
        hamiltonian,
        psi0,
        args.fidelity,
        epsilons,
        method=args.method,
        out=args.out,
        sweep=sweep,
        threads=args.threads,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI."""
    args: argparse.Namespace = parse_args(argv)

    if args.show_help or args.command is None:
        help()
        return EXIT_OK

    setup_logging(args.log_level)

    try:
        if args.command == "compare":
            scenario = build_scenario(scenario_overrides(args))
            run_compare(scenario)
        elif args.command == "epsilon":
            _run_epsilon(args)
        else:
            sys.stdout.write(run_tomography_demo(seed=args.seed))
    except ScenarioError as e:
        logger.error("Scenario error: {}", e)
        return EXIT_SCENARIO_ERROR
    except OSError as e:
        logger.error("Cannot write output: {}", e)
        return EXIT_SCENARIO_ERROR
    except NumericalError as e:
        logger.opt(exception=args.log_level == "DEBUG").error("Numerical failure: {}", e)
        return EXIT_NUMERICAL_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
