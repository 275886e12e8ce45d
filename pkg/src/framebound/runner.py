#!/usr/bin/env python3
"""Scenario runs: comparison tables, epsilon studies and the tomography demo."""

from contextlib import contextmanager
import csv
from functools import partial
import math
import sys
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, TextIO

from loguru import logger
import numpy as np

from framebound.config import (
    CSV_FLOAT_FORMAT,
    DEFAULT_COMPARE_EPSILON,
    DEFAULT_SCAN_OVERSAMPLE,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    MIN_SCAN_POINTS,
)
from framebound.estimators import ComparisonSetup, EpsilonMethod, compare, constant_actual_time, epsilon_estimate
from framebound.models import DensityMatrix2, EstimateReport, HermitianOperator, PureState, SweepGrid
from framebound.propagation import ConstantModel, rk4_propagate, scan_step, spectral_span
from framebound.scenarios import Scenario
from framebound.spin_models import NmrModel, exact_trajectory, frame_fidelity, rotating_hamiltonian
from framebound.tomography import measure, reconstruct

COMPARE_COLUMNS = (
    "F",
    "t_actual",
    "t_aa",
    "t_transcendental",
    "t_norm_tr",
    "t_norm_op",
    "t_norm_hs",
    "path_ratio",
    "dH_R",
    "avg_dH_lab",
    "status",
)
EPSILON_COLUMNS = ("epsilon", "t_estimate", "t_actual", "abs_error")
DEMO_RANDOM_STATES = 5


def format_value(value: Any) -> str:
    """CSV cell text: empty for None, 17 significant digits for floats."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), CSV_FLOAT_FORMAT)
    return str(value)


def write_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any]], stream: TextIO) -> None:
    """Write a header and rows with LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(column)) for column in columns])


@contextmanager
def open_output(out: Optional[str]) -> Iterator[TextIO]:
    """Open the output file for writing, or yield standard output when no path is given."""
    if out is None:
        yield sys.stdout
        return
    with open(out, "w", newline="", encoding="utf-8") as stream:
        yield stream


def build_comparison(scenario: Scenario) -> ComparisonSetup:
    """
    Assemble lab model, frame, H_R, initial state and oracle trajectory for a scenario.

    Args:
        scenario: Scenario to run

    Returns:
        ComparisonSetup for estimators.compare

    Raises:
        FrameNotStationary: If the scenario's frame leaves H_R time dependent
    """
    frame = scenario.rotating_frame()
    if scenario.params is not None:
        model: Any = NmrModel(scenario.params)
        h_r = rotating_hamiltonian(scenario.params, frame)
    else:
        h_r = scenario.custom_hamiltonian()
        model = ConstantModel(h_r)
    psi0 = scenario.initial_state()
    step = scan_step(spectral_span(model, scenario.horizon), DEFAULT_SCAN_OVERSAMPLE)

    if scenario.oracle == "rk4":
        trajectory = rk4_propagate(model, psi0, scenario.horizon)
        fidelity = None
    else:
        points = MIN_SCAN_POINTS if math.isinf(step) else max(MIN_SCAN_POINTS, math.ceil(scenario.horizon / step) + 1)
        trajectory = exact_trajectory(frame, h_r, psi0, np.linspace(0.0, scenario.horizon, points))
        fidelity = partial(frame_fidelity, frame, h_r, psi0)
    logger.debug("Oracle {} trajectory with {} samples", scenario.oracle, trajectory.times.size)

    return ComparisonSetup(
        psi0=psi0,
        frame=frame,
        h_r=h_r,
        model=model,
        trajectory=trajectory,
        sweep=scenario.sweep,
        fidelity=fidelity,
        scan_step=step,
        strict_literal_hs=scenario.strict_literal_hs,
        epsilon=DEFAULT_COMPARE_EPSILON if scenario.params is None else None,
    )


def run_compare(scenario: Scenario) -> List[EstimateReport]:
    """
    Compare every estimator against the oracle over the scenario's fidelity grid and write the CSV.

    Args:
        scenario: Scenario to run

    Returns:
        One EstimateReport per fidelity target
    """
    with logger.contextualize(scenario=scenario.name):
        logger.info(
            "Starting compare: targets={} oracle={} sweep={} threads={}",
            len(scenario.fidelity_grid),
            scenario.oracle,
            scenario.sweep,
            scenario.threads,
        )
        reports = compare(build_comparison(scenario), scenario.fidelity_grid, threads=scenario.threads)
        with open_output(scenario.out) as stream:
            write_csv(COMPARE_COLUMNS, (report.to_dict() for report in reports), stream)
        unreachable = sum(report.status == "unreachable" for report in reports)
        logger.info("Wrote {} rows ({} unreachable) to {}", len(reports), unreachable, scenario.out or "stdout")
    return reports


def run_epsilon_study(
    hamiltonian: HermitianOperator,
    psi0: PureState,
    f_target: float,
    epsilons: Sequence[float],
    method: EpsilonMethod = "frame-fidelity",
    out: Optional[str] = None,
    sweep: Optional[SweepGrid] = None,
    threads: int = DEFAULT_THREADS,
) -> List[Dict[str, float]]:
    """
    Estimate the actual time with the epsilon family for each epsilon and write the CSV.

    Args:
        hamiltonian: Time-independent H
        psi0: Initial state
        f_target: Target fidelity
        epsilons: Frame parameters in (0, 1]
        method: "frame-fidelity" or "sweep"
        out: Output path (standard output when None)
        sweep: Sweep resolution for the "sweep" method
        threads: Threads for the "sweep" method

    Returns:
        Rows keyed by the CSV columns
    """
    with logger.contextualize(scenario="epsilon"):
        t_actual = constant_actual_time(hamiltonian, psi0, f_target)
        logger.info("Epsilon study: F={} t_actual={:.9g} method={}", f_target, t_actual, method)
        rows = []
        for epsilon in epsilons:
            estimate = epsilon_estimate(
                hamiltonian, psi0, f_target, epsilon, method=method, t_actual=t_actual, sweep=sweep, threads=threads
            )
            rows.append(
                {"epsilon": epsilon, "t_estimate": estimate, "t_actual": t_actual, "abs_error": abs(estimate - t_actual)}
            )
            logger.debug("epsilon={} estimate={:.12g}", epsilon, estimate)
        with open_output(out) as stream:
            write_csv(EPSILON_COLUMNS, rows, stream)
    return rows


def _format_matrix(matrix: np.ndarray) -> str:
    cells = [[f"{complex(v).real:+.6f}{complex(v).imag:+.6f}j" for v in row] for row in matrix]
    return "[" + ", ".join("[" + ", ".join(row) + "]" for row in cells) + "]"


def run_tomography_demo(seed: int = DEFAULT_SEED) -> str:
    """
    Measure and reconstruct |up><up| and random pure states, reporting round-trip errors.

    Args:
        seed: Seed for the random states

    Returns:
        Text report
    """
    rng = np.random.default_rng(seed)
    states = [("ground", PureState.basis(2, 0))]
    for index in range(DEMO_RANDOM_STATES):
        states.append((f"random-{index}", PureState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2))))

    lines = [f"{'state':<10} {'mx':>10} {'my':>10} {'mx_rot':>10} {'my_rot':>10}  reconstructed  round_trip_error"]
    for label, state in states:
        rho = DensityMatrix2.from_state(state)
        readout = measure(rho)
        rebuilt = reconstruct(readout)
        error = float(np.max(np.abs(rebuilt.entries - rho.entries)))
        values = " ".join(f"{v:>10.6f}" for v in readout.as_tuple())
        lines.append(f"{label:<10} {values}  {_format_matrix(rebuilt.entries)}  {error:.3e}")
    logger.info("Tomography demo reconstructed {} states", len(states))
    return "\n".join(lines) + "\n"
