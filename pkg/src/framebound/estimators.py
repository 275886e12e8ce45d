#!/usr/bin/env python3
"""
Evolution-time estimators.

Four estimates of the time a state needs to reach a fidelity F:

* the Anandan-Aharonov bound arccos(sqrt F) / <Delta H>,
* the rotating-frame transcendental equation arccos sqrt(fbar_R(t)) = Delta H_R t,
  swept over every state at fidelity F and solved for its first chronological root,
* the epsilon family, a frame generated by (1 - eps) H for time-independent H,
* norm-based bounds built from ||H |psi><psi|||.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
import math
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

from loguru import logger
import numpy as np

from framebound.config import (
    DEFAULT_SCAN_OVERSAMPLE,
    DEFAULT_SWEEP_CHUNK,
    DEFAULT_THREADS,
    MAX_BISECTION_ITERATIONS,
    MIN_SCAN_POINTS,
    ROOT_RTOL,
)
from framebound.errors import FidelityNeverReached, ZeroSpeed
from framebound.models import (
    EstimateReport,
    EstimationProblem,
    HermitianOperator,
    PureState,
    RotatingFrame,
    SweepCandidate,
    SweepGrid,
    Trajectory,
    TranscendentalRoot,
)
from framebound.propagation import (
    ConstantModel,
    FidelityFunction,
    actual_time,
    fidelity_curve,
    norm_profile,
    path_ratio,
    scan_step,
    time_average,
    uncertainty_profile,
)
from framebound.quantum import as_matrix, as_vector, energy_uncertainty, gram_schmidt_complement
from framebound.sweep import GridPoint, GridSweep, near_minimum, reduce_candidates

NormKind = Literal["trace", "operator", "hilbert-schmidt"]
NORM_KINDS: Tuple[NormKind, ...] = ("trace", "operator", "hilbert-schmidt")
EpsilonMethod = Literal["frame-fidelity", "sweep"]


def _require_speed(h: HermitianOperator, psi0: PureState) -> float:
    speed = energy_uncertainty(h, psi0)
    if speed <= 1e-14 * max(1.0, float(np.max(np.abs(h.matrix)))):
        raise ZeroSpeed("initial state is an eigenstate, its evolution speed is zero")
    return speed


def aa_time(f_target: float, avg_dh: float) -> float:
    """
    Anandan-Aharonov time arccos(sqrt F) / <Delta H> (hbar = 1).

    Raises:
        ZeroSpeed: If the average uncertainty is not positive
    """
    if avg_dh <= 0:
        raise ZeroSpeed(f"average energy uncertainty must be positive, got {avg_dh}")
    return math.acos(math.sqrt(f_target)) / avg_dh


def hyperspherical_amplitudes(radius: float, angles: Sequence[float]) -> Tuple[float, ...]:
    """
    Nonnegative amplitudes on the sphere of given radius, one more than the number of angles.

    For angles (u, v) this gives (r sin u cos v, r sin u sin v, r cos u).
    """
    if not angles:
        return (radius,)
    tail: List[float] = []
    scale = radius
    for angle in angles[:-1]:
        tail.insert(0, scale * math.cos(angle))
        scale *= math.sin(angle)
    return (scale * math.cos(angles[-1]), scale * math.sin(angles[-1]), *tail)


@dataclass(frozen=True)
class FrameOverlaps:
    """psi0 and its orthogonal complement expressed in the eigenbasis of the frame generator."""

    eigenvalues: np.ndarray
    reference: np.ndarray
    complement: np.ndarray
    sqrt_f: float
    radius: float

    @classmethod
    def from_problem(cls, problem: EstimationProblem) -> "FrameOverlaps":
        eigenvalues, vectors = np.linalg.eigh(as_matrix(problem.frame.generator))
        to_eigen = vectors.conj().T
        complement = gram_schmidt_complement(problem.psi0)
        return cls(
            eigenvalues=eigenvalues,
            reference=to_eigen @ as_vector(problem.psi0),
            complement=np.array([to_eigen @ vec.amplitudes for vec in complement]),
            sqrt_f=math.sqrt(problem.f_target),
            radius=math.sqrt(max(0.0, 1.0 - problem.f_target)),
        )

    @property
    def span(self) -> float:
        """Fastest Bohr frequency of R^dagger(t)."""
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def weights(self, coefficients: np.ndarray) -> np.ndarray:
        """
        Eigenbasis weights q with <psi0|R^dagger(t)|psibar> = sum_k q_k exp(i lambda_k t).

        Args:
            coefficients: a_j exp(i phi_j) per grid point, shape (G, n - 1)

        Returns:
            Array of shape (G, n)
        """
        target = self.sqrt_f * self.reference[None, :] + coefficients @ self.complement
        return self.reference.conj()[None, :] * target

    def fidelity(self, times: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """fbar_R on a shared time grid, shape (len(times), G)."""
        phases = np.exp(1j * np.outer(times, self.eigenvalues))
        return np.clip(np.abs(phases @ weights.T) ** 2, 0.0, 1.0)


def fbar_R(
    t: Union[float, np.ndarray],
    problem: EstimationProblem,
    phases: Sequence[float],
    amplitudes: Sequence[float],
) -> Union[float, np.ndarray]:
    """
    Frame fidelity |sqrt F <psi0|R^dagger|psi0> + sum_j a_j exp(i phi_j) <psi0|R^dagger|psi_j>|^2.

    Args:
        t: Time or array of times
        problem: Estimation problem (psi0, F, frame)
        phases: Relative phases phi_j, one per complement vector
        amplitudes: Amplitudes a_j, one per complement vector

    Returns:
        fbar_R with the shape of t
    """
    overlaps = FrameOverlaps.from_problem(problem)
    if len(phases) != len(amplitudes) or len(amplitudes) != overlaps.reference.size - 1:
        raise ValueError(f"expected {overlaps.reference.size - 1} phases and amplitudes")
    coefficients = np.asarray(amplitudes, dtype=float) * np.exp(1j * np.asarray(phases, dtype=float))
    values = overlaps.fidelity(np.atleast_1d(np.asarray(t, dtype=float)), overlaps.weights(coefficients[None, :]))
    return float(values[0, 0]) if np.ndim(t) == 0 else values[:, 0]


class TranscendentalEquation:
    """g(t) = arccos sqrt(fbar_R(t)) - Delta H_R t over the sweep grid of one problem."""

    def __init__(self, problem: EstimationProblem) -> None:
        """
        Initialize TranscendentalEquation.

        Args:
            problem: Estimation problem with 0 <= F < 1 and Delta H_R > 0
        """
        self.problem: EstimationProblem = problem
        self.overlaps: FrameOverlaps = FrameOverlaps.from_problem(problem)
        self.speed: float = _require_speed(problem.h_r, problem.psi0)
        self.n_angles: int = max(0, problem.psi0.dim - 2)
        self.n_phases: int = problem.psi0.dim - 1

        # g(t_end) < 0 because arccos <= pi/2
        self.t_end: float = math.pi / (2.0 * self.speed) * (1.0 + 1e-9)
        step = scan_step(self.overlaps.span, problem.sweep.oversample)
        points = MIN_SCAN_POINTS if math.isinf(step) else max(MIN_SCAN_POINTS, math.ceil(self.t_end / step) + 1)
        self.times: np.ndarray = np.linspace(0.0, self.t_end, points)
        self.phase_table: np.ndarray = np.exp(1j * np.outer(self.times, self.overlaps.eigenvalues))

    def grid_points(self) -> List[GridPoint]:
        """Cartesian grid of hyperspherical angles over [0, pi/2] then phases over [0, 2 pi)."""
        sweep = self.problem.sweep
        angle_axis = [0.5 * math.pi * k / (sweep.n_angle - 1) for k in range(sweep.n_angle)]
        phase_axis = [2.0 * math.pi * k / sweep.n_phase for k in range(sweep.n_phase)]
        return list(product(*([angle_axis] * self.n_angles), *([phase_axis] * self.n_phases)))

    def refine_points(self, center: GridPoint) -> List[GridPoint]:
        """Local grid of 2 * refine + 1 points per axis spanning one coarse step around center."""
        sweep = self.problem.sweep
        offsets = np.arange(-sweep.refine, sweep.refine + 1) / sweep.refine
        angle_step = 0.5 * math.pi / (sweep.n_angle - 1)
        phase_step = 2.0 * math.pi / sweep.n_phase
        axes = [
            sorted({float(v) for v in np.clip(angle + angle_step * offsets, 0.0, 0.5 * math.pi)})
            for angle in center[: self.n_angles]
        ]
        axes += [
            sorted({float(v) for v in np.mod(phase + phase_step * offsets, 2.0 * math.pi)})
            for phase in center[self.n_angles :]
        ]
        return list(product(*axes))

    def amplitudes(self, point: GridPoint) -> Tuple[float, ...]:
        return hyperspherical_amplitudes(self.overlaps.radius, point[: self.n_angles])

    def _weights(self, points: np.ndarray) -> np.ndarray:
        amplitudes = np.array([self.amplitudes(tuple(p)) for p in points])
        return self.overlaps.weights(amplitudes * np.exp(1j * points[:, self.n_angles :]))

    def residual(self, t: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """g at one time per grid point."""
        amplitude = np.sum(weights * np.exp(1j * np.outer(t, self.overlaps.eigenvalues)), axis=1)
        fbar = np.clip(np.abs(amplitude) ** 2, 0.0, 1.0)
        return np.arccos(np.sqrt(fbar)) - self.speed * t

    def first_roots(self, chunk: List[GridPoint]) -> List[SweepCandidate]:
        """
        First positive root of g for every point of a chunk, keeping those tied for the minimum.

        A dense scan locates the first sign change, then all brackets are bisected
        together to a relative width of 1e-10.
        """
        points = np.array(chunk, dtype=float).reshape(len(chunk), -1)
        weights = self._weights(points)
        g = np.arccos(np.sqrt(np.clip(np.abs(self.phase_table @ weights.T) ** 2, 0.0, 1.0)))
        g -= self.speed * self.times[:, None]
        index = np.argmax(g <= 0.0, axis=0)
        lo = self.times[np.maximum(index - 1, 0)]
        hi = self.times[index]

        # brackets entirely above another point's root cannot hold the chunk minimum
        keep = np.flatnonzero(lo <= hi.min())
        lo, hi, weights, points = lo[keep], hi[keep], weights[keep], points[keep]

        for _ in range(MAX_BISECTION_ITERATIONS):
            if np.all(hi - lo <= ROOT_RTOL * hi):
                break
            mid = 0.5 * (lo + hi)
            positive = self.residual(mid, weights) > 0.0
            lo = np.where(positive, mid, lo)
            hi = np.where(positive, hi, mid)

        roots = 0.5 * (lo + hi)
        residuals = self.residual(roots, weights)
        candidates = [
            SweepCandidate(
                t_star=float(roots[k]),
                parameters=tuple(float(v) for v in points[k]),
                residual=float(residuals[k]),
                bracket=(float(lo[k]), float(hi[k])),
            )
            for k in range(roots.size)
        ]
        return near_minimum(candidates)


def solve_transcendental(
    problem: EstimationProblem,
    threads: int = DEFAULT_THREADS,
    chunk_size: int = DEFAULT_SWEEP_CHUNK,
) -> TranscendentalRoot:
    """
    Minimum first chronological root of the transcendental equation over the sweep grid.

    Args:
        problem: psi0, F, frame and stationary H_R with sweep resolution
        threads: Threads evaluating grid chunks
        chunk_size: Grid points per chunk

    Returns:
        TranscendentalRoot with the argmin sweep parameters

    Raises:
        ZeroSpeed: If psi0 is an eigenstate of H_R
    """
    n_complement = problem.psi0.dim - 1
    if problem.f_target == 1.0:
        _require_speed(problem.h_r, problem.psi0)
        zeros = (0.0,) * n_complement
        return TranscendentalRoot(
            t_star=0.0,
            phases=zeros,
            amplitudes=zeros,
            angles=(0.0,) * max(0, problem.psi0.dim - 2),
            residual=0.0,
            bracket=(0.0, 0.0),
        )

    equation = TranscendentalEquation(problem)
    sweep = GridSweep(equation.first_roots, threads=threads, chunk_size=chunk_size)
    points = equation.grid_points()
    best = reduce_candidates(sweep.run(points))
    evaluated = len(points)

    if problem.sweep.refine:
        fine = equation.refine_points(best.parameters)
        best = reduce_candidates([best, *sweep.run(fine)])
        evaluated += len(fine)

    logger.debug(
        "Transcendental root t*={:.9e} s at F={} over {} grid points (scan {} samples, bracket end {:.3e} s)",
        best.t_star,
        problem.f_target,
        evaluated,
        equation.times.size,
        equation.t_end,
    )
    if problem.horizon_hint is not None and best.t_star > problem.horizon_hint:
        logger.warning(
            "Transcendental root {:.6e} s at F={} lies beyond the {:.6e} s horizon",
            best.t_star,
            problem.f_target,
            problem.horizon_hint,
        )
    angles =best.parameters[: equation.n_angles]
    return TranscendentalRoot(
        t_star=best.t_star,
        phases=best.parameters[equation.n_angles :],
        amplitudes=equation.amplitudes(best.parameters),
        angles=angles,
        residual=best.residual,
        bracket=best.bracket,
        grid_points=evaluated,
    )


def recurrence_horizon(hamiltonian: HermitianOperator) -> float:
    """2 pi over the smallest nonzero Bohr frequency of a time-independent Hamiltonian."""
    eigenvalues = np.linalg.eigvalsh(hamiltonian.matrix)
    gaps = np.diff(eigenvalues)
    gaps = gaps[gaps > 1e-12 * max(1.0, float(np.max(np.abs(eigenvalues))))]
    if gaps.size == 0:
        raise ZeroSpeed("Hamiltonian is proportional to the identity")
    return 2.0 * math.pi / float(gaps.min())


def constant_actual_time(hamiltonian: HermitianOperator, psi0: PureState, f_target: float) -> float:
    """
    First crossing of F(t) for a time-independent Hamiltonian within one recurrence period.

    Raises:
        ZeroSpeed: If psi0 is an eigenstate of H
    """
    _require_speed(hamiltonian, psi0)
    model = ConstantModel(hamiltonian)
    eigenvalues = np.linalg.eigvalsh(hamiltonian.matrix)
    step = scan_step(float(eigenvalues[-1] - eigenvalues[0]), DEFAULT_SCAN_OVERSAMPLE)
    horizon = recurrence_horizon(hamiltonian)
    return actual_time(lambda times: model.fidelity(psi0, times), f_target, horizon=horizon, step=step)


def epsilon_estimate(
    hamiltonian: HermitianOperator,
    psi0: PureState,
    f_target: float,
    epsilon: float,
    method: EpsilonMethod = "frame-fidelity",
    t_actual: Optional[float] = None,
    sweep: Optional[SweepGrid] = None,
    threads: int = DEFAULT_THREADS,
) -> float:
    """
    Estimate from the frame R(t) = exp(-i (1 - eps) H t), where H_R = eps H.

    "frame-fidelity" evaluates arccos sqrt(F_R(t)) / (eps Delta H0) with
    F_R(t) = |<psi0|exp(-i eps H t)|psi0>|^2 at the actual time t, which converges
    to t as O(eps^2). "sweep" solves the transcendental equation in that frame.

    Args:
        hamiltonian: Time-independent H
        psi0: Initial state
        f_target: Target fidelity
        epsilon: Frame parameter in (0, 1]
        method: "frame-fidelity" or "sweep"
        t_actual: Actual time (computed from the exact evolution when omitted)
        sweep: Sweep resolution for the "sweep" method
        threads: Threads for the "sweep" method

    Returns:
        Time estimate in seconds
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    speed = _require_speed(hamiltonian, psi0)

    if method == "sweep":
        problem = EstimationProblem(
            psi0=psi0,
            f_target=f_target,
            frame=RotatingFrame(hamiltonian.scaled(1.0 - epsilon)),
            h_r=hamiltonian.scaled(epsilon),
            sweep=sweep or SweepGrid(),
        )
        return solve_transcendental(problem, threads=threads).t_star
    if method != "frame-fidelity":
        raise ValueError(f"unknown epsilon method {method!r}")

    if t_actual is None:
        t_actual = constant_actual_time(hamiltonian, psi0, f_target)
    f_frame = float(ConstantModel(hamiltonian.scaled(epsilon)).fidelity(psi0, t_actual)[0])
    return math.acos(math.sqrt(f_frame)) / (epsilon * speed)


def singular_values(matrix: np.ndarray) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)


def projector_singular_values(hamiltonian: np.ndarray, state: np.ndarray) -> np.ndarray:
    """Singular values of the rank-one H |psi><psi|: (||H psi||, 0, ..., 0)."""
    state = np.asarray(state, dtype=complex)
    values = np.zeros(state.size)
    values[0] = np.linalg.norm(np.asarray(hamiltonian, dtype=complex) @ state)
    return values


def norm_lambda(
    traj: Trajectory,
    model: Callable,
    t: float,
    which: NormKind,
    strict_literal: bool = False,
    profile: Optional[np.ndarray] = None,
) -> float:
    """
    Time-averaged norm (1/t) integral_0^t ||H(t') |psi(t')><psi(t')|||_which dt'.

    The operator is rank one, so trace and operator norms equal ||H psi|| and the
    Hilbert-Schmidt (Frobenius) norm does too. strict_literal averages sum sigma^2
    instead of its square root for the Hilbert-Schmidt kind.

    Args:
        traj: Trajectory covering [0, t]
        model: Hamiltonian model of the trajectory
        t: Averaging time
        which: "trace", "operator" or "hilbert-schmidt"
        strict_literal: Use sum sigma^2 for the Hilbert-Schmidt kind
        profile: Precomputed norm_profile(model, traj)

    Returns:
        Lambda in rad/s (rad^2/s^2 for the literal Hilbert-Schmidt form)
    """
    if which not in NORM_KINDS:
        raise ValueError(f"unknown norm {which!r}, expected one of {NORM_KINDS}")
    if profile is None:
        profile = norm_profile(model, traj)
    if which == "hilbert-schmidt" and strict_literal:
        return time_average(traj.times, profile**2, t)
    return time_average(traj.times, profile, t)


def norm_times(f_target: float, lambdas: Sequence[float]) -> Tuple[float, float, float]:
    """
    (tau_tr, tau_op, tau_hs) = (sin^2 L / 2 Lambda_tr, sin^2 L / 2 Lambda_op, sin^2 L / Lambda_hs), L = arccos sqrt F.

    Raises:
        ZeroSpeed: If any Lambda is not positive
    """
    tr, op, hs = lambdas
    if min(tr, op, hs) <= 0:
        raise ZeroSpeed(f"norm averages must be positive, got {tuple(lambdas)}")
    weight = math.sin(math.acos(math.sqrt(f_target))) ** 2
    return (weight / (2.0 * tr), weight / (2.0 * op), weight / hs)


@dataclass
class ComparisonSetup:
    """Inputs shared by every fidelity row of a comparison."""

    psi0: PureState
    frame: RotatingFrame
    h_r: HermitianOperator
    model: Callable
    trajectory: Trajectory
    sweep: SweepGrid = field(default_factory=SweepGrid)
    fidelity: Optional[FidelityFunction] = None
    scan_step: Optional[float] = None
    strict_literal_hs: bool = False
    # frame parameter of t_epsilon, only used with a time-independent model
    epsilon: Optional[float] = None


class _ComparisonRows:
    def __init__(self, setup: ComparisonSetup) -> None:
        self.setup = setup
        self.dh_r = _require_speed(setup.h_r, setup.psi0)
        self.uncertainty = uncertainty_profile(setup.model, setup.trajectory)
        self.norms = norm_profile(setup.model, setup.trajectory)
        self.curve = fidelity_curve(setup.trajectory)

    def oracle_time(self, f_target: float) -> float:
        setup = self.setup
        if setup.fidelity is None:
            return actual_time(self.curve, f_target)
        return actual_time(setup.fidelity, f_target, horizon=setup.trajectory.horizon, step=setup.scan_step)

    def row(self, f_target: float) -> EstimateReport:
        setup = self.setup
        report = EstimateReport(f_target=f_target, status="ok", dh_r=self.dh_r)
        try:
            t_actual = self.oracle_time(f_target)
        except FidelityNeverReached as e:
            logger.warning("F={} unreachable: {}", f_target, e)
            report.status = "unreachable"
            return report

        problem = EstimationProblem(
            psi0=setup.psi0,
            f_target=f_target,
            frame=setup.frame,
            h_r=setup.h_r,
            sweep=setup.sweep,
            horizon_hint=setup.trajectory.horizon or None,
        )
        root = solve_transcendental(problem)
        report.t_actual = t_actual
        report.t_transcendental = root.t_star
        report.sweep_parameters = root.parameters
        if setup.epsilon is not None and isinstance(setup.model, ConstantModel):
            report.t_epsilon = epsilon_estimate(
                setup.model.hamiltonian, setup.psi0, f_target, setup.epsilon, t_actual=t_actual
            )

        if t_actual == 0.0:
            report.t_aa = report.t_norm_tr = report.t_norm_op = report.t_norm_hs = 0.0
            report.path_ratio = 1.0
            report.avg_dh_lab = float(self.uncertainty[0])
            return report

        traj = setup.trajectory
        report.avg_dh_lab = time_average(traj.times, self.uncertainty, t_actual)
        report.t_aa = aa_time(f_target, report.avg_dh_lab)
        lambdas = [
            norm_lambda(traj, setup.model, t_actual, which, setup.strict_literal_hs, profile=self.norms)
            for which in NORM_KINDS
        ]
        report.t_norm_tr, report.t_norm_op, report.t_norm_hs = norm_times(f_target, lambdas)
        report.path_ratio = path_ratio(setup.h_r, setup.psi0, t_actual)
        logger.debug(
            "F={}: t_actual={:.6e} t_aa={:.6e} t_transcendental={:.6e}",
            f_target,
            t_actual,
            report.t_aa,
            root.t_star,
        )
        return report


def compare(setup: ComparisonSetup, f_targets: Sequence[float], threads: int = DEFAULT_THREADS) -> List[EstimateReport]:
    """
    Evaluate the oracle time and every estimator for each fidelity target.

    Rows are computed concurrently and returned in the order of f_targets.
    Targets the evolution never reaches are flagged as unreachable.

    Args:
        setup: Shared inputs (initial state, frame, H_R, lab model, oracle trajectory)
        f_targets: Fidelity targets
        threads: Rows evaluated in parallel

    Returns:
        One EstimateReport per target
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    rows = _ComparisonRows(setup)
    if threads == 1:
        return [rows.row(f) for f in f_targets]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(rows.row, f_targets))
