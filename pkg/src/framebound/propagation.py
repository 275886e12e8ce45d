#!/usr/bin/env python3
"""Numerical oracle: RK4 propagation, fidelity curves, actual times and uncertainty quadratures."""

import math
from typing import Callable, Optional, Union

from loguru import logger
import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import bisect

from framebound.config import (
    DEFAULT_RK4_OVERSAMPLE,
    DEFAULT_SCAN_OVERSAMPLE,
    MAX_BISECTION_ITERATIONS,
    MIN_SCAN_POINTS,
    MIN_STEPS_PER_PERIOD,
    PROFILE_BLOCK,
    RENORM_DRIFT_WARN,
    RK4_BLOCK,
    ROOT_RTOL,
    STATIONARY_SAMPLES,
)
from framebound.errors import FidelityNeverReached, StepTooLarge, ZeroSpeed
from framebound.models import FidelityCurve, HermitianOperator, PureState, Trajectory
from framebound.quantum import as_matrix, as_vector, energy_uncertainty

FidelityFunction = Callable[[np.ndarray], np.ndarray]


class ConstantModel:
    """Time-independent Hamiltonian exposed through the model interface."""

    def __init__(self, hamiltonian: Union[HermitianOperator, np.ndarray]) -> None:
        self.hamiltonian: HermitianOperator = (
            hamiltonian if isinstance(hamiltonian, HermitianOperator) else HermitianOperator(hamiltonian)
        )
        self.dim: int = self.hamiltonian.dim
        self._eigenvalues, self._eigenvectors = np.linalg.eigh(self.hamiltonian.matrix)

    def __call__(self, t: float) -> np.ndarray:
        return self.hamiltonian.matrix

    def stack(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float).reshape(-1)
        return np.broadcast_to(self.hamiltonian.matrix, (times.size, self.dim, self.dim))

    def states(self, psi0: PureState, times: np.ndarray) -> np.ndarray:
        """Exact states exp(-i H t) psi0, shape (len(times), dim)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        coeffs = self._eigenvectors.conj().T @ as_vector(psi0)
        return (np.exp(-1j * np.outer(times, self._eigenvalues)) * coeffs) @ self._eigenvectors.T

    def fidelity(self, psi0: PureState, times: np.ndarray) -> np.ndarray:
        """Exact |<psi0|exp(-i H t)|psi0>|^2."""
        weights = np.abs(self._eigenvectors.conj().T @ as_vector(psi0)) ** 2
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return np.clip(np.abs(np.exp(-1j * np.outer(times, self._eigenvalues)) @ weights) ** 2, 0.0, 1.0)

    def __repr__(self) -> str:
        return f"ConstantModel(dim={self.dim})"


def hamiltonian_stack(model: Callable, times: np.ndarray) -> np.ndarray:
    """H(t) for every time, using the model's vectorized stack when it has one."""
    times = np.asarray(times, dtype=float).reshape(-1)
    if hasattr(model, "stack"):
        return np.asarray(model.stack(times), dtype=complex)
    return np.stack([as_matrix(model(float(t))) for t in times])


def max_frequency(model: Callable, horizon: float, samples: int = STATIONARY_SAMPLES) -> float:
    """Largest |eigenvalue| of H(t) over sample times spread across [0, horizon]."""
    times = np.linspace(0.0, horizon, samples) if horizon > 0 else np.zeros(1)
    return float(np.max(np.abs(np.linalg.eigvalsh(hamiltonian_stack(model, times)))))


def spectral_span(model: Callable, horizon: float, samples: int = STATIONARY_SAMPLES) -> float:
    """Largest eigenvalue gap of H(t) over sample times, the fastest Bohr frequency."""
    times = np.linspace(0.0, horizon, samples) if horizon > 0 else np.zeros(1)
    eigenvalues = np.linalg.eigvalsh(hamiltonian_stack(model, times))
    return float(np.max(eigenvalues[:, -1] - eigenvalues[:, 0]))


def scan_step(frequency: float, oversample: int = DEFAULT_SCAN_OVERSAMPLE) -> float:
    """Time step resolving a given angular frequency with oversample points per period."""
    if frequency <= 0:
        return math.inf
    return 2.0 * math.pi / (frequency * oversample)


def _rk4_step_matrices(generators: np.ndarray, h: float) -> np.ndarray:
    """
    One-step RK4 propagators for i dpsi/dt = H(t) psi.

    Args:
        generators: H at the half-step grid, shape (2 * steps + 1, dim, dim)
        h: Step length

    Returns:
        Matrices M_k with psi_{k+1} = M_k psi_k, shape (steps, dim, dim)
    """
    a_start = -1j * generators[0:-1:2]
    a_mid = -1j * generators[1::2]
    a_end = -1j * generators[2::2]
    k1 = a_start
    k2 = a_mid + 0.5 * h * (a_mid @ k1)
    k3 = a_mid + 0.5 * h * (a_mid @ k2)
    k4 = a_end + h * (a_end @ k3)
    identity = np.eye(generators.shape[1], dtype=complex)
    return identity + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _prefix_products(matrices: np.ndarray) -> np.ndarray:
    """P_k = M_k ... M_0 by log-depth doubling."""
    products = matrices.copy()
    offset = 1
    while offset < products.shape[0]:
        products[offset:] = products[offset:] @ products[:-offset]
        offset *= 2
    return products


def rk4_propagate(
    model: Callable,
    psi0: PureState,
    horizon: float,
    dt: Optional[float] = None,
    oversample: int = DEFAULT_RK4_OVERSAMPLE,
) -> Trajectory:
    """
    Integrate i dpsi/dt = H(t) psi with classic fixed-step RK4 (hbar = 1).

    The step is shrunk so the grid ends exactly at the horizon; every state is
    renormalized and the accumulated per-step norm drift is reported on the trajectory.

    Args:
        model: Callable t -> H(t) (optionally with a vectorized stack method)
        psi0: Initial state
        horizon: Final time
        dt: Requested step (defaults to oversample points per period of the fastest frequency)
        oversample: Points per period used when dt is not given

    Returns:
        Trajectory on the uniform grid [0, horizon]

    Raises:
        StepTooLarge: If dt exceeds 1/40 of the shortest period of H
    """
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    if dt is not None and dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    start = as_vector(psi0)
    if horizon == 0:
        return Trajectory(times=np.zeros(1), states=start[None, :], source="rk4")

    omega_max = max_frequency(model, horizon)
    if dt is None:
        dt = min(horizon, scan_step(omega_max, oversample))
    elif omega_max > 0 and dt > 2.0 * math.pi / omega_max / MIN_STEPS_PER_PERIOD:
        raise StepTooLarge(
            f"dt={dt:.3e} does not resolve omega_max={omega_max:.3e} rad/s "
            f"({MIN_STEPS_PER_PERIOD} steps per period required)"
        )

    steps = max(1, math.ceil(horizon / dt - 1e-9))
    h = horizon / steps
    times = np.linspace(0.0, horizon, steps + 1)
    states = np.empty((steps + 1, start.size), dtype=complex)
    states[0] = start
    drift = 0.0

    logger.debug("RK4: {} steps of {:.3e} s (omega_max={:.3e} rad/s)", steps, h, omega_max)
    for first in range(0, steps, RK4_BLOCK):
        count = min(RK4_BLOCK, steps - first)
        half_grid = times[first] + 0.5 * h * np.arange(2 * count + 1)
        products = _prefix_products(_rk4_step_matrices(hamiltonian_stack(model, half_grid), h))
        raw = products @ states[first]
        norms = np.linalg.norm(raw, axis=1)
        drift += float(np.sum(np.abs(norms / np.concatenate(([1.0], norms[:-1])) - 1.0)))
        states[first + 1 : first + 1 + count] = raw / norms[:, None]

    if drift > RENORM_DRIFT_WARN:
        logger.warning("RK4 renormalization drift {:.3e} exceeds {:.1e}", drift, RENORM_DRIFT_WARN)
    return Trajectory(times=times, states=states, source="rk4", renorm_drift=drift)


def fidelity_curve(traj: Trajectory) -> FidelityCurve:
    """F(t_k) = |<psi(0)|psi(t_k)>|^2 along a trajectory."""
    return FidelityCurve(times=traj.times, values=np.abs(traj.states @ traj.states[0].conj()) ** 2)


def _first_crossing(values: np.ndarray, f_target: float) -> Optional[int]:
    below = np.flatnonzero(values[1:] <= f_target)
    return int(below[0]) + 1 if below.size else None


def actual_time(
    source: Union[FidelityCurve, FidelityFunction],
    f_target: float,
    horizon: Optional[float] = None,
    step: Optional[float] = None,
) -> float:
    """
    First time t > 0 with F(t) = f_target.

    With a FidelityCurve the crossing is interpolated linearly between samples, so the
    result is only accurate to O(dt^2 max|F''| / |F'|) for sample spacing dt, not to the
    bisection tolerance. Pass the exact fidelity function when one is available.
    With a callable F(times) the range [0, horizon] is scanned with the given step
    and the crossing is refined by bisection to a relative tolerance of 1e-10.

    Args:
        source: Sampled fidelity curve or vectorized fidelity function
        f_target: Target fidelity in [0, 1]
        horizon: Scan range (callable sources only)
        step: Scan step (callable sources only)

    Returns:
        First crossing time

    Raises:
        FidelityNeverReached: If F stays above f_target over the whole range
    """
    if not 0.0 <= f_target <= 1.0:
        raise ValueError(f"f_target must lie in [0, 1], got {f_target}")
    if f_target == 1.0:
        return 0.0

    if isinstance(source, FidelityCurve):
        index = _first_crossing(source.values, f_target)
        if index is None:
            raise FidelityNeverReached(
                f"min F = {source.values.min():.6g} > {f_target} within {source.times[-1]:.6g} s"
            )
        t0, t1 = source.times[index - 1], source.times[index]
        f0, f1 = source.values[index - 1], source.values[index]
        return float(t0 + (f0 - f_target) / (f0 - f1) * (t1 - t0))

    if horizon is None or horizon <= 0:
        raise ValueError("a positive horizon is required to scan a fidelity function")
    points = max(MIN_SCAN_POINTS, math.ceil(horizon / step) + 1 if step else MIN_SCAN_POINTS)
    times = np.linspace(0.0, horizon, points)
    values = np.asarray(source(times), dtype=float)
    index = _first_crossing(values, f_target)
    if index is None:
        raise FidelityNeverReached(f"min F = {values.min():.6g} > {f_target} within {horizon:.6g} s")
    if values[index] == f_target:
        return float(times[index])

    def residual(t: float) -> float:
        return float(np.asarray(source(np.array([t])), dtype=float)[0]) - f_target

    return float(
        bisect(
            residual,
            times[index - 1],
            times[index],
            xtol=np.finfo(float).tiny,
            rtol=ROOT_RTOL,
            maxiter=MAX_BISECTION_ITERATIONS,
        )
    )


def _row_values(model: Callable, traj: Trajectory, centered: bool) -> np.ndarray:
    out = np.empty(traj.times.size)
    for first in range(0, traj.times.size, PROFILE_BLOCK):
        sl = slice(first, first + PROFILE_BLOCK)
        psi = traj.states[sl]
        h_psi = np.einsum("kij,kj->ki", hamiltonian_stack(model, traj.times[sl]), psi)
        if centered:
            mean = np.einsum("ki,ki->k", psi.conj(), h_psi).real
            h_psi = h_psi - mean[:, None] * psi
        out[sl] = np.linalg.norm(h_psi, axis=1)
    return out


def uncertainty_profile(model: Callable, traj: Trajectory) -> np.ndarray:
    """Delta H(tau) = ||(H - <H>) psi|| at every trajectory time."""
    return _row_values(model, traj, centered=True)


def norm_profile(model: Callable, traj: Trajectory) -> np.ndarray:
    """||H(tau) psi(tau)||, the largest singular value of H |psi><psi|, at every trajectory time."""
    return _row_values(model, traj, centered=False)


def time_average(times: np.ndarray, values: np.ndarray, t: float) -> float:
    """
    (1/t) times the trapezoidal integral of values over [0, t].

    Raises:
        ValueError: If t is not in (0, times[-1]]
    """
    if t <= 0 or t > times[-1] * (1.0 + 1e-12):
        raise ValueError(f"t={t!r} outside trajectory range (0, {times[-1]!r}]")
    if times.size == 1:
        return float(values[0])
    t = min(t, float(times[-1]))
    cumulative = cumulative_trapezoid(values, times, initial=0.0)
    k = min(int(np.searchsorted(times, t, side="right")) - 1, times.size - 2)
    value_t = float(np.interp(t, times, values))
    integral = cumulative[k] + 0.5 * (values[k] + value_t) * (t - times[k])
    return float(integral / t)


def avg_uncertainty(model: Callable, traj: Trajectory, t: float, profile: Optional[np.ndarray] = None) -> float:
    """
    Time-averaged energy uncertainty (1/t) integral_0^t Delta H(tau) dtau.

    Args:
        model: Hamiltonian model used to build the trajectory
        traj: Trajectory covering [0, t]
        t: Averaging time
        profile: Precomputed uncertainty_profile(model, traj)

    Returns:
        Average speed in rad/s
    """
    if profile is None:
        profile = uncertainty_profile(model, traj)
    return time_average(traj.times, profile, t)


def path_ratio(h_r: HermitianOperator, psi0: PureState, t: float) -> float:
    """
    Geodesic over actual path length in the stationary frame.

    l_geodes = arccos sqrt(F_R(t)) with F_R = |<psi0|exp(-i H_R t)|psi0>|^2, and
    l_real = Delta H_R * t because the frame speed is constant.

    Raises:
        ZeroSpeed: If psi0 is an eigenstate of H_R
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    speed = energy_uncertainty(h_r, psi0)
    if speed <= 1e-14 * max(1.0, float(np.max(np.abs(h_r.matrix)))):
        raise ZeroSpeed("initial state is an eigenstate of the frame Hamiltonian")
    f_r = float(ConstantModel(h_r).fidelity(psi0, t)[0])
    geodesic = math.acos(math.sqrt(f_r))
    return min(1.0, geodesic / (speed * t))
