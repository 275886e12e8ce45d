#!/usr/bin/env python3
"""Driven NMR Hamiltonians, the drive rotating frame and closed-form propagators."""

import math
from typing import Optional, Union

from loguru import logger
import numpy as np

from framebound.config import STATIONARY_RTOL, STATIONARY_SAMPLES
from framebound.errors import FrameNotStationary
from framebound.models import (
    DerivedFrameQuantities,
    HermitianOperator,
    NmrParams,
    PureState,
    RotatingFrame,
    SpinOperators,
    Trajectory,
)
from framebound.quantum import as_matrix, as_vector, bloch_state, expm_unitary, spin_operators

TimeLike = Union[float, np.ndarray]


class NmrModel:
    """Lab-frame Hamiltonian H(t) = w0 Iz + w1 (cos(wp t) Ix + sin(wp t) Iy) [+ quadrupolar term]."""

    def __init__(self, params: NmrParams) -> None:
        """
        Initialize NmrModel.

        Args:
            params: Frequencies and spin of the model
        """
        self.params: NmrParams = params
        self.spins: SpinOperators = spin_operators(params.j)
        self.static: np.ndarray = params.omega0 * self.spins.iz.matrix + quadrupolar_term(params, self.spins)
        self.dim: int = self.spins.dim

    def __call__(self, t: float) -> np.ndarray:
        p = self.params
        return (
            self.static
            + p.omega1 * math.cos(p.omegap * t) * self.spins.ix.matrix
            + p.omega1 * math.sin(p.omegap * t) * self.spins.iy.matrix
        )

    def stack(self, times: np.ndarray) -> np.ndarray:
        """H(t) for every time, shape (len(times), dim, dim)."""
        p = self.params
        times = np.asarray(times, dtype=float).reshape(-1)
        cos_t = (p.omega1 * np.cos(p.omegap * times))[:, None, None]
        sin_t = (p.omega1 * np.sin(p.omegap * times))[:, None, None]
        return self.static[None, :, :] + cos_t * self.spins.ix.matrix + sin_t * self.spins.iy.matrix

    def __repr__(self) -> str:
        return f"NmrModel({self.params!r})"


def quadrupolar_term(params: NmrParams, spins: Optional[SpinOperators] = None) -> np.ndarray:
    """(wQ/6)(3 Iz^2 - I^2) when the coupling is included, else zeros."""
    spins = spins or spin_operators(params.j)
    if not params.quadrupolar_included:
        return np.zeros((spins.dim, spins.dim), dtype=complex)
    iz = spins.iz.matrix
    return (params.omegaq / 6.0) * (3.0 * iz @ iz - spins.isq.matrix)


def lab_hamiltonian(params: NmrParams, t: float) -> HermitianOperator:
    """
    Lab-frame Hamiltonian at time t (hbar = 1, rad/s).

    Args:
        params: NMR parameters
        t: Time in seconds

    Returns:
        Hermitian H(t)
    """
    return HermitianOperator(NmrModel(params)(t))


def drive_frame(params: NmrParams) -> RotatingFrame:
    """Frame rotating with the drive, Lambda = wp Iz."""
    spins = spin_operators(params.j)
    return RotatingFrame(HermitianOperator(params.omegap * spins.iz.matrix))


def rotating_hamiltonian(params: NmrParams, frame: Optional[RotatingFrame] = None) -> HermitianOperator:
    """
    Constant frame Hamiltonian H_R = R^dagger(t) H(t) R(t) - Lambda.

    Stationarity is verified at STATIONARY_SAMPLES times over one drive period.

    Args:
        params: NMR parameters
        frame: Rotating frame (defaults to the drive frame)

    Returns:
        Time-independent H_R

    Raises:
        FrameNotStationary: If H_R changes over the sampled period
    """
    frame = frame or drive_frame(params)
    model = NmrModel(params)
    if model.dim != frame.dim:
        raise ValueError(f"frame dimension {frame.dim} does not match spin dimension {model.dim}")

    rates = [abs(params.omegap), abs(params.omega0), params.omega1]
    period = 2.0 * math.pi / next(rate for rate in rates if rate > 0)
    generator = frame.generator.matrix

    samples = []
    for t in np.linspace(0.0, period, STATIONARY_SAMPLES, endpoint=False):
        rot = expm_unitary(generator, t)
        samples.append(rot.conj().T @ model(t) @ rot - generator)

    reference = samples[0]
    scale = max(float(np.linalg.norm(reference)), 1e-300)
    deviation = max(float(np.max(np.abs(sample - reference))) for sample in samples[1:])
    if deviation >= STATIONARY_RTOL * scale:
        raise FrameNotStationary(
            f"frame Hamiltonian varies by {deviation:.3e} (norm {scale:.3e}) over one drive period"
        )
    logger.debug("Stationary frame Hamiltonian found: deviation={:.3e} norm={:.3e}", deviation, scale)
    return HermitianOperator.symmetrized(reference)


def derived_frame_quantities(params: NmrParams, theta: float, phi: float) -> DerivedFrameQuantities:
    """
    Detuning, effective frequency, tilt angle and c+- overlaps for a Bloch initial state.

    Uses Delta = w0 - wp, Omega = sqrt(Delta^2 + w1^2), cos chi = Delta/Omega,
    sin chi = w1/Omega; c+- are the overlaps with the H_R eigenvectors.
    """
    delta = params.delta
    omega = math.hypot(delta, params.omega1)
    chi = math.atan2(params.omega1, delta)
    half_c, half_s = math.cos(chi / 2.0), math.sin(chi / 2.0)
    ct, st = math.cos(theta / 2.0), math.sin(theta / 2.0)
    phase = complex(math.cos(phi), math.sin(phi))
    return DerivedFrameQuantities(
        delta=delta,
        omega=omega,
        chi=chi,
        cos_chi=delta / omega,
        sin_chi=params.omega1 / omega,
        cplus=half_c * ct + phase * half_s * st,
        cminus=half_s * ct - phase * half_c * st,
    )


def _require_spin(params: NmrParams, j: float) -> None:
    if abs(params.j - j) > 1e-12:
        raise ValueError(f"model requires spin {j}, got {params.j}")


def exact_states_spin_half(params: NmrParams, theta: float, phi: float, times: TimeLike) -> np.ndarray:
    """
    Closed-form lab states exp(-i Iz wp t) exp(-i (Delta Iz + w1 Ix) t) bloch_state(theta, phi).

    Returns:
        Array of shape (len(times), 2)
    """
    _require_spin(params, 0.5)
    if params.quadrupolar_included:
        raise ValueError("spin-1/2 has no quadrupolar coupling")
    q = derived_frame_quantities(params, theta, phi)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    half_c, half_s = math.cos(q.chi / 2.0), math.sin(q.chi / 2.0)
    forward = np.exp(-0.5j * q.omega * times) * q.cplus
    backward = np.exp(0.5j * q.omega * times) * q.cminus
    upper = (forward * half_c + backward * half_s) * np.exp(-0.5j * params.omegap * times)
    lower = (forward * half_s - backward * half_c) * np.exp(0.5j * params.omegap * times)
    return np.stack([upper, lower], axis=1)


def exact_state_spin_half(params: NmrParams, theta: float, phi: float, t: float) -> PureState:
    """Closed-form spin-1/2 lab state at time t."""
    return PureState.from_vector(exact_states_spin_half(params, theta, phi, t)[0])


def exact_fidelity_spin_half(params: NmrParams, theta: float, phi: float, t: TimeLike) -> TimeLike:
    """
    Fidelity |<psi(0)|psi(t)>|^2 of the closed-form spin-1/2 evolution.

    Accepts a scalar or an array of times and returns the same shape.
    """
    psi0 = bloch_state(theta, phi).amplitudes
    states = exact_states_spin_half(params, theta, phi, t)
    values = np.clip(np.abs(states @ psi0.conj()) ** 2, 0.0, 1.0)
    return float(values[0]) if np.ndim(t) == 0 else values


def _require_three_half_preset(params: NmrParams) -> None:
    _require_spin(params, 1.5)
    if params.quadrupolar_included:
        raise ValueError("closed-form spin-3/2 evolution neglects the quadrupolar coupling")
    if params.omegap != params.omega0:
        raise ValueError("closed-form spin-3/2 evolution requires omegap == omega0")


def exact_states_spin_three_half(params: NmrParams, times: TimeLike) -> np.ndarray:
    """
    Closed-form lab states of |3/2, +3/2> under resonant driving, ordered m = 3/2 ... -3/2.

    Returns:
        Array of shape (len(times), 4)
    """
    _require_three_half_preset(params)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    c = np.cos(0.5 * params.omega1 * times)
    s = np.sin(0.5 * params.omega1 * times)
    w0t = params.omega0 * times
    sqrt3 = math.sqrt(3.0)
    return np.stack(
        [
            c**3 * np.exp(-1.5j * w0t),
            -1j * sqrt3 * s * c**2 * np.exp(-0.5j * w0t),
            -sqrt3 * s**2 * c * np.exp(0.5j * w0t),
            1j * s**3 * np.exp(1.5j * w0t),
        ],
        axis=1,
    )


def exact_state_spin_three_half(params: NmrParams, t: float) -> PureState:
    """Closed-form spin-3/2 lab state at time t."""
    return PureState.from_vector(exact_states_spin_three_half(params, t)[0])


def exact_fidelity_spin_three_half(params: NmrParams, t: TimeLike) -> TimeLike:
    """F(t) = cos^6(w1 t / 2)."""
    _require_three_half_preset(params)
    values = np.cos(0.5 * params.omega1 * np.asarray(t, dtype=float)) ** 6
    return float(values) if np.ndim(t) == 0 else values


def uncertainty_rotating_spin_half(params: NmrParams, theta: float, phi: float) -> float:
    """Delta H_R = (Omega/2) sqrt(1 - (cos chi cos theta + cos phi sin chi sin theta)^2)."""
    _require_spin(params, 0.5)
    q = derived_frame_quantities(params, theta, phi)
    alignment = q.cos_chi * math.cos(theta) + math.cos(phi) * q.sin_chi * math.sin(theta)
    return 0.5 * q.omega * math.sqrt(max(0.0, 1.0 - alignment**2))


def expectation_lab_spin_half(params: NmrParams, theta: float, phi: float, t: TimeLike) -> TimeLike:
    """
    Closed-form <psi(t)|H(t)|psi(t)> for the spin-1/2 model.

    <H> = (|c+|^2 - |c-|^2)(Omega + wp cos chi)/2
          + wp sin chi [cos(Omega t) Re(c+* c-) - sin(Omega t) Im(c+* c-)]
    """
    _require_spin(params, 0.5)
    q = derived_frame_quantities(params, theta, phi)
    population = abs(q.cplus) ** 2 - abs(q.cminus) ** 2
    coherence = q.cplus.conjugate() * q.cminus
    t_arr = np.asarray(t, dtype=float)
    value = 0.5 * population * (q.omega + params.omegap * q.cos_chi) + params.omegap * q.sin_chi * (
        np.cos(q.omega * t_arr) * coherence.real - np.sin(q.omega * t_arr) * coherence.imag
    )
    return float(value) if np.ndim(t) == 0 else value


def uncertainty_lab_spin_half(params: NmrParams, theta: float, phi: float, t: TimeLike) -> TimeLike:
    """Delta H(t) = sqrt((w0^2 + w1^2)/4 - <H(t)>^2) for the spin-1/2 model."""
    mean = np.asarray(expectation_lab_spin_half(params, theta, phi, t))
    variance = 0.25 * (params.omega0**2 + params.omega1**2) - mean**2
    value = np.sqrt(np.maximum(variance, 0.0))
    return float(value) if np.ndim(t) == 0 else value


def frame_states(frame: RotatingFrame, h_r: HermitianOperator, psi0: PureState, times: TimeLike) -> np.ndarray:
    """
    Exact lab states exp(-i Lambda t) exp(-i H_R t) psi0 for a stationary frame.

    Returns:
        Array of shape (len(times), dim)
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    mu, w = np.linalg.eigh(as_matrix(h_r))
    lam, v = np.linalg.eigh(as_matrix(frame.generator))
    in_frame = (np.exp(-1j * np.outer(times, mu)) * (w.conj().T @ as_vector(psi0))) @ w.T
    return (np.exp(-1j * np.outer(times, lam)) * (in_frame @ v.conj())) @ v.T


def frame_fidelity(frame: RotatingFrame, h_r: HermitianOperator, psi0: PureState, times: TimeLike) -> np.ndarray:
    """Lab fidelity |<psi0|psi(t)>|^2 from the exact frame propagation."""
    states = frame_states(frame, h_r, psi0, times)
    return np.clip(np.abs(states @ psi0.amplitudes.conj()) ** 2, 0.0, 1.0)


def exact_trajectory(
    frame: RotatingFrame, h_r: HermitianOperator, psi0: PureState, times: np.ndarray, source: str = "exact"
) -> Trajectory:
    """Trajectory built from the exact frame propagation on a given time grid."""
    states = frame_states(frame, h_r, psi0, times)
    states = states / np.linalg.norm(states, axis=1, keepdims=True)
    return Trajectory(times=np.asarray(times, dtype=float), states=states, source=source)
