"""Shared fixtures for tests."""

import numpy as np
import pytest

from framebound.models import EstimationProblem, HermitianOperator, NmrParams, PureState, RotatingFrame, SweepGrid
from framebound.quantum import bloch_state, spin_operators
from framebound.scenarios import Scenario, build_scenario, get_preset


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def geodesic_params() -> NmrParams:
    """Resonant spin-1/2 drive with omega1 = 1 rad/s, whose |up> evolution is a geodesic in the frame."""
    return NmrParams(j=0.5, omega0=50.0, omega1=1.0, omegap=50.0)


@pytest.fixture
def detuned_params() -> NmrParams:
    """Off-resonant spin-1/2 drive with moderate frequencies."""
    return NmrParams(j=0.5, omega0=20.0, omega1=2.0, omegap=19.0)


@pytest.fixture
def three_half_desk() -> Scenario:
    """Spin-3/2 preset scaled to kHz frequencies."""
    return get_preset("spin-three-half-paper-desk")


@pytest.fixture
def geodesic_scenario() -> Scenario:
    """Custom resonant spin-1/2 scenario starting from |up> with a short horizon."""
    return build_scenario(
        {
            "omega0": "50",
            "omega1": "1",
            "omegap": "50",
            "theta": "0",
            "horizon": "4",
            "fidelity_grid": "0.9:0.5:5",
            "n_phase": "4",
        }
    )


@pytest.fixture
def qubit_problem() -> EstimationProblem:
    """Two-level problem with a frame that does not commute with psi0's projector."""
    spins = spin_operators(0.5)
    return EstimationProblem(
        psi0=bloch_state(0.4, 0.2),
        f_target=0.6,
        frame=RotatingFrame(spins.iz.scaled(3.0)),
        h_r=spins.iz + spins.ix.scaled(0.7),
        sweep=SweepGrid(n_phase=8),
    )


@pytest.fixture
def qutrit_problem() -> EstimationProblem:
    """Three-level problem with a non-diagonal frame generator."""
    spins = spin_operators(1.0)
    return EstimationProblem(
        psi0=PureState.basis(3, 0),
        f_target=0.5,
        frame=RotatingFrame(spins.ix.scaled(2.0)),
        h_r=spins.iz + spins.ix.scaled(0.5),
        sweep=SweepGrid(n_phase=4, n_angle=3),
    )


@pytest.fixture
def pauli() -> dict:
    """Pauli matrices as Hermitian operators."""
    return {
        "sx": HermitianOperator(np.array([[0, 1], [1, 0]], dtype=complex)),
        "sy": HermitianOperator(np.array([[0, -1j], [1j, 0]], dtype=complex)),
        "sz": HermitianOperator(np.array([[1, 0], [0, -1]], dtype=complex)),
    }

