"""Tests for RK4 propagation, the actual-time oracle and uncertainty quadratures."""

import math

import numpy as np
import pytest

from framebound.errors import FidelityNeverReached, StepTooLarge, ZeroSpeed
from framebound.models import FidelityCurve, PureState, Trajectory
from framebound.propagation import (
    ConstantModel,
    actual_time,
    avg_uncertainty,
    fidelity_curve,
    max_frequency,
    norm_profile,
    path_ratio,
    rk4_propagate,
    scan_step,
    spectral_span,
    time_average,
    uncertainty_profile,
)
from framebound.quantum import bloch_state, energy_uncertainty, spin_operators
from framebound.scenarios import get_preset
from framebound.spin_models import (
    NmrModel,
    drive_frame,
    exact_fidelity_spin_three_half,
    frame_fidelity,
    frame_states,
    rotating_hamiltonian,
)


@pytest.fixture
def rabi_model() -> ConstantModel:
    """H = Ix with unit Rabi frequency."""
    return ConstantModel(spin_operators(0.5).ix)


class TestConstantModel:
    """Tests for ConstantModel."""

    def test_stack_broadcasts(self, rabi_model):
        """Test the stack repeats H."""
        assert rabi_model.stack(np.zeros(5)).shape == (5, 2, 2)

    def test_fidelity(self, rabi_model):
        """Test |<up|exp(-i Ix t)|up>|^2 = cos^2(t/2)."""
        times = np.linspace(0.0, 7.0, 15)
        np.testing.assert_allclose(rabi_model.fidelity(PureState.basis(2, 0), times), np.cos(0.5 * times) ** 2)

    def test_states_are_normalized(self, rabi_model):
        """Test exact states keep unit norm."""
        states = rabi_model.states(bloch_state(0.3, 0.9), np.linspace(0.0, 3.0, 5))
        np.testing.assert_allclose(np.linalg.norm(states, axis=1), 1.0)


class TestSpectralHelpers:
    """Tests for max_frequency, spectral_span and scan_step."""

    def test_constant_model(self, rabi_model):
        """Test |eigenvalue| max and eigenvalue span of Ix."""
        assert max_frequency(rabi_model, 1.0) == pytest.approx(0.5)
        assert spectral_span(rabi_model, 1.0) == pytest.approx(1.0)

    def test_nmr_model(self, detuned_params):
        """Test the lab spectrum is +-|B|/2 at every time."""
        model = NmrModel(detuned_params)
        assert max_frequency(model, 3.0) == pytest.approx(0.5 * math.hypot(20.0, 2.0))
        assert spectral_span(model, 3.0) == pytest.approx(math.hypot(20.0, 2.0))

    def test_scan_step(self):
        """Test oversample points per period, infinite for a zero frequency."""
        assert scan_step(2.0 * math.pi, 40) == pytest.approx(1.0 / 40)
        assert math.isinf(scan_step(0.0))


class TestRk4Propagate:
    """Tests for rk4_propagate."""

    def test_rabi_oscillation(self, rabi_model):
        """Test F(t) = cos^2(t/2) to 1e-8 with a fine step."""
        traj = rk4_propagate(rabi_model, PureState.basis(2, 0), 10.0, dt=0.01)
        assert traj.source == "rk4"
        assert traj.times.size == 1001
        assert traj.times[-1] == 10.0
        np.testing.assert_allclose(fidelity_curve(traj).values, np.cos(0.5 * traj.times) ** 2, atol=1e-8)

    def test_zero_horizon(self, rabi_model):
        """Test a zero horizon returns psi0 alone."""
        traj = rk4_propagate(rabi_model, PureState.basis(2, 0), 0.0)
        assert traj.times.tolist() == [0.0]
        np.testing.assert_array_equal(traj.states[0], [1, 0])

    def test_step_too_large(self, rabi_model):
        """Test that StepTooLarge is raised for fewer than 40 steps per period."""
        with pytest.raises(StepTooLarge, match="does not resolve"):
            rk4_propagate(rabi_model, PureState.basis(2, 0), 10.0, dt=1.0)

    def test_rejects_negative_horizon(self, rabi_model):
        """Test that ValueError is raised for a negative horizon."""
        with pytest.raises(ValueError, match="horizon must be nonnegative"):
            rk4_propagate(rabi_model, PureState.basis(2, 0), -1.0)

    def test_rejects_nonpositive_step(self, rabi_model):
        """Test that ValueError is raised for dt <= 0."""
        with pytest.raises(ValueError, match="dt must be positive"):
            rk4_propagate(rabi_model, PureState.basis(2, 0), 1.0, dt=0.0)

    def test_grid_ends_at_horizon(self, rabi_model):
        """Test the step shrinks so the last sample is the horizon."""
        traj = rk4_propagate(rabi_model, PureState.basis(2, 0), 1.0, dt=0.3)
        assert traj.times.size == 5
        assert traj.times[-1] == 1.0

    def test_states_stay_normalized(self, detuned_params):
        """Test renormalization and a small reported drift."""
        traj = rk4_propagate(NmrModel(detuned_params), bloch_state(0.4, 0.1), 3.0)
        np.testing.assert_allclose(np.linalg.norm(traj.states, axis=1), 1.0, atol=1e-12)
        assert 0.0 <= traj.renorm_drift < 1e-6

    def test_fourth_order_convergence(self, detuned_params):
        """Test halving dt divides the error by roughly 16."""
        psi0 = bloch_state(math.pi / 3, 0.3)
        model = NmrModel(detuned_params)
        frame, h_r = drive_frame(detuned_params), rotating_hamiltonian(detuned_params)
        errors = []
        for dt in (0.01, 0.005, 0.0025):
            traj = rk4_propagate(model, psi0, 3.0, dt=dt)
            exact = frame_fidelity(frame, h_r, psi0, traj.times)
            errors.append(np.max(np.abs(fidelity_curve(traj).values - exact)))
        ratios = [errors[0] / errors[1], errors[1] / errors[2]]
        assert all(8.0 <= ratio <= 24.0 for ratio in ratios), ratios

    @pytest.mark.slow
    def test_matches_cos_sixth_for_spin_three_half(self, three_half_desk):
        """Test RK4 reproduces cos^6(w1 t / 2) to 1e-7 over the whole horizon."""
        params = three_half_desk.params
        traj = rk4_propagate(NmrModel(params), PureState.basis(4, 0), three_half_desk.horizon, oversample=1200)
        picks = np.linspace(0, traj.times.size - 1, 2000).astype(int)
        values = fidelity_curve(traj).values[picks]
        np.testing.assert_allclose(values, exact_fidelity_spin_three_half(params, traj.times[picks]), atol=1e-7)

    @pytest.mark.slow
    def test_matches_frame_propagation_for_spin_half(self):
        """Test RK4 and the exact frame oracle agree to 1e-8 on the scaled spin-1/2 preset."""
        scenario = get_preset("spin-half-paper-desk")
        params = scenario.params
        psi0 = scenario.initial_state()
        traj = rk4_propagate(NmrModel(params), psi0, 5e-3, oversample=1500)
        picks = np.linspace(0, traj.times.size - 1, 4000).astype(int)
        exact = frame_fidelity(drive_frame(params), rotating_hamiltonian(params), psi0, traj.times[picks])
        np.testing.assert_allclose(fidelity_curve(traj).values[picks], exact, atol=1e-8)


class TestActualTime:
    """Tests for actual_time."""

    def test_unit_fidelity_is_time_zero(self):
        """Test F = 1 is reached at t = 0."""
        curve = FidelityCurve(times=[0.0, 1.0], values=[1.0, 0.5])
        assert actual_time(curve, 1.0) == 0.0

    @pytest.mark.parametrize("f_target,expected", [(0.75, 0.5), (0.5, 1.0), (0.25, 1.5)])
    def test_curve_interpolation(self, f_target, expected):
        """Test linear interpolation between samples."""
        curve = FidelityCurve(times=[0.0, 1.0, 2.0], values=[1.0, 0.5, 0.0])
        assert actual_time(curve, f_target) == pytest.approx(expected)

    @pytest.mark.parametrize("f_target", [0.9, 0.5, 0.2])
    def test_curve_crossing_is_second_order(self, f_target):
        """Test a sampled cos^2 curve is crossed within the chord error h^2 max|F''| / |F'|."""
        step = 0.05
        times = np.arange(0.0, 1.6, step)
        curve = FidelityCurve(times=times, values=np.cos(times) ** 2)
        exact = math.acos(math.sqrt(f_target))
        slope = abs(math.sin(2.0 * exact))
        assert abs(actual_time(curve, f_target) - exact) <= step**2 * 2.0 / (4.0 * slope)
        assert actual_time(lambda ts: np.cos(ts) ** 2, f_target, horizon=1.6, step=step) == pytest.approx(
            exact, rel=1e-9
        )

    def test_curve_never_reached(self):
        """Test that FidelityNeverReached is raised when F stays above the target."""
        curve = FidelityCurve(times=[0.0, 1.0, 2.0], values=[1.0, 0.9, 0.8])
        with pytest.raises(FidelityNeverReached, match="min F"):
            actual_time(curve, 0.5)

    def test_function_spin_three_half(self, three_half_desk):
        """Test F = 1/2 is reached at (2/w1) arccos(2^(-1/6)) for the spin-3/2 preset."""
        params = three_half_desk.params
        horizon = three_half_desk.horizon
        t = actual_time(
            lambda times: exact_fidelity_spin_three_half(params, times), 0.5, horizon=horizon, step=horizon / 1000
        )
        assert t == pytest.approx(2.0 / params.omega1 * math.acos(0.5 ** (1.0 / 6.0)), rel=1e-9)
        assert t == pytest.approx(2.400e-3, rel=2e-3)

    def test_function_is_monotone_in_target(self, rabi_model):
        """Test lower targets are reached later."""
        psi0 = PureState.basis(2, 0)
        times = [
            actual_time(lambda ts: rabi_model.fidelity(psi0, ts), f, horizon=2 * math.pi, step=0.01)
            for f in (0.9, 0.7, 0.5, 0.3, 0.1)
        ]
        assert times == sorted(times)
        assert times[2] == pytest.approx(math.pi / 2, rel=1e-9)

    def test_function_requires_horizon(self, rabi_model):
        """Test a horizon is required for function sources."""
        with pytest.raises(ValueError, match="horizon"):
            actual_time(lambda ts: rabi_model.fidelity(PureState.basis(2, 0), ts), 0.5)

    def test_function_never_reached(self, rabi_model):
        """Test the function scan reports unreachable targets."""
        with pytest.raises(FidelityNeverReached):
            actual_time(lambda ts: rabi_model.fidelity(PureState.basis(2, 0), ts), 0.1, horizon=1.0, step=0.01)

    def test_rejects_invalid_target(self):
        """Test targets outside [0, 1] are rejected."""
        with pytest.raises(ValueError, match="f_target"):
            actual_time(FidelityCurve(times=[0.0], values=[1.0]), 1.2)


class TestQuadratures:
    """Tests for time_average, profiles and avg_uncertainty."""

    def test_time_average_of_linear_function(self):
        """Test the trapezoid rule is exact for linear data, also between samples."""
        times = np.linspace(0.0, 2.0, 5)
        assert time_average(times, 3.0 * times, 2.0) == pytest.approx(3.0)
        assert time_average(times, 3.0 * times, 1.25) == pytest.approx(1.875)

    def test_time_average_out_of_range(self):
        """Test t must lie in (0, horizon]."""
        times = np.linspace(0.0, 1.0, 3)
        with pytest.raises(ValueError, match="outside trajectory range"):
            time_average(times, np.ones(3), 2.0)
        with pytest.raises(ValueError, match="outside trajectory range"):
            time_average(times, np.ones(3), 0.0)

    def test_constant_hamiltonian_uncertainty(self, rng):
        """Test <Delta H> equals Delta H(psi0) for time-independent H."""
        h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        model = ConstantModel(0.5 * (h + h.conj().T))
        psi0 = PureState.from_vector(rng.normal(size=3) + 1j * rng.normal(size=3))
        times = np.linspace(0.0, 4.0, 400)
        traj = Trajectory(times=times, states=model.states(psi0, times))
        expected = energy_uncertainty(model.hamiltonian, psi0)
        np.testing.assert_allclose(uncertainty_profile(model, traj), expected, rtol=1e-10)
        assert avg_uncertainty(model, traj, 2.5) == pytest.approx(expected, rel=1e-10)

    def test_spin_three_half_frame_speed(self, three_half_desk):
        """Test Delta H_R = (sqrt 3 / 2) w1 for the stretched state."""
        params = three_half_desk.params
        model = ConstantModel(rotating_hamiltonian(params))
        psi0 = PureState.basis(4, 0)
        times = np.linspace(0.0, 4e-3, 100)
        traj = Trajectory(times=times, states=model.states(psi0, times))
        assert avg_uncertainty(model, traj, 4e-3) == pytest.approx(0.5 * math.sqrt(3.0) * params.omega1, rel=1e-9)

    def test_norm_profile_of_eigenstate(self):
        """Test ||H psi|| = |E| for an eigenstate."""
        model = ConstantModel(spin_operators(1.0).iz.scaled(3.0))
        times = np.linspace(0.0, 1.0, 4)
        traj = Trajectory(times=times, states=model.states(PureState.basis(3, 0), times))
        np.testing.assert_allclose(norm_profile(model, traj), 3.0)
        np.testing.assert_allclose(uncertainty_profile(model, traj), 0.0, atol=1e-14)

    def test_profiles_match_frame_propagation(self, detuned_params):
        """Test lab-frame profiles on an exact trajectory bound the uncertainty by the norm."""
        psi0 = bloch_state(0.8, 0.2)
        times = np.linspace(0.0, 2.0, 200)
        states = frame_states(drive_frame(detuned_params), rotating_hamiltonian(detuned_params), psi0, times)
        traj = Trajectory(times=times, states=states)
        model = NmrModel(detuned_params)
        assert np.all(uncertainty_profile(model, traj) <= norm_profile(model, traj) + 1e-12)


class TestPathRatio:
    """Tests for path_ratio."""

    def test_geodesic_is_one(self):
        """Test a Rabi flip of |up> follows the geodesic."""
        h_r = spin_operators(0.5).ix
        for t in (0.1, 1.0, 2.5):
            assert path_ratio(h_r, PureState.basis(2, 0), t) == pytest.approx(1.0, abs=1e-10)

    def test_spin_three_half_is_below_one(self):
        """Test arccos(cos^3 x) / (sqrt 3 x) at x = 0.3."""
        h_r = spin_operators(1.5).ix
        ratio = path_ratio(h_r, PureState.basis(4, 0), 0.6)
        expected = math.acos(math.cos(0.3) ** 3) / (math.sqrt(3.0) * 0.3)
        assert ratio == pytest.approx(expected, rel=1e-9)
        assert 0.9 < ratio < 1.0

    def test_eigenstate(self):
        """Test that ZeroSpeed is raised for an eigenstate of H_R."""
        with pytest.raises(ZeroSpeed, match="eigenstate"):
            path_ratio(spin_operators(0.5).iz, PureState.basis(2, 0), 1.0)

    def test_nonpositive_time(self):
        """Test t must be positive."""
        with pytest.raises(ValueError, match="positive"):
            path_ratio(spin_operators(0.5).ix, PureState.basis(2, 0), 0.0)


def test_anandan_aharonov_inequality_for_detuned_evolution(detuned_params):
    """Test arccos sqrt F(t) <= integral of Delta H over [0, t] along the lab evolution."""
    params = detuned_params
    psi0 = bloch_state(0.6, 0.0)
    times = np.linspace(0.0, 3.0, 3000)
    traj = Trajectory(
        times=times, states=frame_states(drive_frame(params), rotating_hamiltonian(params), psi0, times)
    )
    model = NmrModel(params)
    profile = uncertainty_profile(model, traj)
    fidelities = fidelity_curve(traj).values
    for index in (300, 1000, 2999):
        t = times[index]
        assert math.acos(math.sqrt(fidelities[index])) <= t * avg_uncertainty(model, traj, t, profile) + 1e-9
