"""Tests for magnetization readout, reconstruction and thermal polarization."""

import math

import numpy as np
import pytest

from framebound.errors import InconsistentReadout
from framebound.models import DensityMatrix2, MagnetizationReadout, PureState
from framebound.tomography import (
    measure,
    reconstruct,
    rotated_matrix,
    rotated_matrix_closed_form,
    ry_half_pi,
    thermal_polarization,
)


def random_density_matrix(rng):
    """Random mixture of two random pure states."""
    states = [PureState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(2)]
    weight = rng.uniform()
    mixed = weight * np.outer(states[0].amplitudes, states[0].amplitudes.conj())
    mixed += (1 - weight) * np.outer(states[1].amplitudes, states[1].amplitudes.conj())
    return DensityMatrix2(mixed)


class TestReadPulse:
    """Tests for the R_y(pi/2) read pulse."""

    def test_matrix(self):
        """Test R_y(pi/2) = [[1, -1], [1, 1]] / sqrt 2."""
        np.testing.assert_allclose(ry_half_pi(), np.array([[1, -1], [1, 1]]) / math.sqrt(2), atol=1e-15)

    def test_closed_form_matches_conjugation(self, rng):
        """Test the component form of rho' on random density matrices."""
        for _ in range(100):
            rho = random_density_matrix(rng)
            np.testing.assert_allclose(rotated_matrix_closed_form(rho), rotated_matrix(rho), atol=1e-12)


class TestMeasureAndReconstruct:
    """Tests for measure and reconstruct."""

    def test_ground_state(self):
        """Test |up><up| reads (0, 0, 1/2, 0) and rebuilds exactly."""
        rho = DensityMatrix2.from_state(PureState.basis(2, 0))
        readout = measure(rho)
        assert readout.as_tuple() == pytest.approx((0.0, 0.0, 0.5, 0.0), abs=1e-15)
        np.testing.assert_allclose(reconstruct(readout).entries, rho.entries, atol=1e-15)

    def test_transverse_state(self):
        """Test |+> has mx = 1/2."""
        rho = DensityMatrix2.from_state(PureState.from_vector([1.0, 1.0]))
        readout = measure(rho)
        assert readout.mx == pytest.approx(0.5)
        assert readout.mx_rot == pytest.approx(0.0, abs=1e-15)

    def test_y_magnetization_unchanged_by_pulse(self, rng):
        """Test my_rot = my = -x3."""
        rho = random_density_matrix(rng)
        readout = measure(rho)
        assert readout.my_rot == pytest.approx(readout.my, abs=1e-12)
        assert readout.my == pytest.approx(-rho.components[2], abs=1e-12)

    def test_round_trip_random_states(self, rng):
        """Test reconstruct(measure(rho)) = rho for 100 random pure states."""
        for _ in range(100):
            rho = DensityMatrix2.from_state(PureState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2)))
            rebuilt = reconstruct(measure(rho))
            np.testing.assert_allclose(rebuilt.entries, rho.entries, atol=1e-12)
            assert rebuilt.is_positive()

    def test_inconsistent_readout(self):
        """Test that InconsistentReadout is raised when the y readouts disagree."""
        with pytest.raises(InconsistentReadout, match="differ"):
            reconstruct(MagnetizationReadout(mx=0.0, my=0.1, mx_rot=0.5, my_rot=0.2))


class TestThermalPolarization:
    """Tests for thermal_polarization."""

    def test_room_temperature_value(self):
        """Test about 0.652e-5 at 161.975 MHz and 298.15 K."""
        value = thermal_polarization(2 * math.pi * 161.975e6, 298.15)
        assert value == pytest.approx(0.652e-5, rel=0.01)

    def test_linear_in_frequency(self):
        """Test doubling w0 doubles the small polarization."""
        low = thermal_polarization(2 * math.pi * 100e6, 298.15)
        assert thermal_polarization(2 * math.pi * 200e6, 298.15) / low == pytest.approx(2.0, rel=1e-6)

    def test_vanishes_at_high_temperature(self):
        """Test the polarization tends to zero."""
        assert thermal_polarization(2 * math.pi * 161.975e6, 1e12) < 1e-12

    def test_rejects_nonpositive_temperature(self):
        """Test temperature must be positive."""
        with pytest.raises(ValueError, match="temperature"):
            thermal_polarization(1.0, 0.0)
