"""Tests for scenario presets, scenario files and value parsing."""

import math

import numpy as np
import pytest

from framebound.errors import ScenarioError
from framebound.models import NmrParams, PureState
from framebound.quantum import fidelity
from framebound.scenarios import (
    Scenario,
    build_scenario,
    get_preset,
    load_scenario_file,
    parse_fidelity_grid,
    parse_frequency,
    parse_pauli,
    presets,
)


class TestParseFidelityGrid:
    """Tests for parse_fidelity_grid."""

    def test_range(self):
        """Test lo:hi:count gives rounded evenly spaced values."""
        grid = parse_fidelity_grid("0.05:0.95:19")
        assert len(grid) == 19
        assert grid[0] == 0.05
        assert grid[1] == 0.1
        assert grid[-1] == 0.95

    def test_list(self):
        """Test comma-separated values."""
        assert parse_fidelity_grid("0.9, 0.5,0.1") == (0.9, 0.5, 0.1)

    def test_empty(self):
        """Test an empty string gives an empty grid."""
        assert parse_fidelity_grid("  ") == ()

    @pytest.mark.parametrize("text", ["0.1:0.9", "a,b", "0.1:0.9:x"])
    def test_malformed(self, text):
        """Test that ScenarioError is raised for unparsable grids."""
        with pytest.raises(ScenarioError, match="invalid fidelity grid"):
            parse_fidelity_grid(text)

    def test_out_of_range(self):
        """Test values must lie in [0, 1]."""
        with pytest.raises(ScenarioError, match="must lie in"):
            parse_fidelity_grid("0.5,1.5")

    def test_not_monotone(self):
        """Test grids must be strictly monotone."""
        with pytest.raises(ScenarioError, match="monotone"):
            parse_fidelity_grid("0.5,0.7,0.6")


class TestParseFrequency:
    """Tests for parse_frequency."""

    def test_units(self):
        """Test hz: is multiplied by 2 pi while rad_s: and bare numbers are kept."""
        assert parse_frequency("hz:1") == pytest.approx(2 * math.pi)
        assert parse_frequency("rad_s:3.5") == 3.5
        assert parse_frequency(" 1e3 ") == 1000.0

    def test_invalid(self):
        """Test that ScenarioError is raised for non-numbers."""
        with pytest.raises(ScenarioError, match="invalid frequency"):
            parse_frequency("hz:fast")


class TestParsePauli:
    """Tests for parse_pauli."""

    def test_sum(self):
        """Test sz + sx."""
        np.testing.assert_array_equal(parse_pauli("sz+sx").matrix, [[1, 1], [1, -1]])

    def test_coefficients_and_signs(self):
        """Test scaled terms with spaces and subtraction."""
        matrix = parse_pauli("0.5*sx - 2 sz + id").matrix
        np.testing.assert_allclose(matrix, [[-1.0, 0.5], [0.5, 3.0]])

    def test_sy(self):
        """Test sy is the imaginary Pauli matrix."""
        np.testing.assert_array_equal(parse_pauli("sy").matrix, [[0, -1j], [1j, 0]])

    @pytest.mark.parametrize("text", ["", "sq", "sx sz", "sx+", "2*"])
    def test_invalid(self, text):
        """Test that ScenarioError is raised for malformed expressions."""
        with pytest.raises(ScenarioError, match="invalid Pauli expression"):
            parse_pauli(text)


class TestScenario:
    """Tests for Scenario validation and derived objects."""

    def test_needs_exactly_one_model(self):
        """Test params and hamiltonian are mutually exclusive."""
        with pytest.raises(ScenarioError, match="exactly one"):
            Scenario(name="none")

    def test_custom_hamiltonian_requires_lab_frame(self):
        """Test custom Hamiltonians cannot use the drive frame."""
        with pytest.raises(ScenarioError, match="lab frame"):
            Scenario(name="custom", hamiltonian="sz+sx", frame="drive")

    @pytest.mark.parametrize(
        "kwargs,message",
        [
            ({"horizon": 0.0}, "horizon"),
            ({"frame": "tilted"}, "unknown frame"),
            ({"oracle": "euler"}, "unknown oracle"),
            ({"state": "sideways"}, "unknown state"),
            ({"threads": 0}, "threads"),
            ({"fidelity_grid": (0.5, 0.5)}, "monotone"),
        ],
    )
    def test_rejects_invalid(self, kwargs, message):
        """Test field validation."""
        params = NmrParams(j=0.5, omega0=1.0, omega1=1.0, omegap=1.0)
        with pytest.raises(ScenarioError, match=message):
            Scenario(name="bad", params=params, **kwargs)

    def test_initial_states(self):
        """Test basis labels and Bloch angles."""
        params = NmrParams(j=1.5, omega0=1.0, omega1=1.0, omegap=1.0)
        np.testing.assert_array_equal(
            Scenario(name="s", params=params, state="stretched").initial_state().amplitudes, [1, 0, 0, 0]
        )
        np.testing.assert_array_equal(
            Scenario(name="s", params=params, state="down").initial_state().amplitudes, [0, 0, 0, 1]
        )
        half = NmrParams(j=0.5, omega0=1.0, omega1=1.0, omegap=1.0)
        bloch = Scenario(name="s", params=half, theta=math.pi / 2).initial_state()
        assert fidelity(bloch, PureState.from_vector([1.0, 1.0])) == pytest.approx(1.0)

    def test_lab_frame_is_zero(self):
        """Test the lab frame has a zero generator."""
        frame = Scenario(name="c", hamiltonian="sx", frame="lab").rotating_frame()
        assert not np.any(frame.generator.matrix)

    def test_scaled(self):
        """Test frequency scaling divides the horizon."""
        base = get_preset("spin-half-toy")
        scaled = base.scaled(1e-3, name="toy-slow")
        assert scaled.name == "toy-slow"
        assert scaled.params.omega1 == pytest.approx(base.params.omega1 * 1e-3)
        assert scaled.horizon == pytest.approx(1.0)

    def test_custom_cannot_scale(self):
        """Test custom Hamiltonian scenarios are not scalable."""
        with pytest.raises(ScenarioError, match="frequency scaled"):
            Scenario(name="c", hamiltonian="sx", frame="lab").scaled(2.0)


class TestPresets:
    """Tests for presets and get_preset."""

    def test_names(self):
        """Test every preset has a desk variant."""
        assert set(presets()) == {
            "spin-half-paper",
            "spin-half-toy",
            "spin-three-half-paper",
            "spin-half-paper-desk",
            "spin-half-toy-desk",
            "spin-three-half-paper-desk",
        }

    def test_spin_half_phosphorus(self):
        """Test frequencies and Bloch angles of the 31P preset."""
        scenario = get_preset("spin-half-paper")
        assert scenario.params.omega0 == pytest.approx(2 * math.pi * 161.975e6)
        assert scenario.params.omega1 == pytest.approx(2 * math.pi * 21.930e3)
        assert scenario.params.delta == 0.0
        assert math.degrees(scenario.theta) == pytest.approx(24.48)
        assert math.degrees(scenario.phi) == pytest.approx(4.02)

    def test_spin_three_half_sodium(self):
        """Test the pi/2 pulse lasts 4 microseconds without the quadrupolar term."""
        params = get_preset("spin-three-half-paper").params
        assert params.dim == 4
        assert 0.5 * math.pi / params.omega1 == pytest.approx(4e-6)
        assert not params.quadrupolar_included

    def test_toy_presets_use_fine_phase_grid(self):
        """Test the detuned toy presets sweep 64 phases."""
        assert get_preset("spin-half-toy").sweep.n_phase == 64
        assert get_preset("spin-half-toy-desk").sweep.n_phase == 64

    def test_desk_variant(self):
        """Test desk presets scale frequencies by 1/1000 and horizons by 1000."""
        base, desk = get_preset("spin-half-toy"), get_preset("spin-half-toy-desk")
        assert desk.params.omega0 == pytest.approx(base.params.omega0 * 1e-3, rel=1e-12)
        assert desk.horizon == pytest.approx(base.horizon * 1e3, rel=1e-12)
        assert desk.theta == base.theta

    def test_unknown(self):
        """Test that ScenarioError is raised for unknown presets."""
        with pytest.raises(ScenarioError, match="unknown scenario"):
            get_preset("spin-seven-half")


class TestScenarioFiles:
    """Tests for load_scenario_file and build_scenario."""

    def test_load(self, tmp_path):
        """Test comments, blank lines and dashed keys."""
        path = tmp_path / "run.cfg"
        path.write_text("# toy run\nscenario = spin-half-toy\n\nfidelity-grid = 0.9,0.5  # two rows\nn_phase=4\n")
        assert load_scenario_file(path) == {"scenario": "spin-half-toy", "fidelity_grid": "0.9,0.5", "n_phase": "4"}

    def test_missing_file(self, tmp_path):
        """Test that ScenarioError is raised for a missing file."""
        with pytest.raises(ScenarioError, match="cannot read"):
            load_scenario_file(tmp_path / "absent.cfg")

    def test_line_without_equals(self, tmp_path):
        """Test that ScenarioError names the offending line."""
        path = tmp_path / "bad.cfg"
        path.write_text("scenario = spin-half-toy\nthreads 4\n")
        with pytest.raises(ScenarioError, match=":2: expected key = value"):
            load_scenario_file(path)

    def test_overrides_on_preset(self):
        """Test preset selection plus frequency, angle and sweep overrides."""
        scenario = build_scenario(
            {"scenario": "spin-half-toy", "omega1": "hz:100", "theta": "90", "n_phase": "4", "threads": "2"}
        )
        assert scenario.name == "spin-half-toy"
        assert scenario.params.omega1 == pytest.approx(2 * math.pi * 100)
        assert scenario.params.omega0 == pytest.approx(2 * math.pi * 16000)
        assert scenario.theta == pytest.approx(math.pi / 2)
        assert scenario.sweep.n_phase == 4
        assert scenario.sweep.n_angle == 8
        assert scenario.threads == 2

    def test_custom_hamiltonian(self):
        """Test a Pauli Hamiltonian scenario defaults to the lab frame."""
        scenario = build_scenario({"hamiltonian": "sz+sx", "state": "up", "horizon": "5", "n_angle": "3"})
        assert scenario.params is None
        assert scenario.frame == "lab"
        assert scenario.sweep.n_angle == 3
        np.testing.assert_array_equal(scenario.custom_hamiltonian().matrix, [[1, 1], [1, -1]])

    def test_custom_nmr_parameters(self):
        """Test NMR parameters without a preset."""
        scenario = build_scenario({"omega0": "50", "omega1": "1", "omegap": "50", "strict_literal_hs": "yes"})
        assert scenario.name == "custom"
        assert scenario.params.j == 0.5
        assert scenario.strict_literal_hs

    @pytest.mark.parametrize(
        "overrides,message",
        [
            ({}, "no scenario preset"),
            ({"scenario": "spin-half-toy", "colour": "blue"}, "unknown scenario key"),
            ({"scenario": "spin-half-toy", "n_phase": "one"}, "invalid literal"),
            ({"scenario": "spin-half-toy", "n_phase": "1"}, "n_phase"),
            ({"scenario": "spin-half-toy", "quadrupolar": "maybe"}, "invalid boolean"),
            ({"scenario": "spin-half-toy", "omega1": "-1"}, "omega1"),
        ],
    )
    def test_invalid_overrides(self, overrides, message):
        """Test that every invalid value surfaces as ScenarioError."""
        with pytest.raises(ScenarioError, match=message):
            build_scenario(overrides)
