#!/usr/bin/env python3
"""Scenario presets, key=value scenario files and value parsing."""

from dataclasses import dataclass, field, replace
import math
from pathlib import Path
import re
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from framebound.config import DEFAULT_FIDELITY_GRID, DEFAULT_THREADS, DESK_SCALE, TOY_N_PHASE
from framebound.errors import ScenarioError
from framebound.models import HermitianOperator, NmrParams, PureState, RotatingFrame, SweepGrid
from framebound.quantum import bloch_state, spin_coherent_state, spin_operators
from framebound.spin_models import drive_frame

ORACLES = ("exact", "rk4")
FRAMES = ("drive", "lab")
STATE_LABELS = ("up", "down", "stretched")

_PAULI = {
    "id": np.eye(2, dtype=complex),
    "sx": np.array([[0, 1], [1, 0]], dtype=complex),
    "sy": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sz": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI_TERM = re.compile(r"([+-]?)\s*(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\s*\*?\s*)?(id|sx|sy|sz)")


def parse_fidelity_grid(text: str) -> Tuple[float, ...]:
    """
    Parse "lo:hi:count" or a comma-separated list of fidelities.

    Raises:
        ScenarioError: If the grid is malformed, leaves [0, 1] or is not strictly monotone
    """
    text = text.strip()
    if not text:
        return ()
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            values = tuple(round(float(v), 12) for v in np.linspace(float(lo), float(hi), int(count)))
        else:
            values = tuple(float(v) for v in text.split(","))
    except ValueError as e:
        raise ScenarioError(f"invalid fidelity grid {text!r}: {e}") from e
    validate_fidelity_grid(values)
    return values


def validate_fidelity_grid(values: Tuple[float, ...]) -> None:
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise ScenarioError(f"fidelity grid values must lie in [0, 1]: {values}")
    steps = np.diff(values)
    if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
        raise ScenarioError(f"fidelity grid must be strictly monotone: {values}")


def parse_frequency(value: str) -> float:
    """
    Parse an angular frequency; "hz:" values are multiplied by 2 pi, "rad_s:" and bare numbers are rad/s.

    Raises:
        ScenarioError: If the value is not a number
    """
    text = value.strip()
    factor = 1.0
    if text.startswith("hz:"):
        factor, text = 2.0 * math.pi, text[3:]
    elif text.startswith("rad_s:"):
        text = text[6:]
    try:
        return factor * float(text)
    except ValueError as e:
        raise ScenarioError(f"invalid frequency {value!r}") from e


def parse_pauli(text: str) -> HermitianOperator:
    """
    Build a 2x2 Hamiltonian from a Pauli sum such as "sz+sx" or "0.5*sx - 2 sz".

    Raises:
        ScenarioError: If the expression has unparsable parts
    """
    compact = text.replace(" ", "")
    matrix = np.zeros((2, 2), dtype=complex)
    position = 0
    for match in _PAULI_TERM.finditer(compact):
        if match.start() != position or (position > 0 and not match.group(1)):
            raise ScenarioError(f"invalid Pauli expression {text!r}")
        sign = -1.0 if match.group(1) == "-" else 1.0
        coefficient = float(match.group(2)) if match.group(2) else 1.0
        matrix += sign * coefficient * _PAULI[match.group(3)]
        position = match.end()
    if position == 0 or position != len(compact):
        raise ScenarioError(f"invalid Pauli expression {text!r}")
    return HermitianOperator(matrix)


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ScenarioError(f"invalid boolean {value!r}")


@dataclass(frozen=True)
class Scenario:
    """A complete comparison run: model, initial state, frame, grids and output."""

    name: str
    params: Optional[NmrParams] = None
    hamiltonian: Optional[str] = None
    theta: float = 0.0
    phi: float = 0.0
    state: Optional[str] = None
    frame: str = "drive"
    fidelity_grid: Tuple[float, ...] = field(default_factory=lambda: parse_fidelity_grid(DEFAULT_FIDELITY_GRID))
    sweep: SweepGrid = field(default_factory=SweepGrid)
    horizon: float = 1.0
    out: Optional[str] = None
    threads: int = DEFAULT_THREADS
    oracle: str = "exact"
    strict_literal_hs: bool = False

    def __post_init__(self) -> None:
        if (self.params is None) == (self.hamiltonian is None):
            raise ScenarioError(f"scenario {self.name!r} needs exactly one of NMR parameters or a Hamiltonian")
        if self.horizon <= 0:
            raise ScenarioError(f"horizon must be positive, got {self.horizon}")
        if self.frame not in FRAMES:
            raise ScenarioError(f"unknown frame {self.frame!r}, expected one of {FRAMES}")
        if self.oracle not in ORACLES:
            raise ScenarioError(f"unknown oracle {self.oracle!r}, expected one of {ORACLES}")
        if self.state is not None and self.state not in STATE_LABELS:
            raise ScenarioError(f"unknown state {self.state!r}, expected one of {STATE_LABELS}")
        if self.threads < 1:
            raise ScenarioError(f"threads must be >= 1, got {self.threads}")
        if self.hamiltonian is not None and self.frame != "lab":
            raise ScenarioError("custom Hamiltonians are compared in the lab frame")
        validate_fidelity_grid(self.fidelity_grid)

    @property
    def dim(self) -> int:
        return self.params.dim if self.params is not None else 2

    def custom_hamiltonian(self) -> HermitianOperator:
        if self.hamiltonian is None:
            raise ScenarioError(f"scenario {self.name!r} has no custom Hamiltonian")
        return parse_pauli(self.hamiltonian)

    def initial_state(self) -> PureState:
        """Basis label if given, else the Bloch (j = 1/2) or spin coherent state at (theta, phi)."""
        if self.state in ("up", "stretched"):
            return PureState.basis(self.dim, 0)
        if self.state == "down":
            return PureState.basis(self.dim, self.dim - 1)
        if self.dim == 2:
            return bloch_state(self.theta, self.phi)
        return spin_coherent_state(spin_operators((self.dim - 1) / 2.0), self.theta, self.phi)

    def rotating_frame(self) -> RotatingFrame:
        if self.frame == "lab":
            return RotatingFrame(HermitianOperator(np.zeros((self.dim, self.dim), dtype=complex)))
        assert self.params is not None
        return drive_frame(self.params)

    def scaled(self, factor: float, name: Optional[str] = None) -> "Scenario":
        """Frequencies multiplied by factor and the horizon divided by it."""
        if self.params is None:
            raise ScenarioError("only NMR scenarios can be frequency scaled")
        return replace(self, name=name or self.name, params=self.params.scaled(factor), horizon=self.horizon / factor)


def _base_presets() -> Dict[str, Scenario]:
    two_pi = 2.0 * math.pi
    return {
        "spin-half-paper": Scenario(
            name="spin-half-paper",
            params=NmrParams(j=0.5, omega0=two_pi * 161.975e6, omega1=two_pi * 21.930e3, omegap=two_pi * 161.975e6),
            theta=math.radians(24.48),
            phi=math.radians(4.02),
            horizon=22e-6,
        ),
        "spin-half-toy": Scenario(
            name="spin-half-toy",
            params=NmrParams(j=0.5, omega0=two_pi * 16000.0, omega1=two_pi * 1250.0, omegap=two_pi * 15278.0),
            theta=math.radians(30.0),
            phi=math.radians(180.0),
            horizon=1e-3,
            # the tilted frame needs a fine phase grid to find the first root
            sweep=SweepGrid(n_phase=TOY_N_PHASE),
        ),
        "spin-three-half-paper": Scenario(
            name="spin-three-half-paper",
            params=NmrParams(
                j=1.5,
                omega0=two_pi * 105.842e6,
                omega1=math.pi / 8e-6,
                omegap=two_pi * 105.842e6,
                omegaq=two_pi * 15e3,
                quadrupolar_included=False,
            ),
            state="stretched",
            horizon=8e-6,
        ),
    }


def presets() -> Dict[str, Scenario]:
    """Shipped presets plus their frequency-downscaled -desk variants."""
    base = _base_presets()
    scaled = {f"{name}-desk": s.scaled(DESK_SCALE, name=f"{name}-desk") for name, s in base.items()}
    return {**base, **scaled}


def get_preset(name: str) -> Scenario:
    """
    Look up a preset by name.

    Raises:
        ScenarioError: If there is no preset with that name
    """
    available = presets()
    if name not in available:
        raise ScenarioError(f"unknown scenario {name!r}, expected one of {sorted(available)}")
    return available[name]


def load_scenario_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read flat "key = value" lines; blank lines and "#" comments are skipped.

    Raises:
        ScenarioError: If the file is missing or a line has no "="
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}") from e
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{path}:{number}: expected key = value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_PARAM_KEYS = ("omega0", "omega1", "omegap", "omegaq")


def build_scenario(overrides: Mapping[str, str], base: Optional[Scenario] = None) -> Scenario:
    """
    Apply string overrides to a base scenario (the "scenario" key selects a preset).

    Angles theta and phi are given in degrees, frequencies as parse_frequency values.

    Raises:
        ScenarioError: If a key is unknown or a value is invalid
    """
    values = dict(overrides)
    if "scenario" in values:
        base = get_preset(values.pop("scenario"))
    if base is None and "hamiltonian" not in values and "omega0" not in values:
        raise ScenarioError("no scenario preset, Hamiltonian or NMR parameters given")

    changes: Dict[str, object] = {}
    param_changes: Dict[str, object] = {}
    sweep_changes: Dict[str, int] = {}
    try:
        for key, value in values.items():
            if key in _PARAM_KEYS:
                param_changes[key] = parse_frequency(value)
            elif key == "j":
                param_changes["j"] = float(value)
            elif key == "quadrupolar":
                param_changes["quadrupolar_included"] = _parse_bool(value)
            elif key in ("theta", "phi"):
                changes[key] = math.radians(float(value))
            elif key in ("state", "frame", "oracle", "hamiltonian", "name"):
                changes[key] = value
            elif key == "out":
                changes["out"] = value or None
            elif key == "fidelity_grid":
                changes["fidelity_grid"] = parse_fidelity_grid(value)
            elif key in ("n_phase", "n_angle", "oversample", "refine"):
                sweep_changes[key] = int(value)
            elif key == "threads":
                changes["threads"] = int(value)
            elif key == "horizon":
                changes["horizon"] = float(value)
            elif key == "strict_literal_hs":
                changes["strict_literal_hs"] = _parse_bool(value)
            else:
                raise ScenarioError(f"unknown scenario key {key!r}")

        if base is None:
            params = NmrParams(**{"j": 0.5, "omegap": 0.0, **param_changes}) if param_changes else None  # type: ignore[arg-type]
            defaults: Dict[str, object] = {"name": "custom", "params": params}
            if params is None:
                defaults["frame"] = "lab"
            if sweep_changes:
                defaults["sweep"] = SweepGrid(**sweep_changes)
            return Scenario(**{**defaults, **changes})  # type: ignore[arg-type]
        if param_changes:
            if base.params is None:
                raise ScenarioError("NMR parameters cannot be applied to a custom Hamiltonian scenario")
            changes["params"] = replace(base.params, **param_changes)
        if sweep_changes:
            changes["sweep"] = replace(base.sweep, **sweep_changes)
        return replace(base, **changes)  # type: ignore[arg-type]
    except ScenarioError:
        raise
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e)) from e
