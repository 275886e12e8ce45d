#!/usr/bin/env python3
"""Data models for states, operators, NMR parameters and estimator results."""

from dataclasses import dataclass, field
import math
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np

from framebound.config import (
    DEFAULT_N_ANGLE,
    DEFAULT_N_PHASE,
    DEFAULT_REFINE,
    DEFAULT_SWEEP_OVERSAMPLE,
    HERMITIAN_TOL,
    STATE_NORM_TOL,
    TRAJECTORY_NORM_TOL,
)


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector |psi>."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.size < 2:
            raise ValueError(f"state dimension must be >= 2, got {vec.size}")
        norm_sq = float(np.vdot(vec, vec).real)
        if abs(norm_sq - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", vec)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @classmethod
    def from_vector(cls, vector: Any) -> "PureState":
        """
        Create a PureState by normalizing an arbitrary nonzero vector.

        Args:
            vector: Complex amplitudes (any nonzero norm)

        Returns:
            PureState instance
        """
        vec = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        """Canonical basis vector |index> of the given dimension."""
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        return cls(vec)


@dataclass(frozen=True)
class HermitianOperator:
    """Square Hermitian matrix in angular-frequency units (hbar = 1)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {mat.shape}")
        scale = max(1.0, float(np.max(np.abs(mat)))) if mat.size else 1.0
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL * scale:
            raise ValueError("operator is not Hermitian")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def symmetrized(cls, matrix: Any) -> "HermitianOperator":
        """Wrap (M + M^dagger)/2, absorbing rounding asymmetry of products like R^dagger H R."""
        mat = np.asarray(matrix, dtype=complex)
        return cls(0.5 * (mat + mat.conj().T))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + other.matrix)

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(float(factor) * self.matrix)


@dataclass(frozen=True)
class SpinOperators:
    """Angular-momentum matrices in the Iz eigenbasis ordered m = j ... -j."""

    j: float
    ix: HermitianOperator
    iy: HermitianOperator
    iz: HermitianOperator
    isq: HermitianOperator

    @property
    def dim(self) -> int:
        return self.iz.dim


@dataclass(frozen=True)
class NmrParams:
    """Angular frequencies (rad/s) and spin defining the driven NMR Hamiltonian."""

    j: float
    omega0: float
    omega1: float
    omegap: float
    omegaq: float = 0.0
    quadrupolar_included: bool = False

    def __post_init__(self) -> None:
        twice_j = 2.0 * self.j
        if twice_j <= 0 or abs(twice_j - round(twice_j)) > 1e-12:
            raise ValueError(f"spin must be a positive half-integer, got {self.j}")
        for name in ("omega0", "omega1", "omegap", "omegaq"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega1 <= 0:
            raise ValueError("omega1 must be positive")
        if self.quadrupolar_included and self.j < 1:
            raise ValueError("quadrupolar coupling requires j >= 1")

    @property
    def dim(self) -> int:
        return int(round(2 * self.j)) + 1

    @property
    def delta(self) -> float:
        """Detuning omega0 - omegap."""
        return self.omega0 - self.omegap

    def scaled(self, factor: float) -> "NmrParams":
        """Multiply every frequency by factor (times scale by 1/factor)."""
        return NmrParams(
            j=self.j,
            omega0=self.omega0 * factor,
            omega1=self.omega1 * factor,
            omegap=self.omegap * factor,
            omegaq=self.omegaq * factor,
            quadrupolar_included=self.quadrupolar_included,
        )


@dataclass(frozen=True)
class RotatingFrame:
    """Frame R(t) = exp(-i Lambda t) given by its time-independent generator Lambda."""

    generator: HermitianOperator

    @property
    def dim(self) -> int:
        return self.generator.dim


@dataclass(frozen=True)
class DerivedFrameQuantities:
    """Detuning, effective Rabi frequency, tilt angle and c+- overlaps of a Bloch state."""

    delta: float
    omega: float
    chi: float
    cos_chi: float
    sin_chi: float
    cplus: complex
    cminus: complex


@dataclass(frozen=True)
class Trajectory:
    """Discretized |psi(tau)> on an increasing time grid starting at zero."""

    times: np.ndarray
    states: np.ndarray
    source: str = "unknown"
    renorm_drift: float = 0.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).reshape(-1)
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 2 or states.shape[0] != times.size:
            raise ValueError("states must be a (len(times), dim) array")
        if times.size == 0 or times[0] != 0.0:
            raise ValueError("trajectory must start at t = 0")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        norms = np.sum(np.abs(states) ** 2, axis=1)
        if np.max(np.abs(norms - 1.0)) > TRAJECTORY_NORM_TOL:
            raise ValueError("trajectory contains non-normalized states")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return int(self.states.shape[1])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def state(self, index: int) -> PureState:
        return PureState(self.states[index])


@dataclass(frozen=True)
class FidelityCurve:
    """Fidelity F(t) sampled on a time grid, clamped to [0, 1]."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).reshape(-1)
        values = np.clip(np.asarray(self.values, dtype=float).reshape(-1), 0.0, 1.0)
        if times.size != values.size:
            raise ValueError("times and values must have the same length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SweepGrid:
    """Resolution of the parameter sweep and of the time scan."""

    n_phase: int = DEFAULT_N_PHASE
    n_angle: int = DEFAULT_N_ANGLE
    oversample: int = DEFAULT_SWEEP_OVERSAMPLE
    refine: int = DEFAULT_REFINE

    def __post_init__(self) -> None:
        if self.n_phase < 2:
            raise ValueError("n_phase must be >= 2")
        if self.n_angle < 2:
            raise ValueError("n_angle must be >= 2")
        if self.oversample < 8:
            raise ValueError("oversample must be >= 8")
        if self.refine < 0:
            raise ValueError("refine must be >= 0")


@dataclass(frozen=True)
class EstimationProblem:
    """Everything the transcendental method needs: psi0, F, frame and H_R."""

    psi0: PureState
    f_target: float
    frame: RotatingFrame
    h_r: HermitianOperator
    sweep: SweepGrid = field(default_factory=SweepGrid)
    horizon_hint: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.f_target <= 1.0:
            raise ValueError(f"f_target must lie in [0, 1], got {self.f_target}")
        if self.horizon_hint is not None and self.horizon_hint <= 0:
            raise ValueError(f"horizon_hint must be positive, got {self.horizon_hint}")
        if not self.psi0.dim == self.frame.dim == self.h_r.dim:
            raise ValueError("psi0, frame and H_R dimensions differ")


@dataclass(frozen=True)
class SweepCandidate:
    """First root of the transcendental equation at one sweep grid point."""

    t_star: float
    parameters: Tuple[float, ...]
    residual: float
    bracket: Tuple[float, float]


@dataclass(frozen=True)
class TranscendentalRoot:
    """First chronological root of the transcendental equation, minimized over the sweep."""

    t_star: float
    phases: Tuple[float, ...]
    amplitudes: Tuple[float, ...]
    angles: Tuple[float, ...]
    residual: float
    bracket: Tuple[float, float]
    grid_points: int = 0

    @property
    def parameters(self) -> Tuple[float, ...]:
        """Sweep coordinates in grid order: hyperspherical angles, then phases."""
        return self.angles + self.phases


@dataclass
class EstimateReport:
    """One fidelity row: oracle time, every estimator and diagnostics."""

    f_target: float
    status: Literal["ok", "unreachable"]
    t_actual: Optional[float] = None
    t_aa: Optional[float] = None
    t_transcendental: Optional[float] = None
    t_epsilon: Optional[float] = None
    t_norm_tr: Optional[float] = None
    t_norm_op: Optional[float] = None
    t_norm_hs: Optional[float] = None
    path_ratio: Optional[float] = None
    dh_r: Optional[float] = None
    avg_dh_lab: Optional[float] = None
    sweep_parameters: Tuple[float, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert the report to a dictionary keyed by the CSV column names.

        t_epsilon and the sweep coordinates are not part of the fixed CSV header.

        Returns:
            Dictionary with None for fields that are not available
        """
        return {
            "F": self.f_target,
            "t_actual": self.t_actual,
            "t_aa": self.t_aa,
            "t_transcendental": self.t_transcendental,
            "t_norm_tr": self.t_norm_tr,
            "t_norm_op": self.t_norm_op,
            "t_norm_hs": self.t_norm_hs,
            "path_ratio": self.path_ratio,
            "dH_R": self.dh_r,
            "avg_dH_lab": self.avg_dh_lab,
            "status": self.status,
        }


@dataclass(frozen=True)
class DensityMatrix2:
    """Single-qubit density matrix [[x1, x2 + i x3], [x2 - i x3, x4]]."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries, dtype=complex)
        if mat.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > HERMITIAN_TOL:
            raise ValueError("density matrix trace must be 1")
        object.__setattr__(self, "entries", mat)

    @classmethod
    def from_components(cls, x1: float, x2: float, x3: float, x4: float) -> "DensityMatrix2":
        return cls(np.array([[x1, x2 + 1j * x3], [x2 - 1j * x3, x4]], dtype=complex))

    @classmethod
    def from_state(cls, state: PureState) -> "DensityMatrix2":
        vec = state.amplitudes
        if vec.size != 2:
            raise ValueError("density matrix requires a two-level state")
        return cls(np.outer(vec, vec.conj()))

    @property
    def components(self) -> Tuple[float, float, float, float]:
        """(x1, x2, x3, x4) of the parametrization."""
        mat = self.entries
        return (float(mat[0, 0].real), float(mat[0, 1].real), float(mat[0, 1].imag), float(mat[1, 1].real))

    def is_positive(self, tol: float = 1e-10) -> bool:
        return bool(np.min(np.linalg.eigvalsh(self.entries)) >= -tol)


@dataclass(frozen=True)
class MagnetizationReadout:
    """Transverse magnetizations before and after the R_y(pi/2) read pulse."""

    mx: float
    my: float
    mx_rot: float
    my_rot: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.mx, self.my, self.mx_rot, self.my_rot)
