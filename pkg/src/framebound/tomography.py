#!/usr/bin/env python3
"""Spin-1/2 density-matrix tomography from transverse magnetization readouts."""

import math

from loguru import logger
import numpy as np
from scipy.constants import hbar, k as boltzmann

from framebound.errors import InconsistentReadout
from framebound.models import DensityMatrix2, MagnetizationReadout
from framebound.quantum import expm_unitary, spin_operators

READOUT_TOL: float = 1e-9

_SPINS = spin_operators(0.5)


def ry_half_pi() -> np.ndarray:
    """Read pulse R_y(pi/2) = exp(-i (pi/2) Iy) = [[1, -1], [1, 1]] / sqrt(2)."""
    return expm_unitary(_SPINS.iy, 0.5 * math.pi)


def rotated_matrix(rho: DensityMatrix2) -> np.ndarray:
    """rho' = R_y(pi/2) rho R_y(pi/2)^dagger by direct conjugation."""
    rot = ry_half_pi()
    return rot @ rho.entries @ rot.conj().T


def rotated_matrix_closed_form(rho: DensityMatrix2) -> np.ndarray:
    """rho' written in the components: [[1 - 2 x2, x1 - x4 + 2i x3], [x1 - x4 - 2i x3, 1 + 2 x2]] / 2."""
    x1, x2, x3, x4 = rho.components
    return 0.5 * np.array(
        [[1.0 - 2.0 * x2, x1 - x4 + 2j * x3], [x1 - x4 - 2j * x3, 1.0 + 2.0 * x2]],
        dtype=complex,
    )


def measure(rho: DensityMatrix2) -> MagnetizationReadout:
    """
    Transverse magnetizations Tr{I_x rho}, Tr{I_y rho} before and after the read pulse.

    Gives mx = x2, my = -x3, mx_rot = (x1 - x4)/2 and my_rot = -x3.
    """
    rho_rot = rotated_matrix(rho)
    ix, iy = _SPINS.ix.matrix, _SPINS.iy.matrix
    return MagnetizationReadout(
        mx=float(np.trace(ix @ rho.entries).real),
        my=float(np.trace(iy @ rho.entries).real),
        mx_rot=float(np.trace(ix @ rho_rot).real),
        my_rot=float(np.trace(iy @ rho_rot).real),
    )


def reconstruct(readout: MagnetizationReadout) -> DensityMatrix2:
    """
    Solve x2 = mx, x3 = -my, x1 - x4 = 2 mx_rot, x1 + x4 = 1.

    Args:
        readout: Magnetizations before and after R_y(pi/2)

    Returns:
        Hermitian unit-trace density matrix

    Raises:
        InconsistentReadout: If the two measurements of the y magnetization disagree
    """
    if abs(readout.my_rot - readout.my) > READOUT_TOL:
        raise InconsistentReadout(
            f"y magnetization before ({readout.my!r}) and after ({readout.my_rot!r}) the read pulse differ"
        )
    return DensityMatrix2.from_components(
        x1=0.5 + readout.mx_rot,
        x2=readout.mx,
        x3=-readout.my,
        x4=0.5 - readout.mx_rot,
    )


def thermal_polarization(omega0: float, temperature: float) -> float:
    """
    Polarization beta hbar w0 / (2 Z) of the thermal state, Z = 2 cosh(beta hbar w0 / 2).

    Args:
        omega0: Larmor frequency in rad/s
        temperature: Temperature in kelvin

    Returns:
        Dimensionless polarization factor
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    x = hbar * omega0 / (boltzmann * temperature)
    partition = 2.0 * math.cosh(0.5 * x)
    epsilon = x / (2.0 * partition)
    logger.debug("Thermal polarization at {} K: {:.6e}", temperature, epsilon)
    return epsilon
