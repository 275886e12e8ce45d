#!/usr/bin/env python3
"""Dimension-generic state and operator algebra: spin matrices, propagators, fidelity, uncertainty."""

import math
from typing import List, Union

import numpy as np

from framebound.models import HermitianOperator, PureState, SpinOperators

OperatorLike = Union[HermitianOperator, np.ndarray]
StateLike = Union[PureState, np.ndarray]


def as_matrix(op: OperatorLike) -> np.ndarray:
    """Return the complex matrix behind an operator or array."""
    if isinstance(op, HermitianOperator):
        return op.matrix
    return np.asarray(op, dtype=complex)


def as_vector(state: StateLike) -> np.ndarray:
    """Return the complex amplitude vector behind a state or array."""
    if isinstance(state, PureState):
        return state.amplitudes
    return np.asarray(state, dtype=complex).reshape(-1)


def spin_operators(j: float) -> SpinOperators:
    """
    Build the angular-momentum matrices for spin j.

    Args:
        j: Half-integer spin (2j must be a positive integer)

    Returns:
        SpinOperators in the Iz eigenbasis ordered m = j, j-1, ..., -j

    Raises:
        ValueError: If j is not a positive half-integer
    """
    twice_j = 2.0 * j
    if twice_j <= 0 or abs(twice_j - round(twice_j)) > 1e-12:
        raise ValueError(f"spin must be a positive half-integer, got {j}")
    j = round(twice_j) / 2.0
    m = j - np.arange(round(twice_j) + 1)
    dim = m.size

    # <m+1| I+ |m> on the superdiagonal
    raising = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        raising[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    lowering = raising.conj().T

    ix = 0.5 * (raising + lowering)
    iy = -0.5j * (raising - lowering)
    iz = np.diag(m).astype(complex)
    isq = ix @ ix + iy @ iy + iz @ iz

    return SpinOperators(
        j=j,
        ix=HermitianOperator(ix),
        iy=HermitianOperator(iy),
        iz=HermitianOperator(iz),
        isq=HermitianOperator.symmetrized(isq),
    )


def expm_unitary(generator: OperatorLike, s: float) -> np.ndarray:
    """
    Compute exp(-i G s) through the eigendecomposition of the Hermitian G.

    Args:
        generator: Hermitian generator G
        s: Real evolution parameter (time or angle)

    Returns:
        Unitary matrix exp(-i G s)
    """
    mat = as_matrix(generator)
    eigenvalues, vectors = np.linalg.eigh(mat)
    phases = np.exp(-1j * eigenvalues * s)
    return (vectors * phases) @ vectors.conj().T


def evolve(generator: OperatorLike, s: float, state: StateLike) -> PureState:
    """Apply exp(-i G s) to a state."""
    return PureState.from_vector(expm_unitary(generator, s) @ as_vector(state))


def fidelity(a: StateLike, b: StateLike) -> float:
    """
    Squared overlap |<a|b>|^2 clamped to [0, 1].

    Raises:
        ValueError: If the state dimensions differ
    """
    va, vb = as_vector(a), as_vector(b)
    if va.size != vb.size:
        raise ValueError(f"dimension mismatch: {va.size} vs {vb.size}")
    return float(min(1.0, max(0.0, abs(np.vdot(va, vb)) ** 2)))


def expectation(op: OperatorLike, state: StateLike) -> float:
    """Real expectation value <psi|H|psi> of a Hermitian operator."""
    mat, vec = as_matrix(op), as_vector(state)
    if mat.shape[0] != vec.size:
        raise ValueError(f"dimension mismatch: operator {mat.shape[0]} vs state {vec.size}")
    return float(np.vdot(vec, mat @ vec).real)


def energy_uncertainty(op: OperatorLike, state: StateLike) -> float:
    """
    Standard deviation sqrt(<H^2> - <H>^2) of H in the state.

    Computed as || (H - <H>) psi || to avoid cancellation when <H> is large.

    Raises:
        ValueError: If the operator and state dimensions differ
    """
    mat, vec = as_matrix(op), as_vector(state)
    if mat.shape[0] != vec.size:
        raise ValueError(f"dimension mismatch: operator {mat.shape[0]} vs state {vec.size}")
    h_psi = mat @ vec
    mean = np.vdot(vec, h_psi).real
    return float(np.linalg.norm(h_psi - mean * vec))


def gram_schmidt_complement(psi0: StateLike) -> List[PureState]:
    """
    Orthonormal basis of the complement of psi0 via modified Gram-Schmidt.

    Seeds are the canonical basis vectors in index order, skipping the one with the
    largest overlap with psi0; a second projection pass is applied when a vector
    loses more than 30% of its norm.

    Args:
        psi0: Normalized reference state of dimension n

    Returns:
        List of n-1 states orthonormal to each other and to psi0
    """
    v0 = as_vector(psi0)
    dim = v0.size
    skip = int(np.argmax(np.abs(v0)))
    basis: List[np.ndarray] = [v0 / np.linalg.norm(v0)]

    for index in range(dim):
        if index == skip:
            continue
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        norm_init = np.linalg.norm(vec)
        for q in basis:
            vec = vec - np.vdot(q, vec) * q
        # reorthogonalization
        if np.linalg.norm(vec) < 0.7 * norm_init:
            for q in basis:
                vec = vec - np.vdot(q, vec) * q
        basis.append(vec / np.linalg.norm(vec))

    return [PureState.from_vector(vec) for vec in basis[1:]]


def bloch_state(theta: float, phi: float) -> PureState:
    """cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>."""
    return PureState.from_vector(
        np.array([math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)], dtype=complex)
    )


def spin_coherent_state(spins: SpinOperators, theta: float, phi: float) -> PureState:
    """
    Spin coherent state exp(-i phi Iz) exp(-i theta Iy) |j, +j>.

    For j = 1/2 this equals bloch_state(theta, phi) up to a global phase.
    """
    stretched = np.zeros(spins.dim, dtype=complex)
    stretched[0] = 1.0
    vec = expm_unitary(spins.iz, phi) @ (expm_unitary(spins.iy, theta) @ stretched)
    return PureState.from_vector(vec)


def commutator_norm(a: OperatorLike, b: OperatorLike) -> float:
    """Frobenius norm of [A, B]."""
    ma, mb = as_matrix(a), as_matrix(b)
    return float(np.linalg.norm(ma @ mb - mb @ ma))
