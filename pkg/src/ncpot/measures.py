"""Two-qubit correlation measures and their single-qubit potential lift.

Three measures are computed on 4x4 density matrices: the Wootters
concurrence, a three-measurement steering measure built from the
correlation matrix, and a two-measurement Bell-nonlocality measure.
Applying them to the beam-splitter output of a vacuum/photon qubit turns
them into nonclassicality potentials of the single-qubit input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HierarchyViolation, InvalidState
from .linalg import IDENTITY_2, PAULIS, validate_density_matrix
from .states import BeamSplitter, QubitState, mix_on_ideal_bs, mix_on_imperfect_bs

HIERARCHY_TOL = 1e-9
# Values of max(0, .) that land in [-ZERO_BAND, 0] report exactly 0.
ZERO_BAND = 1e-12

_U_STACK = np.stack([np.kron(s, IDENTITY_2) for s in PAULIS])
_V_STACK = np.stack([np.kron(IDENTITY_2, s) for s in PAULIS])
# _T_STACK[m, n] pairs the n-th operator on the first party with the m-th
# on the second, matching the T index placement used throughout.
_T_STACK = np.stack(
    [np.stack([np.kron(sn, sm) for sn in PAULIS]) for sm in PAULIS]
)
_Y_Y = np.kron(PAULIS[1], PAULIS[1])


@dataclass(frozen=True)
class BlochDecomposition:
    """Local Bloch vectors ``u``, ``v`` and 3x3 correlation matrix ``t``."""

    u: np.ndarray
    v: np.ndarray
    t: np.ndarray

    def correlation_gram(self) -> np.ndarray:
        """The symmetric matrix ``T^T T`` entering steering and Bell measures."""
        return self.t.T @ self.t


@dataclass(frozen=True)
class MeasureTriple:
    """Concurrence, steering and Bell-nonlocality values of one state."""

    c: float
    s: float
    b: float


def bloch_decompose(rho: np.ndarray, validate: bool = True) -> BlochDecomposition:
    """Expand a two-qubit state into Bloch vectors and correlation matrix."""
    if validate:
        rho = validate_density_matrix(rho)
    rho = np.asarray(rho, dtype=complex)
    u = np.real(np.einsum("ij,kji->k", rho, _U_STACK))
    v = np.real(np.einsum("ij,kji->k", rho, _V_STACK))
    t = np.real(np.einsum("ij,mnji->mn", rho, _T_STACK))
    return BlochDecomposition(u=u, v=v, t=t)


def bloch_compose(dec: BlochDecomposition) -> np.ndarray:
    """Rebuild the density matrix from its Bloch decomposition."""
    rho = np.eye(4, dtype=complex)
    rho += np.einsum("k,kij->ij", dec.u, _U_STACK)
    rho += np.einsum("k,kij->ij", dec.v, _V_STACK)
    rho += np.einsum("mn,mnij->ij", dec.t, _T_STACK)
    return rho / 4.0


def concurrence(rho: np.ndarray, validate: bool = True) -> float:
    """Wootters concurrence of a two-qubit state.

    The four characteristic values are the square roots of the eigenvalues
    of ``rho (Y x Y) rho* (Y x Y)``; they enter the difference in
    descending order.  With a factor ``rho = L L^dag`` (eigenvalues
    clamped at zero before the square root) they equal the singular
    values of ``L^T (Y x Y) L``, which keeps the small values accurate to
    second order for nearly pure states.
    """
    if validate:
        rho = validate_density_matrix(rho)
    rho = np.asarray(rho, dtype=complex)
    w, v = np.linalg.eigh(rho)
    factor = v * np.sqrt(np.maximum(w, 0.0))
    lam = np.linalg.svd(factor.T @ _Y_Y @ factor, compute_uv=False)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    if c < ZERO_BAND:
        return 0.0
    return min(float(c), 1.0)


def _steering_from_gram(gram: np.ndarray) -> float:
    val = (math.sqrt(max(float(np.trace(gram)), 0.0)) - 1.0) / (math.sqrt(3.0) - 1.0)
    if val < ZERO_BAND:
        return 0.0
    return min(val, 1.0)


def _bell_from_gram(gram: np.ndarray) -> float:
    eig = np.linalg.eigvalsh(gram)
    val = (math.sqrt(max(float(eig[1] + eig[2]), 0.0)) - 1.0) / (math.sqrt(2.0) - 1.0)
    if val < ZERO_BAND:
        return 0.0
    return min(val, 1.0)


def steering(rho: np.ndarray, validate: bool = True) -> float:
    """Three-measurement steering measure ``max(0, (sqrt(Tr R) - 1)/(sqrt(3) - 1))``."""
    gram = bloch_decompose(rho, validate=validate).correlation_gram()
    return _steering_from_gram(gram)


def bell(rho: np.ndarray, validate: bool = True) -> float:
    """Bell-nonlocality measure from the two largest eigenvalues of ``T^T T``."""
    gram = bloch_decompose(rho, validate=validate).correlation_gram()
    return _bell_from_gram(gram)


def measure_triple(rho: np.ndarray, validate: bool = True) -> MeasureTriple:
    """All three measures of one state, with the hierarchy sanity check.

    Raises
    ------
    HierarchyViolation
        If steering is positive beyond tolerance while the concurrence is
        zero, or Bell nonlocality is positive while steering is zero.
    """
    c = concurrence(rho, validate=validate)
    gram = bloch_decompose(rho, validate=False).correlation_gram()
    s = _steering_from_gram(gram)
    b = _bell_from_gram(gram)
    if s > HIERARCHY_TOL and c <= 0.0:
        raise HierarchyViolation(f"steering {s} positive with zero concurrence")
    if b > HIERARCHY_TOL and s <= 0.0:
        raise HierarchyViolation(f"Bell value {b} positive with zero steering")
    return MeasureTriple(c=c, s=s, b=b)


def potentials(s: QubitState, bs: BeamSplitter | None = None) -> MeasureTriple:
    """Nonclassicality potentials of a single-qubit state.

    The qubit is mixed with the vacuum on the given beam splitter (the
    ideal balanced one when ``bs`` is omitted) and the three two-qubit
    measures of the output are returned.
    """
    if bs is None:
        rho = mix_on_ideal_bs(s)
    else:
        rho = mix_on_imperfect_bs(s, bs)
    return measure_triple(rho, validate=False)
