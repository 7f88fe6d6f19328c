"""Dense complex linear algebra for small Hermitian matrices.

Everything here operates on plain ``numpy`` arrays.  Density matrices are
``(d, d)`` complex Hermitian, trace-one, positive-semidefinite arrays with
``d`` between 2 and 9; validation helpers enforce those invariants at the
tolerances below.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimMismatch, DimOverflow, InvalidState, NonHermitian

# Default tolerances; callers may override per call.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
MAX_KRON_DIM = 16

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_1 = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_1, PAULI_2, PAULI_3)


def is_hermitian(m: np.ndarray, tol: float | None = None) -> bool:
    """True when ``max |M - M^dag|`` does not exceed ``tol``."""
    if tol is None:
        tol = HERMITICITY_TOL
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def hermitian_eigenvalues(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted ascending.

    Raises
    ------
    NonHermitian
        If the symmetry check at tolerance ``tol`` fails.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        raise NonHermitian("matrix deviates from Hermitian symmetry beyond tolerance")
    return np.linalg.eigvalsh(m)


def hermitian_eigensystem(m: np.ndarray, tol: float | None = None):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        raise NonHermitian("matrix deviates from Hermitian symmetry beyond tolerance")
    return np.linalg.eigh(m)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with a hard cap on the product dimension."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_KRON_DIM:
        raise DimOverflow(
            f"product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_KRON_DIM}"
        )
    return np.kron(a, b)


def matrix_sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian PSD matrix via eigendecomposition.

    Eigenvalues that are slightly negative from round-off are clamped to
    zero before the scalar square root.
    """
    w, v = np.linalg.eigh(np.asarray(m, dtype=complex))
    w = np.sqrt(np.maximum(w, 0.0))
    return (v * w) @ v.conj().T


def validate_density_matrix(
    rho: np.ndarray,
    hermiticity_tol: float | None = None,
    trace_tol: float | None = None,
    psd_tol: float | None = None,
) -> np.ndarray:
    """Check the density-matrix invariants and return the array.

    Raises
    ------
    InvalidState
        On a non-square shape, broken Hermiticity, trace away from one,
        or a negative eigenvalue beyond ``psd_tol``.
    """
    hermiticity_tol = HERMITICITY_TOL if hermiticity_tol is None else hermiticity_tol
    trace_tol = TRACE_TOL if trace_tol is None else trace_tol
    psd_tol = PSD_TOL if psd_tol is None else psd_tol
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidState(f"expected a square matrix, got shape {rho.shape}")
    if not is_hermitian(rho, hermiticity_tol):
        raise InvalidState("density matrix is not Hermitian within tolerance")
    tr = np.trace(rho)
    if abs(tr.real - 1.0) > trace_tol or abs(tr.imag) > 1e-12:
        raise InvalidState(f"trace {tr} differs from 1 beyond tolerance")
    if np.linalg.eigvalsh(rho)[0] < -psd_tol:
        raise InvalidState("density matrix has a negative eigenvalue beyond tolerance")
    return rho


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))^2`` of two states."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    sa = matrix_sqrt_psd(a)
    inner = matrix_sqrt_psd(sa @ b @ sa)
    f = float(np.real(np.trace(inner)) ** 2)
    return min(max(f, 0.0), 1.0)


def bures_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Bures distance ``sqrt(2 (1 - sqrt(F)))`` derived from the fidelity."""
    f = fidelity(a, b)
    return float(np.sqrt(max(2.0 * (1.0 - np.sqrt(f)), 0.0)))


def save_density_matrix(path, rho: np.ndarray) -> None:
    """Write a density matrix as the repo-wide JSON format.

    The format is ``{"dim": n, "re": [[...]], "im": [[...]]}`` with full
    row-major matrices.
    """
    rho = np.asarray(rho, dtype=complex)
    payload = {
        "dim": int(rho.shape[0]),
        "re": rho.real.tolist(),
        "im": rho.imag.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def load_density_matrix(path) -> np.ndarray:
    """Read a density matrix from the repo-wide JSON format."""
    payload = json.loads(Path(path).read_text())
    dim = int(payload["dim"])
    re = np.asarray(payload["re"], dtype=float)
    im = np.asarray(payload["im"], dtype=float)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise InvalidState(f"matrix entries do not match declared dim {dim}")
    return re + 1j * im
