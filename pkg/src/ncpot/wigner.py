"""Phase-space Wigner functions for low-dimensional Fock-basis states.

States of dimension 2 (vacuum/photon qubits) or 3 (two-qubit states
re-encoded as qutrits) are evaluated with the displaced-parity form
``W(alpha) = (2/pi) Tr[rho D(alpha) P D(alpha)^dag]`` inside a truncated
Fock space.  The displacement operator is built from matrix exponentials
of the truncated ladder generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import ElevenPopulated, GridTooLarge, InvalidState
from .linalg import validate_density_matrix

# Fock-space size used when building displacement operators.  The states
# occupy at most three levels, but the displaced-parity kernel needs the
# truncation wall far above the displaced support: 61 levels keep the
# kernel accurate to better than 1e-9 for |alpha| <= 3*sqrt(2) (the
# corner of the default grid).
DEFAULT_N_TRUNC = 60

ELEVEN_TOL = 1e-6
MAX_GRID_POINTS = 10**6
IMAG_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    """Square phase-space grid, the same axis for real and imaginary parts."""

    lo: float = -3.0
    hi: float = 3.0
    n: int = 121

    def axis(self) -> np.ndarray:
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi <= self.lo:
            raise InvalidState(f"bad grid bounds [{self.lo}, {self.hi}]")
        if self.n < 2:
            raise InvalidState("grid needs at least 2 points per axis")
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Wigner values on a rectangular grid of complex amplitudes.

    ``values[i, j]`` holds ``W(alpha_re[i] + 1j * alpha_im[j])``.
    """

    alpha_re: np.ndarray
    alpha_im: np.ndarray
    values: np.ndarray = field(repr=False)


def qutrit_encode(rho: np.ndarray) -> np.ndarray:
    """Reduce a two-qubit state with empty double-occupation sector to a qutrit.

    Basis map: ``|00> -> |0>``, ``|01> -> |1>``, ``|10> -> |2>``.  The 3x3
    submatrix is renormalized to unit trace.

    Raises
    ------
    ElevenPopulated
        If the fourth row/column carries weight above ``1e-6``.
    """
    rho = validate_density_matrix(rho)
    if rho.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 state, got {rho.shape}")
    tail = max(np.max(np.abs(rho[3, :])), np.max(np.abs(rho[:, 3])))
    if tail > ELEVEN_TOL:
        raise ElevenPopulated(f"double-occupation weight {tail:.3e} above {ELEVEN_TOL}")
    sub = rho[:3, :3]
    return sub / np.trace(sub).real


def two_qubit_embed(rho3: np.ndarray) -> np.ndarray:
    """Inverse of :func:`qutrit_encode`: pad with a zero fourth row/column."""
    rho3 = validate_density_matrix(rho3)
    if rho3.shape != (3, 3):
        raise InvalidState(f"expected a 3x3 state, got {rho3.shape}")
    out = np.zeros((4, 4), dtype=complex)
    out[:3, :3] = rho3
    return out


@lru_cache(maxsize=4)
def _generator_eigensystems(dim: int):
    """Eigensystems of the two Hermitian displacement generators."""
    n = np.arange(dim - 1)
    a = np.zeros((dim, dim), dtype=complex)
    a[n, n + 1] = np.sqrt(n + 1.0)
    ad = a.conj().T
    w1, v1 = np.linalg.eigh(-1j * (ad - a))  # generates exp(x (ad - a))
    w2, v2 = np.linalg.eigh(ad + a)          # generates exp(i y (ad + a))
    return w1, v1, w2, v2


def displacement_operator(alpha: complex, n_trunc: int = DEFAULT_N_TRUNC) -> np.ndarray:
    """Truncated displacement operator ``exp(alpha a^dag - alpha* a)``."""
    dim = n_trunc + 1
    n = np.arange(dim - 1)
    a = np.zeros((dim, dim), dtype=complex)
    a[n, n + 1] = np.sqrt(n + 1.0)
    generator = alpha * a.conj().T - np.conjugate(alpha) * a
    w, v = np.linalg.eigh(-1j * generator)
    return (v * np.exp(1j * w)) @ v.conj().T


def _displacement_factored(alpha: complex, n_trunc: int) -> np.ndarray:
    """Axis-factored displacement: two exponentials and an exact scalar phase.

    Agrees with :func:`displacement_operator` away from the truncation
    wall, and lets grids reuse one eigendecomposition per axis.
    """
    dim = n_trunc + 1
    w1, v1, w2, v2 = _generator_eigensystems(dim)
    x, y = float(np.real(alpha)), float(np.imag(alpha))
    e1 = (v1 * np.exp(1j * x * w1)) @ v1.conj().T
    e2 = (v2 * np.exp(1j * y * w2)) @ v2.conj().T
    return np.exp(1j * x * y) * (e1 @ e2)


def wigner_function(
    rho: np.ndarray,
    grid: GridSpec | None = None,
    n_trunc: int = DEFAULT_N_TRUNC,
) -> PhaseSpaceGrid:
    """Evaluate the Wigner function of a dim-2 or dim-3 state on a grid.

    Raises
    ------
    GridTooLarge
        When the grid exceeds ``10^6`` points.
    """
    rho = validate_density_matrix(rho)
    d = rho.shape[0]
    if d > 3:
        raise InvalidState(f"state dimension {d} exceeds 3; encode as a qutrit first")
    grid = grid or GridSpec()
    xs = grid.axis()
    ys = grid.axis()
    if xs.size * ys.size > MAX_GRID_POINTS:
        raise GridTooLarge(f"{xs.size * ys.size} grid points exceed {MAX_GRID_POINTS}")

    dim = n_trunc + 1
    w1, v1, w2, v2 = _generator_eigensystems(dim)
    parity = (-1.0) ** np.arange(dim)
    rho_t = np.asarray(rho, dtype=complex).T

    # Only the first d rows of D(alpha) enter Tr[rho D P D^dag]; the scalar
    # phase of the factored form cancels inside the sandwich.
    v1_top = v1[:d, :]
    e2_cache = [(v2 * np.exp(1j * y * w2)) @ v2.conj().T for y in ys]

    values = np.empty((xs.size, ys.size))
    worst_imag = 0.0
    for i, x in enumerate(xs):
        d_top_x = (v1_top * np.exp(1j * x * w1)) @ v1.conj().T
        for j in range(ys.size):
            d_top = d_top_x @ e2_cache[j]
            kernel = (d_top * parity) @ d_top.conj().T
            val = (2.0 / np.pi) * np.sum(rho_t * kernel)
            worst_imag = max(worst_imag, abs(val.imag))
            values[i, j] = val.real
    if worst_imag > IMAG_RESIDUAL_TOL:
        raise InvalidState(f"imaginary residual {worst_imag:.3e} in Wigner values")
    return PhaseSpaceGrid(alpha_re=xs, alpha_im=ys, values=values)


def grid_integral(g: PhaseSpaceGrid) -> float:
    """Trapezoid-rule integral of ``W`` over the grid."""
    return float(np.trapezoid(np.trapezoid(g.values, g.alpha_im, axis=1), g.alpha_re))


def wigner_negativity(g: PhaseSpaceGrid) -> float:
    """Trapezoid-rule integral of ``max(0, -W)`` over the grid."""
    neg = np.maximum(0.0, -g.values)
    return float(np.trapezoid(np.trapezoid(neg, g.alpha_im, axis=1), g.alpha_re))


def write_grid_csv(g: PhaseSpaceGrid, path) -> None:
    """Write the grid as CSV rows ``alpha_re,alpha_im,w`` at 9 significant digits."""
    lines = ["alpha_re,alpha_im,w"]
    for i, x in enumerate(g.alpha_re):
        for j, y in enumerate(g.alpha_im):
            lines.append(f"{x:.9g},{y:.9g},{g.values[i, j]:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")
