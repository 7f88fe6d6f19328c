"""Constructors for the state families under study.

The single-qubit states live in the two-dimensional space spanned by the
vacuum and the one-photon Fock state and are parametrized by a photon
probability ``p`` and a coherence parameter ``x``.  Mixing such a state
with the vacuum on a beam splitter produces a two-qubit state; both the
ideal balanced splitter and the imperfect ``(r, t, q)`` splitter are
provided, along with the Werner family used as an analytic oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NonPhysical, OutOfRange

PSD_SLACK = 1e-12
BS_NORM_TOL = 1e-9


@dataclass(frozen=True)
class QubitState:
    """Vacuum/one-photon qubit with photon probability ``p`` and coherence ``x``."""

    p: float
    x: complex = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise NonPhysical(f"p={self.p} outside [0, 1]")
        if abs(self.x) ** 2 > self.p * (1.0 - self.p) + PSD_SLACK:
            raise NonPhysical(
                f"|x|^2={abs(self.x) ** 2:.3e} exceeds p(1-p)={self.p * (1 - self.p):.3e}"
            )

    @property
    def coherence_bound(self) -> float:
        """Largest admissible ``|x|`` for this ``p``."""
        return math.sqrt(max(self.p * (1.0 - self.p), 0.0))


@dataclass(frozen=True)
class BeamSplitter:
    """Beam splitter with reflection ``r``, transmission ``t``, decoherence ``q``.

    ``q = 0`` is a perfectly coherent splitter; the derived coherence
    factor ``sqrt(1 - q)`` is computed on demand, never stored.
    """

    r: float
    t: float
    q: float = 0.0

    def __post_init__(self):
        for name, val in (("r", self.r), ("t", self.t), ("q", self.q)):
            if not 0.0 <= val <= 1.0:
                raise OutOfRange(f"{name}={val} outside [0, 1]")
        if abs(self.r**2 + self.t**2 - 1.0) > BS_NORM_TOL:
            raise NonPhysical(f"r^2 + t^2 = {self.r ** 2 + self.t ** 2} != 1")

    @classmethod
    def balanced(cls, q: float = 0.0) -> "BeamSplitter":
        """The 50:50 splitter, optionally with output decoherence ``q``."""
        s = 1.0 / math.sqrt(2.0)
        return cls(r=s, t=s, q=q)

    @classmethod
    def from_reflectivity(cls, r: float, q: float = 0.0) -> "BeamSplitter":
        """Build with ``t`` fixed by the lossless condition ``r^2 + t^2 = 1``."""
        if not 0.0 <= r <= 1.0:
            raise OutOfRange(f"r={r} outside [0, 1]")
        return cls(r=r, t=math.sqrt(max(1.0 - r * r, 0.0)), q=q)

    @property
    def coherence_factor(self) -> float:
        return math.sqrt(max(1.0 - self.q, 0.0))


def vops_state(p: float, x: complex = 0.0) -> np.ndarray:
    """Density matrix ``[[1-p, x], [x*, p]]`` in the {vacuum, photon} basis."""
    s = QubitState(p, x)
    return np.array([[1.0 - s.p, s.x], [np.conjugate(s.x), s.p]], dtype=complex)


def mix_on_ideal_bs(s: QubitState) -> np.ndarray:
    """Two-qubit output of mixing the qubit with vacuum on the balanced splitter."""
    p, x = s.p, s.x
    xc = np.conjugate(x)
    rt2 = math.sqrt(2.0)
    return np.array(
        [
            [1.0 - p, -x / rt2, x / rt2, 0.0],
            [-xc / rt2, p / 2.0, -p / 2.0, 0.0],
            [xc / rt2, -p / 2.0, p / 2.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ],
        dtype=complex,
    )


def mix_on_imperfect_bs(s: QubitState, bs: BeamSplitter) -> np.ndarray:
    """Two-qubit output for the imperfect ``(r, t, q)`` splitter.

    The matrix is built from its upper triangle and Hermitized: entries
    ``(1,2) = -Qrx``, ``(1,3) = Qtx``, ``(2,3) = -p Q^2 r t`` over the
    diagonal ``(1-p, p r^2, p t^2, 0)``, with ``Q = sqrt(1-q)``.  This is
    the unique Hermitian completion that reduces to the balanced-splitter
    output at ``r = t = 1/sqrt(2)``, ``q = 0``.
    """
    p, x = s.p, s.x
    r, t, big_q = bs.r, bs.t, bs.coherence_factor
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 - p
    rho[1, 1] = p * r * r
    rho[2, 2] = p * t * t
    rho[0, 1] = -big_q * r * x
    rho[0, 2] = big_q * t * x
    rho[1, 2] = -p * big_q * big_q * r * t
    rho[1, 0] = np.conjugate(rho[0, 1])
    rho[2, 0] = np.conjugate(rho[0, 2])
    rho[2, 1] = np.conjugate(rho[1, 2])
    return rho


def singlet() -> np.ndarray:
    """Projector onto ``(|01> - |10>)/sqrt(2)``."""
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0 / math.sqrt(2.0)
    psi[2] = -1.0 / math.sqrt(2.0)
    return np.outer(psi, psi.conj())


def werner_state(w: float) -> np.ndarray:
    """Mixture ``w * singlet + (1 - w) * I/4``."""
    if not 0.0 <= w <= 1.0:
        raise OutOfRange(f"w={w} outside [0, 1]")
    return w * singlet() + (1.0 - w) * np.eye(4, dtype=complex) / 4.0


def interpolate(a: np.ndarray, b: np.ndarray, beta: float) -> np.ndarray:
    """Convex combination ``beta * a + (1 - beta) * b``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    if not 0.0 <= beta <= 1.0:
        raise OutOfRange(f"beta={beta} outside [0, 1]")
    return beta * a + (1.0 - beta) * b
