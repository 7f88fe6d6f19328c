"""Bures-distance fitting and interpolation studies.

Reconstructed output states are fitted to the four-parameter imperfect
beam-splitter family by derivative-free minimization of the Bures
distance, and pairs of states are interpolated to trace how the three
correlation measures evolve along the mixing path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .errors import CurveTooShort, InvalidState
from .linalg import fidelity, matrix_sqrt_psd, validate_density_matrix
from .measures import measure_triple
from .states import BeamSplitter, QubitState, interpolate, mix_on_ideal_bs, mix_on_imperfect_bs

FIT_RESTARTS = 20
FIT_MAX_EVALS = 2000
DEFAULT_SWEEP_STEPS = 101

# Diagonal local phase flips on the one-photon basis states.  They map the
# beam-splitter family across its sign gauges without changing any
# measure, letting targets in any of those gauges be fitted directly.
_GAUGE_SIGNS = ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0))


@dataclass(frozen=True)
class FitResult:
    """Best family member found for a target state."""

    p: float
    x: float
    r: float
    q: float
    bures: float
    fidelity_in: float | None = None
    fidelity_out: float | None = None
    seed: int = 0
    n_evaluations: int = 0

    def beam_splitter(self) -> BeamSplitter:
        return BeamSplitter.from_reflectivity(self.r, self.q)

    def qubit(self) -> QubitState:
        return QubitState(self.p, self.x)

    def state(self) -> np.ndarray:
        return mix_on_imperfect_bs(self.qubit(), self.beam_splitter())


@dataclass(frozen=True)
class SweepCurve:
    """Measure values along the interpolation parameter ``beta``."""

    beta: np.ndarray
    c: np.ndarray
    s: np.ndarray
    b: np.ndarray = field(repr=False)


def _gauge_variants(rho: np.ndarray) -> list[np.ndarray]:
    variants = []
    for z1, z2 in _GAUGE_SIGNS:
        d = np.array([1.0, z1, z2, 1.0])
        variants.append(rho * np.outer(d, d))
    return variants


def _family_state(params: np.ndarray) -> np.ndarray:
    p, x_ratio, r, q = np.clip(params, 0.0, 1.0)
    x = x_ratio * math.sqrt(max(p * (1.0 - p), 0.0))
    return mix_on_imperfect_bs(QubitState(p, x), BeamSplitter.from_reflectivity(r, q))


def fit_rho_qr(
    target: np.ndarray,
    seed: int = 0,
    restarts: int = FIT_RESTARTS,
    max_evals: int = FIT_MAX_EVALS,
) -> FitResult:
    """Fit the closest imperfect-beam-splitter state to ``target``.

    A simplex local search runs from seeded uniform starting points over
    the parameter box (photon probability, coherence ratio, reflectivity,
    decoherence), with the coherence parametrized as a fraction of its
    physical bound.  The objective is the Bures distance minimized over
    the family's local sign gauges, so targets in the measurement gauge
    fit as well as raw family members.  The best restart wins.
    """
    target = validate_density_matrix(target)
    if target.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 target, got {target.shape}")

    sqrt_targets = [matrix_sqrt_psd(v) for v in _gauge_variants(target)]

    def objective(params: np.ndarray) -> float:
        fam = _family_state(params)
        best = 2.0
        for sq in sqrt_targets:
            f = np.real(np.trace(matrix_sqrt_psd(sq @ fam @ sq))) ** 2
            f = min(max(f, 0.0), 1.0)
            best = min(best, 2.0 * (1.0 - math.sqrt(f)))
        return math.sqrt(max(best, 0.0))

    rng = np.random.default_rng(seed)
    bounds = [(0.0, 1.0)] * 4
    best_value = np.inf
    best_params = np.array([0.5, 0.5, 0.5, 0.0])
    total_evals = 0
    for _ in range(restarts):
        start = rng.uniform(0.0, 1.0, size=4)
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            bounds=bounds,
            options={"maxfev": max_evals, "xatol": 1e-10, "fatol": 1e-14},
        )
        total_evals += res.nfev
        if res.fun < best_value:
            best_value = float(res.fun)
            best_params = np.clip(res.x, 0.0, 1.0)

    p, x_ratio, r, q = best_params
    return FitResult(
        p=float(p),
        x=float(x_ratio * math.sqrt(max(p * (1.0 - p), 0.0))),
        r=float(r),
        q=float(q),
        bures=best_value,
        seed=seed,
        n_evaluations=total_evals,
    )


def fidelities(
    fit: FitResult, intended_input: QubitState, target: np.ndarray
) -> tuple[float, float]:
    """Input and output fidelities of a fitted state.

    The input fidelity compares the fitted single-qubit state with the
    intended one; the output fidelity compares the target against the
    ideal balanced-splitter prediction for the intended input, maximized
    over the local sign gauges of that prediction.
    """
    intended = QubitState(intended_input.p, abs(intended_input.x))
    fit_sigma = np.array([[1.0 - fit.p, fit.x], [fit.x, fit.p]], dtype=complex)
    intended_sigma = np.array(
        [[1.0 - intended.p, intended.x], [intended.x, intended.p]], dtype=complex
    )
    f_in = fidelity(fit_sigma, intended_sigma)

    ideal = mix_on_ideal_bs(intended)
    f_out = max(fidelity(target, v) for v in _gauge_variants(ideal))
    return f_in, f_out


def sweep_interpolation(a: np.ndarray, b: np.ndarray, n_steps: int = DEFAULT_SWEEP_STEPS) -> SweepCurve:
    """Measure curves along ``beta * a + (1 - beta) * b``.

    ``beta = 0`` is exactly ``b`` and ``beta = 1`` exactly ``a``.
    """
    if n_steps < 2:
        raise CurveTooShort("interpolation needs at least 2 steps")
    a = validate_density_matrix(a)
    b = validate_density_matrix(b)
    betas = np.linspace(0.0, 1.0, n_steps)
    cs = np.empty(n_steps)
    ss = np.empty(n_steps)
    bs_ = np.empty(n_steps)
    for i, beta in enumerate(betas):
        triple = measure_triple(interpolate(a, b, float(beta)), validate=False)
        cs[i], ss[i], bs_[i] = triple.c, triple.s, triple.b
    return SweepCurve(beta=betas, c=cs, s=ss, b=bs_)


FLAT_TOL = 1e-12


def locate_extrema(curve: SweepCurve) -> dict[str, list[tuple[float, str]]]:
    """Interior extrema of each measure curve by first-difference sign changes.

    Differences below ``FLAT_TOL`` count as flat (the measures themselves
    are not resolved finer than that), plateau ties break toward smaller
    ``beta``, and monotone or constant curves yield empty lists.
    """
    if curve.beta.size < 5:
        raise CurveTooShort("extremum detection needs at least 5 points")
    out: dict[str, list[tuple[float, str]]] = {}
    for name, values in (("c", curve.c), ("s", curve.s), ("b", curve.b)):
        found: list[tuple[float, str]] = []
        diffs = np.diff(values)
        last_sign = 0
        last_nonzero = -1
        for i, d in enumerate(diffs):
            sign = 1 if d > FLAT_TOL else (-1 if d < -FLAT_TOL else 0)
            if sign == 0:
                continue
            if last_sign != 0 and sign != last_sign:
                kind = "max" if last_sign > 0 else "min"
                found.append((float(curve.beta[last_nonzero + 1]), kind))
            last_sign = sign
            last_nonzero = i
        out[name] = found
    return out


def write_sweep_csv(curve: SweepCurve, path) -> None:
    """Write the sweep as CSV rows ``beta,c,s,b`` at 9 significant digits."""
    lines = ["beta,c,s,b"]
    for i in range(curve.beta.size):
        lines.append(
            f"{curve.beta[i]:.9g},{curve.c[i]:.9g},{curve.s[i]:.9g},{curve.b[i]:.9g}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
