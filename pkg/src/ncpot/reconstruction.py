"""Assemble the output density matrix from coincidence records.

The reduced 3x3 output state is built block by block: the vacuum weight
from one direct record, the one-photon 2x2 block from an iterative
maximum-likelihood tomography, and the two vacuum/photon coherences from
fringe visibilities.  The blocks carry unequal uncertainty, so the first
two are estimated first and kept fixed while the coherences are trimmed
to the values that keep the full matrix positive semidefinite
(principal-minor conditions on the 3x3 form).

All off-diagonal elements are taken real and nonnegative: local phase
rotations bring the target family to that gauge without changing any
correlation measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptySweep,
    InvalidState,
    IrreparableBlock,
    MissingRecord,
    NonConvergence,
)
from .simulator import (
    PROJECTION_SETTINGS,
    ROLE_CAL_AB,
    ROLE_CAL_AC,
    ROLE_M_A,
    ROLE_SWEEP_C,
    ROLE_SWEEP_D,
    ROLE_TOMOGRAPHY,
    CountsRecord,
    analysis_projector,
)
from .wigner import two_qubit_embed

ML_MIXING = 0.5
ML_LOGLIKE_TOL = 1e-10
ML_MAX_ITERATIONS = 10**4
PROB_FLOOR = 1e-12
BLOCK_NORM_TOL = 1e-9
FIXED_BLOCK_TOL = 1e-9
ANGLE_ATOL = 1e-9


@dataclass(frozen=True)
class BlockEstimate:
    """Normalized block decomposition of the 3x3 output state."""

    m_a: float
    m_b: np.ndarray
    m_c: float
    m_d: float

    def __post_init__(self):
        if self.m_a < -FIXED_BLOCK_TOL:
            raise InvalidState(f"negative vacuum block {self.m_a}")
        if abs(self.m_a + float(np.trace(self.m_b).real) - 1.0) > BLOCK_NORM_TOL:
            raise InvalidState("blocks are not normalized to unit total weight")
        if self.m_c < 0 or self.m_d < 0:
            raise InvalidState("coherence magnitudes must be nonnegative")


@dataclass
class ReconstructionResult:
    """Reconstructed qutrit state, its two-qubit embedding and run metadata."""

    rho: np.ndarray
    rho_two_qubit: np.ndarray
    blocks: BlockEstimate
    metadata: dict = field(default_factory=dict)


def _canonical_order(records: list[CountsRecord]) -> list[CountsRecord]:
    """Deterministic record ordering, making every estimate independent of
    the order records arrive in (floating-point sums are not permutation
    invariant)."""
    def key(r: CountsRecord):
        s = r.setting
        return (
            r.role,
            r.detector_pair,
            s.hwp1, s.hwp2, s.hwp3, s.hwp4, s.qwp3, s.qwp4,
            s.theta_h, s.theta_v, s.shutter_open, s.piezo_phase,
            r.duration_s,
            r.counts,
        )

    return sorted(records, key=key)


def _by_role(records: list[CountsRecord], role: str) -> list[CountsRecord]:
    return [r for r in records if r.role == role]


def _rate(records: list[CountsRecord]) -> float:
    total_counts = sum(r.counts for r in records)
    total_time = sum(r.duration_s for r in records)
    return total_counts / total_time


def efficiency_ratio(records: list[CountsRecord]) -> tuple[float, bool]:
    """AB-to-AC efficiency ratio from the dedicated calibration pair.

    Falls back to 1.0 (flagged uncalibrated) when either record is
    missing or empty.
    """
    cal_ab = _by_role(records, ROLE_CAL_AB)
    cal_ac = _by_role(records, ROLE_CAL_AC)
    if not cal_ab or not cal_ac:
        return 1.0, False
    rate_ab = _rate(cal_ab)
    rate_ac = _rate(cal_ac)
    if rate_ab <= 0 or rate_ac <= 0:
        return 1.0, False
    return rate_ab / rate_ac, True


def _tomography_setting_label(record: CountsRecord) -> tuple[str, str] | None:
    """Map a tomography record back to its projection labels via its angles."""
    s = record.setting
    found3 = found4 = None
    for label, (h, q) in PROJECTION_SETTINGS.items():
        if math.isclose(s.hwp3, h, abs_tol=ANGLE_ATOL) and math.isclose(s.qwp3, q, abs_tol=ANGLE_ATOL):
            found3 = label
        if math.isclose(s.hwp4, h, abs_tol=ANGLE_ATOL) and math.isclose(s.qwp4, q, abs_tol=ANGLE_ATOL):
            found4 = label
    if found3 is None or found4 is None:
        return None
    return found3, found4


def _diagonal_rates(records: list[CountsRecord]) -> tuple[float, float, float, float, bool]:
    """Efficiency-corrected rates (u1, u2, u3) of the three diagonal blocks.

    u1 is the four-fold-scaled vacuum-block rate; u2 and u3 are the
    two-fold-scaled one-photon rates from the (H, V) and (V, H)
    tomography projections, converted into AB-equivalent units with the
    calibration ratio.
    """
    records = _canonical_order(records)
    m_a_records = _by_role(records, ROLE_M_A)
    if not m_a_records:
        raise MissingRecord("no vacuum-block record in the data set")
    ratio, calibrated = efficiency_ratio(records)

    rate_hv = rate_vh = None
    for rec in _by_role(records, ROLE_TOMOGRAPHY):
        label = _tomography_setting_label(rec)
        if label == ("H", "V"):
            rate_hv = rec.counts / rec.duration_s
        elif label == ("V", "H"):
            rate_vh = rec.counts / rec.duration_s
    if rate_hv is None or rate_vh is None:
        raise MissingRecord("diagonal tomography projections (H,V) and (V,H) required")

    u1 = 4.0 * _rate(m_a_records)
    u2 = 2.0 * ratio * rate_hv
    u3 = 2.0 * ratio * rate_vh
    return u1, u2, u3, ratio, calibrated


def estimate_m_a(records: list[CountsRecord]) -> float:
    """Normalized vacuum-block weight.

    The directly measured rate is scaled by four (one factor of two for
    the 50:50 split onto the detector pair, one for the bunched pairs in
    the closed port) and normalized against the two corrected one-photon
    rates.
    """
    u1, u2, u3, _, _ = _diagonal_rates(records)
    total = u1 + u2 + u3
    if total <= 0:
        return 0.0
    return u1 / total


def _ml_iterate(projectors: np.ndarray, counts: np.ndarray):
    """Diluted fixed-point maximum-likelihood iteration on a 4x4 state."""
    dim = projectors.shape[1]
    rho = np.eye(dim, dtype=complex) / dim
    total = counts.sum()
    if total == 0:
        return rho, 0, 0.0
    loglike = -np.inf
    for iteration in range(1, ML_MAX_ITERATIONS + 1):
        probs = np.real(np.einsum("kij,ji->k", projectors, rho))
        probs = np.maximum(probs, PROB_FLOOR)
        r_op = np.einsum("k,kij->ij", counts / probs, projectors) / total
        gain = (1.0 - ML_MIXING) * np.eye(dim) + ML_MIXING * r_op
        rho = gain @ rho @ gain.conj().T
        rho /= np.trace(rho).real
        new_loglike = float(np.sum(counts * np.log(probs)))
        # Relative change: an absolute 1e-10 is below float resolution at
        # the likelihood magnitudes of a full schedule.
        if abs(new_loglike - loglike) < ML_LOGLIKE_TOL * (1.0 + abs(new_loglike)):
            return rho, iteration, new_loglike
        loglike = new_loglike
    raise NonConvergence(
        f"maximum-likelihood iteration did not settle within {ML_MAX_ITERATIONS} steps"
    )


def ml_tomography_m_b(records: list[CountsRecord]) -> np.ndarray:
    """One-photon 2x2 block from the 36-projection tomography.

    The maximum-likelihood state is estimated on the full two-photon
    polarization space; elements outside the central block are discarded.
    The block is rescaled so that, together with the vacuum weight, the
    three diagonal elements sum to one, and gauged to a real nonnegative
    off-diagonal.
    """
    block, _ = _ml_block_with_meta(records)
    return block


def _ml_block_with_meta(records: list[CountsRecord]):
    tomo = _canonical_order(_by_role(records, ROLE_TOMOGRAPHY))
    if not tomo:
        raise MissingRecord("no tomography records in the data set")
    projectors = []
    counts = []
    for rec in tomo:
        s = rec.setting
        proj = np.kron(analysis_projector(s.hwp3, s.qwp3), analysis_projector(s.hwp4, s.qwp4))
        projectors.append(proj)
        counts.append(rec.counts)
    projectors = np.stack(projectors)
    counts = np.asarray(counts, dtype=float)

    rho_pol, iterations, loglike = _ml_iterate(projectors, counts)
    # Central block in the (HH, HV, VH, VV) ordering; outside elements are
    # small experimental leakage and are dropped.
    raw = rho_pol[np.ix_([1, 2], [1, 2])]

    u1, u2, u3, ratio, calibrated = _diagonal_rates(records)
    total = u1 + u2 + u3
    target_trace = (u2 + u3) / total if total > 0 else 0.0
    raw_trace = float(np.trace(raw).real)
    scale = target_trace / raw_trace if raw_trace > 0 else 0.0
    block = np.array(
        [
            [raw[0, 0].real * scale, abs(raw[0, 1]) * scale],
            [abs(raw[1, 0]) * scale, raw[1, 1].real * scale],
        ]
    )
    meta = {
        "ml_iterations": iterations,
        "ml_loglike": loglike,
        "efficiency_ratio": ratio,
        "ratio_calibrated": calibrated,
    }
    return block, meta


def visibility(sweep_records: list[CountsRecord]) -> float:
    """Fringe visibility from the sample extrema of a phase sweep."""
    if len(sweep_records) < 2:
        raise EmptySweep("visibility needs at least two sweep samples")
    rates = np.array([r.counts / r.duration_s for r in sweep_records])
    i_max, i_min = float(rates.max()), float(rates.min())
    if i_max + i_min <= 0:
        return 0.0
    return (i_max - i_min) / (i_max + i_min)


def visibility_to_coherence(
    sweep_records: list[CountsRecord], a: float, c: float
) -> float:
    """Coherence magnitude from a fringe sweep between two diagonal weights.

    The fringe model ``I(phi) proportional to (a + c)/2 + |b| cos(phi)``
    gives ``|b| = v (a + c) / 2`` for visibility ``v``.
    """
    v = visibility(sweep_records)
    return v * (a + c) / 2.0


def physicality_repair(blocks: BlockEstimate) -> np.ndarray:
    """Trim the coherences until the assembled 3x3 matrix is PSD.

    The diagonal and the one-photon block stay fixed.  The two
    vacuum/photon coherences are first clamped to their pairwise
    principal-minor bounds, then jointly rescaled if the determinant
    condition still fails.

    Raises
    ------
    IrreparableBlock
        If the fixed blocks themselves violate positivity beyond
        tolerance.
    """
    rho, _ = _repair_with_log(blocks)
    return rho


def _repair_with_log(blocks: BlockEstimate):
    a = blocks.m_a
    b = np.asarray(blocks.m_b, dtype=float)
    r12, r13 = float(blocks.m_c), float(blocks.m_d)
    r22, r33, r23 = b[0, 0], b[1, 1], abs(b[0, 1])

    if min(a, r22, r33) < -FIXED_BLOCK_TOL:
        raise IrreparableBlock("fixed diagonal elements are negative beyond tolerance")
    if r22 * r33 - r23**2 < -FIXED_BLOCK_TOL:
        raise IrreparableBlock("one-photon block violates positivity beyond tolerance")
    a = max(a, 0.0)

    repairs = []
    bound12 = math.sqrt(max(a * r22, 0.0))
    bound13 = math.sqrt(max(a * r33, 0.0))
    if r12 > bound12:
        repairs.append({"kind": "clamp_12", "from": r12, "to": bound12})
        r12 = bound12
    if r13 > bound13:
        repairs.append({"kind": "clamp_13", "from": r13, "to": bound13})
        r13 = bound13

    det = (
        a * r22 * r33
        + 2.0 * r12 * r23 * r13
        - a * r23**2
        - r22 * r13**2
        - r33 * r12**2
    )
    if det < 0.0:
        numerator = a * r22 * r33 - a * r23**2
        denominator = 2.0 * r12 * r23 * r13 - r22 * r13**2 - r33 * r12**2
        c_sq = -numerator / denominator
        c_factor = math.sqrt(max(c_sq, 0.0))
        repairs.append({"kind": "determinant_scale", "factor": c_factor})
        r12 *= c_factor
        r13 *= c_factor

    rho = np.array(
        [
            [a, r12, r13],
            [r12, r22, b[0, 1]],
            [r13, b[1, 0], r33],
        ],
        dtype=complex,
    )
    return rho, repairs


def reconstruct(records: list[CountsRecord]) -> ReconstructionResult:
    """Full pipeline from a complete record set to the output state.

    Vacuum weight and one-photon block first (most trusted), then the
    two visibility-derived coherences, then the positivity repair.  The
    result is independent of the record order.
    """
    u1, u2, u3, ratio, calibrated = _diagonal_rates(records)
    total = u1 + u2 + u3
    if total <= 0:
        raise MissingRecord("all diagonal rates are zero; nothing to reconstruct")
    m_a = u1 / total
    block, meta = _ml_block_with_meta(records)

    sweep_d = _by_role(records, ROLE_SWEEP_D)
    sweep_c = _by_role(records, ROLE_SWEEP_C)
    if not sweep_d or not sweep_c:
        raise MissingRecord("both visibility sweeps are required")
    v_d = visibility(sweep_d)
    v_c = visibility(sweep_c)
    m_d = v_d * (m_a + block[1, 1]) / 2.0
    m_c = v_c * (m_a + block[0, 0]) / 2.0

    blocks = BlockEstimate(m_a=m_a, m_b=block, m_c=m_c, m_d=m_d)
    rho, repairs = _repair_with_log(blocks)

    metadata = dict(meta)
    metadata.update(
        {
            "visibility_c": v_c,
            "visibility_d": v_d,
            "repairs": repairs,
            "warnings": [] if calibrated else ["efficiency ratio defaulted to 1"],
        }
    )
    return ReconstructionResult(
        rho=rho,
        rho_two_qubit=two_qubit_embed(rho),
        blocks=blocks,
        metadata=metadata,
    )
