"""Monte-Carlo model of the polarization-encoded beam-splitter experiment.

A photon pair is prepared with one photon carrying the vacuum/photon qubit
in its polarization (horizontal = photon, vertical = vacuum place-holder)
and the other fixed vertical.  Both meet on a polarization-dependent
splitter; three detectors behind analysis wave plates record coincidences.
The schedule mirrors the lab procedure: one direct measurement of the
vacuum block, a 36-projection tomography of the one-photon block,
two phase-swept visibility series for the coherences, and two
efficiency-calibration records.

Counts are Poisson draws around pair_rate x duration x detection
probability x efficiency product, plus dark coincidences.  Output
decoherence ``q`` is realized as independent random phase flips on the
horizontal mode of each output port; the flip probability ``(1-Q)/2``
reproduces exactly the ``Q`` and ``Q^2`` attenuation pattern of the
target state's coherences.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidState, NonPhysical, OutOfRange
from .states import BeamSplitter, QubitState, mix_on_imperfect_bs

M_A_DURATION_S = 50.0
TOMOGRAPHY_DURATION_S = 50.0
SWEEP_SAMPLE_DURATION_S = 5.0
SWEEP_SAMPLES = 50
CALIBRATION_DURATION_S = 50.0
# Common geometric factor of the dedicated calibration configuration: the
# reference flux reaching either detector pair at maximal-signal settings.
CALIBRATION_FLUX = 0.25
SCHEDULE_VERSION = "1"

ROLE_M_A = "m_a"
ROLE_TOMOGRAPHY = "tomography"
ROLE_SWEEP_D = "sweep_d"
ROLE_SWEEP_C = "sweep_c"
ROLE_CAL_AB = "cal_ab"
ROLE_CAL_AC = "cal_ac"

# Analysis wave-plate settings (hwp_deg, qwp_deg) realizing the six
# standard polarization projections; the photon passes the QWP, then the
# HWP, then a PBS transmitting H.
PROJECTION_SETTINGS = {
    "H": (0.0, 0.0),
    "V": (45.0, 0.0),
    "D": (22.5, 45.0),
    "A": (-22.5, 45.0),
    "R": (22.5, 0.0),
    "L": (-22.5, 0.0),
}
PROJECTION_LABELS = ("H", "V", "D", "A", "R", "L")


@dataclass(frozen=True)
class OpticalSetting:
    """Wave-plate angles (degrees), shutter state and piezo phase (radians)."""

    hwp1: float = 0.0
    hwp2: float = 45.0
    hwp3: float = 0.0
    hwp4: float = 0.0
    qwp3: float = 0.0
    qwp4: float = 0.0
    theta_h: float = 0.0
    theta_v: float = 22.5
    shutter_open: bool = True
    piezo_phase: float = 0.0

    def __post_init__(self):
        for name in ("hwp1", "hwp2", "hwp3", "hwp4", "qwp3", "qwp4", "theta_h", "theta_v"):
            val = getattr(self, name)
            if not -90.0 <= val <= 90.0:
                raise OutOfRange(f"{name}={val} outside [-90, 90] degrees")


@dataclass(frozen=True)
class CountsRecord:
    """One coincidence measurement: configuration, pair, duration, counts."""

    setting: OpticalSetting
    detector_pair: str
    duration_s: float
    counts: int
    role: str

    def __post_init__(self):
        if self.detector_pair not in ("AB", "AC"):
            raise InvalidState(f"unknown detector pair {self.detector_pair!r}")
        if self.duration_s <= 0:
            raise InvalidState("duration_s must be positive")
        if self.counts < 0:
            raise InvalidState("counts must be nonnegative")


@dataclass(frozen=True)
class DetectorModel:
    """Per-detector efficiencies, pair generation rate and dark coincidences."""

    efficiency_a: float = 0.92
    efficiency_b: float = 0.90
    efficiency_c: float = 0.90
    pair_rate_hz: float = 1000.0
    dark_coincidence_hz: float = 0.05

    def __post_init__(self):
        for name in ("efficiency_a", "efficiency_b", "efficiency_c"):
            val = getattr(self, name)
            if not 0.0 < val <= 1.0:
                raise OutOfRange(f"{name}={val} outside (0, 1]")
        # Zero is admitted so a dark-counts-only schedule can be simulated.
        if self.pair_rate_hz < 0:
            raise OutOfRange("pair_rate_hz must be nonnegative")
        if self.dark_coincidence_hz < 0:
            raise OutOfRange("dark_coincidence_hz must be nonnegative")

    @property
    def eta_ab(self) -> float:
        return self.efficiency_a * self.efficiency_b

    @property
    def eta_ac(self) -> float:
        return self.efficiency_a * self.efficiency_c


def hwp_matrix(theta_deg: float) -> np.ndarray:
    """Jones matrix of a half-wave plate rotated by ``theta_deg``."""
    a = math.radians(2.0 * theta_deg)
    return np.array(
        [[math.cos(a), math.sin(a)], [math.sin(a), -math.cos(a)]], dtype=complex
    )


def qwp_matrix(theta_deg: float) -> np.ndarray:
    """Jones matrix of a quarter-wave plate with fast axis at ``theta_deg``."""
    a = math.radians(theta_deg)
    rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    return rot @ np.diag([1.0, 1.0j]) @ rot.T


PBS_MODE_MATRIX = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
        [0, -1, 0, 0],
    ],
    dtype=complex,
)


def pbs_transform(modes: np.ndarray) -> np.ndarray:
    """Polarizing-beam-splitter action on mode amplitudes ``(H1, V1, H2, V2)``.

    Horizontal components are transmitted in place; vertical components
    cross ports, the one entering port 1 with a sign flip.
    """
    modes = np.asarray(modes, dtype=complex)
    if modes.shape != (4,):
        raise InvalidState(f"expected 4 mode amplitudes, got shape {modes.shape}")
    return PBS_MODE_MATRIX @ modes


def analysis_projector(hwp_deg: float, qwp_deg: float) -> np.ndarray:
    """Rank-one polarization projector realized by (QWP, HWP, PBS-on-H)."""
    ket = qwp_matrix(qwp_deg).conj().T @ (
        hwp_matrix(hwp_deg).conj().T @ np.array([1.0, 0.0], dtype=complex)
    )
    return np.outer(ket, ket.conj())


# Output basis of propagate: qubit-photon mode x witness-photon mode.
PROPAGATE_MODE_BASIS = ("H3", "V3", "H4", "V4")
PROPAGATE_WITNESS_BASIS = ("V3", "V4")


def propagate(
    s: QubitState,
    bs: BeamSplitter,
    input_sign: int = 1,
    port3_sign: int = 1,
    port4_sign: int = 1,
) -> np.ndarray:
    """Pure-branch two-photon output amplitudes after the full setup.

    Returns a ``(4, 2)`` array over ``PROPAGATE_MODE_BASIS x
    PROPAGATE_WITNESS_BASIS``.  The three sign arguments select one
    dephasing branch: the input phase flip realizing a reduced coherence
    ``|x|`` and the per-port flips realizing the splitter decoherence
    ``q``.  Mixed states are simulated by Bernoulli sampling over branches.

    Bunched same-mode pairs carry the full bunched amplitude, so the
    returned vector has unit Euclidean norm.
    """
    if input_sign not in (1, -1) or port3_sign not in (1, -1) or port4_sign not in (1, -1):
        raise NonPhysical("branch signs must be +1 or -1")
    p = s.p
    # Physical H-arm coefficients: the port-3 amplitude carries the logical
    # reflection r, the port-4 amplitude the logical transmission t.
    u = (s.x / abs(s.x)) if s.x != 0 else 1.0
    u = u * input_sign
    amp = np.zeros((4, 2), dtype=complex)
    ph = math.sqrt(p / 2.0)
    amp[2, 0] = ph * u * port4_sign * bs.t        # H4 V3
    amp[2, 1] = -ph * u * port4_sign * bs.t       # H4 V4
    amp[0, 0] = -ph * u * port3_sign * bs.r       # H3 V3
    amp[0, 1] = ph * u * port3_sign * bs.r        # H3 V4
    vac = math.sqrt((1.0 - p) / 2.0)
    amp[1, 0] = vac                               # V3 V3 (bunched)
    amp[3, 1] = -vac                              # V4 V4 (bunched)
    return amp


def _gauged_elements(s: QubitState, bs: BeamSplitter):
    """Diagonal weights and coherence magnitudes of the target output."""
    p = s.p
    x_abs = abs(s.x)
    big_q = bs.coherence_factor
    return {
        "rho11": 1.0 - p,
        "rho22": p * bs.r**2,
        "rho33": p * bs.t**2,
        "c12": big_q * bs.r * x_abs,
        "c13": big_q * bs.t * x_abs,
        "c23": p * big_q**2 * bs.r * bs.t,
    }


def expected_qutrit(s: QubitState, bs: BeamSplitter) -> np.ndarray:
    """Target 3x3 output state in the measurement gauge.

    Local phase rotations make all off-diagonal elements real and
    nonnegative without changing any correlation measure; this is the
    form the reconstruction converges to.
    """
    rho = mix_on_imperfect_bs(s, bs)
    return np.abs(rho[:3, :3]).astype(complex)


def _tomography_block(s: QubitState, bs: BeamSplitter) -> np.ndarray:
    """Polarization state of the different-port photon pairs (unnormalized).

    4x4 over (port-3 polarization) x (port-4 polarization) in the basis
    (HH, HV, VH, VV); only the middle block is populated for ideal optics.
    Its trace is half the one-photon weight, the other half sitting in
    same-port pairs that never produce cross-port coincidences.
    """
    e = _gauged_elements(s, bs)
    w = np.zeros((4, 4), dtype=complex)
    w[1, 1] = e["rho22"] / 2.0   # |H>_3 |V>_4
    w[2, 2] = e["rho33"] / 2.0   # |V>_3 |H>_4
    w[1, 2] = e["c23"] / 2.0
    w[2, 1] = e["c23"] / 2.0
    return w


def _draw(rng: np.random.Generator, mean: float) -> int:
    return int(rng.poisson(max(mean, 0.0)))


def simulate_schedule(
    s: QubitState,
    bs: BeamSplitter,
    det: DetectorModel,
    seed: int,
) -> list[CountsRecord]:
    """Generate the full measurement schedule for one input state.

    The record list is deterministic given the seed: one vacuum-block
    record, 36 tomography records, the two 50-sample visibility sweeps
    (each sample at an independent random piezo phase), and the two
    efficiency-calibration records.
    """
    rng = np.random.default_rng(seed)
    e = _gauged_elements(s, bs)
    rate = det.pair_rate_hz
    dark = det.dark_coincidence_hz
    records: list[CountsRecord] = []

    theta_h = math.degrees(math.acos(min(bs.t, 1.0))) / 2.0
    hwp1 = math.degrees(math.asin(math.sqrt(s.p))) / 2.0
    base = {"hwp1": hwp1, "hwp2": 45.0, "theta_h": theta_h, "theta_v": 22.5}

    # Vacuum block: half the bunched pairs sit in port 3, and the rotated
    # HWP splits those 50:50 onto the two port-3 detectors.
    setting = OpticalSetting(hwp3=22.5, shutter_open=False, **base)
    mean = rate * (e["rho11"] / 4.0) * det.eta_ab * M_A_DURATION_S + dark * M_A_DURATION_S
    records.append(CountsRecord(setting, "AB", M_A_DURATION_S, _draw(rng, mean), ROLE_M_A))

    # Tomography of the different-port pairs on detectors A and C.
    w_block = _tomography_block(s, bs)
    for label3 in PROJECTION_LABELS:
        for label4 in PROJECTION_LABELS:
            h3, q3 = PROJECTION_SETTINGS[label3]
            h4, q4 = PROJECTION_SETTINGS[label4]
            proj = np.kron(analysis_projector(h3, q3), analysis_projector(h4, q4))
            prob = float(np.real(np.trace(w_block @ proj)))
            mean = rate * prob * det.eta_ac * TOMOGRAPHY_DURATION_S + dark * TOMOGRAPHY_DURATION_S
            setting = OpticalSetting(hwp3=h3, qwp3=q3, hwp4=h4, qwp4=q4, **base)
            records.append(
                CountsRecord(setting, "AC", TOMOGRAPHY_DURATION_S, _draw(rng, mean), ROLE_TOMOGRAPHY)
            )

    # Visibility sweeps: the fringe mean is (a + c)/4 + (|coherence|/2) cos(phi)
    # in pair-probability units; the piezo phase is unstable, so each 5 s
    # sample draws an independent uniform phase.
    def sweep(role: str, diag_a: float, diag_c: float, coh: float, setting_kwargs: dict):
        for _ in range(SWEEP_SAMPLES):
            phi = float(rng.uniform(0.0, 2.0 * math.pi))
            prob = (diag_a + diag_c) / 4.0 + (coh / 2.0) * math.cos(phi)
            mean = rate * prob * det.eta_ab * SWEEP_SAMPLE_DURATION_S + dark * SWEEP_SAMPLE_DURATION_S
            setting = OpticalSetting(piezo_phase=phi, **setting_kwargs, **base)
            records.append(
                CountsRecord(setting, "AB", SWEEP_SAMPLE_DURATION_S, _draw(rng, mean), role)
            )

    sweep(ROLE_SWEEP_D, e["rho11"], e["rho33"], e["c13"], {"hwp3": 22.5, "shutter_open": True})
    sweep(ROLE_SWEEP_C, e["rho11"], e["rho22"], e["c12"], {"hwp4": 22.5, "shutter_open": True})

    # Efficiency-ratio calibration: the same reference flux routed onto
    # either detector pair at maximal-signal settings.
    for pair, eta, role in (("AB", det.eta_ab, ROLE_CAL_AB), ("AC", det.eta_ac, ROLE_CAL_AC)):
        mean = rate * CALIBRATION_FLUX * eta * CALIBRATION_DURATION_S + dark * CALIBRATION_DURATION_S
        setting = OpticalSetting(hwp3=22.5, **base)
        records.append(CountsRecord(setting, pair, CALIBRATION_DURATION_S, _draw(rng, mean), role))

    return records


def schedule_duration_s() -> float:
    """Total wall-clock time of one schedule."""
    return (
        M_A_DURATION_S
        + 36 * TOMOGRAPHY_DURATION_S
        + 2 * SWEEP_SAMPLES * SWEEP_SAMPLE_DURATION_S
        + 2 * CALIBRATION_DURATION_S
    )


def save_counts(path, records: list[CountsRecord], det: DetectorModel, seed: int) -> None:
    """Write a counts file: header (seed, detector model, schedule version) + records."""
    payload = {
        "header": {
            "seed": int(seed),
            "detector": asdict(det),
            "schedule_version": SCHEDULE_VERSION,
        },
        "records": [
            {
                "setting": asdict(r.setting),
                "detector_pair": r.detector_pair,
                "duration_s": r.duration_s,
                "counts": r.counts,
                "role": r.role,
            }
            for r in records
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def load_counts(path):
    """Read a counts file; returns (records, header dict)."""
    payload = json.loads(Path(path).read_text())
    header = payload.get("header", {})
    records = [
        CountsRecord(
            setting=OpticalSetting(**rec["setting"]),
            detector_pair=rec["detector_pair"],
            duration_s=float(rec["duration_s"]),
            counts=int(rec["counts"]),
            role=rec.get("role", ""),
        )
        for rec in payload.get("records", [])
    ]
    return records, header
