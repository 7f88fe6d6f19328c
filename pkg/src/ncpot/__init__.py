"""Nonclassicality potentials of vacuum/one-photon qubit states.

Quantifies single-qubit nonclassicality through the entanglement,
steering and Bell-nonlocality generated by mixing the state with the
vacuum on a beam splitter, and simulates and reconstructs the
corresponding polarization-encoded coincidence experiment end to end.
"""

from .analysis import FitResult, SweepCurve, fidelities, fit_rho_qr, locate_extrema, sweep_interpolation
from .linalg import bures_distance, fidelity, hermitian_eigenvalues, kron
from .measures import (
    BlochDecomposition,
    MeasureTriple,
    bell,
    bloch_decompose,
    concurrence,
    measure_triple,
    potentials,
    steering,
)
from .reconstruction import (
    BlockEstimate,
    ReconstructionResult,
    estimate_m_a,
    ml_tomography_m_b,
    physicality_repair,
    reconstruct,
    visibility_to_coherence,
)
from .simulator import (
    CountsRecord,
    DetectorModel,
    OpticalSetting,
    hwp_matrix,
    pbs_transform,
    propagate,
    simulate_schedule,
)
from .states import (
    BeamSplitter,
    QubitState,
    interpolate,
    mix_on_ideal_bs,
    mix_on_imperfect_bs,
    vops_state,
    werner_state,
)
from .wigner import (
    GridSpec,
    PhaseSpaceGrid,
    qutrit_encode,
    wigner_function,
    wigner_negativity,
)

__version__ = "0.1.0"
