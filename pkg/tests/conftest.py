import numpy as np
import pytest

from ncpot.states import BeamSplitter, QubitState, mix_on_imperfect_bs


def random_density_matrix(rng, dim=4):
    """Ginibre-induced random full-rank density matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_state(rng, dim=4):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    return psi


def random_qubit_params(rng):
    p = rng.uniform(0.0, 1.0)
    x = rng.uniform(0.0, 1.0) * np.sqrt(p * (1.0 - p))
    return p, x


def random_family_state(rng):
    """Random member of the imperfect-splitter output family."""
    p = rng.uniform(0.05, 1.0)
    x = rng.uniform(0.0, 1.0) * np.sqrt(p * (1.0 - p))
    r = rng.uniform(0.2, 0.98)
    q = rng.uniform(0.0, 0.6)
    return mix_on_imperfect_bs(QubitState(p, x), BeamSplitter.from_reflectivity(r, q))


def ppt_separable(rho):
    """Positive-partial-transpose test; for two qubits PPT iff separable."""
    rho = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    pt = rho.transpose(0, 3, 2, 1).reshape(4, 4)
    return np.linalg.eigvalsh(pt)[0] >= -1e-10


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
