import numpy as np
import pytest

from ncpot.analysis import (
    FitResult,
    fidelities,
    fit_rho_qr,
    locate_extrema,
    sweep_interpolation,
    write_sweep_csv,
)
from ncpot.errors import CurveTooShort
from ncpot.linalg import fidelity
from ncpot.measures import measure_triple
from ncpot.states import (
    BeamSplitter,
    QubitState,
    interpolate,
    mix_on_ideal_bs,
    mix_on_imperfect_bs,
    singlet,
)
from conftest import random_family_state


def eigvals_concurrence_oracle(rho):
    """Concurrence via the non-Hermitian eigenvalue route (independent path)."""
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    yy = np.kron(sy, sy)
    lam = np.sqrt(np.abs(np.sort(np.real(np.linalg.eigvals(rho @ yy @ rho.conj() @ yy)))))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


class TestFit:
    def test_family_round_trip(self):
        target = mix_on_imperfect_bs(QubitState(0.7, 0.3), BeamSplitter.from_reflectivity(0.6, 0.1))
        fit = fit_rho_qr(target, seed=2)
        assert fit.p == pytest.approx(0.7, abs=1e-3)
        assert fit.x == pytest.approx(0.3, abs=1e-3)
        assert fit.r == pytest.approx(0.6, abs=1e-3)
        assert fit.q == pytest.approx(0.1, abs=1e-3)
        assert fit.bures < 1e-6

    def test_ideal_target_recovers_balanced_splitter(self):
        fit = fit_rho_qr(mix_on_ideal_bs(QubitState(0.4, 0.2)), seed=2)
        assert fit.r == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-3)
        assert fit.q == pytest.approx(0.0, abs=1e-3)

    def test_measurement_gauge_target(self):
        # entrywise-absolute family member (the reconstruction gauge)
        raw = mix_on_imperfect_bs(QubitState(0.6, 0.25), BeamSplitter.from_reflectivity(0.75, 0.2))
        fit = fit_rho_qr(np.abs(raw).astype(complex), seed=3)
        assert fit.bures < 1e-6
        assert fit.p == pytest.approx(0.6, abs=1e-3)

    def test_idempotent_on_family(self):
        target = mix_on_imperfect_bs(QubitState(0.55, 0.2), BeamSplitter.from_reflectivity(0.8, 0.3))
        first = fit_rho_qr(target, seed=4)
        second = fit_rho_qr(first.state(), seed=5)
        assert abs(first.p - second.p) < 1e-6
        assert abs(first.x - second.x) < 1e-6
        assert abs(first.r - second.r) < 1e-6
        assert abs(first.q - second.q) < 1e-6

    def test_deterministic_given_seed(self):
        target = mix_on_imperfect_bs(QubitState(0.5, 0.3), BeamSplitter.from_reflectivity(0.7, 0.05))
        a = fit_rho_qr(target, seed=9)
        b = fit_rho_qr(target, seed=9)
        assert (a.p, a.x, a.r, a.q, a.bures) == (b.p, b.x, b.r, b.q, b.bures)


class TestFidelities:
    def test_perfect_round_trip(self):
        s = QubitState(0.4, 0.3)
        target = mix_on_ideal_bs(s)
        fit = fit_rho_qr(target, seed=1)
        f_in, f_out = fidelities(fit, s, target)
        assert f_in == pytest.approx(1.0, abs=1e-6)
        assert f_out == pytest.approx(1.0, abs=1e-6)

    def test_imperfection_lives_in_splitter(self):
        s = QubitState(0.5, 0.3)
        target = mix_on_imperfect_bs(s, BeamSplitter.from_reflectivity(0.8, 0.3))
        fit = fit_rho_qr(target, seed=1)
        f_in, f_out = fidelities(fit, s, target)
        assert f_in == pytest.approx(1.0, abs=1e-4)
        assert f_out < 1.0 - 1e-3

    def test_orthogonal_intended_input(self):
        fit = FitResult(p=1.0, x=0.0, r=0.7, q=0.0, bures=0.0)
        f_in, _ = fidelities(fit, QubitState(0.0, 0.0), mix_on_ideal_bs(QubitState(0.0, 0.0)))
        assert f_in == pytest.approx(0.0, abs=1e-12)

    def test_symmetry_of_fidelity_arguments(self):
        # the underlying overlap is symmetric, so swapping fitted and
        # intended qubit states leaves the input fidelity unchanged
        fit = FitResult(p=0.3, x=0.2, r=0.7, q=0.0, bures=0.0)
        swapped = FitResult(p=0.6, x=0.1, r=0.7, q=0.0, bures=0.0)
        target = mix_on_ideal_bs(QubitState(0.6, 0.1))
        a, _ = fidelities(fit, QubitState(0.6, 0.1), target)
        b, _ = fidelities(swapped, QubitState(0.3, 0.2), target)
        assert a == pytest.approx(b, abs=1e-12)


class TestSweep:
    def test_constant_between_identical_states(self):
        curve = sweep_interpolation(singlet(), singlet(), 21)
        assert np.allclose(curve.c, 1.0, atol=1e-9)
        assert np.allclose(curve.s, 1.0, atol=1e-9)
        assert np.allclose(curve.b, 1.0, atol=1e-9)

    def test_vacuum_to_singlet_concurrence(self):
        vac = mix_on_ideal_bs(QubitState(0.0, 0.0))
        curve = sweep_interpolation(singlet(), vac, 51)
        assert curve.c[0] == pytest.approx(0.0, abs=1e-12)
        assert curve.c[-1] == pytest.approx(1.0, abs=1e-9)
        assert np.all(np.diff(curve.c) >= -1e-12)
        for beta in (0.2, 0.5, 0.8):
            mixed = interpolate(singlet(), vac, beta)
            idx = int(round(beta * 50))
            assert curve.c[idx] == pytest.approx(eigvals_concurrence_oracle(mixed), abs=1e-9)

    def test_endpoints_match_direct_evaluation(self):
        a = random_family_state(np.random.default_rng(5))
        b = random_family_state(np.random.default_rng(6))
        curve = sweep_interpolation(a, b, 11)
        ta, tb = measure_triple(a), measure_triple(b)
        assert (curve.c[-1], curve.s[-1], curve.b[-1]) == (ta.c, ta.s, ta.b)
        assert (curve.c[0], curve.s[0], curve.b[0]) == (tb.c, tb.s, tb.b)

    def test_continuity(self, rng):
        for _ in range(50):
            a = random_family_state(rng)
            b = random_family_state(rng)
            curve = sweep_interpolation(a, b, 101)
            for values in (curve.c, curve.s, curve.b):
                assert np.all(np.isfinite(values))
                assert np.max(np.abs(np.diff(values))) <= 0.1

    def test_csv_layout(self, tmp_path):
        curve = sweep_interpolation(singlet(), mix_on_ideal_bs(QubitState(0.0, 0.0)), 5)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(curve, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "beta,c,s,b"
        assert len(lines) == 6


class TestExtrema:
    def test_monotone_curve_empty(self):
        vac = mix_on_ideal_bs(QubitState(0.0, 0.0))
        curve = sweep_interpolation(singlet(), vac, 21)
        ext = locate_extrema(curve)
        assert ext["c"] == []

    def test_self_interpolation_reports_no_extrema(self):
        # rounding wiggle along a constant curve must not register
        rho = mix_on_ideal_bs(QubitState(0.6, 0.4))
        ext = locate_extrema(sweep_interpolation(rho, rho, 21))
        assert ext == {"c": [], "s": [], "b": []}

    def test_v_shape(self):
        from ncpot.analysis import SweepCurve

        beta = np.linspace(0.0, 1.0, 21)
        v = np.abs(beta - 0.5)
        curve = SweepCurve(beta=beta, c=v, s=v, b=v)
        ext = locate_extrema(curve)
        assert ext["c"] == [(0.5, "min")]

    def test_plateau_tie_breaks_low(self):
        from ncpot.analysis import SweepCurve

        beta = np.linspace(0.0, 1.0, 11)
        y = np.array([0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.5, 0.4, 0.3, 0.2, 0.1])
        curve = SweepCurve(beta=beta, c=y, s=y, b=y)
        ext = locate_extrema(curve)
        assert ext["c"] == [(0.2, "max")]

    def test_too_short(self):
        from ncpot.analysis import SweepCurve

        beta = np.linspace(0.0, 1.0, 4)
        curve = SweepCurve(beta=beta, c=beta, s=beta, b=beta)
        with pytest.raises(CurveTooShort):
            locate_extrema(curve)
