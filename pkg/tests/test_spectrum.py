"""Tests for spectra, wavefunctions, phases and operator matrices."""

import math

import numpy as np
import pytest

from landau_td import auxode, spectrum
from landau_td.errors import CutoffTooSmall
from landau_td.profiles import make_profile
from landau_td.spectrum import HelicityQuanta


def _static_setup(M=1.0, omega=1.0, q=0.0, B=0.0, kappa=1.0, E1=0.0, E2=0.0):
    prof = make_profile(
        "constant", {"M": M, "omega": omega, "E1": E1, "E2": E2},
        q=q, B=B, kappa=kappa, t0=0.0, t1=10.0,
    )
    aux = auxode.stationary_solution(prof, np.linspace(0.0, 10.0, 21))
    return prof, aux


def _moving_setup():
    # breathing pinney solution: rho oscillates, rho_dot != 0 between turns
    prof = make_profile("constant", {"M": 1.0, "omega": 1.0}, kappa=2.0, t0=0.0, t1=10.0)
    grid = np.linspace(0.0, 2 * math.pi, 200)
    aux = auxode.closed_form_solution(
        "pinney_constant", {"omega": 1.0, "nu": 2.0}, grid, profile=prof
    )
    return prof, aux


class TestScalarSpectra:
    def test_invariant_eigenvalue(self):
        assert spectrum.invariant_eigenvalue(HelicityQuanta(2, 3), 1.0) == 6.0
        assert spectrum.invariant_eigenvalue(HelicityQuanta(0, 0), 1.7) == 1.7
        assert spectrum.invariant_eigenvalue(HelicityQuanta(1, 0), 2.0) == 4.0

    def test_lz_eigenvalue(self):
        assert spectrum.lz_eigenvalue(HelicityQuanta(0, 0)) == 0
        assert spectrum.lz_eigenvalue(HelicityQuanta(1, 4)) == 3
        assert spectrum.lz_eigenvalue(HelicityQuanta(4, 1)) == -3

    def test_quanta_derived_labels(self):
        q = HelicityQuanta(3, 1)
        assert q.ell == 2
        assert q.n_radial == 1
        assert q.total == 4
        with pytest.raises(ValueError):
            HelicityQuanta(-1, 0)

    def test_hamiltonian_expectation_static_ground(self):
        prof, aux = _static_setup()
        val = spectrum.hamiltonian_expectation(HelicityQuanta(0, 0), prof, aux, 1.0)
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_hamiltonian_expectation_with_field(self):
        # omega_c = qB/M = 2, Omega = sqrt(2), stationary rho = 2^{-1/4}:
        # radial part 2 sqrt(2), angular part -(omega_c/2)(n- - n+) = +1
        prof, aux = _static_setup(q=1.0, B=2.0)
        val = spectrum.hamiltonian_expectation(HelicityQuanta(1, 0), prof, aux, 0.5)
        assert val == pytest.approx(2.0 * math.sqrt(2.0) + 1.0, rel=1e-12)

    def test_hamiltonian_expectation_drive_shift(self):
        # q=1, |E|^2 = 2, M = omega = 1 shifts any level by -1
        base_prof, base_aux = _static_setup()
        prof, aux = _static_setup(q=1.0, E1=1.0, E2=1.0)
        for nq in ((0, 0), (2, 1)):
            a = spectrum.hamiltonian_expectation(HelicityQuanta(*nq), base_prof, base_aux, 2.0)
            b = spectrum.hamiltonian_expectation(HelicityQuanta(*nq), prof, aux, 2.0)
            assert b - a == pytest.approx(-1.0, rel=1e-12)


class TestPhase:
    def test_static_ground_phase(self):
        prof, aux = _static_setup()
        grid = np.linspace(0.0, 1.0, 101)
        trace = spectrum.phase_gamma(HelicityQuanta(0, 0), prof, aux, grid)
        assert trace.gamma[0] == 0.0
        assert trace.gamma[-1] == pytest.approx(-1.0, abs=1e-12)
        assert trace.gamma_closed_form[-1] == pytest.approx(-0.5, abs=1e-12)

    def test_static_phase_tracks_energy(self):
        # for any level of the static oscillator gamma(t) = -<H> t
        prof, aux = _static_setup(q=1.0, B=2.0, E1=0.5)
        grid = np.linspace(0.0, 3.0, 301)
        for nq in ((1, 0), (0, 2)):
            quanta = HelicityQuanta(*nq)
            e_n = spectrum.hamiltonian_expectation(quanta, prof, aux, 0.0)
            trace = spectrum.phase_gamma(quanta, prof, aux, grid)
            assert trace.gamma[-1] == pytest.approx(-e_n * 3.0, rel=1e-12)

    def test_phase_is_cumulative(self):
        prof, aux = _moving_setup()
        grid = np.linspace(0.0, 5.0, 300)
        trace = spectrum.phase_gamma(HelicityQuanta(1, 1), prof, aux, grid)
        # split integration must agree with the one-shot run
        k = 120
        trace_a = spectrum.phase_gamma(HelicityQuanta(1, 1), prof, aux, grid[: k + 1])
        assert trace_a.gamma[-1] == pytest.approx(trace.gamma[k], rel=1e-12)


class TestWavefunctions:
    def test_ground_state_origin_value(self):
        prof, aux = _static_setup()
        val = spectrum.wavefunction_polar(HelicityQuanta(0, 0), prof, aux, 0.0, 0.0, 0.0)
        assert val == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-14)

    def test_modulus_theta_independent(self):
        prof, aux = _moving_setup()
        theta = np.linspace(0.0, 2 * math.pi, 13)
        vals = spectrum.wavefunction_polar(
            HelicityQuanta(2, 0), prof, aux, 1.3, 0.8, theta
        )
        assert np.max(np.abs(np.abs(vals) - np.abs(vals[0]))) < 1e-14

    def test_polar_normalization_quadrature(self):
        # Gauss-Legendre in r against the analytic normalization
        prof, aux = _moving_setup()
        t = 0.9
        rho = float(aux.rho_at(t))
        nodes, weights = np.polynomial.legendre.leggauss(160)
        r_max = 10.0 * rho / math.sqrt(prof.kappa)
        r = 0.5 * r_max * (nodes + 1.0)
        w = 0.5 * r_max * weights
        for nq in ((0, 0), (1, 0), (2, 1)):
            phi = spectrum.wavefunction_polar(HelicityQuanta(*nq), prof, aux, t, r, 0.0)
            integral = 2.0 * math.pi * np.sum(w * r * np.abs(phi) ** 2)
            assert integral == pytest.approx(1.0, abs=1e-8)

    def test_cartesian_origin_and_parity(self):
        prof, aux = _static_setup()
        val = spectrum.wavefunction_cartesian(0, 0, prof, aux, 0.0, 0.0, 0.0)
        assert val == pytest.approx(math.sqrt(1.0 / math.pi), rel=1e-14)
        odd = spectrum.wavefunction_cartesian(1, 0, prof, aux, 0.0, 0.0, 0.3)
        assert abs(odd) < 1e-15

    def test_cartesian_orthonormality_quadrature(self):
        prof, aux = _moving_setup()
        t = 1.7
        rho = float(aux.rho_at(t))
        nodes, weights = np.polynomial.legendre.leggauss(80)
        half = 9.0 * rho / math.sqrt(prof.kappa)
        s = half * nodes
        w = half * weights
        xg, yg = np.meshgrid(s, s, indexing="ij")
        w2 = np.outer(w, w)

        def overlap(na, nb):
            fa = spectrum.wavefunction_cartesian(*na, prof, aux, t, xg, yg)
            fb = spectrum.wavefunction_cartesian(*nb, prof, aux, t, xg, yg)
            return np.sum(w2 * np.conj(fa) * fb)

        assert abs(overlap((1, 0), (0, 1))) < 1e-8
        assert overlap((1, 0), (1, 0)) == pytest.approx(1.0, abs=1e-8)

    def test_full_solution_initial_time_and_modulus(self):
        prof, aux = _moving_setup()
        grid = np.linspace(0.0, 2.0, 40)
        r = np.array([0.3, 1.1])
        psi = spectrum.full_solution(HelicityQuanta(1, 0), prof, aux, grid, r, 0.7)
        phi0 = spectrum.wavefunction_polar(HelicityQuanta(1, 0), prof, aux, 0.0, r, 0.7)
        np.testing.assert_allclose(psi[0], phi0, rtol=1e-12)
        phi_last = spectrum.wavefunction_polar(
            HelicityQuanta(1, 0), prof, aux, grid[-1], r, 0.7
        )
        np.testing.assert_allclose(np.abs(psi[-1]), np.abs(phi_last), rtol=1e-12)


class TestUncertainty:
    def test_stationary_values(self):
        prof, aux = _static_setup()
        assert spectrum.uncertainty_product(0, 0, prof, aux, 1.0) == pytest.approx(0.5)
        assert spectrum.uncertainty_product(1, 0, prof, aux, 1.0) == pytest.approx(1.5)

    def test_moving_radical(self):
        # engineered M rho' rho / kappa = 1 doubles the square
        prof, aux = _static_setup()
        aux.rho_dot_fn = lambda t: np.ones_like(np.asarray(t, dtype=float))
        val = spectrum.uncertainty_product(0, 0, prof, aux, 1.0)
        assert val == pytest.approx(0.5 * math.sqrt(2.0), rel=1e-12)


class TestOperatorMatrices:
    def setup_method(self):
        self.prof, self.aux = _moving_setup()
        self.t = 0.8
        self.N = 10
        self.mats = spectrum.build_operator_matrices(self.prof, self.aux, self.t, self.N)
        self.interior = spectrum.interior_mask(self.N, band=2)

    def _dense(self, key):
        return self.mats[key].entries.toarray()

    def _interior_norm(self, mat):
        sub = mat[np.ix_(self.interior, self.interior)]
        return np.max(np.abs(sub))

    def test_cutoff_guard(self):
        with pytest.raises(CutoffTooSmall):
            spectrum.build_operator_matrices(self.prof, self.aux, self.t, 1)

    def test_ladder_elements(self):
        a_p_dag = self._dense("a+dag")
        i1 = spectrum.basis_index(1, 0, self.N)
        i0 = spectrum.basis_index(0, 0, self.N)
        assert a_p_dag[i1, i0] == pytest.approx(1.0)
        inv = self._dense("I")
        i23 = spectrum.basis_index(2, 3, self.N)
        # kappa = 2 here, so the (2,3) diagonal entry is 2 * 6
        assert inv[i23, i23] == pytest.approx(self.prof.kappa * 6.0)

    def test_canonical_commutators(self):
        x, y, px, py = (self._dense(k) for k in ("x", "y", "px", "py"))
        ident = np.eye(self.mats["x"].dim, dtype=complex)
        assert self._interior_norm(x @ px - px @ x - 1j * ident) < 1e-12
        assert self._interior_norm(y @ py - py @ y - 1j * ident) < 1e-12
        assert self._interior_norm(x @ py - py @ x) < 1e-12
        assert self._interior_norm(x @ y - y @ x) < 1e-12
        assert self._interior_norm(px @ py - py @ px) < 1e-12

    def test_mode_commutators(self):
        a_p, a_m = self._dense("a+"), self._dense("a-")
        a_p_dag, a_m_dag = self._dense("a+dag"), self._dense("a-dag")
        ident = np.eye(self.mats["x"].dim, dtype=complex)
        assert self._interior_norm(a_p @ a_p_dag - a_p_dag @ a_p - ident) < 1e-12
        assert self._interior_norm(a_m @ a_m_dag - a_m_dag @ a_m - ident) < 1e-12
        assert self._interior_norm(a_p @ a_m_dag - a_m_dag @ a_p) < 1e-12

    def test_lz_matches_position_composition(self):
        # dual route: the number-operator form against x py - y px
        x, y, px, py = (self._dense(k) for k in ("x", "y", "px", "py"))
        lz = self._dense("Lz")
        assert self._interior_norm(x @ py - y @ px - lz) < 1e-12

    def test_lz_ladder_commutators(self):
        lz = self._dense("Lz")
        a_p, a_m = self._dense("a+"), self._dense("a-")
        assert self._interior_norm(lz @ a_p - a_p @ lz - a_p) < 1e-12
        assert self._interior_norm(lz @ a_m - a_m @ lz + a_m) < 1e-12

    def test_su2_su11_commutators(self):
        jp, jm, j3 = self._dense("J+"), self._dense("J-"), self._dense("J3")
        kp, km, k0 = self._dense("K+"), self._dense("K-"), self._dense("K0")
        assert self._interior_norm(jp @ jm - jm @ jp - 2.0 * j3) < 1e-12
        assert self._interior_norm(j3 @ jp - jp @ j3 - jp) < 1e-12
        assert self._interior_norm(j3 @ jm - jm @ j3 + jm) < 1e-12
        assert self._interior_norm(km @ kp - kp @ km - 2.0 * k0) < 1e-12
        assert self._interior_norm(k0 @ kp - kp @ k0 - kp) < 1e-12
        assert self._interior_norm(k0 @ km - km @ k0 + km) < 1e-12

    def test_invariant_commutes_with_lz(self):
        inv, lz = self._dense("I"), self._dense("Lz")
        assert np.max(np.abs(inv @ lz - lz @ inv)) == 0.0

    def test_hermiticity(self):
        for key in ("I", "H", "Lz", "J3", "K0", "x", "y", "px", "py"):
            mat = self._dense(key)
            assert np.max(np.abs(mat - mat.conj().T)) < 1e-12

    def test_hamiltonian_diagonal_matches_expectation(self):
        # matrix composition against the analytic expectation formula
        ham = self._dense("H")
        for nq in ((0, 0), (1, 0), (2, 3), (4, 4)):
            idx = spectrum.basis_index(*nq, self.N)
            expected = spectrum.hamiltonian_expectation(
                HelicityQuanta(*nq), self.prof, self.aux, self.t
            )
            assert ham[idx, idx].real == pytest.approx(expected, rel=1e-12)
            assert abs(ham[idx, idx].imag) < 1e-13

    def test_hamiltonian_diagonal_with_field_and_drive(self):
        prof, aux = _static_setup(q=1.0, B=2.0, E1=1.0, E2=1.0)
        mats = spectrum.build_operator_matrices(prof, aux, 0.5, 6)
        ham = mats["H"].entries.toarray()
        idx = spectrum.basis_index(1, 0, 6)
        expected = spectrum.hamiltonian_expectation(HelicityQuanta(1, 0), prof, aux, 0.5)
        assert ham[idx, idx].real == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(2.0 * math.sqrt(2.0) + 1.0 - 1.0, rel=1e-12)

    def test_invariant_spectrum_degeneracies(self):
        inv = self.mats["I"].entries.diagonal().real
        labels = spectrum.basis_labels(self.N)
        shells = labels.sum(axis=1)
        for n in range(self.N - 1):
            sel = inv[shells == n]
            assert sel.size == n + 1
            np.testing.assert_allclose(sel, self.prof.kappa * (n + 1), rtol=1e-14)

    def test_edge_band_contents(self):
        labels = spectrum.basis_labels(self.N)
        for idx in self.mats["x"].edge_band:
            assert labels[idx, 0] == self.N or labels[idx, 1] == self.N
        assert len(self.mats["x"].edge_band) == 2 * (self.N + 1) - 1


class TestRelabelings:
    def test_su2(self):
        assert spectrum.su2_relabel(HelicityQuanta(1, 0)) == (0.5, 0.5)
        assert spectrum.su2_relabel(HelicityQuanta(0, 0)) == (0.0, 0.0)

    def test_su11(self):
        assert spectrum.su11_relabel(HelicityQuanta(3, 1)) == (1.5, 1)

    def test_casimir(self):
        assert spectrum.casimir_su11(1) == 0.0
        assert spectrum.casimir_su11(3) == 2.0
        assert spectrum.casimir_su11(0) == -0.25


class TestInvariant3d:
    def test_axial_rest_is_constant(self):
        _, aux = _moving_setup()
        trace = spectrum.invariant3d_diagnostic(
            HelicityQuanta(1, 1), 0.0, aux, np.linspace(0.0, 6.0, 100)
        )
        assert trace.variation == 0.0
        np.testing.assert_allclose(trace.alpha, aux.kappa * 3.0, rtol=1e-14)

    def test_moving_variation_value(self):
        _, aux = _moving_setup()
        grid = np.linspace(0.0, 2 * math.pi, 400)
        trace = spectrum.invariant3d_diagnostic(HelicityQuanta(0, 0), 1.0, aux, grid)
        rho_sq = np.asarray(aux.rho_at(grid)) ** 2
        expected = 0.5 * (np.max(rho_sq) - np.min(rho_sq))
        assert trace.variation == pytest.approx(expected, rel=1e-12)

    def test_stationary_profile_constant(self):
        prof, aux = _static_setup()
        trace = spectrum.invariant3d_diagnostic(
            HelicityQuanta(2, 0), 1.3, aux, np.linspace(0.0, 9.0, 50)
        )
        assert trace.variation < 1e-14
