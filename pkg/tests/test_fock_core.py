import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fockphase import fock_core as fc
from fockphase.errors import BasisError, SectorMismatchError, VacuumError

from conftest import angles, dense_state, sector_states

SQ2 = math.sqrt(2.0)


class TestDoubleFock:
    def test_one_one(self):
        s = fc.new_double_fock(1, 1)
        np.testing.assert_array_equal(s.amplitudes, [0, 1, 0])
        assert s.basis == fc.CANONICAL

    @pytest.mark.parametrize("n_up, n_down", [(2, 2), (3, 0), (0, 4), (7, 2)])
    def test_single_unit_amplitude(self, n_up, n_down):
        s = fc.new_double_fock(n_up, n_down)
        assert s.total_n == n_up + n_down
        expected = np.zeros(n_up + n_down + 1)
        expected[n_up] = 1
        np.testing.assert_array_equal(s.amplitudes, expected)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            fc.new_double_fock(0, 0)

    def test_state_is_immutable(self):
        s = fc.new_double_fock(1, 1)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 1.0

    def test_vacuum_sector_allowed(self):
        s = fc.fock_state(0, 0)
        assert s.total_n == 0 and s.is_normalized()

    def test_length_checked(self):
        with pytest.raises(ValueError):
            fc.SectorState(3, np.ones(3))


class TestAnnihilation:
    def test_up_on_two_two(self):
        image, w = fc.apply_annihilation(fc.new_double_fock(2, 2), fc.UP)
        assert w == pytest.approx(2.0)
        np.testing.assert_allclose(image.amplitudes, [0, SQ2, 0, 0])
        assert image.total_n == 3

    def test_empty_mode(self):
        image, w = fc.apply_annihilation(fc.new_double_fock(2, 0), fc.DOWN)
        assert w == 0.0
        np.testing.assert_array_equal(image.amplitudes, [0, 0])

    def test_superposition(self):
        # (|1,1> + |2,0>)/sqrt2  ->  (|0,1> + sqrt2 |1,0>)/sqrt2
        s = dense_state([0, 1, 1])
        image, w = fc.apply_annihilation(s, fc.UP)
        np.testing.assert_allclose(image.amplitudes, [1 / SQ2, 1.0], atol=1e-15)
        assert w == pytest.approx(1.5, abs=1e-15)
        dense = fc.dense_annihilation(2, fc.UP) @ s.amplitudes
        np.testing.assert_allclose(image.amplitudes, dense, atol=1e-15)

    def test_vacuum_is_error(self):
        with pytest.raises(VacuumError):
            fc.apply_annihilation(fc.fock_state(0, 0), fc.UP)

    def test_creation_inverts_annihilation_on_fock(self):
        s = fc.new_double_fock(3, 2)
        image, w = fc.apply_annihilation(s, fc.UP)
        back = fc.apply_creation(image, fc.UP)
        np.testing.assert_allclose(back.amplitudes, 3 * s.amplitudes)


class TestChannel:
    def test_wavefunction_after_first_plus(self):
        image, w = fc.apply_channel(fc.new_double_fock(2, 2), 0.0, +1)
        np.testing.assert_allclose(image.amplitudes, [0, 1, 1, 0], atol=1e-15)
        assert w == pytest.approx(2.0)

    def test_orthogonal_channel_kills_phase_state(self):
        _, w = fc.apply_channel(fc.phase_state(5, 0.0), 0.0, -1)
        assert w < 1e-28

    def test_quarter_turn(self):
        image, w = fc.apply_channel(fc.new_double_fock(1, 1), math.pi / 2, +1)
        np.testing.assert_allclose(image.amplitudes, [1 / SQ2, 1j / SQ2], atol=1e-15)
        assert w == pytest.approx(1.0)
        dense = fc.dense_channel(2, math.pi / 2, +1) @ fc.new_double_fock(1, 1).amplitudes
        np.testing.assert_allclose(image.amplitudes, dense, atol=1e-15)

    def test_rotated_basis_rejected(self):
        s = fc.SectorState(1, [1, 0], fc.Basis(0.3))
        with pytest.raises(BasisError):
            fc.apply_channel(s, 0.0, +1)

    @given(sector_states(max_n=60), angles)
    def test_completeness(self, state, theta):
        _, wp = fc.apply_channel(state, theta, +1)
        _, wm = fc.apply_channel(state, theta, -1)
        assert wp + wm == pytest.approx(state.total_n, abs=1e-9)


class TestPhaseState:
    def test_single_particle_at_pi(self):
        s = fc.phase_state(1, math.pi)
        np.testing.assert_allclose(s.amplitudes, [-1 / SQ2, 1 / SQ2], atol=1e-15)

    def test_two_particles(self):
        np.testing.assert_allclose(fc.phase_state(2, 0.0).amplitudes, [0.5, 1 / SQ2, 0.5], atol=1e-15)

    def test_matches_creation_power(self):
        # (c_phi^+)^n |vac> / sqrt(n!) built by repeated creation
        n, phi = 6, 0.8
        s = fc.fock_state(0, 0)
        for _ in range(n):
            s = fc.apply_channel_dagger(s, phi, +1)
        target = s.amplitudes / math.sqrt(math.factorial(n))
        np.testing.assert_allclose(fc.phase_state(n, phi).amplitudes, target, atol=1e-13)

    @pytest.mark.parametrize("n", [1, 2, 10, 50])
    def test_eigenvalue(self, n):
        phi = 2.2
        state = fc.phase_state(n, phi)
        image, w = fc.apply_channel(state, phi, +1)
        back = fc.apply_channel_dagger(image, phi, +1)
        assert w == pytest.approx(n, rel=1e-12)
        np.testing.assert_allclose(back.amplitudes, n * state.amplitudes, atol=1e-12 * n)

    def test_large_n_normalized(self):
        assert fc.phase_state(100_000, 1.0).is_normalized()

    @settings(max_examples=40)
    @given(st.integers(1, 200), angles)
    def test_channel_eigenstate_chain(self, n, phi):
        image, w = fc.apply_channel(fc.phase_state(n, phi), phi, +1)
        assert w == pytest.approx(n, rel=1e-12)
        if n > 1:
            assert fc.fidelity(image.normalized(), fc.phase_state(n - 1, phi)) >= 1 - 1e-10
        _, w_minus = fc.apply_channel(fc.phase_state(n, phi), phi, -1)
        assert w_minus <= 1e-18 * n


class TestSpin:
    def test_double_fock(self):
        e = fc.expect_spin(fc.new_double_fock(5, 5))
        assert (e.sx, e.sy, e.sz) == (0.0, 0.0, 0.0)

    def test_phase_state_along_x(self):
        e = fc.expect_spin(fc.phase_state(9, 0.0))
        assert e.sx == pytest.approx(9.0)
        assert abs(e.sy) < 1e-12 and abs(e.sz) < 1e-12

    def test_wavefunction_after_first_plus(self):
        image, w = fc.apply_channel(fc.new_double_fock(2, 2), 0.0, +1)
        post = image.normalized()
        oracle = np.vdot(post.amplitudes, fc.dense_sigma(3, "x") @ post.amplitudes).real
        assert oracle == pytest.approx(2.0)
        assert fc.expect_spin(post).sx == pytest.approx(oracle, abs=1e-14)

    @given(sector_states())
    def test_bounds(self, state):
        e = fc.expect_spin(state)
        assert abs(e.sz) <= state.total_n + 1e-9
        assert e.transverse_magnitude <= state.total_n + 1e-9

    @settings(max_examples=30)
    @given(st.integers(1, 200), angles)
    def test_phase_state_transverse_magnitude(self, n, phi):
        assert fc.expect_spin(fc.phase_state(n, phi)).transverse_magnitude == pytest.approx(n, abs=1e-9)

    def test_dense_matches_pauli_for_one_particle(self):
        # (down, up) ordering of the textbook matrices
        np.testing.assert_array_equal(fc.dense_sigma(1, "y"), np.array([[0, 1j], [-1j, 0]]))


class TestFidelity:
    def test_self(self):
        s = fc.phase_state(7, 0.4)
        assert fc.fidelity(s, s) == pytest.approx(1.0)

    def test_opposite_phase_states(self):
        k = sympy.symbols("k")
        exact = sympy.Abs(sympy.summation(sympy.binomial(3, k) * (-1) ** (3 - k) / 8, (k, 0, 3))) ** 2
        assert exact == 0
        assert fc.fidelity(fc.phase_state(3, 0.0), fc.phase_state(3, math.pi)) == pytest.approx(
            float(exact), abs=1e-15
        )

    def test_double_fock_vs_phase_state(self):
        assert fc.fidelity(fc.new_double_fock(1, 1), fc.phase_state(2, 0.0)) == pytest.approx(0.5)

    def test_sector_mismatch(self):
        with pytest.raises(SectorMismatchError):
            fc.fidelity(fc.phase_state(3, 0), fc.phase_state(4, 0))
        with pytest.raises(SectorMismatchError):
            fc.fidelity(fc.phase_state(1, 0), fc.SectorState(1, [1, 0], fc.Basis(0.0)))


class TestDenseOracle:
    def test_smur_single_particle(self):
        assert fc.verify_smur_identity(1) == 0.0

    def test_smur_twenty(self):
        assert fc.verify_smur_identity(20) <= 1e-12

    def test_corollary(self):
        assert fc.verify_smur_identity(20, corollary=True) <= 1e-12

    def test_guard(self):
        with pytest.raises(ValueError):
            fc.verify_smur_identity(51)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_vector_actions_match_dense(self, n):
        rng = np.random.default_rng(n)
        s = fc.SectorState.from_amplitudes(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
        v = s.amplitudes
        for mode in fc.MODES:
            np.testing.assert_allclose(
                fc.apply_annihilation(s, mode)[0].amplitudes, fc.dense_annihilation(n, mode) @ v, atol=1e-12
            )
        for theta in (0.0, 1.1, -2.5):
            for sign in (+1, -1):
                np.testing.assert_allclose(
                    fc.apply_channel(s, theta, sign)[0].amplitudes,
                    fc.dense_channel(n, theta, sign) @ v,
                    atol=1e-12,
                )
        for axis in "xyz":
            np.testing.assert_allclose(fc.apply_sigma(s, axis), fc.dense_sigma(n, axis) @ v, atol=1e-12)
