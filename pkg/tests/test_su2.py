import math

import numpy as np
import pytest
from scipy.special import eval_jacobi

from mzphase import states, su2
from mzphase.errors import NumericalDegeneracyError
from mzphase._kernels import su2_direct_column, su2_recurrence_column

from oracles import jy_matrix, rotation_by_diagonalization


class TestJacobiAtZero:
    def test_degree_zero_is_one(self):
        for ab in ((0, 0), (3, 1), (0.5, 2.5)):
            assert su2.jacobi_at_zero(0, *ab) == 1.0

    def test_degree_one_symmetric_weight_vanishes(self):
        for a in (0, 1, 2, 5):
            assert su2.jacobi_at_zero(1, a, a) == 0.0

    def test_degree_one_explicit(self):
        # P_1^{(a,b)}(0) = (a - b)/2
        assert su2.jacobi_at_zero(1, 2, 0) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 7, 15, 30])
    def test_against_scipy(self, n):
        rng = np.random.default_rng(n)
        for _ in range(20):
            a = rng.uniform(-0.9, 6.0)
            b = rng.uniform(-0.9, 6.0)
            ref = eval_jacobi(n, a, b, 0.0)
            assert su2.jacobi_at_zero(n, a, b) == pytest.approx(ref, rel=1e-10, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            su2.jacobi_at_zero(-1, 0, 0)
        with pytest.raises(ValueError):
            su2.jacobi_at_zero(2, -1.0, 0)


class TestMatrixElement:
    def test_spin_half_diagonal(self):
        assert su2.matrix_element(1, 1, 1) == pytest.approx(math.cos(math.pi / 4), abs=1e-12)

    def test_symmetry_relations_at_j5(self):
        two_j = 10
        for two_mu in range(-two_j, two_j + 1, 2):
            for two_nu in range(-two_j, two_j + 1, 2):
                val = su2.matrix_element(two_j, two_mu, two_nu)
                swapped = su2.matrix_element(two_j, two_nu, two_mu)
                sign = -1.0 if ((two_mu - two_nu) // 2) % 2 else 1.0
                assert val == pytest.approx(sign * swapped, abs=1e-12)
                negated = su2.matrix_element(two_j, -two_nu, -two_mu)
                assert val == pytest.approx(negated, abs=1e-12)

    def test_unitarity_at_j20(self):
        two_j = 40
        mat = su2.rotation_matrix(two_j)
        gram = mat.T @ mat
        assert np.abs(gram - np.eye(two_j + 1)).max() < 1e-10

    @pytest.mark.parametrize("two_j", [1, 2, 3, 5, 8, 12])
    def test_against_dense_exponential(self, two_j):
        # the element convention pairs with the transpose of
        # exp(-i (pi/2) J_y), i.e. with exp(+i (pi/2) J_y)
        ref = rotation_by_diagonalization(two_j, sign=-1).T
        assert np.abs(ref.imag).max() < 1e-12
        mine = su2.rotation_matrix(two_j)
        assert np.abs(mine - ref.real).max() < 1e-9

    def test_index_validation(self):
        with pytest.raises(ValueError):
            su2.matrix_element(4, 6, 0)
        with pytest.raises(ValueError):
            su2.matrix_element(4, 1, 0)  # parity mismatch


class TestRotationColumn:
    @pytest.mark.parametrize("two_j", [7, 24, 101, 400])
    def test_recurrence_matches_direct(self, two_j):
        for two_nu in (-two_j, -two_j + 2, 0 if two_j % 2 == 0 else 1, two_j - 4, two_j):
            direct = su2_direct_column(two_j, two_nu)
            rec, mismatch = su2_recurrence_column(two_j, two_nu)
            assert mismatch < 1e-10
            assert np.abs(direct - rec).max() < 1e-10

    def test_orthogonality_to_j200(self):
        two_j = 400
        cols = {tn: su2.rotation_column(two_j, tn).values
                for tn in range(-two_j, two_j + 1, 50)}
        keys = sorted(cols)
        for i, ka in enumerate(keys):
            for kb in keys[i:]:
                expect = 1.0 if ka == kb else 0.0
                assert abs(float(cols[ka] @ cols[kb]) - expect) < 1e-8

    def test_large_j_columns_finite_and_orthonormal(self):
        two_j = 25_600
        c0 = su2.rotation_column(two_j, 0)
        c2 = su2.rotation_column(two_j, 2)
        cj = su2.rotation_column(two_j, two_j)
        for col in (c0, c2, cj):
            assert np.all(np.isfinite(col.values))
            assert col.residual < 1e-8
            assert abs(float(col.values @ col.values) - 1.0) < 1e-8
        assert abs(float(c0.values @ c2.values)) < 1e-8

    def test_one_port_column_uses_closed_form_route(self):
        # the nu = j column costs O(1) per element, so the direct route
        # stays exact at any size
        col = su2.rotation_column(25_600, 25_600)
        assert col.route == "direct"

    def test_half_integer_spin(self):
        two_j = 31
        cols = [su2.rotation_column(two_j, tn).values for tn in (-two_j, 1, two_j)]
        mat = np.column_stack(cols)
        gram = mat.T @ mat
        assert np.abs(gram - np.eye(3)).max() < 1e-10


class TestBasisChange:
    @pytest.mark.parametrize("two_j", [1, 2, 5, 12])
    def test_diagonalizes_jy(self, two_j):
        v = su2.basis_change_matrix(two_j)
        d = v @ jy_matrix(two_j) @ v.conj().T
        mus = (np.arange(two_j + 1) * 2 - two_j) / 2.0
        assert np.abs(d - np.diag(mus)).max() < 1e-10

    def test_basis_vector_maps_to_unit_column(self):
        two_j = 14
        amps = np.zeros(two_j + 1, dtype=complex)
        amps[3] = 1.0
        out = su2.z_to_y(states.TwoModeState(two_j, states.JZ, amps))
        assert np.linalg.norm(out.amps) == pytest.approx(1.0, abs=1e-10)

    def test_round_trip_random_state(self):
        two_j = 50
        rng = np.random.default_rng(5)
        amps = rng.standard_normal(two_j + 1) + 1j * rng.standard_normal(two_j + 1)
        amps /= np.linalg.norm(amps)
        state = states.TwoModeState(two_j, states.JY, amps)
        back = su2.z_to_y(su2.y_to_z(state))
        assert np.abs(back.amps - amps).max() < 1e-10

    def test_optimal_state_concentrates_on_few_jz_components(self):
        z = su2.y_to_z(states.optimal_state(40))
        mags = np.abs(z.amps)
        significant = int(np.sum(mags > 0.01 * mags.max()))
        assert significant in (9, 10)
        # the significant components sit around mu = 0
        idx = np.nonzero(mags > 0.01 * mags.max())[0]
        mus = (idx * 2 - 40) / 2
        assert np.abs(mus).max() <= 6

    def test_center_profile_stable_with_photon_number(self):
        z40 = np.abs(su2.y_to_z(states.optimal_state(40)).amps)
        z400 = np.abs(su2.y_to_z(states.optimal_state(400)).amps)
        c40 = z40[20 - 4: 20 + 5]
        c400 = z400[200 - 4: 200 + 5]
        assert np.abs(c40 - c400).max() < 0.05 * c40.max()

    def test_basis_mismatch_rejected(self):
        with pytest.raises(ValueError):
            su2.y_to_z(states.one_port_state(4))


class TestSpinQuantum:
    def test_index_round_trip(self):
        s = su2.SpinQuantum(9)
        for i in range(s.dim):
            assert s.index(s.two_mu(i)) == i

    def test_invalid_values(self):
        s = su2.SpinQuantum(4)
        with pytest.raises(ValueError):
            s.index(5)
        with pytest.raises(ValueError):
            s.index(3)
        with pytest.raises(ValueError):
            su2.SpinQuantum(-2)
