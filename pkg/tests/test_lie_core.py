"""Tests for the algebra bases, Bernoulli numbers and the truncated
inverse differential of the exponential."""

from fractions import Fraction

import numpy as np
import pytest

from lieint.lie_core import LieAlgebraBasis, bernoulli, dexp_inv, sl2_basis, sl3_basis, sln_basis
from lieint.matkit import commutator


class TestBernoulli:
    # B_0 .. B_6 from the defining recurrence, B_1 = -1/2 convention
    KNOWN = [1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0]

    def test_low_order_values(self):
        for j, expected in enumerate(self.KNOWN):
            assert bernoulli(j) == pytest.approx(expected, abs=1e-16)

    def test_odd_vanish_above_one(self):
        for j in (3, 5, 7, 9, 11):
            assert bernoulli(j) == 0.0

    def test_b12_exact_fraction(self):
        assert bernoulli(12) == pytest.approx(float(Fraction(-691, 2730)), abs=1e-18)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            bernoulli(-1)
        with pytest.raises(ValueError):
            bernoulli(21)


class TestDexpInv:
    def test_zero_omega_is_identity_map(self):
        h = np.array([[0.3, -0.1], [0.2, -0.3]])
        for j in (0, 2, 6):
            assert np.array_equal(dexp_inv(np.zeros((2, 2)), h, j), h)

    def test_order_two_closed_form(self):
        rng = np.random.default_rng(2)
        omega, h = rng.normal(size=(2, 3, 3))
        expected = h - 0.5 * commutator(omega, h) + commutator(omega, commutator(omega, h)) / 12.0
        assert np.allclose(dexp_inv(omega, h, 2), expected, atol=1e-14)

    def test_order_one_only_halves_bracket(self):
        omega = np.array([[0.0, 1.0], [0.0, 0.0]])
        h = np.array([[1.0, 0.0], [0.0, -1.0]])
        assert np.allclose(dexp_inv(omega, h, 1), h - 0.5 * commutator(omega, h))

    def test_inverts_differential_of_exp(self):
        # d/dt exp(Omega(t)) = dexp_Omega(dOmega/dt) exp(Omega); verify the
        # inverse relation numerically on a commuting-free example
        from lieint.matkit import expm
        omega = np.array([[0.0, 0.4], [-0.3, 0.0]])
        a = np.array([[0.1, 0.2], [0.05, -0.1]])
        # finite-difference the flow of dOmega/dt = dexpinv_Omega(A)
        h = 1e-6
        d_omega = dexp_inv(omega, a, 10)
        lhs = (expm(omega + h * d_omega) - expm(omega)) / h
        assert np.allclose(lhs, a @ expm(omega), atol=1e-5)

    def test_shape_guard(self):
        from lieint.matkit import DimensionMismatch
        with pytest.raises(DimensionMismatch):
            dexp_inv(np.eye(2), np.eye(3), 2)

    def test_order_guard(self):
        with pytest.raises(ValueError):
            dexp_inv(np.eye(2), np.eye(2), 11)


class TestSl2Basis:
    def test_shapes_and_tracelessness(self):
        basis = sl2_basis()
        assert basis.r == 3 and basis.n == 2
        for m in basis.generators:
            assert m.shape == (2, 2)
            assert np.trace(m) == pytest.approx(0.0)

    def test_expected_generators(self):
        m0, m1, m2 = sl2_basis().generators
        assert np.array_equal(m0, [[0.0, 1.0], [0.0, 0.0]])
        assert np.array_equal(m1, [[0.5, 0.0], [0.0, -0.5]])
        assert np.array_equal(m2, [[0.0, 0.0], [-1.0, 0.0]])

    def test_structure_constants(self):
        c = sl2_basis().structure_constants
        # [X_0, X_1] = X_0, [X_0, X_2] = 2 X_1, [X_1, X_2] = X_2
        assert c[0, 1, 0] == 1.0
        assert c[0, 2, 1] == 2.0
        assert c[1, 2, 2] == 1.0
        assert np.allclose(c, -np.transpose(c, (1, 0, 2)))

    def test_matrix_side_flips_sign(self):
        assert sl2_basis().matrix_commutator_residual() < 1e-12


class TestSl3Basis:
    def test_shapes_and_tracelessness(self):
        basis = sl3_basis()
        assert basis.r == 8 and basis.n == 3
        for m in basis.generators:
            assert np.trace(m) == pytest.approx(0.0)

    def test_vector_field_constants_antisymmetric(self):
        c = sl3_basis().structure_constants
        assert np.allclose(c, -np.transpose(c, (1, 0, 2)))

    def test_selected_commutators(self):
        c = sl3_basis().structure_constants
        # [X_1, X_7] = 2 X_3 + X_4 and [X_2, X_8] = X_3 + 2 X_4 (1-based)
        assert c[0, 6, 2] == 2.0 and c[0, 6, 3] == 1.0
        assert c[1, 7, 2] == 1.0 and c[1, 7, 3] == 2.0

    def test_generators_realize_unflipped_constants(self):
        # The published planar-Riccati generators satisfy
        # [M_a, M_b] = +sum_c C[a,b,c] M_c, i.e. the SAME sign as the
        # vector fields, unlike the scalar-Riccati basis.  Pin both
        # facts: the flipped-sign residual is far from zero, the
        # unflipped one vanishes.
        basis = sl3_basis()
        assert basis.matrix_commutator_residual() > 1.0
        worst = 0.0
        for a in range(8):
            for b in range(8):
                lhs = commutator(basis.generators[a], basis.generators[b])
                rhs = sum(basis.structure_constants[a, b, g] * basis.generators[g]
                          for g in range(8))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        assert worst < 1e-12

    def test_jacobi_on_structure_constants(self):
        c = sl3_basis().structure_constants
        r = 8
        # sum over cyclic permutations of C[a,b,e] C[e,d,f] must vanish
        jac = (np.einsum("abe,edf->abdf", c, c)
               + np.einsum("bde,eaf->abdf", c, c)
               + np.einsum("dae,ebf->abdf", c, c))
        assert np.allclose(jac, 0.0, atol=1e-12)


class TestSlnBasis:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_dimension_and_tracelessness(self, n):
        basis = sln_basis(n)
        assert basis.r == n * n - 1
        for m in basis.generators:
            assert np.trace(m) == pytest.approx(0.0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_anti_isomorphism_by_construction(self, n):
        assert sln_basis(n).matrix_commutator_residual() < 1e-12

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            sln_basis(1)
        with pytest.raises(ValueError):
            sln_basis(9)
