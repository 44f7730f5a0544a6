"""Eigensolver, matrix powers, and the regularized solver."""

import numpy as np
import pytest

from kpcovr import InvalidInput, NotPSD, SymMatrix, mat_power, reg_solve, sym_eig, truncate


def test_symmatrix_rejects_nonsquare():
    with pytest.raises(InvalidInput):
        SymMatrix(np.ones((2, 3)))


def test_symmatrix_rejects_nonfinite():
    with pytest.raises(InvalidInput):
        SymMatrix(np.array([[1.0, np.nan], [np.nan, 1.0]]))


def test_symmatrix_symmetrizes_by_averaging():
    m = SymMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert np.array_equal(m.entries, np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_sym_eig_diagonal():
    eig = sym_eig(SymMatrix(np.diag([2.0, 1.0])))
    assert np.allclose(eig.eigenvalues, [2.0, 1.0])
    assert np.allclose(np.abs(eig.eigenvectors), np.eye(2))
    assert eig.effective_rank == 2


def test_sym_eig_descending_order():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6))
    eig = sym_eig(SymMatrix(a + a.T))
    assert np.all(np.diff(eig.eigenvalues) <= 0)


def test_sym_eig_zero_matrix():
    eig = sym_eig(SymMatrix(np.zeros((2, 2))))
    assert np.allclose(eig.eigenvalues, 0.0)
    assert eig.effective_rank == 0


def test_sym_eig_rank_one():
    eig = sym_eig(SymMatrix(np.ones((2, 2))))
    assert np.allclose(eig.eigenvalues, [2.0, 0.0])
    assert np.allclose(eig.eigenvectors[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert eig.effective_rank == 1


def test_sym_eig_sign_convention():
    # largest-magnitude entry of each eigenvector is non-negative
    rng = np.random.default_rng(1)
    a = rng.normal(size=(8, 8))
    eig = sym_eig(SymMatrix(a @ a.T))
    for j in range(8):
        v = eig.eigenvectors[:, j]
        assert v[np.argmax(np.abs(v))] >= 0


def test_sym_eig_deterministic():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(7, 7))
    m = SymMatrix(a + a.T)
    e1, e2 = sym_eig(m), sym_eig(m)
    assert np.array_equal(e1.eigenvalues, e2.eigenvalues)
    assert np.array_equal(e1.eigenvectors, e2.eigenvectors)


def test_sym_eig_reconstructs():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(5, 5))
    m = SymMatrix(a + a.T)
    eig = sym_eig(m)
    rebuilt = (eig.eigenvectors * eig.eigenvalues) @ eig.eigenvectors.T
    assert np.allclose(rebuilt, m.entries, atol=1e-12)


class TestTruncate:
    def test_keeps_top(self):
        eig = sym_eig(SymMatrix(np.diag([5.0, 3.0, 1.0])))
        top = truncate(eig, 2)
        assert np.allclose(top.eigenvalues, [5.0, 3.0])
        assert top.eigenvectors.shape == (3, 2)
        assert not top.shortfall

    def test_single(self):
        eig = sym_eig(SymMatrix(np.diag([2.0, 1.0])))
        top = truncate(eig, 1)
        assert np.allclose(top.eigenvalues, [2.0])

    def test_shortfall_on_rank_deficiency(self):
        eig = sym_eig(SymMatrix(np.diag([2.0, 0.0])))
        top = truncate(eig, 2)
        assert np.allclose(top.eigenvalues, [2.0])
        assert top.shortfall

    def test_rejects_nonpositive(self):
        eig = sym_eig(SymMatrix(np.eye(2)))
        with pytest.raises(InvalidInput):
            truncate(eig, 0)


class TestMatPower:
    def test_identity_inverse_sqrt(self):
        assert np.allclose(mat_power(SymMatrix(np.eye(3)), -0.5), np.eye(3))

    def test_diagonal_sqrt(self):
        out = mat_power(SymMatrix(np.diag([4.0, 9.0])), 0.5)
        assert np.allclose(out, np.diag([2.0, 3.0]))

    def test_rank_one_pinv(self):
        out = mat_power(SymMatrix(np.ones((2, 2))), -1.0)
        assert np.allclose(out, 0.25 * np.ones((2, 2)))

    def test_half_times_half(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(5, 3))
        c = SymMatrix(a.T @ a)
        root = mat_power(c, 0.5)
        assert np.allclose(root @ root, c.entries, atol=1e-10)

    def test_inv_sqrt_whitens(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=(9, 4))
        c = SymMatrix(a.T @ a)
        w = mat_power(c, -0.5)
        assert np.allclose(w @ c.entries @ w, np.eye(4), atol=1e-8)

    def test_not_psd_raises(self):
        with pytest.raises(NotPSD):
            mat_power(SymMatrix(np.diag([1.0, -1.0])), 0.5)

    def test_negative_within_tolerance_ok(self):
        # tiny negative eigenvalues from roundoff are clipped, not fatal
        m = SymMatrix(np.diag([1.0, -1e-16]))
        out = mat_power(m, -0.5)
        assert out[1, 1] == 0.0

    def test_integer_power_of_indefinite_allowed(self):
        out = mat_power(SymMatrix(np.diag([2.0, -3.0])), 2)
        assert np.allclose(out, np.diag([4.0, 9.0]))


class TestRegSolve:
    def test_identity_lambda_zero(self):
        b = np.array([[1.0], [2.0]])
        assert np.allclose(reg_solve(SymMatrix(np.eye(2)), b, 0.0), b)

    def test_scalar_regularized(self):
        out = reg_solve(SymMatrix(np.array([[1.0]])), np.array([[2.0]]), 1.0)
        assert np.allclose(out, [[1.0]])

    def test_singular_pseudo_inverse(self):
        a = SymMatrix(np.array([[2.0, 0.0], [0.0, 0.0]]))
        b = np.array([[2.0], [5.0]])
        out = reg_solve(a, b, 0.0)
        assert np.allclose(out, [[1.0], [0.0]])

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInput):
            reg_solve(SymMatrix(np.eye(2)), np.ones((3, 1)), 0.0)

    def test_negative_lambda(self):
        with pytest.raises(InvalidInput):
            reg_solve(SymMatrix(np.eye(2)), np.ones((2, 1)), -1.0)

    def test_matches_direct_solve(self):
        rng = np.random.default_rng(6)
        a = rng.normal(size=(6, 6))
        m = SymMatrix(a @ a.T + np.eye(6))
        b = rng.normal(size=(6, 2))
        lam = 0.3
        expected = np.linalg.solve(m.entries + lam * np.eye(6), b)
        assert np.allclose(reg_solve(m, b, lam), expected, atol=1e-12)
