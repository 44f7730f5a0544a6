"""Kernel evaluation, FPS selection, and Nystrom features."""

import numpy as np
import pytest

from kpcovr import (
    InvalidInput,
    KernelSpec,
    SymMatrix,
    default_gamma,
    fps_select,
    kernel_matrix,
    kernel_value,
    nystrom_features,
    nystrom_features_from_kernels,
)


def test_spec_validates_family():
    with pytest.raises(InvalidInput):
        KernelSpec("polynomial")


def test_spec_validates_gamma():
    with pytest.raises(InvalidInput):
        KernelSpec("rbf", gamma=-1.0)


def test_linear_value():
    assert kernel_value(KernelSpec("linear"), [1.0, 2.0], [3.0, 4.0]) == 11.0


def test_rbf_self_is_one():
    spec = KernelSpec("rbf", gamma=2.0)
    assert kernel_value(spec, [1.0, 2.0], [1.0, 2.0]) == 1.0


def test_rbf_unit_distance():
    spec = KernelSpec("rbf", gamma=1.0)
    assert np.isclose(kernel_value(spec, [0.0], [1.0]), np.exp(-1.0))


def test_value_length_mismatch():
    with pytest.raises(InvalidInput):
        kernel_value(KernelSpec("linear"), [1.0], [1.0, 2.0])


def test_linear_matrix_of_orthonormal_rows():
    assert np.allclose(kernel_matrix(KernelSpec("linear"), np.eye(3), np.eye(3)), np.eye(3))


def test_rbf_matrix_diagonal_ones():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(7, 3))
    k = kernel_matrix(KernelSpec("rbf", gamma=0.4), x, x)
    assert np.allclose(np.diag(k), 1.0)
    assert np.allclose(k, k.T, atol=1e-15)


def test_linear_matrix_is_gram():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(3, 2))
    assert np.allclose(kernel_matrix(KernelSpec("linear"), a, a), a @ a.T)


def test_matrix_dim_mismatch():
    with pytest.raises(InvalidInput):
        kernel_matrix(KernelSpec("linear"), np.ones((2, 3)), np.ones((2, 4)))


def test_default_gamma_inverse_scale():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(50, 4))
    g = default_gamma(x)
    assert g > 0
    # doubling the data spread quarters the width parameter
    assert np.isclose(default_gamma(2.0 * x), g / 4.0)


class TestFPS:
    def test_line_order(self):
        x = np.array([[0.0], [1.0], [10.0]])
        assert fps_select(x, 3, start=0).tolist() == [0, 2, 1]

    def test_square_corners(self):
        x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        assert fps_select(x, 2, start=0).tolist() == [0, 3]

    def test_full_selection_is_permutation(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(9, 2))
        sel = fps_select(x, 9, start=4)
        assert sorted(sel.tolist()) == list(range(9))
        assert sel[0] == 4

    def test_prefix_property(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(12, 3))
        full = fps_select(x, 12, start=0)
        for m in (2, 5, 9):
            assert fps_select(x, m, start=0).tolist() == full[:m].tolist()

    def test_duplicate_point_appended_last(self):
        x = np.array([[0.0], [1.0], [10.0], [0.0]])
        sel = fps_select(x, 4, start=0)
        # the duplicate of the start point has distance zero throughout
        assert sel[-1] == 3

    def test_m_too_large(self):
        with pytest.raises(InvalidInput):
            fps_select(np.ones((3, 1)), 4)

    def test_start_out_of_range(self):
        with pytest.raises(InvalidInput):
            fps_select(np.ones((3, 1)), 2, start=3)


class TestNystrom:
    def test_full_active_linear_reproduces_gram(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(8, 3))
        x = x - x.mean(axis=0)
        spec = KernelSpec("linear")
        phi = nystrom_features(spec, x, np.arange(8))
        assert np.allclose(phi.phi_nm @ phi.phi_nm.T, x @ x.T, atol=1e-8)

    def test_single_active_point(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(6, 2))
        phi = nystrom_features(KernelSpec("rbf", gamma=1.0), x, np.array([2]))
        assert phi.phi_nm.shape == (6, 1)
        approx = phi.phi_nm @ phi.phi_nm.T
        assert np.linalg.matrix_rank(approx) <= 1

    def test_duplicate_active_drops_column(self):
        rng = np.random.default_rng(7)
        base = rng.normal(size=(5, 2))
        x = np.vstack([base, base[0]])  # row 5 duplicates row 0
        phi = nystrom_features(KernelSpec("rbf", gamma=0.7), x, np.array([0, 1, 5]))
        assert phi.m_effective == 2

    def test_rejects_repeated_indices(self):
        with pytest.raises(InvalidInput):
            nystrom_features(KernelSpec("linear"), np.ones((4, 2)), np.array([1, 1]))

    def test_rejects_empty_active(self):
        with pytest.raises(InvalidInput):
            nystrom_features(KernelSpec("linear"), np.ones((4, 2)), np.array([], dtype=int))

    def test_from_kernels_matches(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(9, 3))
        spec = KernelSpec("rbf", gamma=0.5)
        idx = np.array([1, 4, 7])
        direct = nystrom_features(spec, x, idx)
        k_nm = kernel_matrix(spec, x, x[idx])
        k_mm = SymMatrix(kernel_matrix(spec, x[idx], x[idx]))
        rebuilt = nystrom_features_from_kernels(k_nm, k_mm, idx)
        assert np.allclose(direct.phi_nm, rebuilt.phi_nm, atol=1e-12)
