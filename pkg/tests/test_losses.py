"""Loss definitions, the kernel-only projection loss, and alpha selection."""

import numpy as np
import pytest

from helpers import scaled_data

from kpcovr import (
    InvalidInput,
    KernelSpec,
    LossReport,
    SymMatrix,
    center_full_kernel,
    fit_full_kernel_centerer,
    fit_kpca,
    fit_pca,
    kernel_matrix,
    loss_gram,
    loss_proj,
    loss_proj_kernel,
    loss_regr,
    nystrom_features_from_kernels,
    select_alpha,
    transform_kernel,
)


def test_loss_proj_perfect():
    xs, _ = scaled_data(0, n=10, f=3)
    f = fit_pca(xs, 3)
    assert loss_proj(xs, f.training_t, f.p_t_to_in) < 1e-20


def test_loss_proj_zero_latent_reference():
    xs, _ = scaled_data(1, n=8, f=3)
    t = np.zeros((8, 2))
    p = np.zeros((2, 3))
    assert np.isclose(loss_proj(xs, t, p), np.sum(xs**2) / 8)


def test_loss_proj_discarded_component():
    eps = 1e-3
    x = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, eps]])
    f = fit_pca(x, 1)
    assert np.isclose(loss_proj(x, f.training_t, f.p_t_to_in), eps**2 / 3, rtol=1e-6)


def test_loss_regr_zero():
    y = np.ones((4, 2))
    assert loss_regr(y, y.copy()) == 0.0


def test_loss_regr_single_delta():
    y = np.zeros((5, 2))
    y_hat = y.copy()
    y_hat[2, 1] = 0.3
    assert np.isclose(loss_regr(y, y_hat), 0.3**2 / 5)


def test_loss_regr_scaled_targets_near_one_for_zero_prediction():
    _, ys = scaled_data(2, n=20, p=3)
    assert np.isclose(loss_regr(ys, np.zeros_like(ys)), 1.0, rtol=1e-10)


def test_loss_gram_full_rank_zero():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 3))
    g = a @ a.T
    from kpcovr import fit_mds_from_gram

    t = fit_mds_from_gram(g, 3)
    assert loss_gram(g, t) < 1e-16


def test_loss_gram_zero_latent():
    g = np.diag([4.0, 1.0])
    assert np.isclose(loss_gram(g, np.zeros((2, 0))), np.sum(g**2) / 2)


def test_loss_gram_rank_one_truncation():
    g = np.diag([4.0, 1.0])
    t = np.array([[2.0], [0.0]])  # top eigenpair coordinates
    assert np.isclose(loss_gram(g, t), 0.5)


class TestKernelProjectionLoss:
    def test_full_rank_kpca_zero(self):
        xs, _ = scaled_data(4, n=9, f=3)
        spec = KernelSpec("rbf", gamma=0.5)
        k = kernel_matrix(spec, xs, xs)
        c = fit_full_kernel_centerer(k)
        k_c = center_full_kernel(c, k, True, True)
        f = fit_kpca(SymMatrix(k_c), 9)
        t = f.training_t
        assert loss_proj_kernel(k_c, k_c, k_c, t, t) < 1e-10

    def test_empty_latent_trace(self):
        k = np.diag([2.0, 3.0])
        t = np.zeros((2, 0))
        assert np.isclose(loss_proj_kernel(k, k, k, t, t), 2.5)

    def test_matches_explicit_features_on_train(self):
        xs, _ = scaled_data(5, n=10, f=4)
        spec = KernelSpec("rbf", gamma=0.4)
        k = kernel_matrix(spec, xs, xs)
        c = fit_full_kernel_centerer(k)
        k_c = center_full_kernel(c, k, True, True)
        phi = nystrom_features_from_kernels(k_c, SymMatrix(k_c), np.arange(10))
        f = fit_kpca(SymMatrix(k_c), 3)
        t = f.training_t
        kernel_loss = loss_proj_kernel(k_c, k_c, k_c, t, t)
        m = np.linalg.pinv(t.T @ t)
        p_t_to_phi = m @ t.T @ phi.phi_nm
        explicit = np.linalg.norm(phi.phi_nm - t @ p_t_to_phi) ** 2 / 10
        assert np.isclose(kernel_loss, explicit, atol=1e-6)

    def test_matches_explicit_features_held_out_linear(self):
        xs, _ = scaled_data(6, n=18, f=4)
        tr, te = np.arange(13), np.arange(13, 18)
        spec = KernelSpec("linear")
        k = kernel_matrix(spec, xs[tr], xs[tr])
        c = fit_full_kernel_centerer(k)
        k_c = center_full_kernel(c, k, True, True)
        k_vn = kernel_matrix(spec, xs[te], xs[tr])
        k_vn_c = center_full_kernel(c, k_vn, False, True)
        k_vv = kernel_matrix(spec, xs[te], xs[te])
        k_vv_c = center_full_kernel(
            c, k_vv, False, False, rows_vs_train=k_vn, cols_vs_train=k_vn
        )
        f = fit_kpca(SymMatrix(k_c), 2)
        t_n = f.training_t
        t_v = transform_kernel(f, k_vn_c)
        kernel_loss = loss_proj_kernel(k_vv_c, k_vn_c, k_c, t_n, t_v)
        phi = nystrom_features_from_kernels(k_c, SymMatrix(k_c), tr)
        phi_v = k_vn_c @ phi.whitener
        m = np.linalg.pinv(t_n.T @ t_n)
        p = m @ t_n.T @ phi.phi_nm
        explicit = np.linalg.norm(phi_v - t_v @ p) ** 2 / 5
        assert np.isclose(kernel_loss, explicit, atol=1e-6)

    def test_shape_validation(self):
        k = np.eye(3)
        t = np.zeros((4, 1))
        with pytest.raises(InvalidInput):
            loss_proj_kernel(k, k, k, t, t)


class TestSelectAlpha:
    def test_single_entry(self):
        rep = LossReport(0.5, 0.5, 0.3, 2, "test")
        assert select_alpha([rep]) == 0.3

    def test_interior_minimum(self):
        grid = np.linspace(0, 1, 11)
        sweep = [
            LossReport((1 - a) ** 2, a**2, float(a), 2, "test") for a in grid
        ]
        assert select_alpha(sweep) == 0.5

    def test_tie_takes_larger_alpha(self):
        sweep = [
            LossReport(0.5, 0.5, 0.2, 2, "test"),
            LossReport(0.5, 0.5, 0.8, 2, "test"),
        ]
        assert select_alpha(sweep) == 0.8

    def test_empty_rejected(self):
        with pytest.raises(InvalidInput):
            select_alpha([])


def test_loss_report_total():
    rep = LossReport(0.25, 0.75, 0.5, 2, "train")
    assert rep.l_total == 1.0
