"""Kernelized and sparse-kernel models: KPCA, KRR, KPCovR and variants.

All fit functions consume kernels that were already centered and scaled
by :mod:`kpcovr.preprocess`; sparse variants consume Nystrom features
built from a centered cross-kernel and the raw active-set kernel. Kernel
PCovR diagonalizes G-tilde = alpha K + (1 - alpha) Y-hat Y-hat^T, the
kernel analogue of the linear sample-space route; its sparse counterpart
is the feature-space route applied to the Nystrom features.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAlpha, InvalidInput, NotPSD
from .kernels import NystromFeatures, nystrom_features_from_kernels
from .linear_models import _latent_regression
from .numerics import SymMatrix, mat_power, reg_solve, sym_eig, truncate

__all__ = [
    "KernelFittedProjector",
    "fit_kpca",
    "fit_krr",
    "fit_sparse_kpca",
    "fit_sparse_krr",
    "fit_kpcovr",
    "fit_sparse_kpcovr",
    "transform_kernel",
    "predict_kernel",
]


@dataclass
class KernelFittedProjector:
    """Learned maps from kernel rows to latent and property spaces.

    p_k_to_t maps a centered kernel row against the reference entities
    (train samples for full-kernel models, active points for sparse ones)
    to latent coordinates; p_t_to_y maps latent coordinates to scaled
    targets. training_t holds the latent coordinates of the fit samples.
    kernel_spec, centerer, active_indices and the scalers are carried
    along by pipelines so fitted models can be applied to raw data.
    """

    method: str
    p_k_to_t: np.ndarray
    p_t_to_y: np.ndarray
    training_t: np.ndarray
    n_latent: int
    alpha: float
    lam: float
    shortfall: bool = False
    kernel_spec: object = None
    centerer: object = None
    active_indices: np.ndarray | None = None
    feature_scaler: object = None
    target_scaler: object = None

    @property
    def n_ref(self) -> int:
        return self.p_k_to_t.shape[0]

    @property
    def n_latent_effective(self) -> int:
        return self.p_k_to_t.shape[1]


def _check_psd(k: SymMatrix, what: str):
    tol = 1e-10 * max(np.linalg.norm(k.entries, "fro"), np.finfo(float).eps)
    smallest = float(np.linalg.eigvalsh(k.entries)[0])
    if smallest < -tol:
        raise NotPSD(f"{what} has eigenvalue {smallest:.3e} beyond tolerance")


def _check_alpha(alpha: float):
    if not 0.0 <= alpha <= 1.0:
        raise InvalidAlpha(f"alpha must lie in [0, 1], got {alpha}")


def fit_kpca(k_centered: SymMatrix, n_latent: int, y=None) -> KernelFittedProjector:
    """Kernel PCA: latent coordinates from the top kernel eigenpairs.

    T = U-hat Lambda-hat^(1/2); new points project through
    P_KT = U-hat Lambda-hat^(-1/2) applied to their centered cross-kernel.
    """
    if not isinstance(k_centered, SymMatrix):
        k_centered = SymMatrix(k_centered)
    _check_psd(k_centered, "kernel matrix")
    eig = truncate(sym_eig(k_centered), n_latent)
    t = eig.eigenvectors * np.sqrt(eig.eigenvalues)
    return KernelFittedProjector(
        method="kpca",
        p_k_to_t=eig.eigenvectors / np.sqrt(eig.eigenvalues),
        p_t_to_y=_latent_regression(t, y),
        training_t=t,
        n_latent=n_latent,
        alpha=1.0,
        lam=0.0,
        shortfall=eig.shortfall,
    )


def fit_krr(k_centered, y, lam: float) -> np.ndarray:
    """Kernel ridge regression weights P_KY = (K + lam I)^-1 Y.

    Train predictions are K @ P_KY; out-of-sample predictions apply the
    centered cross-kernel to the same weights.
    """
    if not isinstance(k_centered, SymMatrix):
        k_centered = SymMatrix(k_centered)
    y = np.asarray(y, dtype=float)
    return reg_solve(k_centered, y, lam)


def fit_sparse_kpca(phi: NystromFeatures, n_latent: int, y=None) -> KernelFittedProjector:
    """Sparse KPCA: PCA on the Nystrom features.

    Diagonalizes the m x m covariance C = phi^T phi; latent coordinates
    are T = phi U-hat_C, reachable from kernel rows through
    P_KT = U_MM Lambda_MM^(-1/2) U-hat_C.
    """
    cov = SymMatrix(phi.phi_nm.T @ phi.phi_nm)
    eig = truncate(sym_eig(cov), n_latent)
    t = phi.phi_nm @ eig.eigenvectors
    return KernelFittedProjector(
        method="sparse-kpca",
        p_k_to_t=phi.whitener @ eig.eigenvectors,
        p_t_to_y=_latent_regression(t, y),
        training_t=t,
        n_latent=n_latent,
        alpha=1.0,
        lam=0.0,
        shortfall=eig.shortfall,
        active_indices=phi.active_indices,
    )


def fit_sparse_krr(k_nm_centered, k_mm, y, lam: float) -> np.ndarray:
    """Sparse KRR weights solving the active-set normal equations.

    Solved as a ridge problem on the Nystrom features, which equals
    (K_NM^T K_NM + lam K_MM)^-1 K_NM^T Y for a full-rank active set and
    stays well-defined when the active set is rank-deficient. Returns
    weights shaped (m_active, n_properties) acting on centered
    cross-kernel rows.
    """
    y = np.asarray(y, dtype=float)
    phi = nystrom_features_from_kernels(k_nm_centered, k_mm)
    cov = SymMatrix(phi.phi_nm.T @ phi.phi_nm)
    if lam == 0.0 and sym_eig(cov).effective_rank < cov.dim:
        warnings.warn(
            "active-set normal matrix is singular with lam=0; "
            "falling back to the pseudo-inverse solution",
            stacklevel=2,
        )
    weights = reg_solve(cov, phi.phi_nm.T @ y, lam)
    return phi.whitener @ weights


def fit_kpcovr(k_centered, y, alpha: float, n_latent: int, lam: float) -> KernelFittedProjector:
    """Kernel PCovR on a centered full kernel.

    Diagonalizes G-tilde = alpha K + (1 - alpha) Y-hat Y-hat^T with
    Y-hat = K (K + lam I)^-1 Y, then forms the out-of-sample projector
    P_KT = (alpha I + (1 - alpha) (K + lam I)^-1 Y Y-hat^T) U-hat
    Lambda-hat^(-1/2). At alpha = 1 this is exactly the KPCA
    eigenproblem; at alpha = 0 with enough latent dimensions the
    predictions reproduce KRR.
    """
    _check_alpha(alpha)
    if not isinstance(k_centered, SymMatrix):
        k_centered = SymMatrix(k_centered)
    _check_psd(k_centered, "kernel matrix")
    y = np.asarray(y, dtype=float)
    if y.shape[0] != k_centered.dim:
        raise InvalidInput(
            f"kernel has {k_centered.dim} rows but y has {y.shape[0]}"
        )
    p_ky = reg_solve(k_centered, y, lam)
    y_hat = k_centered.entries @ p_ky
    g_mod = SymMatrix(
        alpha * k_centered.entries + (1.0 - alpha) * (y_hat @ y_hat.T)
    )
    eig = truncate(sym_eig(g_mod), n_latent)
    t = eig.eigenvectors * np.sqrt(eig.eigenvalues)
    inv_sqrt = eig.eigenvectors / np.sqrt(eig.eigenvalues)
    p_k_to_t = alpha * inv_sqrt + (1.0 - alpha) * (p_ky @ (y_hat.T @ inv_sqrt))
    return KernelFittedProjector(
        method="kpcovr",
        p_k_to_t=p_k_to_t,
        p_t_to_y=_latent_regression(t, y),
        training_t=t,
        n_latent=n_latent,
        alpha=alpha,
        lam=lam,
        shortfall=eig.shortfall,
    )


def fit_sparse_kpcovr(
    phi: NystromFeatures,
    k_nm=None,
    k_mm=None,
    y=None,
    alpha: float = 0.5,
    n_latent: int = 2,
    lam: float = 0.0,
) -> KernelFittedProjector:
    """Sparse kernel PCovR on Nystrom features.

    The modified active-set covariance
    C-tilde = alpha C + (1 - alpha) C^(1/2) (C + lam I)^-1 phi^T Y
    Y^T phi (C + lam I)^-1 C^(1/2), with C = phi^T phi, is diagonalized
    and de-whitened exactly like the feature-space linear route. ``phi``
    may be omitted when ``k_nm`` (centered) and ``k_mm`` (raw active
    kernel) are given instead.
    """
    _check_alpha(alpha)
    if phi is None:
        if k_nm is None or k_mm is None:
            raise InvalidInput("need either phi or both k_nm and k_mm")
        phi = nystrom_features_from_kernels(k_nm, k_mm)
    if y is None:
        raise InvalidInput("PCovR requires targets")
    y = np.asarray(y, dtype=float)
    f = phi.phi_nm
    if y.shape[0] != f.shape[0]:
        raise InvalidInput(f"phi has {f.shape[0]} rows but y has {y.shape[0]}")
    cov = SymMatrix(f.T @ f)
    c_sqrt = mat_power(cov, 0.5)
    c_inv_sqrt = mat_power(cov, -0.5)
    cross = c_sqrt @ reg_solve(cov, f.T @ y, lam)
    c_mod = SymMatrix(alpha * cov.entries + (1.0 - alpha) * (cross @ cross.T))
    eig = truncate(sym_eig(c_mod), n_latent)
    p_phi_to_t = c_inv_sqrt @ (eig.eigenvectors * np.sqrt(eig.eigenvalues))
    t = f @ p_phi_to_t
    return KernelFittedProjector(
        method="sparse-kpcovr",
        p_k_to_t=phi.whitener @ p_phi_to_t,
        p_t_to_y=_latent_regression(t, y),
        training_t=t,
        n_latent=n_latent,
        alpha=alpha,
        lam=lam,
        shortfall=eig.shortfall,
        active_indices=phi.active_indices,
    )


def transform_kernel(f: KernelFittedProjector, k_cross_centered) -> np.ndarray:
    """Latent coordinates of new points from their centered cross-kernel."""
    k = np.asarray(k_cross_centered, dtype=float)
    if k.ndim != 2 or k.shape[1] != f.n_ref:
        raise InvalidInput(
            f"cross-kernel must have {f.n_ref} columns, got shape {k.shape}"
        )
    return k @ f.p_k_to_t


def predict_kernel(f: KernelFittedProjector, k_cross_centered) -> np.ndarray:
    return transform_kernel(f, k_cross_centered) @ f.p_t_to_y
