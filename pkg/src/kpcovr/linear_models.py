"""PCA, classical MDS, ridge regression, and linear PCovR.

Principal covariates regression interpolates between PCA (mixing
parameter alpha = 1) and ridge regression (alpha = 0) by diagonalizing a
blend of the variance structure and the regression approximation of the
targets. Both the sample-space route (eigendecomposition of a modified
n x n Gram matrix) and the feature-space route (modified covariance,
n_features x n_features) are implemented; they produce the same latent
space up to column signs and differ only in cost.

All inputs are expected in the scaled frames produced by
:mod:`kpcovr.preprocess`.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidAlpha, InvalidInput, NotPSD
from .numerics import EigResult, SymMatrix, mat_power, reg_solve, sym_eig, truncate

__all__ = [
    "FittedProjector",
    "fit_pca",
    "fit_mds",
    "fit_mds_from_gram",
    "fit_ridge",
    "fit_pcovr_sample",
    "fit_pcovr_feature",
    "fit_pcovr",
    "transform",
    "predict",
    "reconstruct",
]


@dataclass
class FittedProjector:
    """Learned linear maps between input, latent, and property spaces.

    Attributes
    ----------
    p_in_to_t : ndarray (n_features, k)
        Projects (scaled) inputs into the latent space, T = X @ p_in_to_t.
    p_t_to_in : ndarray (k, n_features)
        Reconstructs inputs from latent coordinates.
    p_t_to_y : ndarray (k, n_properties)
        Predicts (scaled) targets from latent coordinates.
    training_t : ndarray (n_train, k)
        Latent coordinates of the fit samples.
    n_latent : int
        Requested latent dimension; the realized one is
        ``p_in_to_t.shape[1]`` and is smaller when the input rank fell
        short (then ``shortfall`` is set).
    alpha : float
        Mixing parameter; 1 for pure projection models, 0 for pure
        regression.
    lam : float
        Ridge regularization used for the regression part.
    feature_scaler, target_scaler
        Optional preprocessing state attached by pipelines so the model
        can be applied to raw data later.
    """

    method: str
    p_in_to_t: np.ndarray
    p_t_to_in: np.ndarray
    p_t_to_y: np.ndarray
    training_t: np.ndarray
    n_latent: int
    alpha: float
    lam: float
    shortfall: bool = False
    feature_scaler: object = None
    target_scaler: object = None

    @property
    def n_latent_effective(self) -> int:
        return self.p_in_to_t.shape[1]


# Relative scale of the regularizer used for the latent-space regression
# P_TY = (T^T T + lam' I)^-1 T^T Y, lam' = EQ17_REG * tr(T^T T) / k.
EQ17_REG = 1e-12


def _latent_regression(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Regularized least squares from latent coordinates onto targets."""
    if y is None:
        return np.zeros((t.shape[1], 0))
    y = np.asarray(y, dtype=float)
    gram = t.T @ t
    k = max(t.shape[1], 1)
    lam = EQ17_REG * float(np.trace(gram)) / k
    return reg_solve(SymMatrix(gram), t.T @ y, lam)


def _check_alpha(alpha: float):
    if not 0.0 <= alpha <= 1.0:
        raise InvalidAlpha(f"alpha must lie in [0, 1], got {alpha}")


def _check_xy(x, y):
    x = np.asarray(x, dtype=float)
    if y is not None:
        y = np.asarray(y, dtype=float)
        if y.ndim != 2:
            raise InvalidInput("y must be 2-d (n_samples, n_properties)")
        if y.shape[0] != x.shape[0]:
            raise InvalidInput(
                f"x has {x.shape[0]} rows but y has {y.shape[0]}"
            )
    return x, y


def fit_pca(x, n_latent: int, y=None) -> FittedProjector:
    """Principal component analysis via the covariance eigenproblem.

    The latent basis is the top eigenvectors of C = X^T X, so
    p_t_to_in = p_in_to_t.T. When ``y`` is given, a latent-space
    regression is attached so the model can also predict.
    """
    x, y = _check_xy(x, y)
    cov = SymMatrix(x.T @ x)
    eig = truncate(sym_eig(cov), n_latent)
    t = x @ eig.eigenvectors
    return FittedProjector(
        method="pca",
        p_in_to_t=eig.eigenvectors,
        p_t_to_in=eig.eigenvectors.T,
        p_t_to_y=_latent_regression(t, y),
        training_t=t,
        n_latent=n_latent,
        alpha=1.0,
        lam=0.0,
        shortfall=eig.shortfall,
    )


def _gram_coordinates(eig: EigResult) -> np.ndarray:
    return eig.eigenvectors * np.sqrt(eig.eigenvalues)


def fit_mds_from_gram(g: SymMatrix, n_latent: int) -> np.ndarray:
    """Classical multidimensional scaling from a centered Gram matrix.

    Returns the latent coordinates T = U-hat Lambda-hat^(1/2); T T^T is
    the best rank-n_latent approximation of g.
    """
    if not isinstance(g, SymMatrix):
        g = SymMatrix(g)
    eig = sym_eig(g)
    tol = 1e-10 * max(np.linalg.norm(g.entries, "fro"), np.finfo(float).eps)
    if eig.eigenvalues.size and eig.eigenvalues[-1] < -tol:
        raise NotPSD(
            f"Gram matrix has eigenvalue {eig.eigenvalues[-1]:.3e}; "
            "not a valid similarity matrix"
        )
    return _gram_coordinates(truncate(eig, n_latent))


def fit_mds(x, n_latent: int) -> np.ndarray:
    """Classical MDS of (scaled) features; equals PCA scores up to sign."""
    x = np.asarray(x, dtype=float)
    return fit_mds_from_gram(SymMatrix(x @ x.T), n_latent)


def fit_ridge(x, y, lam: float) -> FittedProjector:
    """Ridge regression, presented as a projector with an identity latent map."""
    x, y = _check_xy(x, y)
    if y is None:
        raise InvalidInput("ridge regression requires targets")
    n_features = x.shape[1]
    weights = reg_solve(SymMatrix(x.T @ x), x.T @ y, lam)
    eye = np.eye(n_features)
    return FittedProjector(
        method="ridge",
        p_in_to_t=eye,
        p_t_to_in=eye,
        p_t_to_y=weights,
        training_t=x.copy(),
        n_latent=n_features,
        alpha=0.0,
        lam=lam,
    )


def fit_pcovr_sample(x, y, alpha: float, n_latent: int, lam: float) -> FittedProjector:
    """PCovR by diagonalizing the modified Gram matrix (n x n route).

    G-tilde = alpha X X^T + (1 - alpha) Y-hat Y-hat^T, with Y-hat the
    ridge approximation of the targets at this ``lam``. Latent
    coordinates are the de-whitened top eigenvectors,
    T = U-hat Lambda-hat^(1/2).
    """
    _check_alpha(alpha)
    x, y = _check_xy(x, y)
    if y is None:
        raise InvalidInput("PCovR requires targets")
    p_xy = reg_solve(SymMatrix(x.T @ x), x.T @ y, lam)
    y_hat = x @ p_xy
    g_mod = SymMatrix(alpha * (x @ x.T) + (1.0 - alpha) * (y_hat @ y_hat.T))
    eig = truncate(sym_eig(g_mod), n_latent)
    t = _gram_coordinates(eig)
    inv_sqrt = eig.eigenvectors / np.sqrt(eig.eigenvalues)
    p_in_to_t = (alpha * x.T + (1.0 - alpha) * (p_xy @ y_hat.T)) @ inv_sqrt
    p_t_to_in = inv_sqrt.T @ x
    return FittedProjector(
        method="pcovr",
        p_in_to_t=p_in_to_t,
        p_t_to_in=p_t_to_in,
        p_t_to_y=_latent_regression(t, y),
        training_t=t,
        n_latent=n_latent,
        alpha=alpha,
        lam=lam,
        shortfall=eig.shortfall,
    )


def fit_pcovr_feature(x, y, alpha: float, n_latent: int, lam: float) -> FittedProjector:
    """PCovR by diagonalizing the modified covariance (n_features route).

    C-tilde = alpha C + (1 - alpha) C^(-1/2) X^T Y-hat Y-hat^T X C^(-1/2)
    with C = X^T X; the projectors are read off the top eigenpairs after
    de-whitening with C^(+-1/2).
    """
    _check_alpha(alpha)
    x, y = _check_xy(x, y)
    if y is None:
        raise InvalidInput("PCovR requires targets")
    cov = SymMatrix(x.T @ x)
    p_xy = reg_solve(cov, x.T @ y, lam)
    y_hat = x @ p_xy
    c_inv_sqrt = mat_power(cov, -0.5)
    c_sqrt = mat_power(cov, 0.5)
    cross = c_inv_sqrt @ (x.T @ y_hat)
    c_mod = SymMatrix(alpha * cov.entries + (1.0 - alpha) * (cross @ cross.T))
    eig = truncate(sym_eig(c_mod), n_latent)
    p_in_to_t = c_inv_sqrt @ (eig.eigenvectors * np.sqrt(eig.eigenvalues))
    p_t_to_in = (eig.eigenvectors / np.sqrt(eig.eigenvalues)).T @ c_sqrt
    t = x @ p_in_to_t
    return FittedProjector(
        method="pcovr",
        p_in_to_t=p_in_to_t,
        p_t_to_in=p_t_to_in,
        p_t_to_y=_latent_regression(t, y),
        training_t=t,
        n_latent=n_latent,
        alpha=alpha,
        lam=lam,
        shortfall=eig.shortfall,
    )


def fit_pcovr(x, y, alpha: float, n_latent: int, lam: float) -> FittedProjector:
    """PCovR, picking the cheaper route for the data shape."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] < x.shape[1]:
        return fit_pcovr_sample(x, y, alpha, n_latent, lam)
    return fit_pcovr_feature(x, y, alpha, n_latent, lam)


def transform(f: FittedProjector, x_new) -> np.ndarray:
    x_new = np.asarray(x_new, dtype=float)
    if x_new.shape[1] != f.p_in_to_t.shape[0]:
        raise InvalidInput(
            f"expected {f.p_in_to_t.shape[0]} features, got {x_new.shape[1]}"
        )
    return x_new @ f.p_in_to_t


def predict(f: FittedProjector, x_new) -> np.ndarray:
    return transform(f, x_new) @ f.p_t_to_y


def reconstruct(f: FittedProjector, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape[1] != f.p_t_to_in.shape[0]:
        raise InvalidInput(
            f"expected {f.p_t_to_in.shape[0]} latent columns, got {t.shape[1]}"
        )
    return t @ f.p_t_to_in
