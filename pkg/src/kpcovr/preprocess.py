"""Centering and scaling with train-set statistics frozen at fit time.

Features are centered by column means and scaled by a single global norm
so that the squared Frobenius norm of the train block is n_train. Targets
are standardized per column with an extra 1/sqrt(n_properties) factor so
the property variances sum to one. Kernels are double-centered (full
mode) or column-centered (sparse mode) and trace-normalized, which is the
kernel-space equivalent of the feature scaling. New data is always mapped
with the stored train statistics; nothing refits.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, InvalidInput
from .numerics import SymMatrix, mat_power

__all__ = [
    "FeatureScaler",
    "TargetScaler",
    "KernelCenterer",
    "fit_feature_scaler",
    "transform_features",
    "fit_target_scaler",
    "transform_targets",
    "inverse_transform_targets",
    "fit_full_kernel_centerer",
    "center_full_kernel",
    "fit_sparse_kernel_centerer",
    "center_sparse_kernel",
]


def _as_2d(x, name) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 2:
        raise InvalidInput(f"{name} must be a 2-d array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{name} must have finite entries")
    return a


@dataclass
class FeatureScaler:
    """Column centering plus one global scale for a feature matrix.

    Attributes
    ----------
    column_means : ndarray of shape (n_features,)
    global_norm : float
        Frobenius norm of the centered train matrix.
    n_train : int
    """

    column_means: np.ndarray
    global_norm: float
    n_train: int

    @property
    def scale(self) -> float:
        """Multiplier applied after centering."""
        return np.sqrt(self.n_train) / self.global_norm


@dataclass
class TargetScaler:
    """Per-column standardization of a target matrix.

    Each column is centered and scaled by
    sqrt(n_train) / (sqrt(n_properties) * ||centered column||), which
    makes every train-column variance equal 1/n_properties.
    """

    column_means: np.ndarray
    column_norms: np.ndarray
    n_train: int
    n_properties: int

    @property
    def scales(self) -> np.ndarray:
        return np.sqrt(self.n_train) / (
            np.sqrt(self.n_properties) * self.column_norms
        )


def fit_feature_scaler(x_train) -> FeatureScaler:
    """Fit column means and the global centered norm on train features."""
    x = _as_2d(x_train, "x_train")
    if x.shape[0] < 2:
        raise InvalidInput("need at least 2 train samples to fit a scaler")
    means = x.mean(axis=0)
    norm = float(np.linalg.norm(x - means))
    if norm == 0.0:
        raise DegenerateInput("all-constant feature matrix has zero norm")
    return FeatureScaler(means, norm, x.shape[0])


def transform_features(s: FeatureScaler, x) -> np.ndarray:
    x = _as_2d(x, "x")
    if x.shape[1] != s.column_means.shape[0]:
        raise InvalidInput(
            f"expected {s.column_means.shape[0]} feature columns, "
            f"got {x.shape[1]}"
        )
    return (x - s.column_means) * s.scale


def fit_target_scaler(y_train) -> TargetScaler:
    """Fit per-column means and norms on train targets."""
    y = _as_2d(y_train, "y_train")
    if y.shape[0] < 2:
        raise InvalidInput("need at least 2 train samples to fit a scaler")
    means = y.mean(axis=0)
    norms = np.linalg.norm(y - means, axis=0)
    for j, norm in enumerate(norms):
        if norm == 0.0:
            raise DegenerateInput(f"target column {j} is constant")
    return TargetScaler(means, norms, y.shape[0], y.shape[1])


def transform_targets(s: TargetScaler, y) -> np.ndarray:
    y = _as_2d(y, "y")
    if y.shape[1] != s.n_properties:
        raise InvalidInput(
            f"expected {s.n_properties} target columns, got {y.shape[1]}"
        )
    return (y - s.column_means) * s.scales


def inverse_transform_targets(s: TargetScaler, y_scaled) -> np.ndarray:
    y = _as_2d(y_scaled, "y_scaled")
    if y.shape[1] != s.n_properties:
        raise InvalidInput(
            f"expected {s.n_properties} target columns, got {y.shape[1]}"
        )
    return y / s.scales + s.column_means


@dataclass
class KernelCenterer:
    """Train-set kernel statistics for centering new kernel blocks.

    Full mode stores the row means and grand mean of the raw train kernel
    and a trace scale computed from the centered train kernel. Sparse
    mode stores per-column means of the train cross-kernel K_NM and a
    scale that normalizes the trace of the Nystrom kernel.
    """

    mode: str
    n_train: int
    trace_scale: float
    train_row_means: np.ndarray | None = None
    train_grand_mean: float | None = None
    train_col_means: np.ndarray | None = None


def fit_full_kernel_centerer(k_raw_train) -> KernelCenterer:
    """Fit double-centering statistics on a raw train-train kernel.

    The trace scale is n_train over the trace of the centered train
    kernel, so the centered+scaled train kernel has trace n_train.
    """
    k = SymMatrix(k_raw_train).entries
    n = k.shape[0]
    row_means = k.mean(axis=1)
    grand = float(k.mean())
    centered_trace = float(np.trace(k) - 2 * row_means.sum() + n * grand)
    if centered_trace <= 0.0:
        raise DegenerateInput("centered train kernel has non-positive trace")
    return KernelCenterer(
        mode="full",
        n_train=n,
        trace_scale=n / centered_trace,
        train_row_means=row_means,
        train_grand_mean=grand,
    )


def center_full_kernel(
    c: KernelCenterer,
    k_raw,
    rows_are_train: bool,
    cols_are_train: bool,
    *,
    rows_vs_train=None,
    cols_vs_train=None,
) -> np.ndarray:
    """Double-center a kernel block with the stored train statistics.

    For a row (column) of points outside the train set the formula needs
    the mean raw kernel between each point and the train set. When the
    other axis of ``k_raw`` is the train set those means come from
    ``k_raw`` itself; for a test-test block pass the raw cross-kernels to
    the train set as ``rows_vs_train`` / ``cols_vs_train``.

    Parameters
    ----------
    k_raw : ndarray
        Raw kernel block between the row points and column points.
    rows_are_train, cols_are_train : bool
        Whether each axis indexes the train set in fit order.
    rows_vs_train, cols_vs_train : ndarray, optional
        Raw kernels (n_rows x n_train), (n_cols x n_train) against the
        train set; only needed when the corresponding axis is not the
        train set and cannot be inferred from ``k_raw``.
    """
    if c.mode != "full":
        raise InvalidInput("centerer was fitted in sparse mode")
    k = _as_2d(k_raw, "k_raw")

    def axis_means(is_train, size, vs_train, inferred):
        if is_train:
            if size != c.n_train:
                raise InvalidInput(
                    f"axis marked as train has {size} points, "
                    f"centerer was fitted on {c.n_train}"
                )
            return c.train_row_means
        if vs_train is None:
            vs_train = inferred
        if vs_train is None:
            raise InvalidInput(
                "centering a block with no train axis requires the raw "
                "cross-kernels to the train set"
            )
        vs_train = _as_2d(vs_train, "cross-kernel")
        if vs_train.shape != (size, c.n_train):
            raise InvalidInput(
                f"cross-kernel to train must be ({size}, {c.n_train}), "
                f"got {vs_train.shape}"
            )
        return vs_train.mean(axis=1)

    row_means = axis_means(
        rows_are_train, k.shape[0], rows_vs_train, k if cols_are_train else None
    )
    col_means = axis_means(
        cols_are_train, k.shape[1], cols_vs_train, k.T if rows_are_train else None
    )
    centered = k - row_means[:, None] - col_means[None, :] + c.train_grand_mean
    return centered * c.trace_scale


def fit_sparse_kernel_centerer(k_nm_raw_train, k_mm: SymMatrix) -> KernelCenterer:
    """Fit column-centering and trace scaling for sparse cross-kernels.

    Columns of the train K_NM are centered by their train means; the
    scale is chosen so the Nystrom kernel K_NM K_MM^+ K_NM^T of the
    centered train block has trace n_train. K_MM itself is never
    centered: the active set defines the feature basis, while centering
    statistics come from the train set.
    """
    k_nm = _as_2d(k_nm_raw_train, "k_nm_raw_train")
    if not isinstance(k_mm, SymMatrix):
        k_mm = SymMatrix(k_mm)
    if k_mm.dim != k_nm.shape[1]:
        raise InvalidInput(
            f"K_NM has {k_nm.shape[1]} columns but K_MM is {k_mm.dim}x{k_mm.dim}"
        )
    n = k_nm.shape[0]
    col_means = k_nm.mean(axis=0)
    centered = k_nm - col_means
    # mat_power raises NotPSD for an indefinite active-set kernel.
    nystrom_trace = float(np.sum((centered @ mat_power(k_mm, -1)) * centered))
    if nystrom_trace <= 0.0:
        raise DegenerateInput("centered Nystrom kernel has non-positive trace")
    return KernelCenterer(
        mode="sparse",
        n_train=n,
        trace_scale=float(np.sqrt(n / nystrom_trace)),
        train_col_means=col_means,
    )


def center_sparse_kernel(c: KernelCenterer, k_nm_raw, k_mm=None) -> np.ndarray:
    """Center and scale a cross-kernel block against the active set."""
    if c.mode != "sparse":
        raise InvalidInput("centerer was fitted in full mode")
    k = _as_2d(k_nm_raw, "k_nm_raw")
    if k.shape[1] != c.train_col_means.shape[0]:
        raise InvalidInput(
            f"expected {c.train_col_means.shape[0]} active columns, "
            f"got {k.shape[1]}"
        )
    if k_mm is not None:
        dim = k_mm.dim if isinstance(k_mm, SymMatrix) else np.asarray(k_mm).shape[0]
        if dim != k.shape[1]:
            raise InvalidInput("K_MM dimension does not match K_NM columns")
    return (k - c.train_col_means) * c.trace_scale
