"""Loss functions and mixing-parameter selection.

All losses are squared Frobenius residuals divided by the number of
samples in the evaluated split, matching the convention used throughout
the model derivations. The kernel-only projection loss evaluates the
RKHS reconstruction error without ever materializing feature vectors.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput
from .numerics import SymMatrix, mat_power

__all__ = [
    "LossReport",
    "loss_proj",
    "loss_regr",
    "loss_gram",
    "loss_proj_kernel",
    "select_alpha",
]


@dataclass
class LossReport:
    """Projection/regression losses for one model on one split."""

    l_proj: float
    l_regr: float
    alpha: float
    n_latent: int
    split: str
    l_gram: float | None = None
    l_total: float = field(init=False)

    def __post_init__(self):
        self.l_total = self.l_proj + self.l_regr


def loss_proj(x, t, p_t_to_in) -> float:
    """Reconstruction loss ||X - T P_TX||^2 / n_samples."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if t.shape[0] != x.shape[0]:
        raise InvalidInput(f"x has {x.shape[0]} rows but t has {t.shape[0]}")
    return float(np.linalg.norm(x - t @ p_t_to_in) ** 2) / x.shape[0]


def loss_regr(y, y_hat) -> float:
    """Regression loss ||Y - Y-hat||^2 / n_samples."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape:
        raise InvalidInput(f"shape mismatch: {y.shape} vs {y_hat.shape}")
    return float(np.linalg.norm(y - y_hat) ** 2) / y.shape[0]


def loss_gram(g, t) -> float:
    """Gram reconstruction loss ||G - T T^T||^2 / n_samples."""
    g = g.entries if isinstance(g, SymMatrix) else np.asarray(g, dtype=float)
    t = np.asarray(t, dtype=float)
    if t.shape[0] != g.shape[0]:
        raise InvalidInput(f"g has {g.shape[0]} rows but t has {t.shape[0]}")
    return float(np.linalg.norm(g - t @ t.T) ** 2) / g.shape[0]


def loss_proj_kernel(k_vv, k_vn, k_nn, t_n, t_v) -> float:
    """Kernel-only projection loss of a latent model on a split V.

    Evaluates

        Tr[K_VV - 2 K_VN T_N M T_V^T + T_V M T_N^T K_NN T_N M T_V^T] / n_V

    with M = (T_N^T T_N)^+, which equals the explicit RKHS
    reconstruction loss without building feature vectors. With V == N
    (same latent coordinates and kernel) the reduced train-set form
    Tr(K - K T M T^T)/n is used. An empty latent space yields
    Tr(K_VV)/n_V by the zero-reconstruction convention.
    """
    k_vv = np.asarray(k_vv, dtype=float)
    k_vn = np.asarray(k_vn, dtype=float)
    k_nn = k_nn.entries if isinstance(k_nn, SymMatrix) else np.asarray(k_nn, dtype=float)
    t_n = np.asarray(t_n, dtype=float)
    t_v = np.asarray(t_v, dtype=float)
    n_v, n_n = t_v.shape[0], t_n.shape[0]
    if k_vv.shape != (n_v, n_v) or k_vn.shape != (n_v, n_n) or k_nn.shape != (n_n, n_n):
        raise InvalidInput(
            f"inconsistent shapes: k_vv {k_vv.shape}, k_vn {k_vn.shape}, "
            f"k_nn {k_nn.shape}, t_n {t_n.shape}, t_v {t_v.shape}"
        )
    if t_n.shape[1] != t_v.shape[1]:
        raise InvalidInput("t_n and t_v must have the same latent dimension")
    if t_n.shape[1] == 0:
        return float(np.trace(k_vv)) / n_v
    m = mat_power(SymMatrix(t_n.T @ t_n), -1)
    if t_v.shape == t_n.shape and np.array_equal(t_v, t_n) and np.array_equal(k_vv, k_nn):
        proj = t_n @ m @ t_n.T
        return float(np.trace(k_nn) - np.sum(k_nn * proj)) / n_n
    tm = t_n @ m  # (n_n, k)
    second = -2.0 * float(np.sum((k_vn @ tm) * t_v))
    mid = tm.T @ k_nn @ tm  # (k, k)
    third = float(np.sum((t_v @ mid) * t_v))
    return (float(np.trace(k_vv)) + second + third) / n_v


def select_alpha(sweep) -> float:
    """Mixing parameter with the smallest total loss; ties favor larger alpha."""
    if not sweep:
        raise InvalidInput("empty sweep")
    best = None
    for report in sweep:
        if (
            best is None
            or report.l_total < best.l_total
            or (report.l_total == best.l_total and report.alpha > best.alpha)
        ):
            best = report
    return best.alpha
