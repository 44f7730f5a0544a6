"""Kernel functions, kernel matrices, FPS selection, Nystrom features."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidInput
from .numerics import EigResult, SymMatrix, sym_eig, truncate

__all__ = [
    "KernelSpec",
    "NystromFeatures",
    "default_gamma",
    "kernel_value",
    "kernel_matrix",
    "fps_select",
    "nystrom_features",
    "nystrom_features_from_kernels",
]


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameters.

    family is "linear" (dot product) or "rbf" (exp(-gamma ||x - x'||^2));
    gamma is required positive for rbf and ignored for linear.
    """

    family: str
    gamma: float | None = None

    def __post_init__(self):
        if self.family not in ("linear", "rbf"):
            raise InvalidInput(f"unknown kernel family {self.family!r}")
        if self.family == "rbf" and (self.gamma is None or self.gamma <= 0):
            raise InvalidInput("rbf kernel requires gamma > 0")


def default_gamma(x_train) -> float:
    """Heuristic rbf width: 1 / (n_features * mean per-column variance)."""
    x = np.asarray(x_train, dtype=float)
    var = float(np.mean(np.var(x, axis=0)))
    if var == 0.0:
        raise InvalidInput("cannot pick a gamma for constant features")
    return 1.0 / (x.shape[1] * var)


def kernel_value(spec: KernelSpec, x, x_other) -> float:
    x = np.asarray(x, dtype=float)
    x_other = np.asarray(x_other, dtype=float)
    if x.shape != x_other.shape:
        raise InvalidInput(f"length mismatch: {x.shape} vs {x_other.shape}")
    if spec.family == "linear":
        return float(x @ x_other)
    d2 = float(np.sum((x - x_other) ** 2))
    return float(np.exp(-spec.gamma * d2))


def kernel_matrix(spec: KernelSpec, a, b) -> np.ndarray:
    """Kernel matrix K[i, j] = k(a_i, b_j)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2:
        raise InvalidInput("kernel_matrix expects 2-d sample matrices")
    if a.shape[1] != b.shape[1]:
        raise InvalidInput(
            f"feature dims differ: {a.shape[1]} vs {b.shape[1]}"
        )
    if spec.family == "linear":
        return a @ b.T
    return np.exp(-spec.gamma * cdist(a, b, "sqeuclidean"))


def fps_select(x, m: int, start: int = 0) -> np.ndarray:
    """Greedy farthest-point sampling in Euclidean feature space.

    Starts from ``start`` and repeatedly picks the point with the largest
    minimum distance to everything already selected; distance ties break
    toward the lowest index, so the result is deterministic.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if not 1 <= m <= n:
        raise InvalidInput(f"m must be in [1, {n}], got {m}")
    if not 0 <= start < n:
        raise InvalidInput(f"start index {start} out of range")
    selected = np.empty(m, dtype=int)
    selected[0] = start
    min_d2 = np.sum((x - x[start]) ** 2, axis=1)
    min_d2[start] = -1.0  # mask picked points so duplicates cannot re-select them
    for i in range(1, m):
        nxt = int(np.argmax(min_d2))
        selected[i] = nxt
        np.minimum(min_d2, np.sum((x - x[nxt]) ** 2, axis=1), out=min_d2)
        min_d2[nxt] = -1.0
    return selected


@dataclass
class NystromFeatures:
    """Approximate RKHS features spanned by an active set.

    phi_nm has one column per active-set eigenpair above the rank cutoff
    (m_effective), so phi_nm @ phi_nm.T reproduces the Nystrom kernel
    K_NM K_MM^+ K_NM^T.
    """

    phi_nm: np.ndarray
    active_eig: EigResult
    active_indices: np.ndarray

    @property
    def m_effective(self) -> int:
        return self.phi_nm.shape[1]

    @property
    def whitener(self) -> np.ndarray:
        """Map from kernel rows against the active set to features,
        U_MM diag(lambda^-1/2)."""
        return self.active_eig.eigenvectors / np.sqrt(self.active_eig.eigenvalues)


def nystrom_features_from_kernels(k_nm, k_mm, active_indices=None) -> NystromFeatures:
    """Build features from precomputed cross and active-set kernels."""
    k_nm = np.asarray(k_nm, dtype=float)
    if not isinstance(k_mm, SymMatrix):
        k_mm = SymMatrix(k_mm)
    if k_nm.shape[1] != k_mm.dim:
        raise InvalidInput(
            f"K_NM has {k_nm.shape[1]} columns but K_MM is {k_mm.dim}x{k_mm.dim}"
        )
    eig = sym_eig(k_mm)
    if eig.effective_rank == 0:
        raise InvalidInput("active-set kernel has rank 0")
    eig = truncate(eig, eig.effective_rank)
    if active_indices is None:
        active_indices = np.arange(k_mm.dim)
    phi = k_nm @ (eig.eigenvectors / np.sqrt(eig.eigenvalues))
    return NystromFeatures(phi, eig, np.asarray(active_indices, dtype=int))


def nystrom_features(spec: KernelSpec, x_all, active_indices) -> NystromFeatures:
    """Compute kernels against an active subset of rows, then features."""
    x_all = np.asarray(x_all, dtype=float)
    idx = np.asarray(active_indices, dtype=int)
    if idx.size == 0:
        raise InvalidInput("active set is empty")
    if idx.size != np.unique(idx).size:
        raise InvalidInput("active indices must be distinct")
    if idx.min() < 0 or idx.max() >= x_all.shape[0]:
        raise InvalidInput("active index out of range")
    x_active = x_all[idx]
    k_nm = kernel_matrix(spec, x_all, x_active)
    k_mm = SymMatrix(kernel_matrix(spec, x_active, x_active))
    return nystrom_features_from_kernels(k_nm, k_mm, idx)
