"""Shared symmetric-matrix numerics.

Every model in this package reduces to eigendecompositions of symmetric
matrices, matrix powers built from them, and regularized linear solves.
Centralizing those here fixes one deterministic convention (eigenvalue
ordering, eigenvector signs, rank cutoffs, pseudo-inverse semantics) that
all routes share, which is what makes sample-space and feature-space
solutions comparable to tight tolerances.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotPSD

__all__ = [
    "RCOND",
    "SymMatrix",
    "EigResult",
    "sym_eig",
    "truncate",
    "mat_power",
    "reg_solve",
]

# Relative eigenvalue cutoff below which a direction counts as null space.
RCOND = 1e-12


@dataclass
class SymMatrix:
    """A real symmetric matrix.

    Construction symmetrizes by averaging rather than rejecting slightly
    asymmetric input, since products such as ``X.T @ X`` are only
    symmetric up to roundoff.

    Parameters
    ----------
    entries : ndarray of shape (dim, dim)
        Square matrix with finite entries.
    """

    entries: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInput("matrix entries must be finite")
        self.entries = 0.5 * (a + a.T)
        self.dim = a.shape[0]


@dataclass
class EigResult:
    """Eigenpairs of a symmetric matrix, ordered by descending eigenvalue.

    Attributes
    ----------
    eigenvalues : ndarray of shape (k,)
    eigenvectors : ndarray of shape (dim, k)
        Orthonormal columns; in each column the entry of largest absolute
        value is non-negative (ties broken by lowest index).
    effective_rank : int
        Number of eigenvalues above ``RCOND * max(|lambda_1|, eps)``.
    shortfall : bool
        Set by :func:`truncate` when fewer pairs were available than
        requested.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    effective_rank: int
    shortfall: bool = False

    @property
    def cutoff(self) -> float:
        lead = abs(self.eigenvalues[0]) if self.eigenvalues.size else 0.0
        return RCOND * max(lead, np.finfo(float).eps)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Largest-|entry| component of each column made non-negative; argmax
    # breaks ties toward the lowest index.
    if vectors.size == 0:
        return vectors
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(m: SymMatrix) -> EigResult:
    """Full eigendecomposition with deterministic ordering and signs.

    Eigenvalues come out in descending order; each eigenvector is flipped
    so its largest-magnitude entry is non-negative. Two calls on the same
    matrix produce bit-identical results.
    """
    values, vectors = np.linalg.eigh(m.entries)
    order = np.arange(values.size)[::-1]  # eigh is ascending
    values = values[order]
    vectors = _fix_signs(vectors[:, order])
    lead = abs(values[0]) if values.size else 0.0
    cutoff = RCOND * max(lead, np.finfo(float).eps)
    rank = int(np.sum(values > cutoff))
    return EigResult(values, vectors, rank)


def truncate(e: EigResult, n_latent: int) -> EigResult:
    """Keep the ``n_latent`` leading eigenpairs.

    When ``n_latent`` exceeds the effective rank, only ``effective_rank``
    pairs are kept and the result is flagged with ``shortfall=True``.
    """
    if n_latent < 1:
        raise InvalidInput(f"n_latent must be >= 1, got {n_latent}")
    keep = min(n_latent, e.effective_rank)
    return EigResult(
        e.eigenvalues[:keep].copy(),
        e.eigenvectors[:, :keep].copy(),
        keep,
        shortfall=keep < n_latent,
    )


def mat_power(m: SymMatrix, p: float) -> np.ndarray:
    """Symmetric matrix power ``V diag(lambda^p) V^T``.

    Eigenvalues below the effective-rank cutoff are treated as exactly
    zero, and ``0**p`` for negative ``p`` is set to zero, so negative and
    fractional powers act as pseudo-inverses on the numerically nonzero
    eigenspace.

    Raises
    ------
    NotPSD
        If ``p`` is negative or fractional and ``m`` has an eigenvalue
        below ``-1e-10 * ||m||_F``.
    """
    e = sym_eig(m)
    if e.eigenvalues.size == 0:
        return np.zeros((0, 0))
    needs_psd = p < 0 or p != round(p)
    if needs_psd:
        tol = 1e-10 * np.linalg.norm(m.entries, "fro")
        smallest = e.eigenvalues[-1]
        if smallest < -max(tol, np.finfo(float).eps):
            raise NotPSD(
                f"matrix has eigenvalue {smallest:.3e} below -1e-10*||m||; "
                f"cannot raise to power {p}"
            )
        values = np.where(e.eigenvalues > e.cutoff, e.eigenvalues, 0.0)
    else:
        # Integer non-negative powers keep genuinely negative eigenvalues.
        values = np.where(np.abs(e.eigenvalues) > e.cutoff, e.eigenvalues, 0.0)
    powered = np.where(values != 0.0, values, 1.0) ** p
    powered = np.where(values != 0.0, powered, 0.0)
    result = (e.eigenvectors * powered) @ e.eigenvectors.T
    return 0.5 * (result + result.T)


def reg_solve(a: SymMatrix, b: np.ndarray, lam: float) -> np.ndarray:
    """Solve ``(a + lam * I) x = b`` for symmetric ``a``.

    With ``lam == 0`` this is the pseudo-inverse of ``a`` applied to
    ``b``, following the same eigenvalue cutoff as :func:`mat_power`.
    """
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.dim:
        raise InvalidInput(
            f"shape mismatch: matrix dim {a.dim}, right-hand side has "
            f"{b.shape[0]} rows"
        )
    if lam < 0:
        raise InvalidInput(f"regularization must be non-negative, got {lam}")
    if lam == 0.0:
        return mat_power(a, -1) @ b
    return np.linalg.solve(a.entries + lam * np.eye(a.dim), b)
