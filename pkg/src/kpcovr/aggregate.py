"""Environment-to-structure additive modeling.

Extensive structure properties are sums over local environment
contributions, so structure-level features (kernels) are plain sums of
environment rows (kernel blocks). A structure-level regression can then
be partitioned back into per-environment predictions whose group sums
reproduce the structure predictions; those per-environment predictions
serve as the property matrix for local latent maps.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .kernel_models import KernelFittedProjector
from .linear_models import FittedProjector

__all__ = [
    "GroupIndex",
    "sum_features",
    "sum_kernel",
    "partition_predictions",
]


@dataclass
class GroupIndex:
    """Assignment of environments to structures.

    assignments[i] is the structure id of environment i; ids must cover
    [0, n_structures) with every structure non-empty.
    """

    assignments: np.ndarray
    n_structures: int

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=int)
        if a.ndim != 1 or a.size == 0:
            raise InvalidInput("assignments must be a non-empty 1-d vector")
        if a.min() < 0 or a.max() >= self.n_structures:
            raise InvalidInput(
                f"structure ids must lie in [0, {self.n_structures})"
            )
        present = np.unique(a)
        if present.size != self.n_structures:
            missing = sorted(set(range(self.n_structures)) - set(present))
            raise InvalidInput(f"empty structures: {missing}")
        self.assignments = a

    @classmethod
    def from_labels(cls, labels):
        """Build from arbitrary integer labels, densified in sorted order."""
        labels = np.asarray(labels)
        uniq, dense = np.unique(labels, return_inverse=True)
        return cls(dense, uniq.size), uniq

    @property
    def n_environments(self) -> int:
        return self.assignments.size

    def indicator(self) -> np.ndarray:
        """(n_structures, n_environments) 0/1 membership matrix."""
        m = np.zeros((self.n_structures, self.n_environments))
        m[self.assignments, np.arange(self.n_environments)] = 1.0
        return m

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.n_structures)


def sum_features(x_env, g: GroupIndex) -> np.ndarray:
    """Structure features as sums of their environment rows."""
    x_env = np.asarray(x_env, dtype=float)
    if x_env.shape[0] != g.n_environments:
        raise InvalidInput(
            f"x_env has {x_env.shape[0]} rows but the index covers "
            f"{g.n_environments} environments"
        )
    return g.indicator() @ x_env


def sum_kernel(k_env, g_rows: GroupIndex | None, g_cols: GroupIndex | None) -> np.ndarray:
    """Structure kernel as block sums of an environment kernel.

    Either side may be None to leave that axis at environment resolution
    (used for cross-kernels against an active set of environments).
    """
    k = np.asarray(k_env, dtype=float)
    if g_rows is not None:
        if k.shape[0] != g_rows.n_environments:
            raise InvalidInput("row count does not match the row index")
        k = g_rows.indicator() @ k
    if g_cols is not None:
        if k.shape[1] != g_cols.n_environments:
            raise InvalidInput("column count does not match the column index")
        k = k @ g_cols.indicator().T
    return k


def _linear_partition(model: FittedProjector, x_env, g: GroupIndex):
    scaler = model.feature_scaler
    if scaler is None:
        raise InvalidInput(
            "model is not additive-compatible: no feature scaler attached"
        )
    x_env = np.asarray(x_env, dtype=float)
    if x_env.shape[1] != scaler.column_means.shape[0]:
        raise InvalidInput("environment features do not match the scaler")
    w = model.p_in_to_t @ model.p_t_to_y
    per_env = (x_env * scaler.scale) @ w
    offset = -(scaler.column_means * scaler.scale) @ w
    return per_env, offset


def _kernel_partition(model: KernelFittedProjector, k_env_cross, g: GroupIndex):
    centerer = model.centerer
    if centerer is None:
        raise InvalidInput(
            "model is not additive-compatible: no kernel centerer attached"
        )
    k = np.asarray(k_env_cross, dtype=float)
    if k.shape[1] != model.n_ref:
        raise InvalidInput(
            f"cross-kernel must have {model.n_ref} columns, got {k.shape[1]}"
        )
    w = model.p_k_to_t @ model.p_t_to_y
    s = centerer.trace_scale
    if centerer.mode == "sparse":
        per_env = (s * k) @ w
        offset = -(s * centerer.train_col_means) @ w
    else:
        # Each environment's own mean against the train structures stays
        # with its row; the train-side offsets belong to the structure.
        row_means = k.mean(axis=1)
        per_env = (s * (k - row_means[:, None])) @ w
        offset = (
            s * (centerer.train_grand_mean - centerer.train_row_means)
        ) @ w
    return per_env, offset


def partition_predictions(model, env_inputs, g: GroupIndex) -> np.ndarray:
    """Per-environment predictions of a structure-level regression.

    The structure prediction is affine in the summed environment inputs:
    a linear term that splits exactly across environments plus a constant
    offset from centering, which is shared evenly within each structure.
    Group sums of the result reproduce the structure predictions.

    Parameters
    ----------
    model : FittedProjector or KernelFittedProjector
        Structure-level regressor with its scaler or centerer attached.
    env_inputs : ndarray
        Raw environment features (linear models) or the raw kernel
        between environments and the model's reference entities.
    g : GroupIndex
    """
    if isinstance(model, FittedProjector):
        per_env, offset = _linear_partition(model, env_inputs, g)
    elif isinstance(model, KernelFittedProjector):
        per_env, offset = _kernel_partition(model, env_inputs, g)
    else:
        raise InvalidInput(
            f"model of type {type(model).__name__} is not additive-compatible"
        )
    if per_env.shape[0] != g.n_environments:
        raise InvalidInput(
            f"env_inputs has {per_env.shape[0]} rows but the index covers "
            f"{g.n_environments} environments"
        )
    shares = g.sizes()[g.assignments][:, None]
    return per_env + offset[None, :] / shares
