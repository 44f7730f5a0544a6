"""Principal covariates regression and kernelized variants.

Builds low-dimensional structure-property maps whose axes balance
variance retention against regression of target properties, with a
mixing parameter sliding between pure projection (PCA/KPCA) and pure
regression (ridge/KRR). Includes sparse kernel variants on an active
set, additive per-environment aggregation, and a CLI producing
deterministic map documents and loss tables.
"""

from .aggregate import GroupIndex, partition_predictions, sum_features, sum_kernel
from .data import DataSet, ingest, split_dataset
from .errors import (
    DegenerateInput,
    IngestError,
    InvalidAlpha,
    InvalidInput,
    NotPSD,
)
from .kernel_models import (
    KernelFittedProjector,
    fit_kpca,
    fit_kpcovr,
    fit_krr,
    fit_sparse_kpca,
    fit_sparse_kpcovr,
    fit_sparse_krr,
    predict_kernel,
    transform_kernel,
)
from .kernels import (
    KernelSpec,
    NystromFeatures,
    default_gamma,
    fps_select,
    kernel_matrix,
    kernel_value,
    nystrom_features,
    nystrom_features_from_kernels,
)
from .linear_models import (
    FittedProjector,
    fit_mds,
    fit_mds_from_gram,
    fit_pca,
    fit_pcovr,
    fit_pcovr_feature,
    fit_pcovr_sample,
    fit_ridge,
    predict,
    reconstruct,
    transform,
)
from .losses import (
    LossReport,
    loss_gram,
    loss_proj,
    loss_proj_kernel,
    loss_regr,
    select_alpha,
)
from .mapdoc import (
    MapDocument,
    build_map_document,
    map_document_to_json,
    read_map_document,
    rescore_map_document,
    write_map_document,
)
from .numerics import (
    EigResult,
    SymMatrix,
    mat_power,
    reg_solve,
    sym_eig,
    truncate,
)
from .preprocess import (
    FeatureScaler,
    KernelCenterer,
    TargetScaler,
    center_full_kernel,
    center_sparse_kernel,
    fit_feature_scaler,
    fit_full_kernel_centerer,
    fit_sparse_kernel_centerer,
    fit_target_scaler,
    inverse_transform_targets,
    transform_features,
    transform_targets,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateInput",
    "IngestError",
    "InvalidAlpha",
    "InvalidInput",
    "NotPSD",
    "SymMatrix",
    "EigResult",
    "sym_eig",
    "truncate",
    "mat_power",
    "reg_solve",
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
    "KernelSpec",
    "NystromFeatures",
    "default_gamma",
    "kernel_value",
    "kernel_matrix",
    "fps_select",
    "nystrom_features",
    "nystrom_features_from_kernels",
    "FittedProjector",
    "fit_pca",
    "fit_mds",
    "fit_mds_from_gram",
    "fit_ridge",
    "fit_pcovr",
    "fit_pcovr_sample",
    "fit_pcovr_feature",
    "transform",
    "predict",
    "reconstruct",
    "KernelFittedProjector",
    "fit_kpca",
    "fit_krr",
    "fit_kpcovr",
    "fit_sparse_kpca",
    "fit_sparse_krr",
    "fit_sparse_kpcovr",
    "transform_kernel",
    "predict_kernel",
    "LossReport",
    "loss_proj",
    "loss_regr",
    "loss_gram",
    "loss_proj_kernel",
    "select_alpha",
    "GroupIndex",
    "sum_features",
    "sum_kernel",
    "partition_predictions",
    "DataSet",
    "ingest",
    "split_dataset",
    "MapDocument",
    "build_map_document",
    "map_document_to_json",
    "write_map_document",
    "read_map_document",
    "rescore_map_document",
]
