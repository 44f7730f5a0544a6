"""End-to-end command line driver.

Ingests CSV data, splits it deterministically, fits any model of the
family, optionally sweeps the mixing parameter, and writes a map
document (JSON) plus a loss table (CSV) under an output prefix.

With ``--groups`` the rows are treated as local environments belonging
to structures. Regression methods then operate at structure level on
summed features or kernels; latent-map methods first fit that
structure-level regression, partition its predictions back onto the
environments, and use those as the targets of an environment-level map.
"""

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

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
    transform_kernel,
)
from .kernels import (
    KernelSpec,
    default_gamma,
    fps_select,
    kernel_matrix,
    nystrom_features_from_kernels,
)
from .linear_models import fit_pca, fit_pcovr, fit_ridge, transform
from .losses import LossReport, loss_proj, loss_proj_kernel, loss_regr, select_alpha
from .mapdoc import build_map_document, write_map_document
from .numerics import SymMatrix, reg_solve
from .preprocess import (
    center_full_kernel,
    center_sparse_kernel,
    fit_feature_scaler,
    fit_full_kernel_centerer,
    fit_sparse_kernel_centerer,
    fit_target_scaler,
    transform_features,
    transform_targets,
)

__all__ = ["RunConfig", "parse_config", "execute", "main"]

METHODS = (
    "pca",
    "mds",
    "ridge",
    "pcovr",
    "kpca",
    "krr",
    "kpcovr",
    "sparse-kpca",
    "sparse-krr",
    "sparse-kpcovr",
)
PCOVR_FAMILY = {"pcovr", "kpcovr", "sparse-kpcovr"}
SPARSE_METHODS = {"sparse-kpca", "sparse-krr", "sparse-kpcovr"}
FULL_KERNEL_METHODS = {"mds", "kpca", "krr", "kpcovr"}
KERNEL_FLAG_METHODS = {"kpca", "krr", "kpcovr"} | SPARSE_METHODS
REGRESSION_ONLY = {"ridge", "krr", "sparse-krr"}
LINEAR_METHODS = {"pca", "ridge", "pcovr"}


@dataclass
class RunConfig:
    """Validated run parameters; invariants are enforced at parse time."""

    features_path: str
    targets_path: str | None
    targets_prefix: bool
    method: str
    out_prefix: str
    alpha: float | None = None
    alpha_grid: tuple | None = None  # (start, stop, count)
    n_latent: int | None = None
    lam: float = 0.0
    kernel: str | None = None
    gamma: float | None = None
    m_active: int | None = None
    fps_start: int = 0
    split_frac: float = 0.5
    seed: int = 0
    groups: str | None = None
    per_atom_targets: bool = False
    write_alpha_maps: bool = False


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kpcovr",
        description=(
            "Fit structure-property map models (PCA/MDS/ridge/PCovR and "
            "kernelized variants) on delimited numeric data."
        ),
    )
    parser.add_argument(
        "inputs",
        nargs="+",
        metavar="FILE",
        help=(
            "feature CSV and target CSV sharing row order, or one CSV "
            "with 'targets:'-prefixed columns (see --targets-prefix)"
        ),
    )
    parser.add_argument(
        "--targets-prefix",
        action="store_true",
        help="single input file; columns named 'targets:*' are targets",
    )
    parser.add_argument("--method", required=True, choices=METHODS)
    parser.add_argument("--alpha", type=float, help="mixing parameter in [0, 1]")
    parser.add_argument(
        "--alpha-grid",
        metavar="A:B:N",
        help="sweep N uniformly spaced mixing parameters from A to B",
    )
    parser.add_argument("--n-latent", type=int, help="latent space dimension")
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=0.0,
        help="ridge regularization (default 0: pseudo-inverse solution)",
    )
    parser.add_argument("--kernel", choices=("linear", "rbf"))
    parser.add_argument("--gamma", type=float, help="rbf kernel width")
    parser.add_argument("--m-active", type=int, help="active set size")
    parser.add_argument(
        "--fps-start", type=int, help="first index of the FPS selection"
    )
    parser.add_argument("--split-frac", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--groups", metavar="COLUMN", help="header name of the structure-id column"
    )
    parser.add_argument(
        "--per-atom-targets",
        action="store_true",
        help="multiply ingested targets by structure size",
    )
    parser.add_argument(
        "--out", required=True, metavar="PREFIX", help="output path prefix"
    )
    parser.add_argument(
        "--write-alpha-maps",
        action="store_true",
        help="with --alpha-grid, write one map document per grid point",
    )
    return parser


def _parse_alpha_grid(text, error):
    parts = text.split(":")
    if len(parts) != 3:
        error(f"--alpha-grid must look like A:B:N, got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        error(f"--alpha-grid must look like A:B:N, got {text!r}")
    if not (0.0 <= start <= stop <= 1.0):
        error("--alpha-grid endpoints must satisfy 0 <= A <= B <= 1")
    if count < 1 or (count == 1 and start != stop):
        error("--alpha-grid needs N >= 2, or N = 1 with A == B")
    return (start, stop, count)


def parse_config(argv=None) -> RunConfig:
    parser = _build_parser()
    args = parser.parse_args(argv)
    method = args.method

    if len(args.inputs) > 2:
        parser.error("at most two input files (features, targets)")
    if args.targets_prefix and len(args.inputs) != 1:
        parser.error("--targets-prefix takes exactly one input file")
    if not args.targets_prefix and len(args.inputs) != 2:
        parser.error("need a feature file and a target file, or --targets-prefix")

    alpha_grid = None
    if method in PCOVR_FAMILY:
        if (args.alpha is None) == (args.alpha_grid is None):
            parser.error(f"method {method} needs exactly one of --alpha/--alpha-grid")
        if args.alpha is not None and not 0.0 <= args.alpha <= 1.0:
            parser.error(f"--alpha must lie in [0, 1], got {args.alpha}")
        if args.alpha_grid is not None:
            alpha_grid = _parse_alpha_grid(args.alpha_grid, parser.error)
    elif args.alpha is not None or args.alpha_grid is not None:
        parser.error(f"--alpha/--alpha-grid apply only to {sorted(PCOVR_FAMILY)}")

    if method in REGRESSION_ONLY:
        if args.n_latent is not None:
            parser.error(f"--n-latent does not apply to {method}")
    else:
        if args.n_latent is None:
            parser.error(f"method {method} requires --n-latent")
        if args.n_latent < 1:
            parser.error("--n-latent must be >= 1")

    if method in KERNEL_FLAG_METHODS:
        kernel = args.kernel or "linear"
        if args.gamma is not None:
            if kernel != "rbf":
                parser.error("--gamma applies only to --kernel rbf")
            if args.gamma <= 0:
                parser.error("--gamma must be > 0")
    else:
        kernel = None
        if args.kernel is not None or args.gamma is not None:
            parser.error(f"--kernel/--gamma do not apply to {method}")

    if method in SPARSE_METHODS:
        if args.m_active is None:
            parser.error(f"method {method} requires --m-active")
        if args.m_active < 1:
            parser.error("--m-active must be >= 1")
        fps_start = args.fps_start if args.fps_start is not None else 0
        if fps_start < 0:
            parser.error("--fps-start must be >= 0")
    else:
        if args.m_active is not None or args.fps_start is not None:
            parser.error(f"--m-active/--fps-start apply only to sparse methods")
        fps_start = 0

    if not 0.0 < args.split_frac < 1.0:
        parser.error("--split-frac must lie in (0, 1)")
    if args.lam < 0:
        parser.error("--lambda must be >= 0")
    if args.per_atom_targets and args.groups is None:
        parser.error("--per-atom-targets requires --groups")

    return RunConfig(
        features_path=args.inputs[0],
        targets_path=args.inputs[1] if len(args.inputs) == 2 else None,
        targets_prefix=args.targets_prefix,
        method=method,
        out_prefix=args.out,
        alpha=args.alpha,
        alpha_grid=alpha_grid,
        n_latent=args.n_latent,
        lam=args.lam,
        kernel=kernel,
        gamma=args.gamma,
        m_active=args.m_active,
        fps_start=fps_start,
        split_frac=args.split_frac,
        seed=args.seed,
        groups=args.groups,
        per_atom_targets=args.per_atom_targets,
        write_alpha_maps=args.write_alpha_maps,
    )


def _resolve_spec(config: RunConfig, x_train_scaled) -> KernelSpec | None:
    """Kernel spec for the run; rbf gamma falls back to the train heuristic."""
    if config.method == "mds":
        return KernelSpec("linear")
    if config.method in LINEAR_METHODS:
        return None
    if config.kernel == "rbf":
        gamma = config.gamma if config.gamma is not None else default_gamma(x_train_scaled)
        return KernelSpec("rbf", gamma=gamma)
    return KernelSpec("linear")


def _wrap_krr(weights, training_t, lam) -> KernelFittedProjector:
    # Regression-only models are presented with an identity latent map,
    # so the latent coordinates are the centered kernel rows themselves.
    n_ref = weights.shape[0]
    return KernelFittedProjector(
        method="krr",
        p_k_to_t=np.eye(n_ref),
        p_t_to_y=weights,
        training_t=np.asarray(training_t, dtype=float),
        n_latent=n_ref,
        alpha=0.0,
        lam=lam,
    )


class _Pipeline:
    """Prepared state for one run; ``evaluate`` fits at one alpha.

    Preparation (scalers, kernels, FPS selection) happens once so an
    alpha sweep reuses identical inputs for every grid point. Kernel
    blocks may be supplied prebuilt (``raw_full_kernels`` /
    ``raw_sparse_kernels``) for structure-level runs whose kernels are
    sums over environment kernels rather than kernels of features.
    """

    def __init__(
        self,
        config: RunConfig,
        y_raw,
        train_idx,
        test_idx,
        *,
        x_raw=None,
        spec: KernelSpec | None = None,
        raw_full_kernels=None,
        raw_sparse_kernels=None,
        active_global=None,
    ):
        self.config = config
        self.method = config.method
        self.train_idx = np.asarray(train_idx)
        self.test_idx = np.asarray(test_idx)
        y_raw = np.asarray(y_raw, dtype=float)
        self.n_samples = y_raw.shape[0]

        self.target_scaler = fit_target_scaler(y_raw[self.train_idx])
        y_scaled = transform_targets(self.target_scaler, y_raw)
        self.ys_train = y_scaled[self.train_idx]
        self.ys_test = y_scaled[self.test_idx]

        self.xs_train = self.xs_test = None
        self.feature_scaler = None
        if x_raw is not None:
            x_raw = np.asarray(x_raw, dtype=float)
            self.feature_scaler = fit_feature_scaler(x_raw[self.train_idx])
            x_scaled = transform_features(self.feature_scaler, x_raw)
            self.xs_train = x_scaled[self.train_idx]
            self.xs_test = x_scaled[self.test_idx]

        self.spec = spec if spec is not None else (
            _resolve_spec(config, self.xs_train) if self.method not in LINEAR_METHODS else None
        )
        self.active_global = active_global

        if self.method in FULL_KERNEL_METHODS:
            if raw_full_kernels is None:
                k_tr = kernel_matrix(self.spec, self.xs_train, self.xs_train)
                k_cross = kernel_matrix(self.spec, self.xs_test, self.xs_train)
                k_vv = kernel_matrix(self.spec, self.xs_test, self.xs_test)
            else:
                k_tr, k_cross, k_vv = raw_full_kernels
            self.centerer = fit_full_kernel_centerer(k_tr)
            self.k_train = SymMatrix(
                center_full_kernel(self.centerer, k_tr, True, True)
            )
            self.k_cross = center_full_kernel(self.centerer, k_cross, False, True)
            self.k_test = center_full_kernel(
                self.centerer,
                k_vv,
                False,
                False,
                rows_vs_train=k_cross,
                cols_vs_train=k_cross,
            )
        elif self.method in SPARSE_METHODS:
            if raw_sparse_kernels is None:
                active_local = fps_select(
                    self.xs_train, config.m_active, config.fps_start
                )
                self.active_global = self.train_idx[active_local]
                x_active = self.xs_train[active_local]
                k_nm = kernel_matrix(self.spec, self.xs_train, x_active)
                k_vm = kernel_matrix(self.spec, self.xs_test, x_active)
                k_mm = SymMatrix(kernel_matrix(self.spec, x_active, x_active))
            else:
                k_nm, k_vm, k_mm = raw_sparse_kernels
            self.centerer = fit_sparse_kernel_centerer(k_nm, k_mm)
            self.k_nm = center_sparse_kernel(self.centerer, k_nm, k_mm)
            self.k_vm = center_sparse_kernel(self.centerer, k_vm, k_mm)
            self.k_mm = k_mm
            self.phi = nystrom_features_from_kernels(
                self.k_nm, k_mm, self.active_global
            )
            self.phi_test = self.k_vm @ self.phi.whitener

    # -- fitting ---------------------------------------------------------

    def _fit(self, alpha):
        m, cfg = self.method, self.config
        if m == "pca":
            return fit_pca(self.xs_train, cfg.n_latent, y=self.ys_train)
        if m == "ridge":
            return fit_ridge(self.xs_train, self.ys_train, cfg.lam)
        if m == "pcovr":
            return fit_pcovr(self.xs_train, self.ys_train, alpha, cfg.n_latent, cfg.lam)
        if m in ("mds", "kpca"):
            return fit_kpca(self.k_train, cfg.n_latent, y=self.ys_train)
        if m == "krr":
            weights = fit_krr(self.k_train, self.ys_train, cfg.lam)
            return _wrap_krr(weights, self.k_train.entries, cfg.lam)
        if m == "kpcovr":
            return fit_kpcovr(self.k_train, self.ys_train, alpha, cfg.n_latent, cfg.lam)
        if m == "sparse-kpca":
            return fit_sparse_kpca(self.phi, cfg.n_latent, y=self.ys_train)
        if m == "sparse-krr":
            weights = fit_sparse_krr(self.k_nm, self.k_mm, self.ys_train, cfg.lam)
            return _wrap_krr(weights, self.k_nm, cfg.lam)
        if m == "sparse-kpcovr":
            return fit_sparse_kpcovr(
                self.phi, y=self.ys_train, alpha=alpha,
                n_latent=cfg.n_latent, lam=cfg.lam,
            )
        raise InvalidInput(f"unknown method {m!r}")

    def _projection_losses(self, model, t_train, t_test):
        if self.method in REGRESSION_ONLY:
            return 0.0, 0.0
        if self.method in LINEAR_METHODS:
            return (
                loss_proj(self.xs_train, t_train, model.p_t_to_in),
                loss_proj(self.xs_test, t_test, model.p_t_to_in),
            )
        if self.method in FULL_KERNEL_METHODS:
            k = self.k_train.entries
            return (
                loss_proj_kernel(k, k, k, t_train, t_train),
                loss_proj_kernel(self.k_test, self.k_cross, k, t_train, t_test),
            )
        # Sparse latent models reconstruct the explicit Nystrom features.
        p_t_to_phi = reg_solve(
            SymMatrix(t_train.T @ t_train), t_train.T @ self.phi.phi_nm, 0.0
        )
        return (
            loss_proj(self.phi.phi_nm, t_train, p_t_to_phi),
            loss_proj(self.phi_test, t_test, p_t_to_phi),
        )

    def evaluate(self, alpha):
        """Fit at one mixing parameter and score both splits."""
        model = self._fit(alpha)
        t_train = model.training_t
        if self.method in LINEAR_METHODS:
            t_test = transform(model, self.xs_test)
        elif self.method in FULL_KERNEL_METHODS:
            t_test = transform_kernel(model, self.k_cross)
        else:
            t_test = transform_kernel(model, self.k_vm)
        yhat_train = t_train @ model.p_t_to_y
        yhat_test = t_test @ model.p_t_to_y
        lp_train, lp_test = self._projection_losses(model, t_train, t_test)
        row_alpha = alpha if alpha is not None else model.alpha
        k_eff = t_train.shape[1]
        reports = (
            LossReport(lp_train, loss_regr(self.ys_train, yhat_train),
                       row_alpha, k_eff, "train"),
            LossReport(lp_test, loss_regr(self.ys_test, yhat_test),
                       row_alpha, k_eff, "test"),
        )
        return model, t_train, t_test, yhat_train, yhat_test, reports

    # -- assembly --------------------------------------------------------

    def assemble(self, t_train, t_test, yhat_train, yhat_test):
        """Scatter split-level results back into sample order."""
        k = t_train.shape[1]
        p = yhat_train.shape[1]
        t_all = np.zeros((self.n_samples, k))
        yhat_all = np.zeros((self.n_samples, p))
        y_all = np.zeros((self.n_samples, p))
        splits = np.empty(self.n_samples, dtype=object)
        t_all[self.train_idx], t_all[self.test_idx] = t_train, t_test
        yhat_all[self.train_idx], yhat_all[self.test_idx] = yhat_train, yhat_test
        y_all[self.train_idx], y_all[self.test_idx] = self.ys_train, self.ys_test
        splits[self.train_idx] = "train"
        splits[self.test_idx] = "test"
        return t_all, y_all, yhat_all, list(splits)


# -- grouped runs ---------------------------------------------------------


def _structure_targets(ds: DataSet):
    """Per-structure targets from its environment rows, which must agree."""
    g = ds.group_index
    y_struct = np.empty((g.n_structures, ds.y.shape[1]))
    for s in range(g.n_structures):
        rows = ds.y[g.assignments == s]
        spread = np.max(np.abs(rows - rows[0]))
        if spread > 1e-8 * max(1.0, float(np.max(np.abs(rows[0])))):
            raise IngestError(
                f"rows of structure {s} carry different target values"
            )
        y_struct[s] = rows[0]
    return y_struct


def _structure_split(g: GroupIndex, train_idx, test_idx):
    tr = np.unique(g.assignments[train_idx])
    te = np.unique(g.assignments[test_idx])
    return tr, te


def _fit_structure_regression(config, ds, tr_env, te_env, y_struct, tr_s):
    """Structure-level regression of the run's family, plus the raw
    environment-level inputs needed to partition its predictions."""
    g = ds.group_index
    ts = fit_target_scaler(y_struct[tr_s])
    ys_tr = transform_targets(ts, y_struct[tr_s])

    if config.method in LINEAR_METHODS:
        x_struct = sum_features(ds.x, g)
        scaler = fit_feature_scaler(x_struct[tr_s])
        model = fit_ridge(
            transform_features(scaler, x_struct[tr_s]), ys_tr, config.lam
        )
        model.feature_scaler = scaler
        model.target_scaler = ts
        return model, ds.x

    env_scaler = fit_feature_scaler(ds.x[tr_env])
    xe = transform_features(env_scaler, ds.x)
    spec = _resolve_spec(config, xe[tr_env])

    if config.method in FULL_KERNEL_METHODS:
        k_env = kernel_matrix(spec, xe, xe)
        k_struct = sum_kernel(k_env, g, g)
        k_tr_raw = k_struct[np.ix_(tr_s, tr_s)]
        centerer = fit_full_kernel_centerer(k_tr_raw)
        k_c = SymMatrix(center_full_kernel(centerer, k_tr_raw, True, True))
        model = _wrap_krr(fit_krr(k_c, ys_tr, config.lam), k_c.entries, config.lam)
        model.centerer = centerer
        model.target_scaler = ts
        env_inputs = sum_kernel(k_env, None, g)[:, tr_s]
        return model, env_inputs

    active_local = fps_select(xe[tr_env], config.m_active, config.fps_start)
    active_env = np.asarray(tr_env)[active_local]
    k_env_m = kernel_matrix(spec, xe, xe[active_env])
    k_mm = SymMatrix(kernel_matrix(spec, xe[active_env], xe[active_env]))
    k_nm_struct = sum_kernel(k_env_m, g, None)
    centerer = fit_sparse_kernel_centerer(k_nm_struct[tr_s], k_mm)
    k_nm_c = center_sparse_kernel(centerer, k_nm_struct[tr_s], k_mm)
    weights = fit_sparse_krr(k_nm_c, k_mm, ys_tr, config.lam)
    model = _wrap_krr(weights, k_nm_c, config.lam)
    model.centerer = centerer
    model.target_scaler = ts
    return model, k_env_m


def _grouped_regression_pipeline(config, ds, tr_env, te_env, y_struct, tr_s, te_s):
    """Structure-level pipeline for ridge/krr/sparse-krr."""
    g = ds.group_index
    if config.method == "ridge":
        return _Pipeline(
            config, y_struct, tr_s, te_s, x_raw=sum_features(ds.x, g)
        )
    env_scaler = fit_feature_scaler(ds.x[tr_env])
    xe = transform_features(env_scaler, ds.x)
    spec = _resolve_spec(config, xe[tr_env])
    if config.method == "krr":
        k_env = kernel_matrix(spec, xe, xe)
        k_struct = sum_kernel(k_env, g, g)
        blocks = (
            k_struct[np.ix_(tr_s, tr_s)],
            k_struct[np.ix_(te_s, tr_s)],
            k_struct[np.ix_(te_s, te_s)],
        )
        return _Pipeline(
            config, y_struct, tr_s, te_s, spec=spec, raw_full_kernels=blocks
        )
    active_local = fps_select(xe[tr_env], config.m_active, config.fps_start)
    active_env = np.asarray(tr_env)[active_local]
    k_env_m = kernel_matrix(spec, xe, xe[active_env])
    k_mm = SymMatrix(kernel_matrix(spec, xe[active_env], xe[active_env]))
    k_nm_struct = sum_kernel(k_env_m, g, None)
    blocks = (k_nm_struct[tr_s], k_nm_struct[te_s], k_mm)
    return _Pipeline(
        config,
        y_struct,
        tr_s,
        te_s,
        spec=spec,
        raw_sparse_kernels=blocks,
        active_global=active_env,
    )


# -- top level ------------------------------------------------------------


def _alphas(config: RunConfig):
    if config.alpha_grid is not None:
        start, stop, count = config.alpha_grid
        return np.linspace(start, stop, count)
    return None


def _meta(config, pipeline, alpha, reports, grouped_level=None, alpha_grid=None):
    spec = pipeline.spec
    kernel = None
    if spec is not None and config.method not in ("mds",):
        kernel = {"family": spec.family}
        if spec.family == "rbf":
            kernel["gamma"] = float(spec.gamma)
    losses = {}
    for report in reports:
        losses[report.split] = {
            "l_proj": report.l_proj,
            "l_regr": report.l_regr,
            "l_total": report.l_total,
        }
    meta = {
        "method": config.method,
        "alpha": float(alpha) if alpha is not None else None,
        "lambda": float(config.lam),
        "n_latent": config.n_latent,
        "kernel": kernel,
        "losses": losses,
        "split_frac": float(config.split_frac),
        "seed": int(config.seed),
        "n_train": int(len(pipeline.train_idx)),
        "n_test": int(len(pipeline.test_idx)),
    }
    if alpha_grid is not None:
        meta["alpha_grid"] = [float(alpha_grid[0]), float(alpha_grid[1]), int(alpha_grid[2])]
    if config.method in SPARSE_METHODS:
        meta["m_active"] = int(config.m_active)
        meta["fps_start"] = int(config.fps_start)
        meta["active_indices"] = [int(i) for i in pipeline.active_global]
    if grouped_level is not None:
        meta["groups"] = {"column": config.groups, "level": grouped_level}
    return meta


def execute(config: RunConfig):
    """Run one configuration end to end, writing all output files.

    Returns the map document and the loss-table rows.
    """
    ds = ingest(
        config.features_path,
        config.targets_path,
        group_column=config.groups,
        targets_prefix=config.targets_prefix,
        per_atom_targets=config.per_atom_targets,
    )
    train_idx, test_idx = split_dataset(ds, config.split_frac, config.seed)

    grouped_level = None
    point_groups = None
    if config.groups is not None:
        g = ds.group_index
        y_struct = _structure_targets(ds)
        tr_s, te_s = _structure_split(g, train_idx, test_idx)
        uniq_labels = np.unique(ds.group_labels)
        if config.method in REGRESSION_ONLY:
            grouped_level = "structure"
            point_groups = uniq_labels
            pipeline = _grouped_regression_pipeline(
                config, ds, train_idx, test_idx, y_struct, tr_s, te_s
            )
        else:
            grouped_level = "environment"
            point_groups = ds.group_labels
            struct_model, env_inputs = _fit_structure_regression(
                config, ds, train_idx, test_idx, y_struct, tr_s
            )
            y_env = partition_predictions(struct_model, env_inputs, g)
            pipeline = _Pipeline(config, y_env, train_idx, test_idx, x_raw=ds.x)
    else:
        pipeline = _Pipeline(config, ds.y, train_idx, test_idx, x_raw=ds.x)

    alphas = _alphas(config)
    all_reports = []
    if alphas is None:
        _, t_tr, t_te, yh_tr, yh_te, reports = pipeline.evaluate(config.alpha)
        all_reports.extend(reports)
        doc_alpha = config.alpha if config.alpha is not None else reports[0].alpha
        meta = _meta(config, pipeline, doc_alpha, reports, grouped_level)
        doc = build_map_document(
            meta, *pipeline.assemble(t_tr, t_te, yh_tr, yh_te), point_groups
        )
        per_alpha_docs = {}
    else:
        results = {}
        test_reports = []
        for alpha in alphas:
            _, t_tr, t_te, yh_tr, yh_te, reports = pipeline.evaluate(float(alpha))
            all_reports.extend(reports)
            test_reports.append(reports[1])
            results[float(alpha)] = (t_tr, t_te, yh_tr, yh_te, reports)
        alpha_star = select_alpha(test_reports)
        best = results[alpha_star]
        star_row = LossReport(
            best[4][1].l_proj,
            best[4][1].l_regr,
            alpha_star,
            best[4][1].n_latent,
            "optimal",
        )
        all_reports.append(star_row)
        meta = _meta(
            config, pipeline, alpha_star, best[4], grouped_level, config.alpha_grid
        )
        doc = build_map_document(
            meta, *pipeline.assemble(*best[:4]), point_groups
        )
        per_alpha_docs = {}
        if config.write_alpha_maps:
            for alpha, res in results.items():
                a_meta = _meta(config, pipeline, alpha, res[4], grouped_level)
                per_alpha_docs[alpha] = build_map_document(
                    a_meta, *pipeline.assemble(*res[:4]), point_groups
                )

    write_map_document(doc, f"{config.out_prefix}.map.json")
    _write_loss_table(f"{config.out_prefix}.losses.csv", all_reports)
    for alpha, extra in per_alpha_docs.items():
        write_map_document(extra, f"{config.out_prefix}.alpha-{alpha:g}.map.json")
    return doc, all_reports


def _write_loss_table(path, reports):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["alpha", "n_latent", "split", "l_proj", "l_regr", "l_total"])
        for r in reports:
            writer.writerow(
                [
                    format(r.alpha, ".17g"),
                    r.n_latent,
                    r.split,
                    format(r.l_proj, ".17g"),
                    format(r.l_regr, ".17g"),
                    format(r.l_total, ".17g"),
                ]
            )


def main(argv=None) -> int:
    config = parse_config(argv)
    try:
        execute(config)
    except (InvalidInput, InvalidAlpha, NotPSD, DegenerateInput, IngestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
