"""CSV ingestion and deterministic train/test splitting.

Input files are comma-separated UTF-8 text with a header row and one
sample per row. Features and targets either live in two files sharing
row order, or in a single file where target columns are marked with a
``targets:`` header prefix. An optional integer group column assigns
each row (environment) to a structure.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .aggregate import GroupIndex
from .errors import IngestError, InvalidInput

__all__ = ["DataSet", "ingest", "split_dataset"]

TARGET_PREFIX = "targets:"


@dataclass
class DataSet:
    """Parsed feature/target matrices plus optional group assignments."""

    x: np.ndarray
    y: np.ndarray
    feature_names: list
    target_names: list
    group_index: GroupIndex | None = None
    group_labels: np.ndarray | None = None

    @property
    def n_samples(self) -> int:
        return self.x.shape[0]


def _read_table(path):
    """Read a CSV file into (header, rows of floats-as-strings)."""
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestError(f"cannot open {path}: {exc.strerror}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path} is empty", line=1) from None
        header = [h.strip() for h in header]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise IngestError(
                    f"{path}: expected {len(header)} cells, found {len(row)}",
                    line=line_no,
                )
            rows.append((line_no, row))
    if not rows:
        raise IngestError(f"{path} has a header but no data rows", line=1)
    return header, rows


def _parse_matrix(path, header, rows, columns):
    """Parse the selected columns of a raw table into a float matrix."""
    out = np.empty((len(rows), len(columns)))
    for i, (line_no, row) in enumerate(rows):
        for j, col in enumerate(columns):
            cell = row[col].strip()
            try:
                value = float(cell)
            except ValueError:
                raise IngestError(
                    f"{path}: non-numeric cell {cell!r} in column "
                    f"{header[col]!r}",
                    line=line_no,
                ) from None
            if not np.isfinite(value):
                raise IngestError(
                    f"{path}: non-finite value in column {header[col]!r}",
                    line=line_no,
                )
            out[i, j] = value
    return out


def _parse_groups(path, header, rows, col):
    labels = np.empty(len(rows), dtype=int)
    for i, (line_no, row) in enumerate(rows):
        cell = row[col].strip()
        try:
            value = float(cell)
        except ValueError:
            raise IngestError(
                f"{path}: non-numeric group id {cell!r}", line=line_no
            ) from None
        if not value.is_integer():
            raise IngestError(
                f"{path}: group id {cell!r} is not an integer", line=line_no
            )
        labels[i] = int(value)
    return labels


def ingest(
    features_path,
    targets_path=None,
    group_column=None,
    targets_prefix=False,
    per_atom_targets=False,
) -> DataSet:
    """Load a data set from one or two CSV files.

    Parameters
    ----------
    features_path : str
        CSV with feature columns; may also hold the group column and,
        with ``targets_prefix``, the target columns.
    targets_path : str, optional
        Separate CSV of target columns sharing row order.
    group_column : str, optional
        Header name of an integer structure-id column.
    targets_prefix : bool
        Single-file mode: columns whose header starts with ``targets:``
        are targets.
    per_atom_targets : bool
        Multiply each row's targets by its structure size (for
        properties quoted per atom; requires groups).
    """
    header, rows = _read_table(features_path)

    group_col = None
    if group_column is not None:
        if group_column not in header:
            raise IngestError(
                f"{features_path}: no column named {group_column!r}", line=1
            )
        group_col = header.index(group_column)

    if targets_prefix:
        if targets_path is not None:
            raise IngestError(
                "single-file target prefix mode does not take a second file"
            )
        target_cols = [
            i for i, h in enumerate(header) if h.startswith(TARGET_PREFIX)
        ]
        if not target_cols:
            raise IngestError(
                f"{features_path}: no {TARGET_PREFIX}* columns found", line=1
            )
        feature_cols = [
            i
            for i in range(len(header))
            if i not in target_cols and i != group_col
        ]
        if not feature_cols:
            raise IngestError(f"{features_path}: no feature columns", line=1)
        x = _parse_matrix(features_path, header, rows, feature_cols)
        y = _parse_matrix(features_path, header, rows, target_cols)
        feature_names = [header[i] for i in feature_cols]
        target_names = [header[i][len(TARGET_PREFIX):] for i in target_cols]
    else:
        if targets_path is None:
            raise IngestError(
                "need a target file, or --targets-prefix with a single file"
            )
        feature_cols = [i for i in range(len(header)) if i != group_col]
        if not feature_cols:
            raise IngestError(f"{features_path}: no feature columns", line=1)
        x = _parse_matrix(features_path, header, rows, feature_cols)
        feature_names = [header[i] for i in feature_cols]
        t_header, t_rows = _read_table(targets_path)
        if len(t_rows) != len(rows):
            longer = t_rows if len(t_rows) > len(rows) else rows
            raise IngestError(
                f"feature file has {len(rows)} rows but target file has "
                f"{len(t_rows)}",
                line=longer[min(len(rows), len(t_rows))][0],
            )
        y = _parse_matrix(targets_path, t_header, t_rows, range(len(t_header)))
        target_names = list(t_header)

    group_index = None
    group_labels = None
    if group_col is not None:
        raw = _parse_groups(features_path, header, rows, group_col)
        group_index, _ = GroupIndex.from_labels(raw)
        group_labels = raw

    if per_atom_targets:
        if group_index is None:
            raise IngestError("per-atom targets require a group column")
        sizes = group_index.sizes()[group_index.assignments]
        y = y * sizes[:, None]

    return DataSet(x, y, feature_names, target_names, group_index, group_labels)


def split_dataset(ds: DataSet, fraction: float = 0.5, seed: int = 0):
    """Deterministic train/test split; grouped data splits by structure.

    Returns sorted sample index arrays (train, test). Both sides are
    kept non-empty by clamping the train share.
    """
    if not 0.0 < fraction < 1.0:
        raise InvalidInput(f"split fraction must lie in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    if ds.group_index is None:
        n = ds.n_samples
        if n < 2:
            raise InvalidInput("need at least 2 samples to split")
        perm = rng.permutation(n)
        n_train = min(max(int(round(fraction * n)), 1), n - 1)
        return np.sort(perm[:n_train]), np.sort(perm[n_train:])
    n_struct = ds.group_index.n_structures
    if n_struct < 2:
        raise InvalidInput("need at least 2 structures to split by group")
    perm = rng.permutation(n_struct)
    n_train = min(max(int(round(fraction * n_struct)), 1), n_struct - 1)
    train_structs = np.zeros(n_struct, dtype=bool)
    train_structs[perm[:n_train]] = True
    in_train = train_structs[ds.group_index.assignments]
    idx = np.arange(ds.n_samples)
    return idx[in_train], idx[~in_train]
