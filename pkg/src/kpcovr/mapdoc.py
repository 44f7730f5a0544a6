"""Map document export: one JSON record per sample, plus run metadata.

The document holds everything needed to draw and re-score a
structure-property map: per-sample latent coordinates, true and
predicted properties (in the standardized target frame), the split each
sample fell into, and optional group ids. Reals are serialized with 17
significant digits so documents are byte-stable and round-trip exactly.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .losses import loss_regr

__all__ = [
    "MapDocument",
    "build_map_document",
    "map_document_to_json",
    "write_map_document",
    "read_map_document",
    "rescore_map_document",
]


@dataclass
class MapDocument:
    """Top-level ``meta`` block plus the ``points`` record array."""

    meta: dict
    points: list


def build_map_document(
    meta: dict, t, y, y_hat, split_tags, group_labels=None
) -> MapDocument:
    """Assemble per-sample records in row order."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    n = t.shape[0]
    if y.shape[0] != n or y_hat.shape[0] != n or len(split_tags) != n:
        raise InvalidInput("t, y, y_hat, and split_tags must align by row")
    if group_labels is not None and len(group_labels) != n:
        raise InvalidInput("group_labels must align by row")
    points = []
    for i in range(n):
        record = {
            "t": [float(v) for v in t[i]],
            "y": [float(v) for v in y[i]],
            "y_hat": [float(v) for v in y_hat[i]],
            "split": str(split_tags[i]),
        }
        if group_labels is not None:
            record["group"] = int(group_labels[i])
        points.append(record)
    return MapDocument(meta=meta, points=points)


def _emit(value, out):
    # Floats printed with %.17g so every double round-trips; containers
    # keep insertion order, making serialization deterministic.
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        out.append(json.dumps(value))
    elif isinstance(value, float):
        if not np.isfinite(value):
            raise InvalidInput("cannot serialize non-finite reals")
        out.append(format(value, ".17g"))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(item, out)
        out.append("}")
    else:
        raise InvalidInput(f"cannot serialize {type(value).__name__}")


def map_document_to_json(doc: MapDocument) -> str:
    out = ["{\n  \"meta\": "]
    _emit(doc.meta, out)
    out.append(",\n  \"points\": [")
    for i, point in enumerate(doc.points):
        out.append(",\n    " if i else "\n    ")
        _emit(point, out)
    out.append("\n  ]\n}\n")
    return "".join(out)


def write_map_document(doc: MapDocument, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(map_document_to_json(doc))


def read_map_document(path) -> MapDocument:
    with open(path, "r", encoding="utf-8") as handle:
        raw = json.load(handle)
    if not isinstance(raw, dict) or "meta" not in raw or "points" not in raw:
        raise InvalidInput(f"{path} is not a map document")
    return MapDocument(meta=raw["meta"], points=raw["points"])


def rescore_map_document(doc: MapDocument) -> dict:
    """Recompute the per-split regression loss from the records.

    Returns ``{split: {"l_regr": value}}`` for each split present; these
    must agree with the recorded metadata losses.
    """
    by_split = {}
    for point in doc.points:
        by_split.setdefault(point["split"], []).append(point)
    out = {}
    for split, points in by_split.items():
        y = np.array([p["y"] for p in points], dtype=float)
        y_hat = np.array([p["y_hat"] for p in points], dtype=float)
        out[split] = {"l_regr": loss_regr(y, y_hat)}
    return out
