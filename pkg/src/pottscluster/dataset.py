# pottscluster/dataset.py
"""On-disk dataset format: a directory of small text files.

    meta.json      {"n": ..., "num_features": ..., "num_classes": ...}
    edges.tsv      u<TAB>v per line, 0-indexed, undirected, duplicates fine
    features.tsv   node<TAB>feature<TAB>value sparse triplets
    labels.tsv     node<TAB>label, one line per node (file optional)

The format is deliberately plain so converters from public benchmark
archives can be written in any language.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .graph import Graph, from_edge_list

__all__ = [
    "DatasetFormatError",
    "load_dataset",
    "save_dataset",
    "one_hot_degree_features",
]


class DatasetFormatError(ValueError):
    """A dataset directory is missing files or contains malformed content."""


def _fail(name: str, lineno: int, problem: str) -> None:
    raise DatasetFormatError(f"{name}:{lineno}: {problem}")


def _parse_int(name: str, lineno: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        _fail(name, lineno, f"{what} is not an integer: {token!r}")
    raise AssertionError("unreachable")


def _iter_rows(path: Path, expected_fields: int):
    """Yield (lineno, fields) for each non-blank line, enforcing field count."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != expected_fields:
                _fail(path.name, lineno, f"expected {expected_fields} tab-separated fields, got {len(fields)}")
            yield lineno, fields


def _load_meta(path: Path) -> tuple[int, int, int]:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"meta.json: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise DatasetFormatError("meta.json: top level must be an object")
    out = []
    for key in ("n", "num_features", "num_classes"):
        if key not in raw:
            raise DatasetFormatError(f"meta.json: missing key {key!r}")
        val = raw[key]
        if not isinstance(val, int) or isinstance(val, bool):
            raise DatasetFormatError(f"meta.json: {key} must be an integer, got {val!r}")
        out.append(val)
    n, num_features, num_classes = out
    if n < 1:
        raise DatasetFormatError(f"meta.json: n must be positive, got {n}")
    if num_features < 1:
        raise DatasetFormatError(f"meta.json: num_features must be positive, got {num_features}")
    if num_classes < 0:
        raise DatasetFormatError(f"meta.json: num_classes must be non-negative, got {num_classes}")
    return n, num_features, num_classes


def load_dataset(path: str | os.PathLike) -> tuple[Graph, np.ndarray, np.ndarray | None]:
    """Read a dataset directory into (graph, dense features, labels-or-None)."""
    root = Path(path)
    if not root.is_dir():
        raise DatasetFormatError(f"dataset directory not found: {root}")
    for name in ("meta.json", "edges.tsv", "features.tsv"):
        if not (root / name).is_file():
            raise DatasetFormatError(f"missing required file: {name}")
    n, num_features, num_classes = _load_meta(root / "meta.json")

    edges = []
    for lineno, fields in _iter_rows(root / "edges.tsv", 2):
        u = _parse_int("edges.tsv", lineno, fields[0], "node id")
        v = _parse_int("edges.tsv", lineno, fields[1], "node id")
        if not (0 <= u < n and 0 <= v < n):
            _fail("edges.tsv", lineno, f"edge ({u},{v}) out of range for n={n}")
        edges.append((u, v))
    g = from_edge_list(edges, n)

    x = np.zeros((n, num_features), dtype=np.float64)
    seen = set()
    for lineno, fields in _iter_rows(root / "features.tsv", 3):
        node = _parse_int("features.tsv", lineno, fields[0], "node id")
        feat = _parse_int("features.tsv", lineno, fields[1], "feature index")
        if not 0 <= node < n:
            _fail("features.tsv", lineno, f"node id {node} out of range for n={n}")
        if not 0 <= feat < num_features:
            _fail("features.tsv", lineno, f"feature index {feat} out of range for num_features={num_features}")
        if (node, feat) in seen:
            _fail("features.tsv", lineno, f"duplicate entry for node {node}, feature {feat}")
        seen.add((node, feat))
        try:
            value = float(fields[2])
        except ValueError:
            _fail("features.tsv", lineno, f"value is not a number: {fields[2]!r}")
        if not np.isfinite(value):
            _fail("features.tsv", lineno, f"value is not finite: {fields[2]!r}")
        x[node, feat] = value

    labels_path = root / "labels.tsv"
    labels: np.ndarray | None = None
    if labels_path.is_file():
        if num_classes < 1:
            raise DatasetFormatError("meta.json: num_classes must be positive when labels.tsv is present")
        labels = np.full(n, -1, dtype=np.int64)
        for lineno, fields in _iter_rows(labels_path, 2):
            node = _parse_int("labels.tsv", lineno, fields[0], "node id")
            label = _parse_int("labels.tsv", lineno, fields[1], "label")
            if not 0 <= node < n:
                _fail("labels.tsv", lineno, f"node id {node} out of range for n={n}")
            if not 0 <= label < num_classes:
                _fail("labels.tsv", lineno, f"label {label} out of range for num_classes={num_classes}")
            if labels[node] != -1:
                _fail("labels.tsv", lineno, f"duplicate label for node {node}")
            labels[node] = label
        missing = np.flatnonzero(labels == -1)
        if missing.size:
            raise DatasetFormatError(f"labels.tsv: no label for node {int(missing[0])}")
    return g, x, labels


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def save_dataset(
    path: str | os.PathLike,
    g: Graph,
    x: np.ndarray,
    labels: np.ndarray | None = None,
    num_classes: int | None = None,
) -> None:
    """Write (graph, features, labels) as a dataset directory.

    Each file lands via write-temp-then-rename. Edges are emitted once in
    canonical u < v order; features as nonzero triplets with 17 significant
    digits.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != g.n:
        raise ValueError(f"features shape {x.shape} does not match n={g.n}")
    if labels is not None:
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (g.n,):
            raise ValueError(f"labels shape {labels.shape} does not match n={g.n}")
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be non-negative")
        inferred = int(labels.max()) + 1 if labels.size else 0
        if num_classes is None:
            num_classes = inferred
        elif num_classes < inferred:
            raise ValueError(f"num_classes={num_classes} too small for max label {inferred - 1}")
    else:
        num_classes = 0 if num_classes is None else num_classes

    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    meta = {"n": g.n, "num_features": int(x.shape[1]), "num_classes": int(num_classes)}
    _write_atomic(root / "meta.json", json.dumps(meta, indent=2) + "\n")

    src = g.arc_sources()
    keep = src < g.col_idx
    edge_lines = [f"{u}\t{v}" for u, v in zip(src[keep], g.col_idx[keep])]
    _write_atomic(root / "edges.tsv", "\n".join(edge_lines) + ("\n" if edge_lines else ""))

    rows, cols = np.nonzero(x)
    feat_lines = [f"{r}\t{c}\t{x[r, c]:.17g}" for r, c in zip(rows, cols)]
    _write_atomic(root / "features.tsv", "\n".join(feat_lines) + ("\n" if feat_lines else ""))

    if labels is not None:
        label_lines = [f"{i}\t{int(lab)}" for i, lab in enumerate(labels)]
        _write_atomic(root / "labels.tsv", "\n".join(label_lines) + "\n")


def one_hot_degree_features(g: Graph) -> np.ndarray:
    """One-hot encode each node's degree; width is max degree + 1."""
    degrees = g.degrees.astype(np.int64)
    width = int(degrees.max()) + 1 if g.n else 1
    x = np.zeros((g.n, width), dtype=np.float64)
    x[np.arange(g.n), degrees] = 1.0
    return x


def adjacency_features(g: Graph) -> np.ndarray:
    """Dense adjacency rows with a self entry, as features for featureless graphs.

    Nodes with identical closed neighborhoods get identical rows, so the
    encoder maps them to the same cluster distribution; that keeps tightly
    knit groups together instead of letting per-node features split them.
    """
    x = np.zeros((g.n, g.n), dtype=np.float64)
    x[g.arc_sources(), g.col_idx] = 1.0
    x[np.arange(g.n), np.arange(g.n)] = 1.0
    return x
