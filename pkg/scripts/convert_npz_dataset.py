#!/usr/bin/env python3
"""Convert a citation-network .npz archive to a dataset directory.

The archive is expected to hold CSR blocks named adj_data / adj_indices /
adj_indptr / adj_shape and attr_data / attr_indices / attr_indptr /
attr_shape plus a labels vector, which is the layout most published
citation-network dumps use. The output directory follows the meta.json /
edges.tsv / features.tsv / labels.tsv convention the loader expects; the
adjacency is symmetrized and self-loops are dropped on the way through.

Usage:
    python scripts/convert_npz_dataset.py cora.npz data/cora
"""
from __future__ import annotations

import argparse
import sys

import numpy as np
import scipy.sparse as sp

from pottscluster import from_edge_list, save_dataset


def load_csr(archive, prefix: str) -> sp.csr_matrix:
    keys = [f"{prefix}_{part}" for part in ("data", "indices", "indptr", "shape")]
    missing = [k for k in keys if k not in archive]
    if missing:
        raise KeyError(f"archive lacks CSR arrays {missing}")
    data, indices, indptr, shape = (archive[k] for k in keys)
    return sp.csr_matrix((data, indices, indptr), shape=tuple(shape))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("archive", help=".npz file with adj_*/attr_*/labels arrays")
    parser.add_argument("out", help="dataset directory to create")
    args = parser.parse_args(argv)

    with np.load(args.archive, allow_pickle=False) as archive:
        adj = load_csr(archive, "adj")
        attr = load_csr(archive, "attr")
        if "labels" not in archive:
            raise KeyError("archive lacks a labels array")
        labels = np.asarray(archive["labels"], dtype=np.int64)

    n = adj.shape[0]
    if adj.shape[1] != n or attr.shape[0] != n or labels.shape != (n,):
        raise ValueError(
            f"inconsistent shapes: adj {adj.shape}, attr {attr.shape}, labels {labels.shape}"
        )
    coo = adj.maximum(adj.T).tocoo()  # edge weights collapse to plain edges
    edges = [(int(u), int(v)) for u, v in zip(coo.row, coo.col) if u < v]
    g = from_edge_list(edges, n)
    x = np.asarray(attr.todense(), dtype=np.float64)
    save_dataset(args.out, g, x, labels)
    print(
        f"wrote {args.out}: n={g.n} m={g.m} "
        f"features={x.shape[1]} classes={int(labels.max()) + 1}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
