# tests/conftest.py
from __future__ import annotations

from pathlib import Path

import pytest

from pottscluster import from_edge_list

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def two_disjoint_edges():
    return from_edge_list([(0, 1), (2, 3)], 4)


@pytest.fixture
def two_k4s():
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    edges += [(i + 4, j + 4) for i in range(4) for j in range(i + 1, 4)]
    return from_edge_list(edges, 8)


@pytest.fixture
def two_k3s():
    return from_edge_list([(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)], 6)


@pytest.fixture
def path4():
    return from_edge_list([(0, 1), (1, 2), (2, 3)], 4)


@pytest.fixture
def triangle():
    return from_edge_list([(0, 1), (1, 2), (2, 0)], 3)
