"""Exact k-nearest-neighbor search over row subsets of a Dataset.

The distance kernel is compiled (Cython) when available and falls back
to a pure-NumPy implementation; set FAIRBALANCE_FORCE_PYTHON=1 to force
the fallback. Both kernels are exact: ascending Euclidean distance with
ties broken by ascending dataset row index, query excluded from its own
neighbor list.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _knn_py
from .data import Dataset
from .errors import NeighborPoolError

if os.environ.get("FAIRBALANCE_FORCE_PYTHON"):
    _kernel = _knn_py
    KERNEL = "python"
else:
    try:
        from . import _knn_cy as _kernel

        KERNEL = "cython"
    except ImportError:
        _kernel = _knn_py
        KERNEL = "python"


@dataclass(frozen=True)
class NeighborQuery:
    pool: np.ndarray
    query_index: int
    k: int = 5


def geometry_matrix(d: Dataset, include_protected: bool = False) -> np.ndarray:
    """Feature columns used for distances.

    By default the protected column (when present among the features) is
    excluded so neighbor geometry is not dominated by group membership.
    """
    if include_protected or d.protected_column is None:
        return d.features
    cols = [c for c in range(d.d) if c != d.protected_column]
    return np.ascontiguousarray(d.features[:, cols])


def nearest_neighbors(
    d: Dataset,
    pool,
    queries,
    k: int,
    include_protected: bool = False,
) -> np.ndarray:
    """k nearest pool rows for each query row; shape (len(queries), k)."""
    pool = np.asarray(pool, dtype=np.int64)
    queries = np.asarray(queries, dtype=np.int64)
    X = geometry_matrix(d, include_protected)
    if k > len(pool) - 1:
        # only now can a per-query shortfall occur
        for q in queries:
            available = len(pool) - int(np.count_nonzero(pool == q))
            if k > available:
                raise NeighborPoolError(
                    f"pool of {available} candidates cannot supply k={k} neighbors"
                )
    return _kernel.topk(
        np.ascontiguousarray(X[pool]),
        np.ascontiguousarray(X[queries]),
        pool,
        queries,
        int(k),
    )


def knn(d: Dataset, q: NeighborQuery, include_protected: bool = False) -> list[int]:
    """Row indices of the k nearest pool members of one query row."""
    result = nearest_neighbors(
        d, q.pool, [q.query_index], q.k, include_protected=include_protected
    )
    return [int(i) for i in result[0]]
