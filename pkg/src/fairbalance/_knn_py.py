"""Pure-NumPy brute-force k-nearest-neighbor kernel (fallback path).

Same contract as the compiled kernel in ``_knn_cy``: exact squared
Euclidean distances, the query's own row excluded, ties broken by
ascending dataset row index.
"""

import numpy as np


def topk(pool_x, query_x, pool_rows, query_rows, k):
    """Return the (n_query, k) row indices of the k nearest pool points.

    pool_x, query_x: float64 matrices with matching arity.
    pool_rows, query_rows: int64 dataset row indices; a pool entry whose
    row index equals the query's is skipped (self-exclusion).
    """
    n_query = query_x.shape[0]
    out = np.empty((n_query, k), dtype=np.int64)
    for i in range(n_query):
        diff = pool_x - query_x[i]
        d2 = np.einsum("ij,ij->i", diff, diff)
        d2[pool_rows == query_rows[i]] = np.inf
        # argpartition, then widen to all ties at the boundary so the
        # (distance, row index) ordering is exact
        part = np.argpartition(d2, k - 1)[:k]
        thresh = d2[part].max()
        cand = np.flatnonzero(d2 <= thresh)
        order = np.lexsort((pool_rows[cand], d2[cand]))
        out[i] = pool_rows[cand[order[:k]]]
    return out
