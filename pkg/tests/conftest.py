import numpy as np
import pytest

from fairbalance.data import ColumnMeta, Dataset


def make_dataset(X, y, p, kinds=None, protected_column=None, weights=None):
    X = np.asarray(X, dtype=np.float64)
    if kinds is None:
        kinds = ["continuous"] * X.shape[1]
    columns = tuple(ColumnMeta(name=f"x{i}", kind=k) for i, k in enumerate(kinds))
    return Dataset(
        features=X,
        labels=np.asarray(y),
        protected=np.asarray(p),
        columns=columns,
        protected_column=protected_column,
        weights=weights,
    )


@pytest.fixture
def eight_row_cells():
    """Two rows in each of the four class x group cells."""
    X = np.arange(16, dtype=float).reshape(8, 2)
    y = [0, 0, 0, 0, 1, 1, 1, 1]
    p = [1, 1, 0, 0, 1, 1, 0, 0]
    return make_dataset(X, y, p)
