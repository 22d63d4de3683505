from __future__ import annotations

import numpy as np

from ..errors import DataError
from ._nn import as_class_indices


class KNearestNeighbors:
    """Majority vote of the k nearest training vectors under Euclidean distance.

    Equal distances are ordered by training index. A tied vote goes to the
    label of the single nearest neighbour. The score is the share of votes
    for the positive class.
    """

    kind = "knn"

    def __init__(self, k: int = 1):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = int(k)
        self.X_: np.ndarray | None = None
        self.y_: np.ndarray | None = None

    def hyperparams(self) -> dict:
        return {"k": self.k}

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = as_class_indices(y)
        if X.ndim != 2 or X.shape[0] == 0 or len(y) != X.shape[0]:
            raise DataError("need a non-empty (n, d) training matrix with one label per row")
        self.X_, self.y_ = X.copy(), y.copy()
        return self

    def _votes(self, X):
        if self.X_ is None:
            raise RuntimeError("model is not trained")
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.X_.shape[1]:
            raise DataError(f"expected {self.X_.shape[1]} features, got {X.shape[1]}")
        k = min(self.k, len(self.y_))
        d = np.sqrt(((X[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2))
        nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
        labels = self.y_[nearest]
        return labels.mean(axis=1), labels[:, 0]

    def decision_scores(self, X) -> np.ndarray:
        return self._votes(X)[0]

    def predict(self, X) -> np.ndarray:
        share, first = self._votes(X)
        return np.where(share > 0.5, 1, np.where(share < 0.5, 0, first)).astype(np.int64)
