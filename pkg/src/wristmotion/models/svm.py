from __future__ import annotations

import numpy as np

from ..errors import DataError
from ._nn import as_class_indices


class LinearSVM:
    """Linear SVM trained by stochastic subgradient descent (Pegasos schedule).

    Minimises ``lam/2 * |w|^2 + mean(hinge)``. The bias is learned as the
    weight of a constant input, so it is regularised along with ``w``.
    """

    kind = "svm"

    def __init__(self, lam: float = 1e-3, epochs: int = 200, seed: int = 0):
        if not lam > 0:
            raise ValueError("lam must be > 0")
        self.lam = float(lam)
        self.epochs = int(epochs)
        self.seed = seed
        self.w: np.ndarray | None = None
        self.b = 0.0

    def hyperparams(self) -> dict:
        return {"lam": self.lam, "epochs": self.epochs, "seed": self.seed}

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y01 = as_class_indices(y)
        if X.ndim != 2 or len(y01) != X.shape[0]:
            raise DataError("need an (n, d) training matrix with one label per row")
        if np.unique(y01).size != 2:
            raise DataError("SVM training needs both classes")
        ys = np.where(y01 == 1, 1.0, -1.0)
        Xa = np.hstack([X, np.ones((X.shape[0], 1))])
        rng = np.random.default_rng(self.seed)
        w = np.zeros(Xa.shape[1])
        radius = 1.0 / np.sqrt(self.lam)
        t = 0
        for _ in range(self.epochs):
            for i in rng.permutation(len(ys)):
                t += 1
                eta = 1.0 / (self.lam * t)
                violated = ys[i] * (Xa[i] @ w) < 1.0
                w *= 1.0 - eta * self.lam
                if violated:
                    w += eta * ys[i] * Xa[i]
                norm = np.linalg.norm(w)
                if norm > radius:
                    w *= radius / norm
        self.w, self.b = w[:-1].copy(), float(w[-1])
        return self

    def decision_scores(self, X) -> np.ndarray:
        if self.w is None:
            raise RuntimeError("model is not trained")
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.w.size:
            raise DataError(f"expected {self.w.size} features, got {X.shape[1]}")
        return X @ self.w + self.b

    def predict(self, X) -> np.ndarray:
        return (self.decision_scores(X) >= 0).astype(np.int64)
