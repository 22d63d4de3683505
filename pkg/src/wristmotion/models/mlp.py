from __future__ import annotations

import numpy as np

from ..errors import DataError
from ._nn import Network, init_uniform, softmax_xent


class MLPClassifier(Network):
    """dense(128, ReLU) -> dense(256, ReLU) -> dropout -> dense(2, softmax)."""

    kind = "mlp"

    def __init__(self, n_inputs: int, hidden=(128, 256), dropout=0.5, **train_kw):
        super().__init__(**train_kw)
        if len(hidden) != 2:
            raise ValueError("hidden must list two layer widths")
        self.n_inputs = int(n_inputs)
        self.hidden = tuple(int(h) for h in hidden)
        self.dropout = float(dropout)

    def hyperparams(self) -> dict:
        return dict(n_inputs=self.n_inputs, hidden=list(self.hidden), dropout=self.dropout,
                    **self._optimizer_config())

    def _init_params(self, rng):
        h1, h2 = self.hidden
        return {
            "W1": init_uniform(rng, self.n_inputs, (self.n_inputs, h1)),
            "b1": np.zeros(h1),
            "W2": init_uniform(rng, h1, (h1, h2)),
            "b2": np.zeros(h2),
            "W3": init_uniform(rng, h2, (h2, 2)),
            "b3": np.zeros(2),
        }

    def _check_input(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_inputs:
            raise DataError(f"expected input of shape (n, {self.n_inputs}), got {X.shape}")
        return X

    def logits(self, X) -> np.ndarray:
        p = self.params
        h1 = np.maximum(X @ p["W1"] + p["b1"], 0.0)
        h2 = np.maximum(h1 @ p["W2"] + p["b2"], 0.0)
        return h2 @ p["W3"] + p["b3"]

    def loss_and_grads(self, X, y, training=False, rng=None):
        p = self.params
        a1 = X @ p["W1"] + p["b1"]
        h1 = np.maximum(a1, 0.0)
        a2 = h1 @ p["W2"] + p["b2"]
        h2 = np.maximum(a2, 0.0)
        if training and self.dropout > 0:
            keep = 1.0 - self.dropout
            mask = (rng.random(h2.shape) < keep) / keep
            h2 = h2 * mask
        else:
            mask = None
        logits = h2 @ p["W3"] + p["b3"]
        loss, d_logits = softmax_xent(logits, y)

        g = {"W3": h2.T @ d_logits, "b3": d_logits.sum(axis=0)}
        d_h2 = d_logits @ p["W3"].T
        if mask is not None:
            d_h2 = d_h2 * mask
        d_a2 = d_h2 * (a2 > 0)
        g["W2"] = h1.T @ d_a2
        g["b2"] = d_a2.sum(axis=0)
        d_a1 = (d_a2 @ p["W2"].T) * (a1 > 0)
        g["W1"] = X.T @ d_a1
        g["b1"] = d_a1.sum(axis=0)
        return loss, g
