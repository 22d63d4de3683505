"""Pieces shared by the MLP and the CNN: init, softmax head, Adam and the fit loop."""

from __future__ import annotations

import numpy as np

from ..errors import DataError


def init_uniform(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_xent(logits: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient w.r.t. the logits."""
    n = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(z).sum(axis=1))
    loss = float(np.mean(logsum - z[np.arange(n), y]))
    grad = softmax(logits)
    grad[np.arange(n), y] -= 1.0
    return loss, grad / n


class Adam:
    def __init__(self, params: dict, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads: dict) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            tmp = np.multiply(g, 1.0 - self.beta1)
            m *= self.beta1
            m += tmp
            np.multiply(g, g, out=tmp)
            tmp *= 1.0 - self.beta2
            v *= self.beta2
            v += tmp
            # lr * (m / c1) / (sqrt(v / c2) + eps), without full-size temporaries
            np.sqrt(v, out=tmp)
            tmp *= 1.0 / np.sqrt(c2)
            tmp += self.eps
            np.divide(m, tmp, out=tmp)
            tmp *= self.lr / c1
            self.params[k] -= tmp


def as_class_indices(y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise DataError("labels must be 1-d")
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels must be binary (0/1 or bool)")
    return y.astype(np.int64)


class Network:
    """Softmax classifier trained with Adam on minibatches.

    Subclasses provide ``_init_params(rng)``, ``_check_input(X)`` and
    ``loss_and_grads(X, y, training, rng)``.
    """

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, max_epochs=100,
                 batch_size=32, tol=1e-5, patience=10, seed=0):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.max_epochs = max_epochs
        self.batch_size = batch_size
        self.tol = tol
        self.patience = patience
        self.seed = seed
        self.params: dict[str, np.ndarray] | None = None
        self.loss_history_: list[float] = []

    def _optimizer_config(self) -> dict:
        return dict(lr=self.lr, beta1=self.beta1, beta2=self.beta2, eps=self.eps,
                    max_epochs=self.max_epochs, batch_size=self.batch_size,
                    tol=self.tol, patience=self.patience, seed=self.seed)

    def fit(self, X, y):
        X = self._check_input(X)
        y = as_class_indices(y)
        if len(y) != len(X):
            raise DataError("one label per row required")
        rng = np.random.default_rng(self.seed)
        self.params = self._init_params(rng)
        opt = Adam(self.params, self.lr, self.beta1, self.beta2, self.eps)
        best = np.inf
        stale = 0
        self.loss_history_ = []
        n = len(y)
        for _ in range(self.max_epochs):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                loss, grads = self.loss_and_grads(X[idx], y[idx], training=True, rng=rng)
                opt.step(grads)
                total += loss * len(idx)
            epoch_loss = total / n
            self.loss_history_.append(epoch_loss)
            if epoch_loss < best - self.tol:
                best = epoch_loss
                stale = 0
            else:
                stale += 1
                if stale >= self.patience:
                    break
        return self

    def predict_proba(self, X, batch_size: int = 256) -> np.ndarray:
        if self.params is None:
            raise RuntimeError("model is not trained")
        X = self._check_input(X)
        out = [softmax(self.logits(X[i : i + batch_size])) for i in range(0, len(X), batch_size)]
        return np.concatenate(out) if out else np.empty((0, 2))

    def decision_scores(self, X) -> np.ndarray:
        return self.predict_proba(X)[:, 1]

    def predict(self, X) -> np.ndarray:
        return (np.argmax(self.predict_proba(X), axis=1) == 1).astype(np.int64)

    def loss(self, X, y) -> float:
        return self.loss_and_grads(self._check_input(X), as_class_indices(y), training=False)[0]
