from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DataError
from ._nn import Network, init_uniform, softmax_xent

WINDOW_LENGTH = 128
N_CHANNELS = 6


class CNNClassifier(Network):
    """1-D convolution over raw windows.

    conv1d(filters, kernel over time, all channels jointly, stride 1, valid,
    ReLU) -> maxpool -> flatten -> dense(ReLU) -> dense(2, softmax).
    Inputs are ``(n, window_length, 6)`` arrays; each channel is standardised
    with statistics learned in :meth:`fit`.
    """

    kind = "cnn"

    def __init__(self, n_filters=196, kernel_size=16, pool_size=4, dense_units=1024,
                 window_length=WINDOW_LENGTH, n_channels=N_CHANNELS, **train_kw):
        super().__init__(**train_kw)
        self.n_filters = int(n_filters)
        self.kernel_size = int(kernel_size)
        self.pool_size = int(pool_size)
        self.dense_units = int(dense_units)
        self.window_length = int(window_length)
        self.n_channels = int(n_channels)
        if self.conv_length < self.pool_size:
            raise ValueError("window too short for kernel and pool size")
        self.channel_mean = np.zeros(self.n_channels)
        self.channel_scale = np.ones(self.n_channels)

    @property
    def conv_length(self) -> int:
        return self.window_length - self.kernel_size + 1

    @property
    def pooled_length(self) -> int:
        return self.conv_length // self.pool_size

    @property
    def flat_size(self) -> int:
        return self.pooled_length * self.n_filters

    def shape_chain(self) -> list[tuple[int, ...]]:
        return [
            (self.window_length, self.n_channels),
            (self.conv_length, self.n_filters),
            (self.pooled_length, self.n_filters),
            (self.flat_size,),
            (self.dense_units,),
            (2,),
        ]

    def hyperparams(self) -> dict:
        return dict(n_filters=self.n_filters, kernel_size=self.kernel_size, pool_size=self.pool_size,
                    dense_units=self.dense_units, window_length=self.window_length,
                    n_channels=self.n_channels, **self._optimizer_config())

    def _init_params(self, rng):
        fan_conv = self.kernel_size * self.n_channels
        return {
            "Wc": init_uniform(rng, fan_conv, (fan_conv, self.n_filters)),
            "bc": np.zeros(self.n_filters),
            "Wd": init_uniform(rng, self.flat_size, (self.flat_size, self.dense_units)),
            "bd": np.zeros(self.dense_units),
            "Wo": init_uniform(rng, self.dense_units, (self.dense_units, 2)),
            "bo": np.zeros(2),
        }

    def _check_input(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 3 or X.shape[1:] != (self.window_length, self.n_channels):
            raise DataError(
                f"expected windows of shape (n, {self.window_length}, {self.n_channels}), got {X.shape}"
            )
        return X

    def fit(self, X, y):
        X = self._check_input(X)
        flat = X.reshape(-1, self.n_channels)
        self.channel_mean = flat.mean(axis=0)
        std = flat.std(axis=0)
        self.channel_scale = np.where(std > 0, std, 1.0)
        return super().fit(X, y)

    def _standardise(self, X):
        return (X - self.channel_mean) / self.channel_scale

    def _patches(self, X) -> np.ndarray:
        # (n, L, C) -> (n, conv_length, kernel*C), laid out as [k, c]
        win = sliding_window_view(X, self.kernel_size, axis=1)  # (n, conv_length, C, k)
        win = win.transpose(0, 1, 3, 2)
        return np.ascontiguousarray(win).reshape(X.shape[0], self.conv_length, self.kernel_size * self.n_channels)

    def _forward(self, X):
        p = self.params
        n = X.shape[0]
        patches = self._patches(self._standardise(X))
        a_conv = (patches.reshape(-1, patches.shape[-1]) @ p["Wc"] + p["bc"]).reshape(n, self.conv_length, -1)
        h_conv = np.maximum(a_conv, 0.0)
        used = self.pooled_length * self.pool_size
        blocks = h_conv[:, :used].reshape(n, self.pooled_length, self.pool_size, self.n_filters)
        arg = blocks.argmax(axis=2)
        pooled = np.take_along_axis(blocks, arg[:, :, None, :], axis=2)[:, :, 0, :]
        flat = pooled.reshape(n, -1)
        a_dense = flat @ p["Wd"] + p["bd"]
        h_dense = np.maximum(a_dense, 0.0)
        logits = h_dense @ p["Wo"] + p["bo"]
        cache = (patches, a_conv, arg, flat, a_dense, h_dense)
        return logits, cache

    def logits(self, X) -> np.ndarray:
        return self._forward(X)[0]

    def loss_and_grads(self, X, y, training=False, rng=None):
        p = self.params
        n = X.shape[0]
        logits, (patches, a_conv, arg, flat, a_dense, h_dense) = self._forward(X)
        loss, d_logits = softmax_xent(logits, y)

        g = {"Wo": h_dense.T @ d_logits, "bo": d_logits.sum(axis=0)}
        d_a_dense = (d_logits @ p["Wo"].T) * (a_dense > 0)
        g["Wd"] = flat.T @ d_a_dense
        g["bd"] = d_a_dense.sum(axis=0)
        d_pooled = (d_a_dense @ p["Wd"].T).reshape(n, self.pooled_length, 1, self.n_filters)

        d_blocks = np.zeros((n, self.pooled_length, self.pool_size, self.n_filters))
        np.put_along_axis(d_blocks, arg[:, :, None, :], d_pooled, axis=2)
        d_h_conv = np.zeros_like(a_conv)
        d_h_conv[:, : self.pooled_length * self.pool_size] = d_blocks.reshape(n, -1, self.n_filters)
        d_a_conv = d_h_conv * (a_conv > 0)

        k = patches.shape[-1]
        g["Wc"] = patches.reshape(-1, k).T @ d_a_conv.reshape(-1, self.n_filters)
        g["bc"] = d_a_conv.sum(axis=(0, 1))
        return loss, g
