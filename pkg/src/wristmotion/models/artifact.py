"""Trained-model container, raw-window resampling and the on-disk artifact format.

File layout::

    b"WRSTMDL\\0"                  8-byte magic
    uint32 little-endian           header length in bytes
    header                         UTF-8 JSON: format_version, kind, hyperparams,
                                   array names and shapes, selected feature names,
                                   training subjects
    payload                        every array in header order, little-endian float64
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import DataError, ModelFormatError, SegmentTooShortError
from ..features import FEATURE_NAMES, Normalizer, extract_matrix
from ..signals import Segment
from .cnn import WINDOW_LENGTH, CNNClassifier
from .knn import KNearestNeighbors
from .mlp import MLPClassifier
from .svm import LinearSVM

FORMAT_VERSION = 1
MAGIC = b"WRSTMDL\0"
MODEL_TYPES = {cls.kind: cls for cls in (KNearestNeighbors, LinearSVM, MLPClassifier, CNNClassifier)}


def resample_to_window(segment: Segment, length: int = WINDOW_LENGTH) -> np.ndarray:
    """Linearly interpolate every channel onto ``length`` evenly spaced times spanning the segment."""
    if len(segment) < 2:
        raise SegmentTooShortError("resampling needs at least 2 samples")
    grid = np.linspace(segment.t[0], segment.t[-1], length)
    return np.stack([np.interp(grid, segment.t, segment.data[:, c]) for c in range(segment.data.shape[1])], axis=1)


def windows_matrix(segments: Sequence[Segment], length: int = WINDOW_LENGTH) -> np.ndarray:
    return np.stack([resample_to_window(s, length) for s in segments]) if segments else np.empty((0, length, 6))


@dataclass
class ModelArtifact:
    kind: str
    model: object
    feature_indices: tuple[int, ...] | None = None
    normalizer: Normalizer | None = None
    train_subjects: tuple[str, ...] = ()
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.kind not in MODEL_TYPES:
            raise DataError(f"unknown model kind {self.kind!r}")
        if self.kind == "cnn":
            if self.feature_indices is not None:
                raise DataError("the CNN reads raw windows and takes no feature indices")
        else:
            if self.feature_indices is None or self.normalizer is None:
                raise DataError(f"{self.kind} artifact needs feature indices and a normalizer")
            idx = tuple(int(i) for i in self.feature_indices)
            if not idx or any(not 0 <= i < len(FEATURE_NAMES) for i in idx) or len(set(idx)) != len(idx):
                raise DataError("feature indices must be unique and within 0..41")
            self.feature_indices = idx
        self.train_subjects = tuple(sorted(str(s) for s in self.train_subjects))

    @property
    def feature_names(self) -> list[str]:
        return [] if self.feature_indices is None else [FEATURE_NAMES[i] for i in self.feature_indices]

    def inputs(self, segments: Sequence[Segment]) -> np.ndarray:
        """Model inputs for ``segments``: selected normalised features, or raw windows for the CNN."""
        if self.kind == "cnn":
            return windows_matrix(segments, self.model.window_length)
        X = self.normalizer.apply(extract_matrix(segments))
        return X[:, list(self.feature_indices)]

    def predict(self, segments: Sequence[Segment]) -> tuple[np.ndarray, np.ndarray]:
        """Labels (True = dorsiflexion) and positive-class scores.

        Scores are vote shares for k-NN, margins for the SVM and
        probabilities for the networks.
        """
        if len(segments) == 0:
            return np.empty(0, dtype=bool), np.empty(0)
        X = self.inputs(segments)
        return self.model.predict(X).astype(bool), np.asarray(self.model.decision_scores(X), dtype=float)


def _state_arrays(model) -> dict[str, np.ndarray]:
    if isinstance(model, KNearestNeighbors):
        return {"X": model.X_, "y": model.y_.astype(float)}
    if isinstance(model, LinearSVM):
        return {"w": model.w, "b": np.array([model.b])}
    arrays = dict(model.params)
    if isinstance(model, CNNClassifier):
        arrays["channel_mean"] = model.channel_mean
        arrays["channel_scale"] = model.channel_scale
    return arrays


def _restore(kind: str, hyper: dict, arrays: dict[str, np.ndarray]):
    model = MODEL_TYPES[kind](**hyper)
    if kind == "knn":
        model.X_, model.y_ = arrays["X"], arrays["y"].astype(np.int64)
    elif kind == "svm":
        model.w, model.b = arrays["w"], float(arrays["b"][0])
    else:
        if kind == "cnn":
            model.channel_mean = arrays.pop("channel_mean")
            model.channel_scale = arrays.pop("channel_scale")
        expected = model._init_params(np.random.default_rng(0))
        for name, ref in expected.items():
            if name not in arrays or arrays[name].shape != ref.shape:
                raise ModelFormatError(f"parameter {name} missing or mis-shaped")
        model.params = {name: arrays[name] for name in expected}
    return model


def save(artifact: ModelArtifact, path) -> None:
    arrays = {f"model.{k}": np.asarray(v, dtype=float) for k, v in _state_arrays(artifact.model).items()}
    if artifact.normalizer is not None:
        arrays["normalizer.mins"] = artifact.normalizer.mins
        arrays["normalizer.maxs"] = artifact.normalizer.maxs
    header = {
        "format_version": artifact.format_version,
        "kind": artifact.kind,
        "hyperparams": artifact.model.hyperparams(),
        "arrays": [[name, list(a.shape)] for name, a in arrays.items()],
        "feature_indices": None if artifact.feature_indices is None else list(artifact.feature_indices),
        "feature_names": artifact.feature_names,
        "train_subjects": list(artifact.train_subjects),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for a in arrays.values():
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load(path) -> ModelArtifact:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 4 or raw[: len(MAGIC)] != MAGIC:
        raise ModelFormatError(f"{path}: not a model artifact")
    (hlen,) = struct.unpack_from("<I", raw, len(MAGIC))
    start = len(MAGIC) + 4
    if start + hlen > len(raw):
        raise ModelFormatError(f"{path}: truncated header")
    try:
        header = json.loads(raw[start : start + hlen].decode("utf-8"))
        version = int(header["format_version"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ModelFormatError(f"{path}: unreadable header ({exc})") from exc
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported format_version {version} (this build reads {FORMAT_VERSION})")

    try:
        offset = start + hlen
        arrays = {}
        for name, shape in header["arrays"]:
            count = int(np.prod(shape, dtype=np.int64))
            end = offset + 8 * count
            if end > len(raw):
                raise ModelFormatError(f"{path}: truncated payload")
            arrays[name] = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(shape).astype(float)
            offset = end
        if offset != len(raw):
            raise ModelFormatError(f"{path}: {len(raw) - offset} unexpected trailing bytes")

        kind = header["kind"]
        if kind not in MODEL_TYPES:
            raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
        model_arrays = {k[len("model."):]: v for k, v in arrays.items() if k.startswith("model.")}
        model = _restore(kind, header["hyperparams"], model_arrays)
        normalizer = None
        if "normalizer.mins" in arrays:
            normalizer = Normalizer(arrays["normalizer.mins"], arrays["normalizer.maxs"])
        indices = header["feature_indices"]
        return ModelArtifact(
            kind=kind,
            model=model,
            feature_indices=None if indices is None else tuple(indices),
            normalizer=normalizer,
            train_subjects=tuple(header["train_subjects"]),
            format_version=version,
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: inconsistent artifact ({exc})") from exc
