"""Train a :class:`~wristmotion.models.ModelArtifact` straight from labeled segments."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DataError
from .features import extract_matrix, fit_normalizer
from .models import CNNClassifier, KNearestNeighbors, LinearSVM, MLPClassifier, ModelArtifact, windows_matrix
from .selection import mrmr_select
from .signals import Segment

DEFAULT_K = {"knn": 21, "svm": 21, "mlp": 37}


def _labels(segments: Sequence[Segment]) -> np.ndarray:
    if not segments:
        raise DataError("no training segments")
    if any(s.label is None for s in segments):
        raise DataError("training segments must be labeled")
    return np.array([s.label for s in segments], dtype=np.int64)


def build_model(kind: str, n_inputs: int | None = None, seed: int = 0, **hyper):
    if kind == "knn":
        return KNearestNeighbors(**hyper)
    if kind == "svm":
        return LinearSVM(seed=seed, **hyper)
    if kind == "mlp":
        return MLPClassifier(n_inputs, seed=seed, **hyper)
    if kind == "cnn":
        return CNNClassifier(seed=seed, **hyper)
    raise DataError(f"unknown model kind {kind!r}")


def train_model(
    kind: str,
    segments: Sequence[Segment],
    n_features: int | None = None,
    seed: int = 0,
    scheme: str = "quotient",
    **hyper,
) -> ModelArtifact:
    """Fit a model of ``kind`` on ``segments``.

    Feature models use min-max normalised descriptors restricted to the top
    ``n_features`` mRMR features of the training set; the CNN reads resampled
    raw windows. ``hyper`` goes to the model constructor.
    """
    y = _labels(segments)
    subjects = {s.subject_id for s in segments if s.subject_id is not None}
    if kind == "cnn":
        model = build_model("cnn", seed=seed, **hyper)
        model.fit(windows_matrix(segments, model.window_length), y)
        return ModelArtifact("cnn", model, train_subjects=subjects)

    k = DEFAULT_K.get(kind, 21) if n_features is None else n_features
    normalizer = fit_normalizer(extract_matrix(segments))
    X = normalizer.apply(extract_matrix(segments))
    ranking = mrmr_select(X, y, k, scheme=scheme).ranked_indices
    model = build_model(kind, n_inputs=len(ranking), seed=seed, **hyper)
    model.fit(X[:, list(ranking)], y)
    return ModelArtifact(kind, model, feature_indices=ranking, normalizer=normalizer, train_subjects=subjects)
