"""mRMR feature selection: F-statistic relevance, mean |Pearson r| redundancy."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DataError
from .features import FEATURE_NAMES

F_MAX = 1e12
EPS = 1e-12
SCHEMES = ("quotient", "difference")
# scores this close count as tied; ties go to the lowest index
TIE_RTOL = 1e-9
TIE_ATOL = 1e-12

_RES = np.finfo(float).resolution


def _binary_groups(labels) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels)
    classes = np.unique(y)
    if classes.size != 2:
        raise DataError(f"need exactly two classes, got {classes.size}")
    return y == classes[0], y == classes[1]


def _first_best(scores: np.ndarray) -> int:
    m = scores.max()
    return int(np.flatnonzero(scores >= m - TIE_RTOL * abs(m) - TIE_ATOL)[0])


def f_statistic(feature_column, binary_labels) -> float:
    """One-way ANOVA F for two groups.

    Returns 0 for a feature with no between-group spread and :data:`F_MAX`
    when the groups are internally constant but differ.
    """
    x = np.asarray(feature_column, dtype=float)
    y = np.asarray(binary_labels)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError("feature column and labels must be 1-d and of equal length")
    if x.size < 4:
        raise DataError("F-statistic needs at least 4 rows")
    a, b = _binary_groups(y)
    n = x.size
    grand = x.mean()
    ma, mb = x[a].mean(), x[b].mean()
    ssb = a.sum() * (ma - grand) ** 2 + b.sum() * (mb - grand) ** 2
    ssw = np.sum((x[a] - ma) ** 2) + np.sum((x[b] - mb) ** 2)
    tiny = n * (_RES * max(abs(ma), abs(mb), abs(grand))) ** 2
    if ssb <= tiny:
        return 0.0
    if ssw <= tiny:
        return F_MAX
    return float(min((ssb / 1.0) / (ssw / (n - 2)), F_MAX))


def pearson(a, b) -> float:
    """Pearson correlation; 0 if either input has zero variance."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError("pearson inputs must be 1-d and of equal length")
    if a.size < 2:
        raise DataError("pearson needs at least 2 values")
    da = a - a.mean()
    db = b - b.mean()
    saa = np.dot(da, da)
    sbb = np.dot(db, db)
    if saa <= a.size * (_RES * a.mean()) ** 2 or sbb <= b.size * (_RES * b.mean()) ** 2:
        return 0.0
    return float(np.clip(np.dot(da, db) / np.sqrt(saa * sbb), -1.0, 1.0))


@dataclass(frozen=True)
class SelectionResult:
    ranked_indices: tuple[int, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.ranked_indices)) != len(self.ranked_indices):
            raise DataError("selected indices must be unique")
        if len(self.scores) != len(self.ranked_indices):
            raise DataError("one score per selected feature")

    @property
    def k(self) -> int:
        return len(self.ranked_indices)

    def names(self, feature_names=FEATURE_NAMES) -> list[str]:
        return [feature_names[i] for i in self.ranked_indices]

    def to_text(self, feature_names=FEATURE_NAMES) -> str:
        return "".join(name + "\n" for name in self.names(feature_names))

    @staticmethod
    def indices_from_text(text: str, feature_names=FEATURE_NAMES) -> list[int]:
        names = [line.strip() for line in text.splitlines() if line.strip()]
        unknown = [n for n in names if n not in feature_names]
        if unknown:
            raise DataError(f"unknown feature names: {unknown}")
        return [list(feature_names).index(n) for n in names]


def mrmr_select(feature_matrix, labels, k: int, scheme: str = "quotient") -> SelectionResult:
    """Greedy mRMR.

    The first pick maximises F. Each later pick maximises
    ``F / max(EPS, mean |r|)`` (``scheme="quotient"``) or ``F - mean |r|``
    (``"difference"``), the mean running over features already picked.
    Scores within ``TIE_RTOL`` (relative) plus ``TIE_ATOL`` of the best are ties, and ties
    go to the lowest feature index.
    """
    X = np.asarray(feature_matrix, dtype=float)
    if X.ndim != 2:
        raise DataError("feature matrix must be 2-d")
    n_features = X.shape[1]
    if not 1 <= k <= n_features:
        raise DataError(f"k must be in 1..{n_features}, got {k}")
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")

    relevance = np.array([f_statistic(X[:, j], labels) for j in range(n_features)])
    redundancy_sum = np.zeros(n_features)
    selected: list[int] = []
    scores: list[float] = []
    remaining = list(range(n_features))

    first = _first_best(relevance)
    selected.append(first)
    scores.append(float(relevance[first]))
    remaining.remove(first)

    while len(selected) < k:
        last = selected[-1]
        for j in remaining:
            redundancy_sum[j] += abs(pearson(X[:, j], X[:, last]))
        cand = np.array(remaining)
        redundancy = redundancy_sum[cand] / len(selected)
        if scheme == "quotient":
            score = relevance[cand] / np.maximum(EPS, redundancy)
        else:
            score = relevance[cand] - redundancy
        best = _first_best(score)
        selected.append(int(cand[best]))
        scores.append(float(score[best]))
        remaining.remove(int(cand[best]))

    return SelectionResult(tuple(selected), tuple(scores))


def selection_curve(
    feature_matrix,
    labels,
    model_factory: Callable[[], object],
    ks: Iterable[int] | None = None,
    scheme: str = "quotient",
) -> dict[int, float]:
    """LOOCV accuracy of ``model_factory()`` trained on the top-k mRMR features, per k."""
    from .evaluation import loocv

    X = np.asarray(feature_matrix, dtype=float)
    if X.shape[0] == 0:
        raise DataError("empty dataset")
    ks = list(range(1, X.shape[1] + 1)) if ks is None else sorted(set(ks))
    ranking = mrmr_select(X, labels, max(ks), scheme=scheme).ranked_indices

    def trainer(Xtr, ytr):
        return model_factory().fit(Xtr, ytr)

    return {k: loocv(X[:, list(ranking[:k])], labels, trainer) for k in ks}


def choose_k(feature_matrix, labels, model_factory, ks=None, scheme: str = "quotient") -> int:
    """Smallest k reaching the best LOOCV accuracy."""
    curve = selection_curve(feature_matrix, labels, model_factory, ks=ks, scheme=scheme)
    best = max(curve.values())
    return min(k for k, acc in curve.items() if acc == best)
